#include "hymos/sched/demand.hpp"

#include <algorithm>

#include "hymos/error.hpp"

namespace hymos::sched {

DemandMatrixSet::DemandMatrixSet(std::size_t n) : n_(n) {
  for (auto& m : m_) m.assign(n * n, 0);
}

void DemandMatrixSet::set(std::size_t p, std::size_t i, std::size_t j, uint64_t bytes) {
  if (i == j && bytes != 0) throw InvariantError("demand matrix diagonal must stay zero");
  m_.at(p).at(i * n_ + j) = bytes;
}

bool DemandMatrixSet::empty() const {
  return std::all_of(m_.begin(), m_.end(),
                     [](const auto& m) { return std::all_of(m.begin(), m.end(), [](uint64_t v) { return v == 0; }); });
}

}  // namespace hymos::sched
