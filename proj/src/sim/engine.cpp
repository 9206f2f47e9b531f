#include "hymos/sim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <thread>
#include <unordered_map>

#include "hymos/error.hpp"
#include "hymos/p4ir/validate.hpp"
#include "hymos/sched/scheduler.hpp"
#include "hymos/sim/traffic.hpp"
#include "hymos/switchcore/capacity.hpp"
#include "hymos/switchcore/linecard.hpp"
#include "hymos/xlate/encap.hpp"
#include "hymos/xlate/translate.hpp"

namespace hymos::sim {
namespace {

using switchcore::IngressOutcome;
using switchcore::LineCard;
using switchcore::Packet;

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

class Engine {
 public:
  Engine(const ExperimentConfig& cfg, Mode mode) : cfg_(cfg), mode_(mode) {
    validate_experiment(cfg);
    const auto& topo = cfg.topology;
    if (mode == Mode::kHymos) {
      auto tr = xlate::translate(cfg.program, cfg.entries, topo, {cfg.internal_ether_type});
      for (uint32_t c = 0; c < topo.card_count(); ++c) {
        auto inst = std::make_shared<const p4ir::ProgramInstance>(tr.cards[c].program, tr.card_entries(c, cfg.entries));
        cards_.emplace_back(c, topo.card_count(), inst, topo.cards[c].ports, cfg.voq_cap_bytes);
      }
      matchings_ = sched::enumerate_matchings(topo.card_count());
      sched_opts_.order = cfg.priority_order;
      sched_opts_.pair_budget = switchcore::pair_slot_budgets(topo, cfg.slot_ns, cfg.bandwidth_model);
    } else {
      p4ir::require_valid(cfg.program);
      std::vector<xlate::PortSpec> all;
      for (const auto& c : topo.cards) all.insert(all.end(), c.ports.begin(), c.ports.end());
      auto inst = std::make_shared<const p4ir::ProgramInstance>(cfg.program, cfg.entries);
      cards_.emplace_back(0, 1, inst, all);
    }
    xlate::PortMap ports(topo);
    card_of_.assign(xlate::kMaxGlobalPort + 1, 0);
    for (auto g : topo.all_ports()) card_of_[g] = mode == Mode::kHymos ? ports.locate(g)->card : 0;
    for (const auto& grp : cfg.traffic) {
      for (auto s : grp.sources) {
        const auto loc = *ports.locate(s);
        sources_.emplace_back(grp, s, topo.cards[loc.card].ports[loc.local].rate_gbps, cfg.seed);
      }
    }
  }

  StatsReport run() {
    const double window_start = static_cast<double>(cfg_.warmup_slots) * cfg_.slot_ns;
    const double window_end = static_cast<double>(cfg_.duration_slots) * cfg_.slot_ns;
    const uint64_t last_slot = cfg_.duration_slots + cfg_.max_drain_slots;

    std::vector<Arrival> batch;
    std::vector<Packet> emitted;
    std::deque<sched::DemandMatrixSet> snapshots;
    std::vector<double> latencies;
    std::array<double, sched::kPriorityCount> prio_sum{};
    std::unordered_map<uint64_t, uint64_t> last_id;
    double offered_bits = 0, delivered_bits = 0;
    uint64_t next_id = 0, injected = 0, departed = 0, dropped = 0, in_flight = 0;

    for (uint64_t slot = 0; slot < last_slot; ++slot) {
      const bool open = slot < cfg_.duration_slots;
      if (!open && in_flight == 0) break;
      const double t0 = static_cast<double>(slot) * cfg_.slot_ns;
      const double t1 = t0 + cfg_.slot_ns;

      if (open) {
        batch.clear();
        for (auto& s : sources_) s.generate_until(t1, batch);
        std::stable_sort(batch.begin(), batch.end(), [](const Arrival& a, const Arrival& b) {
          return a.time_ns != b.time_ns ? a.time_ns < b.time_ns : a.port < b.port;
        });
        for (auto& a : batch) {
          Packet p;
          p.id = next_id++;
          p.bytes = std::move(a.frame);
          p.wire_size = p.offered_size = a.size;
          p.ingress_port = a.port;
          p.arrival_ns = a.time_ns;
          p.measured = a.time_ns >= window_start && a.time_ns < window_end;
          ++injected;
          if (p.measured) {
            offered_bits += a.size * 8.0;
            ++report_.packets_offered;
          }
          bool measured = p.measured;
          auto outcome = switchcore::card_ingress(cards_[card_of_[a.port]], std::move(p), a.time_ns, cfg_.processing_ns);
          if (outcome != IngressOutcome::kLocal && outcome != IngressOutcome::kFabric) {
            ++dropped;
            if (measured) ++report_.drops;
          }
        }
      }

      // VOQ occupancy peaks after arrivals, before the fabric drains it.
      if (open) {
        uint64_t max_voq = 0;
        for (const auto& c : cards_) max_voq = std::max(max_voq, c.max_voq_bytes());
        report_.max_voq_trace.push_back(max_voq);
        if (slot >= cfg_.warmup_slots) report_.max_voq_bytes = std::max(report_.max_voq_bytes, max_voq);
      }

      if (mode_ == Mode::kHymos) schedule_and_transfer(slot, t1, snapshots);

      for (auto& card : cards_) {
        for (std::size_t k = 0; k < card.port_count(); ++k) switchcore::card_egress_drain(card, k, t1, emitted);
      }
      for (auto& e : emitted) {
        ++departed;
        if (xlate::is_internal_frame(e.bytes, cfg_.internal_ether_type)) ++report_.invariants.leaked_internal;
        auto key = (uint64_t{e.ingress_port} << 24) | (uint64_t{e.egress_port} << 4) | e.pcp;
        auto [it, fresh] = last_id.try_emplace(key, e.id);
        if (!fresh) {
          if (e.id < it->second) ++report_.invariants.reordering;
          it->second = e.id;
        }
        if (!e.measured) continue;
        double lat = e.departure_ns - e.arrival_ns;
        const auto& port = cards_[card_of_[e.egress_port]].port(*cards_[card_of_[e.egress_port]].local_index(e.egress_port));
        if (lat + 1e-6 < port.serialization_ns(e.wire_size)) ++report_.invariants.latency_floor;
        latencies.push_back(lat);
        prio_sum[e.pcp] += lat;
        ++report_.per_priority[e.pcp].packets;
        if (e.departure_ns <= window_end) {
          delivered_bits += e.offered_size * 8.0;
          ++report_.packets_delivered;
        }
      }
      emitted.clear();

      in_flight = 0;
      for (const auto& c : cards_) in_flight += c.queued_packets();
      if (injected != departed + dropped + in_flight) ++report_.invariants.conservation;
    }

    const double window_ns = window_end - window_start;
    report_.offered_gbps = offered_bits / window_ns;
    report_.delivered_gbps = delivered_bits / window_ns;
    report_.in_flight_at_end = in_flight;
    report_.latency_samples = latencies.size();
    if (!latencies.empty()) {
      double sum = 0;
      for (double l : latencies) sum += l;
      report_.mean_lat_us = sum / static_cast<double>(latencies.size()) / 1000.0;
      std::sort(latencies.begin(), latencies.end());
      report_.p50_us = percentile(latencies, 0.50) / 1000.0;
      report_.p99_us = percentile(latencies, 0.99) / 1000.0;
    }
    for (std::size_t p = 0; p < sched::kPriorityCount; ++p) {
      auto n = report_.per_priority[p].packets;
      if (n) report_.per_priority[p].mean_latency_us = prio_sum[p] / static_cast<double>(n) / 1000.0;
    }
    return std::move(report_);
  }

 private:
  // Receiver -> scheduler -> transmitters, run back to back. The scheduler
  // sees the snapshot taken pipeline_depth slots ago.
  void schedule_and_transfer(uint64_t slot, double slot_end, std::deque<sched::DemandMatrixSet>& snapshots) {
    snapshots.push_back(switchcore::snapshot_demand(cards_));
    if (snapshots.size() > cfg_.pipeline_depth + 1) snapshots.pop_front();
    if (snapshots.size() < cfg_.pipeline_depth + 1) return;
    const auto& snap = snapshots.front();
    auto grants = sched::schedule(snap, *matchings_, sched_opts_);
    grants.slot = slot;
    auto check = sched::check_grants(grants, snap, cfg_.priority_order);
    report_.invariants.matching += check.matching_violations;
    report_.invariants.zero_grants += check.zero_grants;
    report_.invariants.priority += check.priority_violations;
    for (const auto& g : grants.grants) {
      auto res = switchcore::fabric_transfer(g, cards_[g.in], cards_[g.out], g.byte_budget, slot_end,
                                             cfg_.internal_ether_type);
      if (slot >= cfg_.warmup_slots) {
        ++report_.grants;
        if (res.wasted) ++report_.wasted_grants;
      }
    }
  }

  const ExperimentConfig& cfg_;
  Mode mode_;
  std::vector<LineCard> cards_;
  std::vector<uint32_t> card_of_;
  std::vector<PortSource> sources_;
  std::shared_ptr<const sched::MatchingSet> matchings_;
  sched::ScheduleOptions sched_opts_;
  StatsReport report_;
};

}  // namespace

StatsReport run(const ExperimentConfig& cfg) {
  Engine e(cfg, cfg.mode);
  return e.run();
}

StatsReport run_baseline(const ExperimentConfig& cfg) {
  Engine e(cfg, Mode::kBaseline);
  return e.run();
}

SweepParam sweep_param_from_name(std::string_view name) {
  if (name == "load") return SweepParam::kLoad;
  if (name == "packet_size" || name == "size") return SweepParam::kPacketSize;
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "' (expected load or packet_size)");
}

std::string_view sweep_param_name(SweepParam p) { return p == SweepParam::kLoad ? "load" : "packet_size"; }

ExperimentConfig with_param(const ExperimentConfig& cfg, SweepParam param, double value) {
  ExperimentConfig out = cfg;
  for (auto& g : out.traffic) {
    if (param == SweepParam::kLoad) {
      g.load = value;
    } else {
      if (!(value >= 0) || value != std::floor(value)) throw ConfigError("packet size must be a whole number of bytes");
      g.sizes = {{static_cast<uint32_t>(value), 1}};
    }
  }
  return out;
}

std::string format_param(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParam param, std::span<const double> values,
                            bool with_baseline, unsigned jobs) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  bool up = std::is_sorted(values.begin(), values.end());
  bool down = std::is_sorted(values.begin(), values.end(), std::greater<>());
  if (!up && !down) throw ConfigError("sweep values must be monotone");

  // Build and validate every point up front so errors surface before any run.
  std::vector<ExperimentConfig> points;
  for (double v : values) {
    points.push_back(with_param(cfg, param, v));
    validate_experiment(points.back());
  }

  std::vector<SweepRow> rows(values.size());
  auto work = [&](std::size_t i) {
    auto& row = rows[i];
    row.value = values[i];
    row.hymos = run(points[i]);
    row.hymos.param = format_param(values[i]);
    if (with_baseline) {
      row.baseline = run_baseline(points[i]);
      row.baseline->param = row.hymos.param;
      if (row.baseline->latency_samples > 0 && row.baseline->mean_lat_us > 0) {
        row.norm_latency = row.hymos.mean_lat_us / row.baseline->mean_lat_us;
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, values.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < values.size();) work(i);
    }));
  }
  for (auto& f : workers) f.get();
  return rows;
}

}  // namespace hymos::sim
