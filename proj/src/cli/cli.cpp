#include "hymos/cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "hymos/error.hpp"
#include "hymos/io.hpp"
#include "hymos/p4ir/json_io.hpp"
#include "hymos/switchcore/capacity.hpp"
#include "hymos/xlate/translate.hpp"

namespace hymos::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_row(const sim::StatsReport& r, const std::optional<double>* norm) {
  std::ostringstream s;
  s << r.param << ',' << fixed(r.offered_gbps) << ',' << fixed(r.delivered_gbps) << ',' << fixed(r.mean_lat_us) << ','
    << fixed(r.p50_us) << ',' << fixed(r.p99_us) << ',' << r.wasted_grants << ',' << r.drops << ',' << r.max_voq_bytes;
  if (norm) s << ',' << (norm->has_value() ? fixed(**norm) : std::string("nan"));
  return s.str();
}

uint64_t parse_seed(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid ") + what + " '" + text + "'");
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid value '" + item + "' in --values");
    }
  }
  if (out.empty()) throw UsageError("--values needs at least one number");
  return out;
}

struct Options {
  std::string program, entries, topology, out_dir, experiment, out, param, values, seed, bandwidth_model = "table";
  std::string ether_type;
  bool baseline = false;
  unsigned jobs = 0;
};

int cmd_translate(const Options& o, std::ostream& out) {
  auto program = p4ir::load_program(read_text_file(o.program));
  std::vector<p4ir::TableEntry> entries;
  if (!o.entries.empty()) entries = p4ir::load_entries(read_text_file(o.entries), program);
  auto topo = xlate::load_topology(read_text_file(o.topology));
  xlate::TranslateOptions opts;
  if (!o.ether_type.empty()) {
    auto v = parse_seed(o.ether_type, "--ether-type");
    if (v > 0xFFFF) throw UsageError("--ether-type must fit in 16 bits");
    opts.internal_ether_type = static_cast<uint16_t>(v);
  }
  auto result = xlate::translate(program, entries, topo, opts);

  fs::create_directories(o.out_dir);
  bool same = true;
  for (const auto& c : result.cards) {
    auto base = fs::path(o.out_dir) / ("card" + std::to_string(c.card));
    write_file_atomic(base.string() + ".program.json", p4ir::program_to_json(c.program).dump(2) + "\n");
    auto all = result.card_entries(c.card, entries);
    write_file_atomic(base.string() + ".entries.json", p4ir::entries_to_json(all, c.program).dump(2) + "\n");
    same = same && c.program.tables.size() == result.cards.front().program.tables.size();
  }
  for (const auto& c : result.cards) {
    out << "card " << c.card << ": " << c.program.tables.size() << " tables, " << c.synthesized_entries.size()
        << " synthesized entries\n";
  }
  out << result.cards.size() << " cards";
  if (same) out << ", " << result.cards.front().program.tables.size() << " tables each";
  out << "\n";
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  auto topo = xlate::load_topology(read_text_file(o.topology));
  xlate::validate_topology(topo, false);
  auto model = switchcore::bandwidth_model_from_name(o.bandwidth_model);
  auto report = switchcore::check_nonblocking(topo, model);
  bool all_ok = true;
  out << "card  ports_gbps  link_gbps  utilization  status\n";
  for (const auto& c : report) {
    char line[128];
    std::snprintf(line, sizeof line, "%4u  %10.1f  %9.1f  %10.1f%%  %s\n", c.card, c.port_sum_gbps, c.link_gbps,
                  c.utilization * 100, c.nonblocking ? "non-blocking" : "BLOCKING");
    out << line;
    all_ok = all_ok && c.nonblocking;
  }
  return all_ok ? kExitOk : kExitCapacity;
}

sim::ExperimentConfig load_config(const Options& o, const char* env_seed) {
  auto cfg = sim::load_experiment(o.experiment);
  if (!o.seed.empty()) {
    cfg.seed = parse_seed(o.seed, "--seed");
  } else if (env_seed && *env_seed) {
    cfg.seed = parse_seed(env_seed, "HYMOS_SEED");
  }
  return cfg;
}

void emit_csv(const Options& o, const std::string& csv, std::ostream& out) {
  if (o.out.empty() || o.out == "-") {
    out << csv;
  } else {
    write_file_atomic(o.out, csv);
  }
}

int cmd_run(const Options& o, std::ostream& out, const char* env_seed) {
  auto cfg = load_config(o, env_seed);
  sim::SweepRow row;
  row.hymos = sim::run(cfg);
  row.hymos.param = "run";
  if (o.baseline) {
    row.baseline = sim::run_baseline(cfg);
    if (row.baseline->latency_samples > 0 && row.baseline->mean_lat_us > 0) {
      row.norm_latency = row.hymos.mean_lat_us / row.baseline->mean_lat_us;
    }
  }
  emit_csv(o, format_csv({&row, 1}, o.baseline), out);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, const char* env_seed) {
  auto values = parse_values(o.values);
  sim::SweepParam param;
  try {
    param = sim::sweep_param_from_name(o.param);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  auto cfg = load_config(o, env_seed);
  auto rows = sim::sweep(cfg, param, values, o.baseline, o.jobs);
  emit_csv(o, format_csv(rows, o.baseline), out);
  return kExitOk;
}

}  // namespace

std::string format_csv(std::span<const sim::SweepRow> rows, bool with_baseline) {
  std::string s = kCsvHeader;
  if (with_baseline) s += ",norm_latency";
  s += '\n';
  for (const auto& r : rows) {
    s += csv_row(r.hymos, with_baseline ? &r.norm_latency : nullptr);
    s += '\n';
  }
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const char* env_seed) {
  CLI::App app{"Hybrid modular switch toolkit: translate, check, run, sweep"};
  app.name("hymos");
  app.require_subcommand(1);
  Options o;

  auto* tr = app.add_subcommand("translate", "Split a switch program into per-card programs");
  tr->add_option("--program", o.program, "Program JSON")->required();
  tr->add_option("--entries", o.entries, "Table entries JSON");
  tr->add_option("--topology", o.topology, "Topology JSON")->required();
  tr->add_option("--out-dir", o.out_dir, "Directory for card<i>.*.json")->required();
  tr->add_option("--ether-type", o.ether_type, "Internal EtherType (default 0x88B5)");

  auto* ck = app.add_subcommand("check", "Check that every card's PCI-e link carries its ports");
  ck->add_option("--topology", o.topology, "Topology JSON")->required();
  ck->add_option("--bandwidth-model", o.bandwidth_model, "table | table_aggregate | physical");

  auto* rn = app.add_subcommand("run", "Simulate one experiment");
  auto* sw = app.add_subcommand("sweep", "Simulate an experiment over a list of loads or packet sizes");
  for (auto* sub : {rn, sw}) {
    sub->add_option("--experiment", o.experiment, "Experiment JSON")->required();
    sub->add_option("--out", o.out, "CSV output file (default stdout)");
    sub->add_flag("--baseline", o.baseline, "Also run the monolithic baseline and add norm_latency");
    sub->add_option("--seed", o.seed, "Seed (overrides HYMOS_SEED and the config)");
  }
  sw->add_option("--param", o.param, "load | packet_size")->required();
  sw->add_option("--values", o.values, "Comma-separated values")->required();
  sw->add_option("--jobs", o.jobs, "Parallel sweep points (0 = all cores)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (tr->parsed()) return cmd_translate(o, out);
    if (ck->parsed()) return cmd_check(o, out);
    if (rn->parsed()) return cmd_run(o, out, env_seed);
    return cmd_sweep(o, out, env_seed);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace hymos::cli
