#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbo/nsi.hpp"
#include "rbo/random.hpp"
#include "rbo/schedule.hpp"
#include "rbo/sim.hpp"
#include "rbo/verify.hpp"
#include "rbo/wire.hpp"

namespace rbo::cli {

namespace {

using json = nlohmann::ordered_json;

/// Raised for bad input that is not a flag syntax problem (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw UsageError(what + ": '" + text + "' is not a decimal unsigned integer");
  }
  return v;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RBO_SEED"); env != nullptr && *env != '\0') {
    return parse_u64(env, "RBO_SEED");
  }
  return 1;
}

std::vector<Key> read_keys(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read key file '" + path + "'");
  std::vector<Key> keys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    keys.push_back(parse_u64(line.substr(first, last - first + 1),
                             path + ":" + std::to_string(line_no)));
  }
  if (keys.empty()) throw UsageError("no keys");
  return keys;
}

BroadcastCycle load_cycle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read cycle file '" + path + "'");
  try {
    return wire::read_cycle(in);
  } catch (const wire::Error& e) {
    throw UsageError("cycle file '" + path + "': " + e.what());
  }
}

// --- build ----------------------------------------------------------------

struct BuildArgs {
  std::string keys_path;
  std::string out_path;
};

int cmd_build(const BuildArgs& args, std::ostream& out) {
  std::vector<Key> keys = read_keys(args.keys_path);
  const std::size_t input_count = keys.size();
  const BroadcastCycle cycle = build_cycle(std::move(keys));
  std::ofstream file(args.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write '" + args.out_path + "'");
  wire::write_cycle(file, cycle);
  file.close();
  if (!file) throw UsageError("failed writing '" + args.out_path + "'");

  json summary;
  summary["tool"] = "rbo";
  summary["version"] = kVersion;
  summary["command"] = "build";
  summary["input_keys"] = input_count;
  summary["k"] = cycle.k().value();
  summary["n"] = cycle.size();
  summary["output"] = args.out_path;
  out << summary.dump() << '\n';
  return kOk;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string cycle_path;
  std::string lo;
  std::string hi;
  std::uint64_t start = 0;
  double p = 1.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t trials = 1;
  std::uint64_t horizon_cycles = 64;
  std::string format = "csv";
  unsigned threads = 1;
  bool full_horizon = false;
};

std::string optional_text(const std::optional<std::uint64_t>& v, const char* none) {
  return v ? std::to_string(*v) : std::string(none);
}

json optional_json(const std::optional<std::uint64_t>& v) {
  return v ? json(*v) : json(nullptr);
}

json trial_json(const TrialRecord& r, unsigned k, double p, Slot start) {
  json row;
  row["trial"] = r.trial;
  row["k"] = k;
  row["p"] = p;
  row["seed"] = r.seed;
  row["start_slot"] = start;
  row["tau"] = optional_json(r.stats.tau);
  row["en_tau"] = r.stats.en_tau;
  row["hits"] = r.stats.hits;
  row["misses_first_cycle"] = r.stats.misses_first_cycle;
  row["misses_total"] = r.stats.misses_total;
  row["ee_total"] = r.stats.ee_total;
  row["converged_cycle"] = optional_json(r.stats.converged_cycle);
  return row;
}

json summary_json(const Summary& s) {
  return json{{"mean", s.mean}, {"std_error", s.std_error}, {"max", s.max}};
}

json aggregate_json(const MonteCarloReport& report) {
  json agg;
  agg["k"] = report.k;
  agg["p"] = report.p;
  agg["trials"] = report.trials;
  agg["empty_query"] = report.empty_query;
  agg["mean_misses_total"] = report.misses_total.mean;
  agg["mean_misses_first_cycle"] = report.misses_first_cycle.mean;
  agg["mean_misses_after_first_cycle"] = report.misses_after_first_cycle.mean;
  agg["misses_total"] = summary_json(report.misses_total);
  agg["misses_first_cycle"] = summary_json(report.misses_first_cycle);
  agg["misses_after_first_cycle"] = summary_json(report.misses_after_first_cycle);
  agg["en_tau"] = summary_json(report.en_tau);
  agg["in_range_wakeups"] = report.in_range_wakeups;
  agg["successful_hits"] = report.successful_hits;
  agg["hit_rate"] = report.hit_rate;
  agg["hit_rate_std_error"] = report.hit_rate_std_error;
  agg["horizon_hits"] = report.horizon_hits;
  json bounds = json::array();
  for (const BoundCheck& b : report.bounds) {
    bounds.push_back({{"name", b.name},
                      {"formula", b.formula},
                      {"bound", b.bound},
                      {"measured", b.measured},
                      {"std_error", b.std_error},
                      {"status", !b.applicable ? "N/A" : (b.passed ? "PASS" : "FAIL")}});
  }
  agg["bounds"] = std::move(bounds);
  agg["status"] = report.all_passed() ? "PASS" : "FAIL";
  return agg;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  auto cycle = std::make_shared<const BroadcastCycle>(load_cycle(args.cycle_path));
  const Key lo = parse_u64(args.lo, "--lo");
  const Key hi = parse_u64(args.hi, "--hi");
  if (lo > hi) throw UsageError("--lo must not exceed --hi");
  if (!cycle->k().contains(args.start)) {
    throw UsageError("--start must be below the cycle length " + std::to_string(cycle->size()));
  }
  const std::uint64_t seed = args.seed ? *args.seed : default_seed();

  MonteCarloConfig config;
  config.session.cycle = cycle;
  config.session.query = QueryInterval::make(lo, hi);
  config.session.start_slot = args.start;
  config.session.channel = ChannelModel::bernoulli(args.p, seed);
  config.session.horizon_cycles = args.horizon_cycles;
  config.session.stop_on_convergence = !args.full_horizon;
  config.trials = args.trials;
  config.threads = args.threads;

  std::vector<TrialRecord> records;
  const MonteCarloReport report = run_monte_carlo(config, &records);
  const unsigned k = cycle->k().value();

  json metadata;
  metadata["tool"] = "rbo";
  metadata["version"] = kVersion;
  metadata["master_seed"] = seed;
  metadata["generator"] = std::string(SplitMix64::kName);
  metadata["config"] = {{"cycle", args.cycle_path},
                        {"k", k},
                        {"lo", lo},
                        {"hi", hi},
                        {"start", args.start},
                        {"p", args.p},
                        {"trials", args.trials},
                        {"horizon_cycles", args.horizon_cycles},
                        {"stop_on_convergence", !args.full_horizon},
                        {"threads", args.threads}};

  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  if (args.format == "json") {
    json doc;
    doc["metadata"] = metadata;
    doc["metadata"]["wall_clock_ms"] = elapsed_ms();
    json rows = json::array();
    for (const auto& r : records) rows.push_back(trial_json(r, k, args.p, args.start));
    doc["trials"] = std::move(rows);
    doc["aggregate"] = aggregate_json(report);
    out << doc.dump(2) << '\n';
  } else {
    // Everything up to the aggregate line is deterministic for fixed flags.
    out << "# " << metadata.dump() << '\n';
    out << "trial,k,p,seed,start_slot,tau,en_tau,hits,misses_first_cycle,misses_total,ee_total,"
           "converged_cycle\n";
    const std::string p_text = format_double(args.p);
    for (const auto& r : records) {
      out << r.trial << ',' << k << ',' << p_text << ',' << r.seed << ',' << args.start << ','
          << optional_text(r.stats.tau, "") << ',' << r.stats.en_tau << ',' << r.stats.hits << ','
          << r.stats.misses_first_cycle << ',' << r.stats.misses_total << ','
          << r.stats.ee_total << ',' << optional_text(r.stats.converged_cycle, "never") << '\n';
    }
    json agg = aggregate_json(report);
    agg["type"] = "aggregate";
    agg["metadata"] = metadata;
    agg["metadata"]["wall_clock_ms"] = elapsed_ms();
    out << agg.dump() << '\n';
  }
  return report.all_passed() ? kOk : kPropertyFailure;
}

// --- verify ---------------------------------------------------------------

int cmd_verify(unsigned k_max, std::ostream& out) {
  verify::Options options;
  options.k_max = k_max;
  bool all = true;
  for (const auto& r : verify::run_all(options)) {
    all = all && r.passed;
    out << (r.passed ? "PASS" : "FAIL") << " k=" << r.k << ' ' << r.name << " cases=" << r.cases;
    if (!r.detail.empty()) out << ' ' << r.detail;
    if (!r.passed) out << " witness: " << r.witness;
    out << '\n';
  }
  out << (all ? "PASS" : "FAIL") << " all properties for k <= " << k_max << '\n';
  return all ? kOk : kPropertyFailure;
}

// --- nsi ------------------------------------------------------------------

struct NsiArgs {
  unsigned k = 0;
  std::uint64_t t = 0;
  std::uint64_t r1 = 0;
  std::uint64_t r2 = 0;
  bool oracle = false;
};

int cmd_nsi(const NsiArgs& args, std::ostream& out) {
  try {
    const BitWidth k(args.k);
    const Slot slot = args.oracle ? nsi_oracle(k, args.t, args.r1, args.r2)
                                  : nsi_fast(k, args.t, args.r1, args.r2);
    out << slot << '\n';
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-reversal broadcast scheduling toolkit", "rbo"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Sort and pad a key list into a cycle file");
  build_cmd->add_option("keys", build.keys_path, "Newline-separated decimal keys")->required();
  build_cmd->add_option("out", build.out_path, "Cycle file to write")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run receiver sessions against a cycle file");
  sim_cmd->add_option("cycle", sim.cycle_path, "Cycle file")->required();
  sim_cmd->add_option("--lo", sim.lo, "Lowest searched key")->required();
  sim_cmd->add_option("--hi", sim.hi, "Highest searched key")->required();
  sim_cmd->add_option("--start", sim.start, "Broadcaster slot of the first wake-up");
  sim_cmd->add_option("--p", sim.p, "Reception probability in (0, 1]")
      ->check([](const std::string& text) -> std::string {
        try {
          const double v = std::stod(text);
          return v > 0.0 && v <= 1.0 ? "" : "p must lie in (0, 1]";
        } catch (const std::exception&) {
          return "p must be a number";
        }
      });
  sim_cmd->add_option("--seed", sim.seed, "Master seed (default: $RBO_SEED or 1)");
  sim_cmd->add_option("--trials", sim.trials, "Number of independent sessions")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--horizon-cycles", sim.horizon_cycles, "Session length cap in cycles")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--format", sim.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--full-horizon", sim.full_horizon,
                    "Keep running after the bounds settle");

  unsigned k_max = 8;
  auto* verify_cmd = app.add_subcommand("verify", "Exhaustively check the protocol properties");
  verify_cmd->add_option("--k-max", k_max, "Largest bit width to enumerate")
      ->check(CLI::Range(0U, 12U));

  NsiArgs nsi;
  auto* nsi_cmd = app.add_subcommand("nsi", "Next slot whose bit reversal lies in [r1, r2]");
  nsi_cmd->add_option("--k", nsi.k, "Bit width")->required();
  nsi_cmd->add_option("--t", nsi.t, "Current slot")->required();
  nsi_cmd->add_option("--r1", nsi.r1, "Lowest index")->required();
  nsi_cmd->add_option("--r2", nsi.r2, "Highest index")->required();
  nsi_cmd->add_flag("--oracle", nsi.oracle, "Use the linear scan");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*build_cmd) return cmd_build(build, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*verify_cmd) return cmd_verify(k_max, out);
    if (*nsi_cmd) return cmd_nsi(nsi, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace rbo::cli
