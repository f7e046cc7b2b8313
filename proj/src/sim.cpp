#include "rbo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rbo/random.hpp"

namespace rbo {

ChannelModel ChannelModel::bernoulli(double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("reception probability must lie in (0, 1]");
  }
  ChannelModel channel;
  channel.perfect_ = false;
  channel.p_ = p;
  channel.seed_ = seed;
  return channel;
}

std::uint64_t ChannelModel::trial_seed(std::uint64_t trial) const {
  return SplitMix64::nth(seed_, trial);
}

bool ChannelModel::success(std::uint64_t trial, std::uint64_t receiver_time) const {
  if (perfect_) return true;
  const std::uint64_t bits = SplitMix64::nth(trial_seed(trial), receiver_time);
  return SplitMix64::to_unit(bits) < p_;
}

MatchRange match_range(const BroadcastCycle& cycle, const QueryInterval& query) {
  const auto keys = cycle.sorted_keys();
  const auto lo = std::lower_bound(keys.begin(), keys.end(), query.lo);
  const auto hi = std::upper_bound(keys.begin(), keys.end(), query.hi);
  return {static_cast<std::int64_t>(lo - keys.begin()),
          static_cast<std::int64_t>(hi - keys.begin()) - 1};
}

SessionResult run_session(const SessionConfig& config) {
  if (!config.cycle) throw std::invalid_argument("session has no broadcast cycle");
  const BroadcastCycle& cycle = *config.cycle;
  const BitWidth k = cycle.k();
  const std::uint64_t n = k.cycle_length();
  if (!k.contains(config.start_slot)) throw std::invalid_argument("start slot out of range");
  if (config.horizon_cycles == 0) throw std::invalid_argument("horizon must be at least one cycle");
  if (config.horizon_cycles > (std::numeric_limits<std::uint64_t>::max() / 2) / n) {
    throw std::invalid_argument("horizon too long");
  }

  const MatchRange truth = match_range(cycle, config.query);
  const std::uint64_t horizon = config.horizon_cycles * n;
  const bool every_slot = config.trace == TraceMode::kEverySlot;
  const bool tracing = config.trace != TraceMode::kNone;

  SessionResult result;
  EnergyStats& stats = result.stats;
  ReceiverState state = ReceiverState::start(k, config.query);

  const auto converged = [&] { return state.lb() == truth.first && state.ub() == truth.last; };
  if (converged()) stats.converged_cycle = 0;

  bool first_cycle_recorded = false;
  const auto record_first_cycle = [&] {
    stats.lb_after_first_cycle = state.lb();
    stats.ub_after_first_cycle = state.ub();
    first_cycle_recorded = true;
  };

  std::uint64_t t = 0;
  Slot slot = config.start_slot;
  while (t < horizon) {
    if (config.stop_on_convergence && stats.converged_cycle && stats.tau) break;
    if (!first_cycle_recorded && t >= n) record_first_cycle();

    const std::uint64_t index = reverse_bits(slot, k);
    if (every_slot && !state.should_listen(slot)) {
      result.trace.push_back({t, slot, index, {EventKind::kSkipped, 0, 0}, false,
                              state.lb(), state.ub()});
      ++t;
      slot = (slot + 1) & k.mask();
      continue;
    }

    const bool in_range = truth.contains(static_cast<std::int64_t>(index));
    const bool received = config.channel.success(config.trial, t);
    const Key key = cycle.key_at(index);
    const ReceiverEvent event = state.on_frame(slot, received ? std::optional<Key>(key) : std::nullopt);

    ++stats.wakeups;
    if (in_range) {
      ++stats.in_range_wakeups;
    } else {
      ++stats.misses_total;
      if (t < n) ++stats.misses_first_cycle;
      if (received) ++stats.ee_total;
    }
    if (event.kind == EventKind::kHit) ++stats.hits;
    if (tracing) {
      result.trace.push_back({t, slot, index, event, in_range, state.lb(), state.ub()});
    }

    if (!stats.tau && (in_range || state.is_done())) {
      stats.tau = t;
      stats.en_tau = stats.wakeups;
    }
    if (!stats.converged_cycle && converged()) stats.converged_cycle = t / n;

    if (state.is_done()) {
      stats.concluded_empty = true;
      if (tracing) {
        result.trace.push_back({t, slot, index, {EventKind::kConcludedEmpty, 0, 0}, false,
                                state.lb(), state.ub()});
      }
      ++t;
      break;
    }

    if (every_slot) {
      ++t;
      slot = (slot + 1) & k.mask();
      continue;
    }
    const Slot next = state.next_wakeup(slot);
    std::uint64_t gap = (next - slot) & k.mask();
    if (gap == 0) gap = n;
    t += gap;
    slot = next;
  }

  if (!stats.tau) stats.en_tau = stats.wakeups;
  if (!first_cycle_recorded) record_first_cycle();
  stats.receiver_time_end = std::min(t, horizon);
  return result;
}

// --- Monte Carlo --------------------------------------------------------

double expected_misses_bound(unsigned k, double p) {
  return (8.0 * k + 4.0) / p + expected_trailing_misses_bound(p);
}

double expected_first_cycle_misses_bound(unsigned k, double p) {
  return (4.0 * k + 2.0) / p;
}

double expected_trailing_misses_bound(double p) {
  return 2.0 * (1.0 - p) / (p * p);
}

bool MonteCarloReport::all_passed() const {
  return std::all_of(bounds.begin(), bounds.end(),
                     [](const BoundCheck& b) { return !b.applicable || b.passed; });
}

namespace {

Summary summarize(const std::vector<EnergyStats>& stats,
                  std::uint64_t (*metric)(const EnergyStats&)) {
  Summary out;
  const auto count = static_cast<double>(stats.size());
  double sum = 0.0;
  for (const auto& s : stats) {
    const std::uint64_t v = metric(s);
    sum += static_cast<double>(v);
    out.max = std::max(out.max, v);
  }
  out.mean = sum / count;
  if (stats.size() > 1) {
    double sq = 0.0;
    for (const auto& s : stats) {
      const double d = static_cast<double>(metric(s)) - out.mean;
      sq += d * d;
    }
    out.std_error = std::sqrt(sq / (count - 1.0)) / std::sqrt(count);
  }
  return out;
}

BoundCheck check_bound(std::string name, std::string formula, double bound,
                       const Summary& summary, bool applicable) {
  BoundCheck check;
  check.name = std::move(name);
  check.formula = std::move(formula);
  check.bound = bound;
  check.measured = summary.mean;
  check.std_error = summary.std_error;
  check.applicable = applicable;
  check.passed = !applicable || summary.mean <= bound;
  return check;
}

}  // namespace

MonteCarloReport run_monte_carlo(const MonteCarloConfig& config,
                                 std::vector<TrialRecord>* records) {
  if (config.trials == 0) throw std::invalid_argument("monte carlo needs at least one trial");
  if (!config.session.cycle) throw std::invalid_argument("session has no broadcast cycle");

  std::vector<EnergyStats> stats(config.trials);
  const auto run_range = [&](unsigned worker, unsigned workers) {
    SessionConfig session = config.session;
    session.trace = TraceMode::kNone;
    for (std::uint64_t i = worker; i < config.trials; i += workers) {
      session.trial = i;
      stats[i] = run_session(session).stats;
    }
  };

  const unsigned workers = std::max(1U, config.threads);
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_range(w, workers);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const ChannelModel& channel = config.session.channel;
  MonteCarloReport report;
  report.k = config.session.cycle->k().value();
  report.p = channel.p();
  report.trials = config.trials;
  report.master_seed = channel.seed();
  report.generator = std::string(SplitMix64::kName);
  report.empty_query = match_range(*config.session.cycle, config.session.query).empty();

  report.misses_total = summarize(stats, [](const EnergyStats& s) { return s.misses_total; });
  report.misses_first_cycle =
      summarize(stats, [](const EnergyStats& s) { return s.misses_first_cycle; });
  report.misses_after_first_cycle =
      summarize(stats, [](const EnergyStats& s) { return s.misses_after_first_cycle(); });
  report.en_tau = summarize(stats, [](const EnergyStats& s) { return s.en_tau; });

  for (const auto& s : stats) {
    report.in_range_wakeups += s.in_range_wakeups;
    report.successful_hits += s.hits;
    if (!s.converged_cycle) ++report.horizon_hits;
  }
  if (report.in_range_wakeups > 0) {
    const auto total = static_cast<double>(report.in_range_wakeups);
    report.hit_rate = static_cast<double>(report.successful_hits) / total;
    report.hit_rate_std_error = std::sqrt(report.p * (1.0 - report.p) / total);
  }

  const double p = report.p;
  report.bounds.push_back(check_bound("misses_total", "(8k+4)/p + 2(1-p)/p^2",
                                      expected_misses_bound(report.k, p),
                                      report.misses_total, true));
  report.bounds.push_back(check_bound("misses_first_cycle", "(4k+2)/p",
                                      expected_first_cycle_misses_bound(report.k, p),
                                      report.misses_first_cycle, report.empty_query));
  report.bounds.push_back(check_bound("misses_after_first_cycle", "2(1-p)/p^2",
                                      expected_trailing_misses_bound(p),
                                      report.misses_after_first_cycle, true));

  if (records != nullptr) {
    records->clear();
    records->reserve(stats.size());
    for (std::uint64_t i = 0; i < stats.size(); ++i) {
      records->push_back({i, channel.trial_seed(i), stats[i]});
    }
  }
  return report;
}

// --- Exhaustive worst case ----------------------------------------------

BroadcastCycle spaced_key_cycle(BitWidth k) {
  std::vector<Key> keys(k.cycle_length());
  for (std::uint64_t i = 0; i < keys.size(); ++i) keys[i] = 10 * (i + 1);
  return BroadcastCycle(k, std::move(keys));
}

std::vector<QueryInterval> all_query_positions(const BroadcastCycle& cycle) {
  const auto keys = cycle.sorted_keys();
  if (keys.front() < 1 || keys.back() == std::numeric_limits<Key>::max()) {
    throw std::invalid_argument("keys need room for a gap below and above");
  }
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i] < keys[i - 1] + 2) {
      throw std::invalid_argument("keys must increase with gaps of at least two");
    }
  }
  const std::size_t n = keys.size();
  std::vector<QueryInterval> out;
  out.reserve(n * (n + 1) / 2 + n + 1);
  // Gap before index r: strictly between keys[r - 1] and keys[r].
  for (std::size_t r = 0; r <= n; ++r) {
    const Key gap = r == 0 ? keys[0] - 1 : keys[r - 1] + 1;
    out.push_back({gap, gap});
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) out.push_back({keys[a], keys[b]});
  }
  return out;
}

ExhaustiveReport exhaustive_bound_check(const BroadcastCycle& cycle,
                                        const SessionRunner& runner) {
  const BitWidth k = cycle.k();
  const std::uint64_t n = k.cycle_length();
  const auto shared = std::make_shared<const BroadcastCycle>(cycle);
  const auto queries = all_query_positions(cycle);

  ExhaustiveReport report;
  report.k = k.value();
  report.en_bound = 2 * k.value() + 1;
  report.ee_bound = 4 * k.value() + 2;

  SessionConfig config;
  config.cycle = shared;
  config.horizon_cycles = 2;
  config.stop_on_convergence = true;

  const auto fail = [&](const SessionCase& c, std::string reason) {
    if (report.violations++ == 0) {
      report.first_violation = c;
      report.first_violation_reason = std::move(reason);
    }
  };

  for (Slot s = 0; s < n; ++s) {
    config.start_slot = s;
    for (const QueryInterval& query : queries) {
      config.query = query;
      const EnergyStats stats = runner ? runner(config).stats : run_session(config).stats;
      const SessionCase here{s, query};
      ++report.sessions;

      if (!stats.tau || *stats.tau >= n) {
        fail(here, "tau >= n");
      } else if (*stats.tau > report.max_tau) {
        report.max_tau = *stats.tau;
      }
      if (stats.en_tau > report.max_en_tau || report.sessions == 1) {
        report.max_en_tau = std::max(report.max_en_tau, stats.en_tau);
        report.worst_en_tau = here;
      }
      if (stats.ee_total > report.max_ee || report.sessions == 1) {
        report.max_ee = std::max(report.max_ee, stats.ee_total);
        report.worst_ee = here;
      }
      if (stats.en_tau > report.en_bound) {
        fail(here, "en(tau) = " + std::to_string(stats.en_tau) + " > 2k+1");
      }
      if (stats.ee_total > report.ee_bound) {
        fail(here, "ee = " + std::to_string(stats.ee_total) + " > 4k+2");
      }
      if (!stats.converged_cycle || *stats.converged_cycle != 0) {
        fail(here, "bounds not settled within the first cycle");
      }
    }
  }
  return report;
}

}  // namespace rbo
