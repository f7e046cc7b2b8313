#ifndef RBO_SIM_HPP
#define RBO_SIM_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbo/bitrev.hpp"
#include "rbo/receiver.hpp"
#include "rbo/schedule.hpp"

namespace rbo {

/// Reception model. Bernoulli draws depend only on (seed, trial, receiver
/// time), so a session can be replayed and the draws for slots the receiver
/// slept through are still defined.
class ChannelModel {
 public:
  static ChannelModel perfect() { return ChannelModel(); }
  /// Throws std::invalid_argument unless 0 < p <= 1.
  static ChannelModel bernoulli(double p, std::uint64_t seed);

  bool is_perfect() const { return perfect_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  /// Seed of the draw stream used by one trial.
  std::uint64_t trial_seed(std::uint64_t trial) const;
  bool success(std::uint64_t trial, std::uint64_t receiver_time) const;

 private:
  ChannelModel() = default;

  bool perfect_ = true;
  double p_ = 1.0;
  std::uint64_t seed_ = 0;
};

/// Sorted-order positions [first, last] of the keys inside a query; empty
/// (first == last + 1) when the cycle has none. Ground truth for the
/// harness only; the receiver never sees it.
struct MatchRange {
  std::int64_t first = 0;
  std::int64_t last = -1;

  bool empty() const { return first > last; }
  bool contains(std::int64_t index) const { return first <= index && index <= last; }
};

MatchRange match_range(const BroadcastCycle& cycle, const QueryInterval& query);

enum class TraceMode : std::uint8_t {
  kNone,
  kWakeups,    // one entry per wake-up
  kEverySlot,  // step slot by slot through should_listen, recording skips
};

struct SessionConfig {
  std::shared_ptr<const BroadcastCycle> cycle;
  QueryInterval query;
  Slot start_slot = 0;
  ChannelModel channel = ChannelModel::perfect();
  std::uint64_t trial = 0;
  std::uint64_t horizon_cycles = 1;
  bool stop_on_convergence = false;
  TraceMode trace = TraceMode::kNone;
};

struct EnergyStats {
  /// Receiver time of the first in-range slot or of concluding that the
  /// query is empty; unset if neither happened before the horizon.
  std::optional<std::uint64_t> tau;
  /// Wake-ups at receiver times 0..tau inclusive (whole run if tau unset).
  std::uint64_t en_tau = 0;
  /// Out-of-range keys actually received.
  std::uint64_t ee_total = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses_first_cycle = 0;
  std::uint64_t misses_total = 0;
  std::uint64_t wakeups = 0;
  std::uint64_t in_range_wakeups = 0;
  /// Cycle during which (lb, ub) first equalled the match range.
  std::optional<std::uint64_t> converged_cycle;
  bool concluded_empty = false;
  /// Bounds at receiver time n (or at the end of a shorter session).
  std::int64_t lb_after_first_cycle = 0;
  std::int64_t ub_after_first_cycle = 0;
  std::uint64_t receiver_time_end = 0;

  std::uint64_t misses_after_first_cycle() const { return misses_total - misses_first_cycle; }

  friend bool operator==(const EnergyStats&, const EnergyStats&) = default;
};

struct TraceEntry {
  std::uint64_t receiver_time = 0;
  Slot slot = 0;
  std::uint64_t index = 0;
  ReceiverEvent event;
  bool in_range = false;
  std::int64_t lb = 0;  // after the event
  std::int64_t ub = 0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SessionResult {
  EnergyStats stats;
  std::vector<TraceEntry> trace;
};

/// Runs one receiver session for receiver times 0 .. horizon_cycles * n - 1,
/// stopping early once the query is known to be empty (or once the bounds
/// have converged and tau is known, if requested). Wake-ups are counted
/// from receiver time 0.
SessionResult run_session(const SessionConfig& config);

using SessionRunner = std::function<SessionResult(const SessionConfig&)>;

// --- Monte Carlo --------------------------------------------------------

struct MonteCarloConfig {
  /// Template for every trial; the trial index is substituted per run.
  SessionConfig session;
  std::uint64_t trials = 1;
  unsigned threads = 1;
};

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t max = 0;
};

struct BoundCheck {
  std::string name;
  std::string formula;
  double bound = 0.0;
  double measured = 0.0;
  double std_error = 0.0;
  bool applicable = true;
  bool passed = true;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  EnergyStats stats;
};

struct MonteCarloReport {
  unsigned k = 0;
  double p = 1.0;
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::string generator;
  bool empty_query = false;
  Summary misses_total;
  Summary misses_first_cycle;
  Summary misses_after_first_cycle;
  Summary en_tau;
  std::uint64_t in_range_wakeups = 0;
  std::uint64_t successful_hits = 0;
  double hit_rate = 0.0;
  /// Binomial standard error of the hit rate under reception probability p.
  double hit_rate_std_error = 0.0;
  /// Trials that had not converged when the horizon ran out.
  std::uint64_t horizon_hits = 0;
  std::vector<BoundCheck> bounds;

  bool all_passed() const;
};

/// Upper bounds on expected misses for a k-bit cycle at reception
/// probability p.
double expected_misses_bound(unsigned k, double p);
double expected_first_cycle_misses_bound(unsigned k, double p);
double expected_trailing_misses_bound(double p);

/// Runs `trials` sessions differing only in their channel draw streams.
/// Results do not depend on the thread count.
MonteCarloReport run_monte_carlo(const MonteCarloConfig& config,
                                 std::vector<TrialRecord>* records = nullptr);

// --- Exhaustive worst case ----------------------------------------------

/// Cycle with keys 10, 20, ..., 10 * 2^k.
BroadcastCycle spaced_key_cycle(BitWidth k);

/// Every distinct query position on a cycle of strictly increasing keys
/// with gaps of at least two: each nonempty index range [a, b] and each of
/// the n + 1 gaps between consecutive keys (and outside the key range).
std::vector<QueryInterval> all_query_positions(const BroadcastCycle& cycle);

struct SessionCase {
  Slot start = 0;
  QueryInterval query;
};

struct ExhaustiveReport {
  unsigned k = 0;
  std::uint64_t sessions = 0;
  std::uint64_t en_bound = 0;  // 2k + 1
  std::uint64_t ee_bound = 0;  // 4k + 2
  std::uint64_t max_tau = 0;
  std::uint64_t max_en_tau = 0;
  std::uint64_t max_ee = 0;
  SessionCase worst_en_tau;
  SessionCase worst_ee;
  std::uint64_t violations = 0;
  std::optional<SessionCase> first_violation;
  std::string first_violation_reason;

  bool passed() const { return violations == 0; }
};

/// Runs a perfect-channel session for every start slot and query position
/// and checks tau < n, en(tau) <= 2k + 1 and ee <= 4k + 2. The cycle must
/// satisfy the all_query_positions requirements. `runner` defaults to
/// run_session.
ExhaustiveReport exhaustive_bound_check(const BroadcastCycle& cycle,
                                        const SessionRunner& runner = {});

}  // namespace rbo

#endif  // RBO_SIM_HPP
