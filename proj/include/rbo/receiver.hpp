#ifndef RBO_RECEIVER_HPP
#define RBO_RECEIVER_HPP

#include <cstdint>
#include <optional>
#include <string_view>

#include "rbo/bitrev.hpp"
#include "rbo/schedule.hpp"

namespace rbo {

/// Closed key interval [lo, hi] the receiver is searching for.
struct QueryInterval {
  Key lo = 0;
  Key hi = 0;

  /// Throws std::invalid_argument when lo > hi.
  static QueryInterval make(Key lo, Key hi);
  bool contains(Key key) const { return lo <= key && key <= hi; }

  friend bool operator==(const QueryInterval&, const QueryInterval&) = default;
};

enum class EventKind : std::uint8_t {
  kHit,
  kNarrowedLow,
  kNarrowedHigh,
  kSkipped,
  kReceptionFailed,
  kConcludedEmpty,
};

std::string_view to_string(EventKind kind);

/// Outcome of one slot. `key` is set for kHit and the narrowing kinds,
/// `bound` holds the new lb / ub after a narrowing.
struct ReceiverEvent {
  EventKind kind = EventKind::kSkipped;
  Key key = 0;
  std::int64_t bound = 0;

  friend bool operator==(const ReceiverEvent&, const ReceiverEvent&) = default;
};

/// Interval-search state of one receiver session: the cycle width, the
/// query, and the index bounds [lb, ub] still worth listening to.
class ReceiverState {
 public:
  static ReceiverState start(BitWidth k, QueryInterval query);

  BitWidth k() const { return k_; }
  const QueryInterval& query() const { return query_; }
  std::int64_t lb() const { return lb_; }
  std::int64_t ub() const { return ub_; }

  /// lb > ub: no key of the cycle lies in the query interval.
  bool is_done() const { return lb_ > ub_; }

  bool should_listen(Slot slot) const;

  /// Applies a frame heard at `slot`; std::nullopt is a failed reception,
  /// which leaves the bounds unchanged. Throws std::logic_error when the
  /// session is done or the slot is not one the receiver listens to.
  ReceiverEvent on_frame(Slot slot, std::optional<Key> received);

  /// Earliest slot after `current` whose index lies in [lb, ub].
  /// Throws std::logic_error when the session is done.
  Slot next_wakeup(Slot current) const;

 private:
  ReceiverState(BitWidth k, QueryInterval query);

  BitWidth k_;
  QueryInterval query_;
  std::int64_t lb_ = 0;
  std::int64_t ub_ = 0;
};

}  // namespace rbo

#endif  // RBO_RECEIVER_HPP
