#include "rbo/receiver.hpp"

#include <stdexcept>

#include "rbo/nsi.hpp"

namespace rbo {

QueryInterval QueryInterval::make(Key lo, Key hi) {
  if (lo > hi) throw std::invalid_argument("query interval lower key above upper key");
  return {lo, hi};
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kHit: return "hit";
    case EventKind::kNarrowedLow: return "narrowed_low";
    case EventKind::kNarrowedHigh: return "narrowed_high";
    case EventKind::kSkipped: return "skipped";
    case EventKind::kReceptionFailed: return "reception_failed";
    case EventKind::kConcludedEmpty: return "concluded_empty";
  }
  return "unknown";
}

ReceiverState::ReceiverState(BitWidth k, QueryInterval query)
    : k_(k),
      query_(query),
      lb_(0),
      ub_(static_cast<std::int64_t>(k.cycle_length()) - 1) {}

ReceiverState ReceiverState::start(BitWidth k, QueryInterval query) {
  return ReceiverState(k, QueryInterval::make(query.lo, query.hi));
}

bool ReceiverState::should_listen(Slot slot) const {
  if (is_done()) return false;
  const auto x = static_cast<std::int64_t>(reverse_bits(slot, k_));
  return lb_ <= x && x <= ub_;
}

ReceiverEvent ReceiverState::on_frame(Slot slot, std::optional<Key> received) {
  if (is_done()) throw std::logic_error("on_frame: session already concluded");
  if (!should_listen(slot)) throw std::logic_error("on_frame: receiver is not listening at this slot");
  if (!received) return {EventKind::kReceptionFailed, 0, 0};

  const auto x = static_cast<std::int64_t>(reverse_bits(slot, k_));
  const Key key = *received;
  if (key < query_.lo) {
    lb_ = x + 1;
    return {EventKind::kNarrowedLow, key, lb_};
  }
  if (key > query_.hi) {
    ub_ = x - 1;
    return {EventKind::kNarrowedHigh, key, ub_};
  }
  return {EventKind::kHit, key, 0};
}

Slot ReceiverState::next_wakeup(Slot current) const {
  if (is_done()) throw std::logic_error("next_wakeup: session already concluded");
  return nsi_fast(k_, current, static_cast<std::uint64_t>(lb_),
                  static_cast<std::uint64_t>(ub_));
}

}  // namespace rbo
