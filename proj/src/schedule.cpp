#include "rbo/schedule.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

namespace rbo {

BroadcastCycle::BroadcastCycle(BitWidth k, std::vector<Key> sorted_keys)
    : k_(k), keys_(std::move(sorted_keys)) {
  if (keys_.size() != k_.cycle_length()) {
    throw std::invalid_argument("broadcast cycle length must be exactly 2^k");
  }
  if (!std::is_sorted(keys_.begin(), keys_.end())) {
    throw std::invalid_argument("broadcast cycle keys must be sorted");
  }
}

Frame BroadcastCycle::frame_at(std::uint64_t t) const {
  Frame frame;
  frame.k = k_;
  frame.slot = t & k_.mask();
  frame.index = reverse_bits(frame.slot, k_);
  frame.key = keys_[frame.index];
  return frame;
}

BitWidth bit_width_for(std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("bit_width_for: zero count");
  if (count > (std::uint64_t{1} << BitWidth::kMax)) {
    throw std::invalid_argument("more than 2^62 keys");
  }
  return BitWidth(static_cast<unsigned>(std::bit_width(count - 1)));
}

BroadcastCycle build_cycle(std::vector<Key> keys) {
  if (keys.empty()) throw std::invalid_argument("no keys");
  const BitWidth k = bit_width_for(keys.size());
  std::sort(keys.begin(), keys.end());
  keys.resize(k.cycle_length(), keys.back());
  return BroadcastCycle(k, std::move(keys));
}

}  // namespace rbo
