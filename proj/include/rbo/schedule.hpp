#ifndef RBO_SCHEDULE_HPP
#define RBO_SCHEDULE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rbo/bitrev.hpp"

namespace rbo {

using Key = std::uint64_t;

/// One transmission of the broadcast cycle.
struct Frame {
  BitWidth k;
  Slot slot = 0;
  std::uint64_t index = 0;  // position in sorted order, reverse_bits(slot)
  Key key = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// The sorted, padded key sequence broadcast round robin in bit-reversed
/// slot order. Immutable once built.
class BroadcastCycle {
 public:
  /// Takes keys that are already sorted and exactly 2^k long. Throws
  /// std::invalid_argument otherwise.
  BroadcastCycle(BitWidth k, std::vector<Key> sorted_keys);

  BitWidth k() const { return k_; }
  std::uint64_t size() const { return keys_.size(); }
  std::span<const Key> sorted_keys() const { return keys_; }
  Key key_at(std::uint64_t index) const { return keys_[index]; }

  /// Frame transmitted at broadcaster time t; t is reduced modulo n.
  Frame frame_at(std::uint64_t t) const;

 private:
  BitWidth k_;
  std::vector<Key> keys_;
};

/// Sorts the keys and pads them to the next power of two by repeating the
/// largest key. Throws std::invalid_argument on empty input.
BroadcastCycle build_cycle(std::vector<Key> keys);

/// Smallest k with 2^k >= count.
BitWidth bit_width_for(std::uint64_t count);

}  // namespace rbo

#endif  // RBO_SCHEDULE_HPP
