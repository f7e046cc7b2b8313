#ifndef RBO_BITREV_HPP
#define RBO_BITREV_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace rbo {

using Slot = std::uint64_t;

/// Bit width k of a broadcast cycle of length n = 2^k.
class BitWidth {
 public:
  static constexpr unsigned kMax = 62;

  constexpr BitWidth() = default;
  /// Throws std::out_of_range when k > kMax.
  explicit BitWidth(unsigned k);

  constexpr unsigned value() const { return k_; }
  constexpr std::uint64_t cycle_length() const { return std::uint64_t{1} << k_; }
  constexpr std::uint64_t mask() const { return cycle_length() - 1; }
  constexpr bool contains(std::uint64_t x) const { return x < cycle_length(); }

  friend constexpr auto operator<=>(BitWidth, BitWidth) = default;

 private:
  unsigned k_ = 0;
};

/// {start + stride * j : 0 <= j < count}
struct ArithmeticProgression {
  std::uint64_t start = 0;
  std::uint64_t stride = 1;
  std::uint64_t count = 0;

  std::uint64_t at(std::uint64_t j) const { return start + stride * j; }
  std::uint64_t back() const { return at(count - 1); }
  bool contains(std::uint64_t x) const;

  friend bool operator==(const ArithmeticProgression&, const ArithmeticProgression&) = default;
};

/// One segment of the slot sequence following a start slot: the slots
/// [anchor, anchor + 2^level) where anchor has exactly `level` trailing
/// zero bits (or anchor == 0 and level == k).
struct SegmentDescriptor {
  Slot anchor = 0;
  unsigned level = 0;

  std::uint64_t slot_count() const { return std::uint64_t{1} << level; }

  friend bool operator==(const SegmentDescriptor&, const SegmentDescriptor&) = default;
};

enum class Branch : int { kLeft = -1, kRight = 1 };

/// Closed form of a balanced subtree: {center + i * stride : |i| <= halfwidth}.
struct SubtreeDescriptor {
  std::uint64_t center = 0;
  std::uint64_t stride = 1;
  std::uint64_t halfwidth = 0;

  std::uint64_t size() const { return 2 * halfwidth + 1; }
  std::uint64_t min() const { return center - stride * halfwidth; }
  std::uint64_t max() const { return center + stride * halfwidth; }
  bool contains(std::uint64_t x) const;

  friend bool operator==(const SubtreeDescriptor&, const SubtreeDescriptor&) = default;
};

/// k-bit reversal of x. Throws std::out_of_range when x >= 2^k.
std::uint64_t reverse_bits(std::uint64_t x, BitWidth k);

/// Same mapping computed one bit at a time; kept as an independent
/// reference for the word-level implementation.
std::uint64_t reverse_bits_reference(std::uint64_t x, BitWidth k);

/// Largest l <= k with t mod 2^l == 0.
unsigned trailing_zero_run(Slot t, BitWidth k);

/// Segments of the cycle starting at slot s, ending with the segment
/// anchored at slot 0 (which covers the whole cycle).
std::vector<SegmentDescriptor> decompose(BitWidth k, Slot s);

/// Sorted-order indices transmitted during a segment.
ArithmeticProgression segment_indices(BitWidth k, const SegmentDescriptor& segment);

/// Indices transmitted in slots [anchor + floor(2^(l-1)), anchor + 2^l),
/// i.e. level l of the segment's search tree. Requires l <= segment.level.
ArithmeticProgression level_indices(BitWidth k, const SegmentDescriptor& segment,
                                    unsigned l);

/// Indices transmitted in slots [anchor, anchor + 2^l): levels 0..l.
ArithmeticProgression prefix_indices(BitWidth k, const SegmentDescriptor& segment,
                                     unsigned l);

/// x + sum_i 2^(k-i) * path_i for x < 2^k. Throws std::out_of_range when x
/// or the result leaves [0, 2^k) or the path is longer than k.
std::uint64_t descendant(BitWidth k, std::uint64_t x, std::span<const Branch> path);

/// All descendants of `root` by paths of length <= depth, as a closed form.
/// The tree spans root +- (2^depth - 1) * 2^(k-depth); both ends must lie in
/// [0, 2^(k+1)), which covers the right subtrees of any k+1 bit cycle.
SubtreeDescriptor subtree(BitWidth k, unsigned depth, std::uint64_t root);

}  // namespace rbo

#endif  // RBO_BITREV_HPP
