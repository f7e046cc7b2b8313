#include "rbo/bitrev.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rbo {

namespace {

// See https://graphics.stanford.edu/~seander/bithacks.html#ReverseParallel
constexpr std::uint64_t reverse_word(std::uint64_t x) {
  x = ((x >> 1) & 0x5555555555555555ULL) | ((x & 0x5555555555555555ULL) << 1);
  x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
  x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
  x = ((x >> 8) & 0x00FF00FF00FF00FFULL) | ((x & 0x00FF00FF00FF00FFULL) << 8);
  x = ((x >> 16) & 0x0000FFFF0000FFFFULL) | ((x & 0x0000FFFF0000FFFFULL) << 16);
  return (x >> 32) | (x << 32);
}

void check_slot(std::uint64_t x, BitWidth k, const char* what) {
  if (!k.contains(x)) {
    throw std::out_of_range(std::string(what) + ": " + std::to_string(x) +
                            " is not below 2^" + std::to_string(k.value()));
  }
}

}  // namespace

BitWidth::BitWidth(unsigned k) : k_(k) {
  if (k > kMax) {
    throw std::out_of_range("bit width " + std::to_string(k) + " exceeds " +
                            std::to_string(kMax));
  }
}

bool ArithmeticProgression::contains(std::uint64_t x) const {
  if (count == 0 || x < start) return false;
  const std::uint64_t offset = x - start;
  return offset % stride == 0 && offset / stride < count;
}

bool SubtreeDescriptor::contains(std::uint64_t x) const {
  if (x < min() || x > max()) return false;
  return (x - min()) % stride == 0;
}

std::uint64_t reverse_bits(std::uint64_t x, BitWidth k) {
  check_slot(x, k, "reverse_bits");
  if (k.value() == 0) return 0;
  return reverse_word(x) >> (64 - k.value());
}

std::uint64_t reverse_bits_reference(std::uint64_t x, BitWidth k) {
  check_slot(x, k, "reverse_bits_reference");
  std::uint64_t out = 0;
  for (unsigned i = 0; i < k.value(); ++i) {
    const std::uint64_t bit = (x >> i) & 1U;
    out |= bit << (k.value() - 1 - i);
  }
  return out;
}

unsigned trailing_zero_run(Slot t, BitWidth k) {
  check_slot(t, k, "trailing_zero_run");
  if (t == 0) return k.value();
  return static_cast<unsigned>(std::countr_zero(t));
}

std::vector<SegmentDescriptor> decompose(BitWidth k, Slot s) {
  check_slot(s, k, "decompose");
  std::vector<SegmentDescriptor> out;
  Slot t = s;
  for (;;) {
    const unsigned l = trailing_zero_run(t, k);
    out.push_back({t, l});
    if (t == 0) break;
    t = (t + (std::uint64_t{1} << l)) & k.mask();
  }
  return out;
}

ArithmeticProgression segment_indices(BitWidth k, const SegmentDescriptor& segment) {
  return prefix_indices(k, segment, segment.level);
}

ArithmeticProgression level_indices(BitWidth k, const SegmentDescriptor& segment,
                                    unsigned l) {
  if (l > segment.level) throw std::out_of_range("level_indices: level above segment");
  if (l == 0) {
    return {reverse_bits(segment.anchor, k), std::uint64_t{1} << (k.value() + 1), 1};
  }
  const std::uint64_t half = std::uint64_t{1} << (l - 1);
  return {reverse_bits(segment.anchor + half, k),
          std::uint64_t{1} << (k.value() - l + 1), half};
}

ArithmeticProgression prefix_indices(BitWidth k, const SegmentDescriptor& segment,
                                     unsigned l) {
  if (l > segment.level) throw std::out_of_range("prefix_indices: level above segment");
  return {reverse_bits(segment.anchor, k), std::uint64_t{1} << (k.value() - l),
          std::uint64_t{1} << l};
}

std::uint64_t descendant(BitWidth k, std::uint64_t x, std::span<const Branch> path) {
  check_slot(x, k, "descendant");
  if (path.size() > k.value()) throw std::out_of_range("descendant: path longer than k");
  // |sum of steps| < 2^k, so x plus any prefix fits comfortably in int64.
  auto value = static_cast<std::int64_t>(x);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::int64_t step = std::int64_t{1} << (k.value() - 1 - i);
    value += path[i] == Branch::kRight ? step : -step;
  }
  if (value < 0 || !k.contains(static_cast<std::uint64_t>(value))) {
    throw std::out_of_range("descendant: result outside [0, 2^k)");
  }
  return static_cast<std::uint64_t>(value);
}

SubtreeDescriptor subtree(BitWidth k, unsigned depth, std::uint64_t root) {
  if (depth > k.value()) throw std::out_of_range("subtree: depth exceeds k");
  const std::uint64_t stride = std::uint64_t{1} << (k.value() - depth);
  const std::uint64_t halfwidth = (std::uint64_t{1} << depth) - 1;
  const std::uint64_t span = stride * halfwidth;
  const std::uint64_t limit = std::uint64_t{1} << (k.value() + 1);
  if (root < span || root >= limit || limit - root <= span) {
    throw std::out_of_range("subtree: tree leaves [0, 2^(k+1))");
  }
  return {root, stride, halfwidth};
}

}  // namespace rbo
