#include "rbo/nsi.hpp"

#include <stdexcept>

namespace rbo {

namespace {

void validate(BitWidth k, Slot t, std::uint64_t r1, std::uint64_t r2) {
  if (!k.contains(t)) throw std::invalid_argument("nsi: slot out of range");
  if (r1 > r2) throw std::invalid_argument("nsi: r1 > r2");
  if (!k.contains(r2)) throw std::invalid_argument("nsi: r2 out of range");
}

}  // namespace

Slot nsi_fast(BitWidth k, Slot t, std::uint64_t r1, std::uint64_t r2,
              NsiCounters* counters) {
  validate(k, t, r1, r2);
  NsiCounters local;
  NsiCounters& count = counters != nullptr ? *counters : local;
  count = {};

  const unsigned bits = k.value();
  if (bits == 0) return 0;
  const std::uint64_t mask = k.mask();

  Slot next = (t + 1) & mask;
  unsigned level = 0;
  std::uint64_t root = 0;
  for (;;) {
    ++count.segment_scans;
    const Slot anchor = next;
    while (level < bits && (anchor & ((std::uint64_t{2} << level) - 1)) == 0) {
      ++level;
      ++count.level_steps;
    }
    root = reverse_bits(anchor, k);
    const std::uint64_t width = std::uint64_t{1} << level;
    next = (anchor + width) & mask;
    // anchor + width - 1 stays below 2^k, including anchor 0 at level k.
    const std::uint64_t last = reverse_bits(anchor + width - 1, k);

    if (r1 <= last && r2 >= root) {
      // Segment indices are root + j * 2^(k - level), j in [0, 2^level).
      const unsigned shift = bits - level;
      const std::uint64_t first_j =
          r1 > root ? (r1 - root + (std::uint64_t{1} << shift) - 1) >> shift : 0;
      const std::uint64_t last_j = (r2 - root) >> shift;
      if (first_j <= last_j) break;
    }
  }

  std::uint64_t step = std::uint64_t{1} << (bits - 1);
  std::uint64_t x = root;
  while (x < r1 || x > r2) {
    ++count.search_steps;
    if (x < r1) {
      x += step;
    } else {
      x -= step;
    }
    step >>= 1;
  }
  return reverse_bits(x, k);
}

Slot nsi_oracle(BitWidth k, Slot t, std::uint64_t r1, std::uint64_t r2) {
  validate(k, t, r1, r2);
  const std::uint64_t n = k.cycle_length();
  for (std::uint64_t d = 1; d <= n; ++d) {
    const Slot slot = (t + d) & k.mask();
    const std::uint64_t x = reverse_bits_reference(slot, k);
    if (r1 <= x && x <= r2) return slot;
  }
  throw std::logic_error("nsi_oracle: no slot found");
}

}  // namespace rbo
