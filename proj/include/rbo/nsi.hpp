#ifndef RBO_NSI_HPP
#define RBO_NSI_HPP

#include <cstdint>

#include "rbo/bitrev.hpp"

namespace rbo {

/// Loop iteration counts from one nsi_fast call.
struct NsiCounters {
  unsigned segment_scans = 0;   // repeat-until iterations
  unsigned level_steps = 0;     // inner while iterations, all scans together
  unsigned search_steps = 0;    // binary search iterations
};

/// Next slot after t (mod 2^k) whose k-bit reversal lies in [r1, r2].
///
/// Walks the segments of the slot sequence starting at t + 1 until one whose
/// index progression meets [r1, r2], then binary-searches that segment's
/// embedded search tree from its root. The first tree node to land in the
/// range is the earliest slot, since shallower nodes are transmitted first.
/// Uses O(k) shifts, masks and additions and a fixed set of scalars.
///
/// If the only match is t itself the result is t (a full cycle later).
/// Throws std::invalid_argument unless r1 <= r2 < 2^k and t < 2^k.
Slot nsi_fast(BitWidth k, Slot t, std::uint64_t r1, std::uint64_t r2,
              NsiCounters* counters = nullptr);

/// Linear scan over t + 1, t + 2, ... using the per-bit reversal.
Slot nsi_oracle(BitWidth k, Slot t, std::uint64_t r1, std::uint64_t r2);

}  // namespace rbo

#endif  // RBO_NSI_HPP
