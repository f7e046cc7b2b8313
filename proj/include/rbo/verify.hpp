#ifndef RBO_VERIFY_HPP
#define RBO_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbo/bitrev.hpp"
#include "rbo/sim.hpp"

namespace rbo::verify {

/// Outcome of one exhaustive property suite at one bit width. `witness`
/// names the first failing case; `detail` carries worst-case figures.
struct PropertyResult {
  std::string name;
  unsigned k = 0;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string witness;
  std::string detail;
};

// Each suite compares the closed forms against sets built by brute-force
// enumeration of slots or search-tree paths.

/// Word-level vs per-bit reversal, involution, bijection.
PropertyResult check_reversal(BitWidth k);
/// Segment decomposition and the index progressions of whole segments,
/// single tree levels and level prefixes.
PropertyResult check_segments(BitWidth k);
/// Level / subtree algebra of the implicit search tree, for all roots in
/// [0, 2^(k+1)) and all depths.
PropertyResult check_tree_algebra(BitWidth k);
/// Segment index sets as search trees rooted at their first index, and
/// shallower levels being transmitted first.
PropertyResult check_segment_trees(BitWidth k);
/// nsi_fast against nsi_oracle for every (t, r1, r2), with loop counters.
PropertyResult check_nsi(BitWidth k);
/// Perfect-channel worst case of en(tau) and ee over all starts and queries.
PropertyResult check_energy_bounds(BitWidth k, const SessionRunner& runner = {});

struct Options {
  unsigned k_max = 8;
  SessionRunner runner;  // empty: run_session
};

std::vector<PropertyResult> run_all(const Options& options);

}  // namespace rbo::verify

#endif  // RBO_VERIFY_HPP
