#include "rbo/verify.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rbo/nsi.hpp"

namespace rbo::verify {

namespace {

using IndexSet = std::set<std::int64_t>;

PropertyResult start_result(const char* name, BitWidth k) {
  PropertyResult result;
  result.name = name;
  result.k = k.value();
  return result;
}

void fail(PropertyResult& result, const std::string& witness) {
  if (result.passed) result.witness = witness;
  result.passed = false;
}

IndexSet to_set(const ArithmeticProgression& ap) {
  IndexSet out;
  for (std::uint64_t j = 0; j < ap.count; ++j) out.insert(static_cast<std::int64_t>(ap.at(j)));
  return out;
}

IndexSet to_set(const SubtreeDescriptor& st) {
  IndexSet out;
  for (std::uint64_t j = 0; j < st.size(); ++j) {
    out.insert(static_cast<std::int64_t>(st.min() + st.stride * j));
  }
  return out;
}

// rev_k image of the slot range [first, first + count).
IndexSet reversed_range(BitWidth k, std::uint64_t first, std::uint64_t count) {
  IndexSet out;
  for (std::uint64_t y = first; y < first + count; ++y) {
    out.insert(static_cast<std::int64_t>(reverse_bits_reference(y, k)));
  }
  return out;
}

IndexSet progression(std::int64_t start, std::int64_t stride, std::int64_t from, std::int64_t to) {
  IndexSet out;
  for (std::int64_t i = from; i <= to; ++i) out.insert(start + i * stride);
  return out;
}

// Descendant by the path whose i-th step (i = 0 .. depth-1) is +1 when bit
// i of `bits` is set; steps are 2^(k-1), 2^(k-2), ... Signed, unchecked.
std::int64_t path_descendant(unsigned k, std::int64_t x, std::uint64_t bits, unsigned depth) {
  for (unsigned i = 0; i < depth; ++i) {
    const std::int64_t step = std::int64_t{1} << (k - 1 - i);
    x += ((bits >> i) & 1U) != 0 ? step : -step;
  }
  return x;
}

IndexSet level_by_paths(unsigned k, unsigned depth, std::int64_t x) {
  IndexSet out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << depth); ++bits) {
    out.insert(path_descendant(k, x, bits, depth));
  }
  return out;
}

IndexSet subtree_by_paths(unsigned k, unsigned depth, std::int64_t x) {
  IndexSet out;
  for (unsigned d = 0; d <= depth; ++d) {
    const IndexSet level = level_by_paths(k, d, x);
    out.insert(level.begin(), level.end());
  }
  return out;
}

IndexSet set_union(IndexSet a, const IndexSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

IndexSet set_minus(IndexSet a, const IndexSet& b) {
  for (const auto v : b) a.erase(v);
  return a;
}

std::string case_name(std::initializer_list<std::pair<const char*, std::int64_t>> fields) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, value] : fields) {
    out << (first ? "" : " ") << name << "=" << value;
    first = false;
  }
  return out.str();
}

}  // namespace

PropertyResult check_reversal(BitWidth k) {
  PropertyResult result = start_result("reversal", k);
  std::vector<bool> seen(k.cycle_length(), false);
  for (std::uint64_t x = 0; x < k.cycle_length(); ++x) {
    ++result.cases;
    const std::uint64_t r = reverse_bits(x, k);
    if (r != reverse_bits_reference(x, k) || reverse_bits(r, k) != x || seen[r]) {
      fail(result, case_name({{"x", static_cast<std::int64_t>(x)}}));
      continue;
    }
    seen[r] = true;
  }
  return result;
}

PropertyResult check_segments(BitWidth k) {
  PropertyResult result = start_result("segments", k);
  const unsigned bits = k.value();
  const std::uint64_t n = k.cycle_length();
  for (Slot s = 0; s < n; ++s) {
    const auto segments = decompose(k, s);
    const auto where = [&](std::size_t i, std::int64_t l) {
      return case_name({{"s", static_cast<std::int64_t>(s)}, {"i", static_cast<std::int64_t>(i)},
                        {"l", l}});
    };
    if (segments.size() > bits + 1 || segments.front().anchor != s ||
        segments.back().anchor != 0 || segments.back().level != bits) {
      fail(result, where(0, -1));
      continue;
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
      ++result.cases;
      const SegmentDescriptor& seg = segments[i];
      const bool last = i + 1 == segments.size();
      if (!last) {
        // Y_i = [t_i, t_(i+1) - 1] is exactly 2^(l_i) slots, levels increase.
        const SegmentDescriptor& next = segments[i + 1];
        const std::uint64_t end = next.anchor == 0 ? n : next.anchor;
        if (end - seg.anchor != seg.slot_count() || next.level <= seg.level) fail(result, where(i, -1));
      }
      if (seg.anchor % seg.slot_count() != 0 ||
          (seg.level < bits && seg.anchor % (2 * seg.slot_count()) == 0)) {
        fail(result, where(i, -1));
      }

      const ArithmeticProgression whole = segment_indices(k, seg);
      if (to_set(whole) != reversed_range(k, seg.anchor, seg.slot_count()) ||
          whole.start >= (std::uint64_t{1} << (bits - seg.level))) {
        fail(result, where(i, -1));
      }

      for (unsigned l = 0; l <= seg.level; ++l) {
        const std::uint64_t lower = l == 0 ? 0 : std::uint64_t{1} << (l - 1);
        const std::uint64_t upper = std::uint64_t{1} << l;  // exclusive offset
        const ArithmeticProgression level = level_indices(k, seg, l);
        if (to_set(level) != reversed_range(k, seg.anchor + lower, upper - lower) ||
            level.start >= (std::uint64_t{1} << (bits - l + 1))) {
          fail(result, where(i, l));
        }
        const ArithmeticProgression prefix = prefix_indices(k, seg, l);
        if (to_set(prefix) != reversed_range(k, seg.anchor, upper) ||
            prefix.start >= (std::uint64_t{1} << (bits - l))) {
          fail(result, where(i, l));
        }
      }
    }
  }
  return result;
}

PropertyResult check_tree_algebra(BitWidth k) {
  PropertyResult result = start_result("tree_algebra", k);
  const unsigned bits = k.value();
  const auto limit = static_cast<std::int64_t>(std::uint64_t{1} << (bits + 1));
  for (std::int64_t x = 0; x < limit; ++x) {
    for (unsigned d = 0; d <= bits; ++d) {
      ++result.cases;
      const auto where = case_name({{"x", x}, {"d", d}});
      const IndexSet level = level_by_paths(bits, d, x);
      const IndexSet tree = subtree_by_paths(bits, d, x);
      const std::int64_t stride = std::int64_t{1} << (bits - d);
      const std::int64_t half = (std::int64_t{1} << d) - 1;

      if (level.size() != (std::size_t{1} << d)) fail(result, where + " level size");
      if (d == 0 && (level != IndexSet{x} || tree != IndexSet{x})) fail(result, where + " root");
      if (d > 0 && level != set_minus(tree, subtree_by_paths(bits, d - 1, x))) {
        fail(result, where + " level = tree minus shallower tree");
      }
      if (tree.size() != (std::size_t{1} << (d + 1)) - 1) fail(result, where + " tree size");
      if (tree != progression(x, stride, -half, half)) fail(result, where + " closed form");

      // The library descriptor, wherever it is defined.
      if (x >= half * stride && x + half * stride < limit) {
        if (to_set(subtree(k, d, static_cast<std::uint64_t>(x))) != tree) {
          fail(result, where + " subtree descriptor");
        }
      }
      if (d >= 1) {
        const std::int64_t right = path_descendant(bits, x, 1, 1);
        const std::int64_t left = path_descendant(bits, x, 0, 1);
        const IndexSet right_tree = subtree_by_paths(bits - 1, d - 1, right);
        const IndexSet left_tree = subtree_by_paths(bits - 1, d - 1, left);
        if (set_union(IndexSet{x}, right_tree) != progression(x, stride, 0, half)) {
          fail(result, where + " root plus right subtree");
        }
        if (tree != set_union(set_union(left_tree, IndexSet{x}), right_tree)) {
          fail(result, where + " recursive split");
        }
      }
      if (d + 1 <= bits) {
        const std::int64_t gap = std::int64_t{1} << (bits - 1 - d);
        const IndexSet left = subtree_by_paths(bits - 1, d, path_descendant(bits, x, 0, 1));
        const IndexSet right = subtree_by_paths(bits - 1, d, path_descendant(bits, x, 1, 1));
        if (*left.rbegin() + gap != x || *right.begin() - gap != x) {
          fail(result, where + " in-order neighbours");
        }
      }
    }
    // Library descendant against the path oracle for every short path.
    if (x < static_cast<std::int64_t>(k.cycle_length())) {
      for (unsigned d = 0; d <= std::min(bits, 3U); ++d) {
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << d); ++b) {
          std::vector<Branch> path(d);
          for (unsigned i = 0; i < d; ++i) {
            path[i] = ((b >> i) & 1U) != 0 ? Branch::kRight : Branch::kLeft;
          }
          const std::int64_t expected = path_descendant(bits, x, b, d);
          const bool in_range = expected >= 0 && expected < static_cast<std::int64_t>(k.cycle_length());
          try {
            const auto got = descendant(k, static_cast<std::uint64_t>(x), path);
            if (!in_range || static_cast<std::int64_t>(got) != expected) {
              fail(result, case_name({{"x", x}, {"path_bits", static_cast<std::int64_t>(b)}}));
            }
          } catch (const std::out_of_range&) {
            if (in_range) fail(result, case_name({{"x", x}, {"path_bits", static_cast<std::int64_t>(b)}}));
          }
        }
      }
    }
  }
  return result;
}

PropertyResult check_segment_trees(BitWidth k) {
  PropertyResult result = start_result("segment_trees", k);
  const unsigned bits = k.value();
  for (Slot s = 0; s < k.cycle_length(); ++s) {
    const auto segments = decompose(k, s);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      ++result.cases;
      const SegmentDescriptor& seg = segments[i];
      const auto where = case_name({{"s", static_cast<std::int64_t>(s)},
                                    {"i", static_cast<std::int64_t>(i)}});
      const auto root = static_cast<std::int64_t>(reverse_bits_reference(seg.anchor, k));
      const unsigned l = seg.level;
      const IndexSet whole = reversed_range(k, seg.anchor, seg.slot_count());

      if (reversed_range(k, seg.anchor, 1) != IndexSet{root}) fail(result, where + " level 0");
      if (l == 0 && whole != IndexSet{root}) fail(result, where + " single node");
      if (l > 0) {
        const std::int64_t right = path_descendant(bits, root, 1, 1);
        for (unsigned d = 1; d <= l; ++d) {
          const std::uint64_t lower = std::uint64_t{1} << (d - 1);
          const IndexSet upto = reversed_range(k, seg.anchor, std::uint64_t{1} << d);
          if (upto != set_union(IndexSet{root}, subtree_by_paths(bits - 1, d - 1, right))) {
            fail(result, where + " prefix tree d=" + std::to_string(d));
          }
          if (reversed_range(k, seg.anchor + lower, lower) != level_by_paths(bits - 1, d - 1, right)) {
            fail(result, where + " level d=" + std::to_string(d));
          }
        }
        const std::array<Branch, 1> go_right{Branch::kRight};
        const SubtreeDescriptor tree =
            subtree(BitWidth(bits - 1), l - 1, descendant(k, static_cast<std::uint64_t>(root), go_right));
        if (whole != set_union(IndexSet{root}, to_set(tree))) fail(result, where + " whole tree");
      }

      // Nodes closer to the root are transmitted earlier.
      std::int64_t previous_max = -1;
      for (unsigned d = 0; d <= l; ++d) {
        std::int64_t lo = std::numeric_limits<std::int64_t>::max();
        std::int64_t hi = -1;
        for (const std::int64_t x : level_by_paths(bits, d, root)) {
          if (whole.count(x) == 0) continue;
          const auto y = static_cast<std::int64_t>(reverse_bits_reference(static_cast<std::uint64_t>(x), k));
          lo = std::min(lo, y);
          hi = std::max(hi, y);
        }
        if (hi < 0) continue;
        if (lo <= previous_max) fail(result, where + " depth order d=" + std::to_string(d));
        previous_max = hi;
      }
    }
  }
  return result;
}

PropertyResult check_nsi(BitWidth k) {
  PropertyResult result = start_result("nsi", k);
  const unsigned bits = k.value();
  const std::uint64_t n = k.cycle_length();
  NsiCounters worst;
  for (Slot t = 0; t < n; ++t) {
    for (std::uint64_t r1 = 0; r1 < n; ++r1) {
      for (std::uint64_t r2 = r1; r2 < n; ++r2) {
        ++result.cases;
        NsiCounters counters;
        const Slot fast = nsi_fast(k, t, r1, r2, &counters);
        worst.segment_scans = std::max(worst.segment_scans, counters.segment_scans);
        worst.level_steps = std::max(worst.level_steps, counters.level_steps);
        worst.search_steps = std::max(worst.search_steps, counters.search_steps);
        if (fast != nsi_oracle(k, t, r1, r2) || counters.segment_scans > bits + 1 ||
            counters.level_steps > bits + 1 || counters.search_steps > bits) {
          fail(result, case_name({{"t", static_cast<std::int64_t>(t)},
                                  {"r1", static_cast<std::int64_t>(r1)},
                                  {"r2", static_cast<std::int64_t>(r2)}}));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "max scans=" << worst.segment_scans << " level_steps=" << worst.level_steps
         << " search_steps=" << worst.search_steps;
  result.detail = detail.str();
  return result;
}

PropertyResult check_energy_bounds(BitWidth k, const SessionRunner& runner) {
  PropertyResult result = start_result("energy_bounds", k);
  const ExhaustiveReport report = exhaustive_bound_check(spaced_key_cycle(k), runner);
  result.cases = report.sessions;
  result.passed = report.passed();
  if (report.first_violation) {
    result.witness = "s=" + std::to_string(report.first_violation->start) +
                     " query=[" + std::to_string(report.first_violation->query.lo) + "," +
                     std::to_string(report.first_violation->query.hi) + "] " +
                     report.first_violation_reason;
  }
  std::ostringstream detail;
  detail << "max en(tau)=" << report.max_en_tau << " (bound " << report.en_bound << ")"
         << " max ee=" << report.max_ee << " (bound " << report.ee_bound << ")"
         << " max tau=" << report.max_tau;
  result.detail = detail.str();
  return result;
}

std::vector<PropertyResult> run_all(const Options& options) {
  if (options.k_max > BitWidth::kMax) throw std::out_of_range("k_max exceeds 62");
  std::vector<PropertyResult> out;
  for (unsigned bits = 0; bits <= options.k_max; ++bits) {
    const BitWidth k(bits);
    out.push_back(check_reversal(k));
    out.push_back(check_segments(k));
    out.push_back(check_tree_algebra(k));
    out.push_back(check_segment_trees(k));
    out.push_back(check_nsi(k));
    out.push_back(check_energy_bounds(k, options.runner));
  }
  return out;
}

}  // namespace rbo::verify
