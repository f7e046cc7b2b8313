// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "rbo/nsi.hpp"
#include "rbo/random.hpp"
#include "rbo/sim.hpp"
#include "rbo/verify.hpp"
#include "rbo/wire.hpp"

namespace {

using namespace rbo;

struct Verdict {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& title, const std::function<Verdict()>& body) {
  const auto started = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!v.passed) ++failures;
  std::printf("%s %d %s: %s (%.1fs)\n", v.passed ? "PASS" : "FAIL", number, title.c_str(),
              v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

// --- 1 and 2: perfect-channel enumeration ---------------------------------

struct EnumerationTally {
  std::uint64_t sessions = 0;
  std::uint64_t tau_violations = 0;
  std::uint64_t en_violations = 0;
  std::uint64_t ee_violations = 0;
  std::vector<std::uint64_t> max_en;  // per k
  std::vector<std::uint64_t> max_ee;
  std::string first_en_witness;
  std::string first_ee_witness;
};

EnumerationTally enumerate_perfect_channel(unsigned k_max) {
  EnumerationTally tally;
  for (unsigned bits = 0; bits <= k_max; ++bits) {
    const BitWidth k(bits);
    const std::uint64_t n = k.cycle_length();
    std::uint64_t max_en = 0;
    std::uint64_t max_ee = 0;
    const SessionRunner runner = [&](const SessionConfig& config) {
      SessionResult r = run_session(config);
      const auto& st = r.stats;
      const std::string where = "k=" + std::to_string(bits) + " s=" +
                                std::to_string(config.start_slot) + " query=[" +
                                std::to_string(config.query.lo) + "," +
                                std::to_string(config.query.hi) + "]";
      ++tally.sessions;
      if (!st.tau || *st.tau >= n) {
        if (tally.tau_violations++ == 0 && tally.first_en_witness.empty()) {
          tally.first_en_witness = where + " tau>=n";
        }
      }
      if (st.en_tau > 2 * bits + 1) {
        if (tally.en_violations++ == 0 && tally.first_en_witness.empty()) {
          tally.first_en_witness = where + " en=" + std::to_string(st.en_tau);
        }
      }
      // ee never decreases along a session, so the final count bounds every
      // prefix. Sessions stop once (lb, ub) equals the match range; after
      // that only in-range slots are heard.
      if (st.ee_total > 4 * bits + 2) {
        if (tally.ee_violations++ == 0) {
          tally.first_ee_witness = where + " ee=" + std::to_string(st.ee_total);
        }
      }
      max_en = std::max(max_en, st.en_tau);
      max_ee = std::max(max_ee, st.ee_total);
      return r;
    };
    exhaustive_bound_check(spaced_key_cycle(k), runner);
    tally.max_en.push_back(max_en);
    tally.max_ee.push_back(max_ee);
  }
  return tally;
}

std::string per_k(const std::vector<std::uint64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

// --- 3: nsi ------------------------------------------------------------------

Verdict check_nsi_equivalence() {
  std::uint64_t cases = 0;
  NsiCounters worst;
  for (unsigned bits = 0; bits <= 8; ++bits) {
    const auto r = verify::check_nsi(BitWidth(bits));
    cases += r.cases;
    if (!r.passed) return {false, "k=" + std::to_string(bits) + " " + r.witness};
  }
  for (unsigned bits : {12U, 16U, 20U}) {
    const BitWidth k(bits);
    SplitMix64 rng(0x5EED0000 + bits);
    for (int i = 0; i < 100000; ++i) {
      const Slot t = rng.below(k.cycle_length());
      std::uint64_t r1 = rng.below(k.cycle_length());
      std::uint64_t r2 = rng.below(k.cycle_length());
      if (r1 > r2) std::swap(r1, r2);
      NsiCounters c;
      const Slot fast = nsi_fast(k, t, r1, r2, &c);
      ++cases;
      worst.segment_scans = std::max(worst.segment_scans, c.segment_scans);
      worst.level_steps = std::max(worst.level_steps, c.level_steps);
      worst.search_steps = std::max(worst.search_steps, c.search_steps);
      if (fast != nsi_oracle(k, t, r1, r2) || c.segment_scans > bits + 1 ||
          c.level_steps > bits + 1 || c.search_steps > bits) {
        return {false, "k=" + std::to_string(bits) + " t=" + std::to_string(t) +
                           " r1=" + std::to_string(r1) + " r2=" + std::to_string(r2)};
      }
    }
  }
  return {true, std::to_string(cases) + " cases agree; random-case max counters scans=" +
                    std::to_string(worst.segment_scans) + " level_steps=" +
                    std::to_string(worst.level_steps) + " search_steps=" +
                    std::to_string(worst.search_steps) + " (limits k+1, k+1, k)"};
}

// --- 4: decomposition and tree algebra ----------------------------------------

Verdict check_lemma_suites() {
  std::uint64_t cases = 0;
  for (unsigned bits = 0; bits <= 6; ++bits) {
    const BitWidth k(bits);
    for (const auto& r : {verify::check_reversal(k), verify::check_segments(k),
                          verify::check_tree_algebra(k), verify::check_segment_trees(k)}) {
      cases += r.cases;
      if (!r.passed) return {false, r.name + " k=" + std::to_string(bits) + " " + r.witness};
    }
  }
  return {true, std::to_string(cases) + " set comparisons, k <= 6, zero violations"};
}

// --- 5 and 6: lossy channel ------------------------------------------------

constexpr unsigned kLossyBits = 10;
constexpr std::uint64_t kTrials = 10000;

std::shared_ptr<const BroadcastCycle> lossy_cycle() {
  static const auto cycle =
      std::make_shared<const BroadcastCycle>(spaced_key_cycle(BitWidth(kLossyBits)));
  return cycle;
}

unsigned worker_count() { return std::max(1U, std::thread::hardware_concurrency()); }

MonteCarloReport lossy_empty_query(double p) {
  MonteCarloConfig mc;
  mc.session.cycle = lossy_cycle();
  // Falls strictly between the 512th and 513th keys.
  mc.session.query = QueryInterval::make(5125, 5125);
  mc.session.start_slot = 0;
  mc.session.channel = ChannelModel::bernoulli(p, 20240601);
  mc.session.horizon_cycles = 64;
  mc.session.stop_on_convergence = true;
  mc.trials = kTrials;
  mc.threads = worker_count();
  return run_monte_carlo(mc);
}

Verdict check_unreliable_bounds(const std::vector<MonteCarloReport>& reports) {
  Verdict v;
  for (const auto& r : reports) {
    if (!r.empty_query) return {false, "query unexpectedly nonempty"};
    for (const auto& b : r.bounds) {
      const bool ok = b.applicable && b.passed;
      v.passed = v.passed && ok;
      v.detail += "p=" + fmt(r.p, 1) + " " + b.name + " mean=" + fmt(b.measured) + " (SE " +
                  fmt(b.std_error) + ") <= " + fmt(b.bound) + (ok ? "" : " VIOLATED") + "; ";
    }
    v.detail += "horizon caps=" + std::to_string(r.horizon_hits) + "; ";
  }
  return v;
}

Verdict check_hit_rate() {
  Verdict v;
  for (double p : {0.5, 0.9}) {
    MonteCarloConfig mc;
    mc.session.cycle = lossy_cycle();
    mc.session.query = QueryInterval::make(3010, 3400);  // indices 300..339
    mc.session.start_slot = 0;
    mc.session.channel = ChannelModel::bernoulli(p, 777);
    mc.session.horizon_cycles = 4;
    mc.session.stop_on_convergence = false;
    mc.trials = kTrials;
    mc.threads = worker_count();
    const auto r = run_monte_carlo(mc);
    const double z = std::abs(r.hit_rate - p) / r.hit_rate_std_error;
    const bool ok = r.in_range_wakeups > 0 && z <= 3.0;
    v.passed = v.passed && ok;
    v.detail += "p=" + fmt(p, 1) + " rate=" + fmt(r.hit_rate, 5) + " over " +
                std::to_string(r.in_range_wakeups) + " in-range wake-ups, |z|=" + fmt(z, 2) +
                (ok ? "" : " OUTSIDE 3 SE") + "; ";
  }
  return v;
}

// --- 7: completeness ------------------------------------------------------

Verdict check_completeness() {
  const BitWidth k(kLossyBits);
  const std::uint64_t n = k.cycle_length();
  SplitMix64 rng(4096);
  std::uint64_t checked_frames = 0;
  for (int c = 0; c < 100; ++c) {
    std::vector<Key> keys(n);
    for (auto& key : keys) key = rng.below(4 * n);
    const auto cycle = std::make_shared<const BroadcastCycle>(build_cycle(keys));
    const auto sorted = cycle->sorted_keys();
    // Draw the query from present keys so it is rarely empty.
    Key lo = sorted[rng.below(n)];
    Key hi = sorted[rng.below(n)];
    if (lo > hi) std::swap(lo, hi);
    SessionConfig config;
    config.cycle = cycle;
    config.query = QueryInterval::make(lo, hi);
    config.start_slot = rng.below(n);
    config.horizon_cycles = 2;
    config.trace = TraceMode::kWakeups;
    const auto r = run_session(config);
    if (!r.stats.tau) return {false, "case " + std::to_string(c) + " has no tau"};

    std::vector<bool> hit_at(2 * n, false);
    for (const auto& e : r.trace) {
      if (e.event.kind == EventKind::kHit) hit_at[e.receiver_time] = true;
    }
    for (std::uint64_t t = *r.stats.tau; t < 2 * n; ++t) {
      const std::uint64_t index = reverse_bits((config.start_slot + t) & k.mask(), k);
      if (!config.query.contains(cycle->key_at(index))) continue;
      ++checked_frames;
      if (!hit_at[t]) {
        return {false, "case " + std::to_string(c) + " frame at receiver time " +
                           std::to_string(t) + " not reported"};
      }
    }
  }
  return {true, "100 cases, " + std::to_string(checked_frames) +
                    " requested frames after tau all reported as hits"};
}

// --- 8: codec ----------------------------------------------------------------

Verdict check_codec() {
  SplitMix64 rng(8);
  const auto expect_error = [](std::vector<std::uint8_t> bytes, wire::ErrorKind kind) {
    try {
      wire::decode_frame(bytes);
    } catch (const wire::Error& e) {
      return e.kind() == kind;
    }
    return false;
  };
  std::uint64_t corruptions = 0;
  for (int i = 0; i < 10000; ++i) {
    Frame f;
    const auto bits = static_cast<unsigned>(rng.below(63));
    f.k = BitWidth(bits);
    f.slot = rng.next() & f.k.mask();
    f.index = reverse_bits_reference(f.slot, f.k);
    f.key = rng.next();
    f.payload.resize(rng.below(48));
    for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng.next());
    const auto good = wire::encode_frame(f);
    if (good.size() != wire::kFrameHeaderSize + f.payload.size() || wire::decode_frame(good) != f) {
      return {false, "round trip failed at frame " + std::to_string(i)};
    }

    struct Mutation {
      const char* name;
      std::vector<std::uint8_t> bytes;
      wire::ErrorKind kind;
    };
    std::vector<Mutation> mutations;
    auto b = good;
    b[0] = static_cast<std::uint8_t>(b[0] ^ (1 + rng.below(255)));
    mutations.push_back({"magic", b, wire::ErrorKind::kBadMagic});
    b = good;
    b[1] = static_cast<std::uint8_t>(63 + rng.below(193));
    mutations.push_back({"k", b, wire::ErrorKind::kBitWidthOutOfRange});
    b = good;
    b[2] |= 0x80;  // slot >= 2^63
    mutations.push_back({"slot", b, wire::ErrorKind::kSlotOutOfRange});
    b = good;
    b[10 + rng.below(8)] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    mutations.push_back({"index", b, wire::ErrorKind::kIndexMismatch});
    b = good;
    b.resize(rng.below(good.size()));
    mutations.push_back({"truncation", b, wire::ErrorKind::kTruncated});
    b = good;
    b.push_back(static_cast<std::uint8_t>(rng.next()));
    mutations.push_back({"trailing", b, wire::ErrorKind::kTrailingBytes});
    b = good;
    b[26] = 0xFF;  // declared payload longer than the buffer
    mutations.push_back({"payload_len", b, wire::ErrorKind::kTruncated});

    for (const auto& m : mutations) {
      ++corruptions;
      if (!expect_error(m.bytes, m.kind)) {
        return {false, std::string("corruption class ") + m.name + " not reported as " +
                           std::string(wire::to_string(m.kind)) + " at frame " +
                           std::to_string(i)};
      }
    }
  }
  return {true, "10000 round trips; " + std::to_string(corruptions) +
                    " corruptions over 7 classes rejected with their error kinds"};
}

// --- 9: CLI determinism ------------------------------------------------------

Verdict check_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rbo_acceptance_determinism";
  fs::create_directories(dir);
  const std::string keys_path = (dir / "keys.txt").string();
  const std::string cycle_path = (dir / "cycle.bin").string();
  {
    std::ofstream keys(keys_path);
    for (int i = 1; i <= 1024; ++i) keys << 10 * i << '\n';
  }
  std::ostringstream sink;
  if (cli::run({"rbo", "build", keys_path, cycle_path}, sink, sink) != 0) {
    return {false, "build failed: " + sink.str()};
  }
  const std::vector<std::string> flags{"rbo",    "simulate", cycle_path, "--lo",   "5125",
                                       "--hi",   "5125",     "--p",      "0.5",    "--seed",
                                       "99",     "--trials", "500",      "--start", "17"};
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream err;
  const int code_a = cli::run(flags, a, err);
  const int code_b = cli::run(flags, b, err);
  fs::remove_all(dir);

  const auto split = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  };
  auto la = split(a.str());
  auto lb = split(b.str());
  if (la.size() != 503 || lb.size() != 503) return {false, "unexpected line count"};
  // The aggregate line embeds the wall-clock time; compare it without that field.
  auto ja = nlohmann::json::parse(la.back());
  auto jb = nlohmann::json::parse(lb.back());
  ja["metadata"].erase("wall_clock_ms");
  jb["metadata"].erase("wall_clock_ms");
  la.pop_back();
  lb.pop_back();
  const bool ok = code_a == code_b && la == lb && ja == jb;
  std::uint64_t bytes = 0;
  for (const auto& line : la) bytes += line.size() + 1;
  return {ok, ok ? "two runs, " + std::to_string(bytes) +
                       " CSV bytes identical; aggregate identical apart from wall-clock time"
                 : "outputs differ"};
}

}  // namespace

int main() {
  EnumerationTally tally;
  report(1, "first-hit bound tau < n, en(tau) <= 2k+1 (k=0..8, perfect channel)", [&] {
    tally = enumerate_perfect_channel(8);
    const bool ok = tally.tau_violations == 0 && tally.en_violations == 0;
    return Verdict{ok, std::to_string(tally.sessions) + " sessions, max en(tau) per k = " +
                           per_k(tally.max_en) +
                           (ok ? "" : "; first violation " + tally.first_en_witness)};
  });
  report(2, "extra-energy bound ee <= 4k+2 (same enumeration)", [&] {
    const bool ok = tally.sessions > 0 && tally.ee_violations == 0;
    return Verdict{ok, "max ee per k = " + per_k(tally.max_ee) +
                           (ok ? "" : "; first violation " + tally.first_ee_witness)};
  });
  report(3, "nsi agrees with linear-scan oracle, counters within k-relative limits",
         check_nsi_equivalence);
  report(4, "decomposition and search-tree set identities (k <= 6)", check_lemma_suites);
  report(5, "lossy-channel expected misses (k=10, p in {0.5,0.9}, 10^4 trials, empty query)", [] {
    return check_unreliable_bounds({lossy_empty_query(0.5), lossy_empty_query(0.9)});
  });
  report(6, "in-range reception rate within 3 SE of p", check_hit_rate);
  report(7, "completeness: every requested frame after tau is a hit (k=10)", check_completeness);
  report(8, "frame codec round trip and corruption classes", check_codec);
  report(9, "simulate output is deterministic for identical flags", check_determinism);
  std::printf("%s %d of 9 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
