#pragma once

// Seeded Monte Carlo experiments over random frames.
//
// Trial i draws its frame from derive_seed(seed, i), and its search restarts
// from a seed derived from that, so a report depends only on the arguments:
// the thread count changes wall-clock time and nothing else.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "phasecert/certificate.hpp"
#include "phasecert/constraints.hpp"
#include "phasecert/exact_small.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/rank2search.hpp"
#include "phasecert/rng.hpp"

namespace phasecert {

enum class Method { Exact, Search, Auto };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Search: return "search";
    default: return "auto";
  }
}

inline Method parse_method(std::string_view s) {
  if (s == "exact") return Method::Exact;
  if (s == "search") return Method::Search;
  if (s == "auto") return Method::Auto;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

/// (M, N) pairs with a closed-form decision procedure.
inline bool has_exact_test(std::size_t m, std::size_t n) {
  return (m == 2 && (n == 3 || n == 4)) || (m == 3 && (n == 7 || n == 8));
}

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;  // frame seed
  std::string method;      // "exact" or "search"
  std::string verdict;
  std::optional<std::string> determinant;
  std::optional<double> linear_residual;
  std::optional<double> rank_residual;
  std::optional<double> witness_gap;
  std::string note;
};

struct ResidualStats {
  std::size_t count = 0;
  double min = 0.0, median = 0.0, max = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::size_t m = 0, n = 0, trials = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::map<std::string, std::size_t> counts;
  ResidualStats linear_residuals;
  ResidualStats rank_residuals;
  std::vector<TrialRecord> records;
  double wall_clock_seconds = 0.0;
  std::optional<double> found_rate;
  std::vector<std::string> notes;
};

struct HarnessOptions {
  Method method = Method::Auto;
  SearchOptions search;  // mode/tol/budget; the seed is overridden per trial
  unsigned threads = 1;
};

inline std::string determinant_text(const Rational& d) { return rational_to_string(d); }
inline std::string determinant_text(double d) { return double_to_string(d); }

/// Fills verdict, residuals and witness gap from a verdict.
inline void record_verdict(TrialRecord& rec, const Frame<double>& frame, const Verdict& v) {
  rec.verdict = tag_name(v);
  if (const auto* ni = std::get_if<NonInjective>(&v)) {
    rec.linear_residual = ni->certificate.linear_residual;
    rec.rank_residual = ni->certificate.rank_residual;
    rec.witness_gap = check_witness(frame, ni->witness).max_gap;
  } else if (const auto* nf = std::get_if<NotFound>(&v)) {
    rec.note = "search budget exhausted";
    rec.rank_residual = nf->budget.best_rank_residual;
  } else if (const auto* ind = std::get_if<Indeterminate>(&v)) {
    rec.note = ind->reason;
  }
}

/// Exact decision for a supported (M, N). Rational frames are decided in
/// exact arithmetic except for (3, 7), whose pencil root is numerical.
template <Scalar T>
TrialRecord exact_trial(const Frame<T>& frame, const SearchOptions& fallback = {}) {
  TrialRecord rec;
  rec.method = "exact";
  const Frame<double> ff = frame.to_float();
  const std::size_t m = frame.m(), n = frame.n();
  if (m == 2 && n == 4) {
    auto r = det_test_m2n4(frame);
    rec.determinant = determinant_text(r.determinant);
    record_verdict(rec, ff, r.verdict);
  } else if (m == 3 && n == 8) {
    auto r = det_test_m3n8(frame);
    rec.determinant = determinant_text(r.determinant);
    record_verdict(rec, ff, r.verdict);
  } else if (m == 2 && n == 3) {
    record_verdict(rec, ff, kernel_cert_m2n3(frame));
  } else if (m == 3 && n == 7) {
    auto r = pencil_cubic_m3n7(ff, fallback);
    record_verdict(rec, ff, r.verdict);
    if (r.used_search_fallback) rec.note = "pencil fallback to search";
  } else {
    throw std::invalid_argument("no exact test for (M, N) = (" + std::to_string(m) + ", " + std::to_string(n) + ")");
  }
  return rec;
}

/// Exact and search tags agree when both find a certificate, or when the
/// exact test says Injective and the search proves it (L_Phi = 0) or simply
/// finds nothing.
inline bool tags_agree(const std::string& exact_tag, const std::string& search_tag) {
  if (exact_tag == "Injective") return search_tag == "Injective" || search_tag == "NotFound";
  return exact_tag == search_tag;
}

inline TrialRecord search_trial(const Frame<double>& frame, SearchOptions opts, SearchMode mode) {
  TrialRecord rec;
  rec.method = "search";
  opts.mode = mode;
  auto out = alternating_search(frame, opts);
  if (mode == SearchMode::Complex && out.complex_point) {
    rec.verdict = "ComplexPointFound";
    rec.linear_residual = out.complex_point->linear_residual;
    rec.rank_residual = out.complex_point->rank_residual;
    return rec;
  }
  record_verdict(rec, frame, out.verdict);
  return rec;
}

namespace detail {

/// Runs body(i) for i in [0, count) on up to `threads` workers; results are
/// written by index so ordering never depends on scheduling.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline ResidualStats stats_of(std::vector<double> v) {
  ResidualStats s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  return s;
}

inline void aggregate(ExperimentReport& rep) {
  std::vector<double> lin, rank;
  for (const auto& r : rep.records) {
    ++rep.counts[r.verdict];
    if (r.verdict == "NonInjective" || r.verdict == "ComplexPointFound") {
      if (r.linear_residual) lin.push_back(*r.linear_residual);
      if (r.rank_residual) rank.push_back(*r.rank_residual);
    }
  }
  rep.linear_residuals = stats_of(std::move(lin));
  rep.rank_residuals = stats_of(std::move(rank));
}

inline std::uint64_t search_seed_for(std::uint64_t frame_seed) { return derive_seed(frame_seed, 0x5ea7c4); }

}  // namespace detail

/// Samples `trials` frames and decides each one. Exact trials use rational
/// frames; search trials use Gaussian float frames.
inline ExperimentReport montecarlo(std::size_t m, std::size_t n, std::size_t trials, std::uint64_t seed,
                                   const HarnessOptions& opts = {}) {
  Method method = opts.method;
  if (method == Method::Auto) method = has_exact_test(m, n) ? Method::Exact : Method::Search;
  if (method == Method::Exact && !has_exact_test(m, n))
    throw std::invalid_argument("exact method supports only (2,3), (2,4), (3,7), (3,8)");
  ExperimentReport rep;
  rep.experiment = "montecarlo";
  rep.m = m;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.method = to_string(method);
  rep.records.resize(trials);
  const auto t0 = std::chrono::steady_clock::now();
  detail::parallel_for(trials, opts.threads, [&](std::size_t i) {
    const std::uint64_t fs = derive_seed(seed, i);
    SearchOptions so = opts.search;
    so.seed = detail::search_seed_for(fs);
    TrialRecord rec = method == Method::Exact
                          ? exact_trial(random_frame<Rational>(m, n, fs), so)
                          : search_trial(random_frame<double>(m, n, fs), so, opts.search.mode);
    rec.index = i;
    rec.seed = fs;
    rep.records[i] = std::move(rec);
  });
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::aggregate(rep);
  return rep;
}

/// Hermitian-mode search on random frames with N = 4M - 5 by default. A
/// found certificate proves non-injectivity of that frame; a miss proves
/// nothing.
inline ExperimentReport explore_conjecture(std::size_t m, std::optional<std::size_t> n_opt, std::size_t trials,
                                           std::uint64_t seed, const HarnessOptions& opts = {}) {
  if (m < 3) throw std::invalid_argument("explore_conjecture: m must be at least 3");
  const std::size_t n = n_opt.value_or(4 * m - 5);
  ExperimentReport rep;
  rep.experiment = "explore-conjecture";
  rep.m = m;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.method = "search";
  rep.records.resize(trials);
  const bool cross_check = m == 3 && n == 7;
  std::vector<int> disagreements(trials, 0);
  const auto t0 = std::chrono::steady_clock::now();
  detail::parallel_for(trials, opts.threads, [&](std::size_t i) {
    const std::uint64_t fs = derive_seed(seed, i);
    SearchOptions so = opts.search;
    so.seed = detail::search_seed_for(fs);
    const auto frame = random_frame<double>(m, n, fs);
    TrialRecord rec = search_trial(frame, so, SearchMode::Hermitian);
    if (cross_check) {
      const auto pencil = pencil_cubic_m3n7(frame, so);
      if (tag_name(pencil.verdict) != rec.verdict) {
        disagreements[i] = 1;
        rec.note += (rec.note.empty() ? "" : "; ") + std::string("pencil verdict ") + tag_name(pencil.verdict);
      }
    }
    rec.index = i;
    rec.seed = fs;
    rep.records[i] = std::move(rec);
  });
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::aggregate(rep);
  const auto found = rep.counts.count("NonInjective") ? rep.counts.at("NonInjective") : 0;
  rep.found_rate = trials ? static_cast<double>(found) / static_cast<double>(trials) : 0.0;
  rep.notes.push_back("NotFound entries mean the search budget was exhausted, not that the frame is injective.");
  rep.notes.push_back("Whether alternating-projection failures at (" + std::to_string(m) + "," + std::to_string(n) +
                      ") indicate conjecture counterexamples or search weakness cannot be resolved by this artifact.");
  if (cross_check) {
    int total = 0;
    for (int d : disagreements) total += d;
    rep.notes.push_back("pencil cross-check disagreements: " + std::to_string(total));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Invariance under A * Phi * diag(unit phases).

struct InvarianceReport {
  std::size_t m = 0, n = 0, trials = 0, transforms = 0;
  std::uint64_t seed = 0;
  std::size_t exact_mismatches = 0;
  std::size_t search_mismatches = 0;
  std::size_t kernel_dim_mismatches = 0;
  std::map<std::string, std::size_t> base_counts;  // exact verdicts of the untransformed frames
  bool passed() const { return exact_mismatches == 0 && search_mismatches == 0 && kernel_dim_mismatches == 0; }
};

namespace detail {

/// Exact rational point (a + ib)/c on the unit circle from a Pythagorean triple.
inline Complex<Rational> random_unit_phase(Rng& rng) {
  static constexpr std::int64_t triples[][3] = {{3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {7, 24, 25}, {20, 21, 29}};
  const auto& t = triples[uniform_int(rng, 0, 4)];
  Rational a(static_cast<long>(t[0]), static_cast<unsigned long>(t[2]));
  Rational b(static_cast<long>(t[1]), static_cast<unsigned long>(t[2]));
  a.canonicalize();
  b.canonicalize();
  if (uniform_int(rng, 0, 1)) std::swap(a, b);
  if (uniform_int(rng, 0, 1)) a = -a;
  if (uniform_int(rng, 0, 1)) b = -b;
  return {a, b};
}

inline Frame<Rational> random_transform(const Frame<Rational>& frame, Rng& rng) {
  const std::size_t m = frame.m();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Dense<Rational> ar(m, m), ai(m, m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        ar(r, c) = Rational(static_cast<long>(uniform_int(rng, -9, 9)), static_cast<unsigned long>(uniform_int(rng, 1, 5)));
        ai(r, c) = Rational(static_cast<long>(uniform_int(rng, -9, 9)), static_cast<unsigned long>(uniform_int(rng, 1, 5)));
        ar(r, c).canonicalize();
        ai(r, c).canonicalize();
      }
    Frame<Rational> out = frame.left_multiply(ar, ai);
    if (out.rank() != m) continue;  // A singular
    for (std::size_t c = 0; c < out.n(); ++c) out = out.scale_column(c, random_unit_phase(rng));
    return out;
  }
  throw std::runtime_error("random_transform: could not draw an invertible transform");
}

}  // namespace detail

inline InvarianceReport invariance_suite(std::size_t m, std::size_t n, std::size_t trials, std::uint64_t seed,
                                         std::size_t transforms = 5, const HarnessOptions& opts = {}) {
  if (!has_exact_test(m, n))
    throw std::invalid_argument("invariance suite needs exact ground truth: (2,3), (2,4), (3,7) or (3,8)");
  InvarianceReport rep{m, n, trials, transforms, seed};
  std::vector<InvarianceReport> per(trials);
  std::vector<std::string> base_tags(trials);
  detail::parallel_for(trials, opts.threads, [&](std::size_t i) {
    const std::uint64_t fs = derive_seed(seed, i);
    auto rng = make_rng(derive_seed(fs, 0x7a45f));
    const auto frame = random_frame<Rational>(m, n, fs);
    SearchOptions so = opts.search;
    so.mode = SearchMode::Hermitian;
    so.seed = detail::search_seed_for(fs);
    const auto base_exact = exact_trial(frame, so).verdict;
    const auto base_search = tag_name(alternating_search(frame.to_float(), so).verdict);
    const auto base_dim = kernel_dimension(frame);
    base_tags[i] = base_exact;
    for (std::size_t t = 0; t < transforms; ++t) {
      const auto g = detail::random_transform(frame, rng);
      if (exact_trial(g, so).verdict != base_exact) ++per[i].exact_mismatches;
      if (tag_name(alternating_search(g.to_float(), so).verdict) != base_search) ++per[i].search_mismatches;
      if (kernel_dimension(g) != base_dim) ++per[i].kernel_dim_mismatches;
    }
  });
  for (std::size_t i = 0; i < trials; ++i) {
    rep.exact_mismatches += per[i].exact_mismatches;
    rep.search_mismatches += per[i].search_mismatches;
    rep.kernel_dim_mismatches += per[i].kernel_dim_mismatches;
    ++rep.base_counts[base_tags[i]];
  }
  return rep;
}

}  // namespace phasecert
