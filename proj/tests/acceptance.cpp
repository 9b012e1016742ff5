// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [path/to/phasecert]

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "phasecert/io.hpp"

using namespace phasecert;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& what, double seconds, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("[%s] %2d %s (%.3f s) %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational pow_q(const Rational& x, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Frame<Rational> scaled_all(const Frame<Rational>& f, const Rational& lambda) {
  Frame<Rational> g = f;
  for (std::size_t c = 0; c < f.n(); ++c) g = g.scale_column(c, {lambda, Rational(0)});
  return g;
}

void c1_degree() {
  const auto t0 = Clock::now();
  const BigInt d2 = degree_rank2(2), d3 = degree_rank2(3);
  const double dt = since(t0);
  report(1, d2 == 1 && d3 == 3 && dt < 1e-3, "degree values d(2)=1, d(3)=3", dt,
         "got " + d2.get_str() + ", " + d3.get_str());
}

void c2_parity() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string bad;
  for (std::uint64_t m = 2; m <= 64; ++m) {
    const auto r = degree_report(m);
    const bool law = r.is_odd == is_power_of_two(m - 1);
    const bool digits = degree_parity_via_digits(m) == r.two_adic_valuation;
    if (!law || !digits) {
      ok = false;
      bad += " m=" + std::to_string(m);
    }
  }
  const double dt = since(t0);
  report(2, ok && dt < 1.0, "parity law and digit-sum valuation, 2 <= M <= 64", dt, ok ? "" : "mismatch at" + bad);
}

void c3_generic_injectivity() {
  const auto t0 = Clock::now();
  std::size_t inj24 = 0, inj38 = 0;
  for (std::size_t i = 0; i < 1000; ++i)
    if (std::holds_alternative<Injective>(det_test_m2n4(random_frame<Rational>(2, 4, derive_seed(301, i))).verdict))
      ++inj24;
  for (std::size_t i = 0; i < 200; ++i)
    if (std::holds_alternative<Injective>(det_test_m3n8(random_frame<Rational>(3, 8, derive_seed(302, i))).verdict))
      ++inj38;
  const double dt = since(t0);
  report(3, inj24 == 1000 && inj38 == 200 && dt < 120.0, "exact determinant tests at N = 4M - 4", dt,
         "(2,4) " + std::to_string(inj24) + "/1000 Injective, (3,8) " + std::to_string(inj38) + "/200 Injective");
}

void c4_part_a() {
  const auto t0 = Clock::now();
  std::size_t ok23 = 0, ok37 = 0, fallbacks = 0;
  double worst_gap = 0.0, worst_imag = 0.0;
  auto witness_ok = [&](const Frame<double>& f, const Verdict& v) {
    const auto* ni = std::get_if<NonInjective>(&v);
    if (!ni) return false;
    const auto c = check_witness(f, ni->witness);
    worst_gap = std::max(worst_gap, c.max_gap / c.scale);
    return c.agrees(1e-8);
  };
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto f = random_frame<Rational>(2, 3, derive_seed(401, i));
    if (witness_ok(f.to_float(), kernel_cert_m2n3(f))) ++ok23;
  }
  for (std::size_t i = 0; i < 500; ++i) {
    const auto f = random_frame<Rational>(3, 7, derive_seed(402, i)).to_float();
    SearchOptions so;
    so.seed = derive_seed(403, i);
    const auto r = pencil_cubic_m3n7(f, so);
    if (r.used_search_fallback)
      ++fallbacks;
    else
      worst_imag = std::max(worst_imag, r.max_coefficient_imag);
    if (witness_ok(f, r.verdict)) ++ok37;
  }
  const double dt = since(t0);
  std::ostringstream d;
  d << "(2,3) " << ok23 << "/1000, (3,7) " << ok37 << "/500 NonInjective with verified witness; worst relative gap "
    << worst_gap << ", worst cubic coefficient imag " << worst_imag << ", search fallbacks " << fallbacks;
  report(4, ok23 == 1000 && ok37 == 500 && worst_imag <= 1e-12, "non-injectivity at (2,3) and (3,7)", dt, d.str());
}

void c5_power_of_two_plus_one() {
  const auto t0 = Clock::now();
  std::ostringstream d;
  bool ok = true;
  for (auto [m, n] : {std::pair{3u, 7u}, {5u, 15u}}) {
    std::size_t found = 0;
    std::vector<std::size_t> failed;
    for (std::size_t i = 0; i < 100; ++i) {
      const auto f = random_frame<double>(m, n, derive_seed(500 + m, i));
      SearchOptions so;
      so.seed = derive_seed(510 + m, i);
      const auto out = alternating_search(f, so);
      bool hit = false;
      if (const auto* ni = std::get_if<NonInjective>(&out.verdict)) {
        const auto diag = verify_certificate(f, ni->certificate.matrix(), 1e-8);
        hit = diag.passed && diag.linear_residual <= 1e-8 && diag.rank_residual <= 1e-8;
      }
      if (hit)
        ++found;
      else
        failed.push_back(i);
    }
    ok = ok && found >= 95;
    d << "(" << m << "," << n << ") " << found << "/100";
    if (!failed.empty()) {
      d << " [failed trials:";
      for (auto i : failed) d << " " << i;
      d << "]";
    }
    d << "; ";
  }
  report(5, ok, "hermitian search at M = 2^k + 1, N = 4M - 5", since(t0), d.str());
}

void c6_complex_points() {
  const auto t0 = Clock::now();
  std::size_t found = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto f = random_frame<double>(4, 11, derive_seed(601, i));
    SearchOptions so;
    so.mode = SearchMode::Complex;
    so.seed = derive_seed(602, i);
    const auto out = alternating_search(f, so);
    if (!out.complex_point) continue;
    const auto diag = verify_certificate(f, out.complex_point->q, 1e-8, false);
    worst = std::max({worst, diag.linear_residual, diag.rank_residual});
    if (diag.linear_residual <= 1e-8 && diag.rank_residual <= 1e-8) ++found;
  }
  std::ostringstream d;
  d << found << "/50 complex rank <= 2 points at (4,11); worst residual " << worst;
  report(6, found == 50, "complex-mode search at (4,11)", since(t0), d.str());
}

void c7_multihomogeneity() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f24 = random_frame<Rational>(2, 4, derive_seed(701, s));
    const auto f38 = random_frame<Rational>(3, 8, derive_seed(702, s));
    const Rational d24 = det_test_m2n4(f24).determinant, d38 = det_test_m3n8(f38).determinant;
    ok = ok && d24 != 0 && d38 != 0;
    for (const Rational lambda : {Rational(2), Rational(3)}) {
      for (std::size_t c = 0; c < 4; ++c)
        ok = ok && det_test_m2n4(f24.scale_column(c, {lambda, Rational(0)})).determinant == pow_q(lambda, 2) * d24;
      ok = ok && det_test_m2n4(scaled_all(f24, lambda)).determinant == pow_q(lambda, 8) * d24;
      for (std::size_t c = 0; c < 8; ++c)
        ok = ok && det_test_m3n8(f38.scale_column(c, {lambda, Rational(0)})).determinant == pow_q(lambda, 6) * d38;
      ok = ok && det_test_m3n8(scaled_all(f38, lambda)).determinant == pow_q(lambda, 48) * d38;
    }
  }
  report(7, ok, "multihomogeneity: (2,4) degrees 2/8, (3,8) degrees 6/48 at lambda in {2,3}", since(t0),
         "5 frames per shape, exact rational ratios");
}

void c8_cross_oracle() {
  const auto t0 = Clock::now();
  std::size_t agree24 = 0, agree38 = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    SearchOptions so;
    so.seed = derive_seed(803, i);
    const auto f24 = random_frame<double>(2, 4, derive_seed(801, i));
    if (tags_agree(tag_name(det_test_m2n4(f24).verdict), tag_name(alternating_search(f24, so).verdict))) ++agree24;
    const auto f38 = random_frame<double>(3, 8, derive_seed(802, i));
    if (tags_agree(tag_name(det_test_m3n8(f38).verdict), tag_name(alternating_search(f38, so).verdict))) ++agree38;
  }
  report(8, agree24 == 200 && agree38 == 200, "exact-test vs search tags on float frames", since(t0),
         "(2,4) " + std::to_string(agree24) + "/200, (3,8) " + std::to_string(agree38) +
             "/200 agree (Injective matches Injective or NotFound)");
}

void c9_jd_zero() {
  const auto t0 = Clock::now();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto sol = solve_m3n8(random_frame<Rational>(3, 8, derive_seed(901, i)));
    bool zero = true;
    for (const auto& x : sol.jacobian.multiply(sol.d)) zero = zero && x == 0;
    if (zero) ++ok;
  }
  report(9, ok == 100, "J * D = 0 exactly", since(t0), std::to_string(ok) + "/100 rational frames");
}

void c10_witness_round_trip() {
  const auto t0 = Clock::now();
  auto rng = make_rng(1001);
  std::size_t ok = 0, pairs = 0;
  double worst = 0.0;
  while (pairs < 500) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(pairs % 5);
    Eigen::VectorXcd x(m), y(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      x(k) = cplx(standard_normal(rng), standard_normal(rng));
      y(k) = cplx(standard_normal(rng), standard_normal(rng));
    }
    if (phase_distance(x, y) < 1e-3) continue;
    ++pairs;
    const Eigen::MatrixXcd q = x * x.adjoint() - y * y.adjoint();
    const auto w = witness_from_certificate(q);
    const double err = (w.x * w.x.adjoint() - w.y * w.y.adjoint() - q).norm();
    worst = std::max(worst, err);
    if (err <= 1e-10) ++ok;
  }
  std::ostringstream d;
  d << ok << "/500 pairs; worst Frobenius error " << worst;
  report(10, ok == 500, "witness round trip", since(t0), d.str());
}

void c11_fcp() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (std::size_t m = 2; m <= 4; ++m) {
    std::size_t holds = 0, fails = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      if (finite_complement_property(random_real_frame<Rational>(m, 2 * m - 1, derive_seed(1100 + m, i))).holds)
        ++holds;
      // At N = 2M - 2 a split into two halves of M - 1 vectors never spans.
      const auto g = random_real_frame<Rational>(m, 2 * m - 2, derive_seed(1110 + m, i));
      const auto r = finite_complement_property(g);
      if (!r.holds) {
        std::vector<std::size_t> rest;
        for (std::size_t k = 0; k < g.n(); ++k)
          if (std::find(r.failing_subset.begin(), r.failing_subset.end(), k) == r.failing_subset.end())
            rest.push_back(k);
        if (!spans(g.u().select_columns(r.failing_subset)) && !spans(g.u().select_columns(rest))) ++fails;
      }
    }
    ok = ok && holds == 100 && fails == 100;
    d << "M=" << m << ": " << holds << "/100 true at 2M-1, " << fails << "/100 false at 2M-2; ";
  }
  report(11, ok, "finite complement property thresholds", since(t0), d.str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void c12_cli_determinism(const std::string& cli) {
  const auto t0 = Clock::now();
  if (cli.empty()) {
    report(12, false, "CLI byte-identical reruns", since(t0), "no CLI path given");
    return;
  }
  const auto dir = std::filesystem::temp_directory_path() / ("phasecert_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string d = dir.string();
  const std::vector<std::string> prep = {
      "gen --m 2 --n 4 --seed 7 --out " + d + "/f24.json",
      "gen --m 3 --n 7 --seed 8 --out " + d + "/f37.json",
      "gen --m 2 --n 3 --seed 9 --exact --out " + d + "/f23.json",
      "gen --m 3 --n 5 --seed 10 --real --out " + d + "/real.json",
  };
  const std::vector<std::string> runs = {
      "gen --m 3 --n 8 --seed 11",
      "gen --m 2 --n 4 --seed 12 --exact --csv",
      "exact-test --frame " + d + "/f24.json --exact",
      "exact-test --frame " + d + "/f37.json --seed 1",
      "certify --frame " + d + "/f37.json --seed 3",
      "certify --frame " + d + "/f23.json --seed 3",
      "witness --frame " + d + "/f37.json --seed 4",
      "kernel --frame " + d + "/f23.json",
      "fcp --frame " + d + "/real.json",
      "degree --m 9",
      "hmw-bound --m 17",
      "parity-table --max 40",
      "montecarlo --m 2 --n 4 --trials 20 --seed 5",
      "montecarlo --m 3 --n 7 --trials 10 --seed 5 --threads 2 --csv",
      "explore-conjecture --m 4 --trials 3 --seed 6",
      "invariance --m 2 --n 4 --trials 5 --transforms 2 --seed 7",
  };
  bool ok = true;
  std::string bad;
  for (const auto& p : prep) ok = ok && std::system(("\"" + cli + "\" " + p + " 2>/dev/null").c_str()) == 0;
  if (!ok) bad = " (frame generation failed)";
  std::size_t identical = 0;
  for (std::size_t i = 0; i < runs.size() && ok; ++i) {
    std::string out[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const auto file = dir / ("run" + std::to_string(i) + "_" + std::to_string(k));
      ran = ran && std::system(("\"" + cli + "\" " + runs[i] + " > \"" + file.string() + "\" 2>/dev/null").c_str()) == 0;
      out[k] = slurp(file);
    }
    if (ran && !out[0].empty() && out[0] == out[1])
      ++identical;
    else
      bad += " [" + runs[i] + "]";
  }
  std::filesystem::remove_all(dir);
  ok = ok && identical == runs.size();
  report(12, ok, "CLI byte-identical reruns with explicit seeds", since(t0),
         std::to_string(identical) + "/" + std::to_string(runs.size()) + " invocations identical" + bad);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  c1_degree();
  c2_parity();
  c3_generic_injectivity();
  c4_part_a();
  c5_power_of_two_plus_one();
  c6_complex_points();
  c7_multihomogeneity();
  c8_cross_oracle();
  c9_jd_zero();
  c10_witness_round_trip();
  c11_fcp();
  c12_cli_determinism(cli);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
