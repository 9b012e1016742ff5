// phasecert: command-line front end.
//
// Exit codes: 0 success, 1 internal failure, 2 usage error, 3 malformed frame file.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "phasecert/io.hpp"

using namespace phasecert;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string frame;
  std::optional<std::size_t> m, n;
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  std::size_t restarts = 50;
  std::size_t max_iters = 2000;
  bool exact = false;
  std::string out;
  bool csv = false;
  std::string mode = "hermitian";
  std::size_t trials = 100;
  std::string method = "auto";
  unsigned threads = 1;
  std::size_t transforms = 5;
  bool timing = false;
  bool real = false;
  std::uint64_t table_max = 64;
};

void emit(const Args& a, const std::string& text) {
  if (a.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(a.out);
  if (!f) throw UsageError("cannot write '" + a.out + "'");
  f << text;
}

void emit(const Args& a, const json& j) { emit(a, j.dump(2) + "\n"); }

std::size_t need(const std::optional<std::size_t>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required option ") + flag);
  return *v;
}

/// Explicit seed, or a fresh one that is reported so the run can be replayed.
std::uint64_t seed_of(const Args& a) {
  if (a.seed) return *a.seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "phasecert: no --seed given, using --seed " << s << "\n";
  return s;
}

AnyFrame load(const Args& a) {
  if (a.frame.empty()) throw UsageError("missing required option --frame");
  return read_frame_file(a.frame, a.exact ? ScalarMode::Rational : ScalarMode::Float);
}

SearchOptions search_options(const Args& a, std::uint64_t seed) {
  SearchOptions so;
  so.mode = parse_search_mode(a.mode);
  so.tol = a.tol;
  so.restarts = a.restarts;
  so.max_iters = a.max_iters;
  so.seed = seed;
  so.validate();
  return so;
}

/// Last check before any NonInjective leaves the process.
void reverify(const Frame<double>& frame, const Verdict& v) {
  const auto* ni = std::get_if<NonInjective>(&v);
  if (!ni) return;
  const auto diag = verify_certificate(frame, ni->certificate.matrix(), kExactCertificateTolerance);
  if (!diag.passed) throw std::runtime_error("certificate failed re-verification");
  if (!check_witness(frame, ni->witness).agrees(kWitnessTolerance))
    throw std::runtime_error("witness failed re-verification");
}

int cmd_certify(const Args& a, bool witness_only) {
  const auto frame = as_float(load(a));
  const std::uint64_t seed = seed_of(a);
  const auto so = search_options(a, seed);
  const auto outcome = alternating_search(frame, so);
  reverify(frame, outcome.verdict);
  json j;
  if (witness_only) {
    j["verdict"] = tag_name(outcome.verdict);
    if (const auto* ni = std::get_if<NonInjective>(&outcome.verdict)) {
      const auto ax = intensity_measurements(frame, ni->witness.x);
      const auto ay = intensity_measurements(frame, ni->witness.y);
      j["witness"] = witness_json(frame, ni->witness);
      j["measurements_x"] = std::vector<double>(ax.data(), ax.data() + ax.size());
      j["measurements_y"] = std::vector<double>(ay.data(), ay.data() + ay.size());
    } else {
      j.update(verdict_json(frame, outcome.verdict));
    }
  } else {
    j = verdict_json(frame, outcome.verdict);
    if (outcome.complex_point) {
      j["verdict"] = "Indeterminate";
      j["complex_point"] = complex_certificate_json(*outcome.complex_point);
    }
  }
  j["mode"] = a.mode;
  j["kernel_dim"] = outcome.kernel_dim;
  j["seed"] = seed;
  j["restart"] = outcome.trace.restart;
  j["iterations"] = outcome.trace.iterations;
  emit(a, j);
  return 0;
}

template <Scalar T>
json exact_payload(const Frame<T>& frame, const SearchOptions& fallback) {
  const auto ff = frame.to_float();
  const std::size_t m = frame.m(), n = frame.n();
  json j;
  auto with_det = [&](const auto& r) {
    reverify(ff, r.verdict);
    j = verdict_json(ff, r.verdict);
    j["determinant"] = determinant_text(r.determinant);
    if constexpr (!is_exact_v<T>) j["zero_threshold"] = r.zero_threshold;
  };
  if (m == 2 && n == 4) {
    with_det(det_test_m2n4(frame));
  } else if (m == 3 && n == 8) {
    with_det(det_test_m3n8(frame));
  } else if (m == 2 && n == 3) {
    const auto v = kernel_cert_m2n3(frame);
    reverify(ff, v);
    j = verdict_json(ff, v);
  } else if (m == 3 && n == 7) {
    const auto r = pencil_cubic_m3n7(ff, fallback);
    reverify(ff, r.verdict);
    j = verdict_json(ff, r.verdict);
    json coeffs = json::array();
    for (const auto& c : r.coefficients) coeffs.push_back({c.real(), c.imag()});
    j["pencil"] = json{{"coefficients", coeffs},
                       {"max_coefficient_imag", r.max_coefficient_imag},
                       {"reversed", r.reversed},
                       {"root", r.root},
                       {"used_search_fallback", r.used_search_fallback}};
  } else {
    throw UsageError("exact-test supports (M, N) in {(2,3), (2,4), (3,7), (3,8)}, got (" + std::to_string(m) +
                     ", " + std::to_string(n) + ")");
  }
  j["arithmetic"] = is_exact_v<T> ? "rational" : "float";
  return j;
}

int cmd_exact_test(const Args& a) {
  const auto frame = load(a);
  const std::uint64_t seed = a.seed.value_or(0);
  const auto so = search_options(a, seed);
  json j = (a.exact || mode_of(frame) == ScalarMode::Rational) ? exact_payload(as_rational(frame), so)
                                                                : exact_payload(as_float(frame), so);
  emit(a, j);
  return 0;
}

int cmd_kernel(const Args& a) {
  const auto frame = load(a);
  if (a.exact || mode_of(frame) == ScalarMode::Rational)
    emit(a, kernel_json(kernel_basis(constraint_matrix(as_rational(frame)))));
  else
    emit(a, kernel_json(kernel_basis(constraint_matrix(as_float(frame)))));
  return 0;
}

int cmd_fcp(const Args& a) {
  const auto frame = load(a);
  json j = std::visit(
      [](const auto& f) {
        if (!is_real_frame(f)) throw UsageError("fcp needs a real frame (all imaginary parts zero)");
        return fcp_json(finite_complement_property(f));
      },
      frame);
  emit(a, j);
  return 0;
}

int cmd_degree(const Args& a) {
  emit(a, degree_json(degree_report(need(a.m, "--m"))));
  return 0;
}

int cmd_hmw(const Args& a) {
  const auto m = need(a.m, "--m");
  if (m < 2) throw UsageError("--m must be at least 2");
  emit(a, json{{"m", m},
               {"s2_m_minus_1", digit_sum(static_cast<std::uint64_t>(m - 1), 2)},
               {"hmw_bound", hmw_bound(m)},
               {"4m-5", 4 * m - 5},
               {"4m-4", 4 * m - 4}});
  return 0;
}

int cmd_parity_table(const Args& a) {
  if (a.table_max < 2) throw UsageError("--max must be at least 2");
  emit(a, parity_table_csv(2, a.table_max));
  return 0;
}

HarnessOptions harness_options(const Args& a, std::uint64_t seed) {
  HarnessOptions ho;
  ho.method = parse_method(a.method);
  ho.search = search_options(a, seed);
  ho.threads = a.threads;
  return ho;
}

void emit_report(const Args& a, const ExperimentReport& r) {
  if (a.csv)
    emit(a, report_csv(r));
  else
    emit(a, report_json(r, a.timing));
}

int cmd_montecarlo(const Args& a) {
  const std::uint64_t seed = seed_of(a);
  emit_report(a, montecarlo(need(a.m, "--m"), need(a.n, "--n"), a.trials, seed, harness_options(a, seed)));
  return 0;
}

int cmd_explore(const Args& a) {
  const std::uint64_t seed = seed_of(a);
  emit_report(a, explore_conjecture(need(a.m, "--m"), a.n, a.trials, seed, harness_options(a, seed)));
  return 0;
}

int cmd_invariance(const Args& a) {
  const std::uint64_t seed = seed_of(a);
  emit(a, invariance_json(
              invariance_suite(need(a.m, "--m"), need(a.n, "--n"), a.trials, seed, a.transforms, harness_options(a, seed))));
  return 0;
}

int cmd_gen(const Args& a) {
  const auto m = need(a.m, "--m"), n = need(a.n, "--n");
  const std::uint64_t seed = seed_of(a);
  auto write = [&](const auto& f) { emit(a, a.csv ? frame_to_csv(f) : frame_to_json(f).dump(2) + "\n"); };
  if (a.exact)
    write(a.real ? random_real_frame<Rational>(m, n, seed) : random_frame<Rational>(m, n, seed));
  else
    write(a.real ? random_real_frame<double>(m, n, seed) : random_frame<double>(m, n, seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval injectivity certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--frame", a.frame, "frame file (.json or .csv)");
  app.add_option("--m", a.m, "dimension M");
  app.add_option("--n", a.n, "number of frame vectors N");
  app.add_option("--seed", a.seed, "RNG seed");
  app.add_option("--tol", a.tol, "residual tolerance")->capture_default_str();
  app.add_option("--restarts", a.restarts, "search restarts")->capture_default_str();
  app.add_option("--max-iters", a.max_iters, "iterations per restart")->capture_default_str();
  app.add_flag("--exact", a.exact, "rational arithmetic / rational frames");
  app.add_option("--out", a.out, "write output to FILE instead of stdout");
  app.add_flag("--csv", a.csv, "CSV output");
  app.add_option("--mode", a.mode, "search mode: hermitian|complex")->capture_default_str();
  app.add_option("--trials", a.trials, "number of trials")->capture_default_str();
  app.add_option("--method", a.method, "exact|search|auto")->capture_default_str();
  app.add_option("--threads", a.threads, "worker threads")->capture_default_str();
  app.add_option("--transforms", a.transforms, "transforms per frame (invariance)")->capture_default_str();
  app.add_flag("--timing", a.timing, "include wall-clock time in reports");
  app.add_flag("--real", a.real, "gen: real frame");
  app.add_option("--max", a.table_max, "parity-table: largest M")->capture_default_str();

  struct Cmd {
    const char* name;
    const char* help;
    std::function<int()> run;
  };
  const std::vector<Cmd> cmds = {
      {"certify", "search for a rank <= 2 certificate", [&] { return cmd_certify(a, false); }},
      {"witness", "colliding pair x, y with equal measurements", [&] { return cmd_certify(a, true); }},
      {"exact-test", "exact decision for (2,3), (2,4), (3,7), (3,8)", [&] { return cmd_exact_test(a); }},
      {"kernel", "basis of L_Phi in Hermitian coordinates", [&] { return cmd_kernel(a); }},
      {"fcp", "finite complement property of a real frame", [&] { return cmd_fcp(a); }},
      {"degree", "degree of the rank <= 2 locus", [&] { return cmd_degree(a); }},
      {"parity-table", "degree parity table as CSV", [&] { return cmd_parity_table(a); }},
      {"montecarlo", "random-frame experiment", [&] { return cmd_montecarlo(a); }},
      {"explore-conjecture", "search at N = 4M - 5", [&] { return cmd_explore(a); }},
      {"invariance", "verdict invariance under frame transforms", [&] { return cmd_invariance(a); }},
      {"hmw-bound", "4M - 2 s2(M-1) - 4", [&] { return cmd_hmw(a); }},
      {"gen", "write a random frame", [&] { return cmd_gen(a); }},
  };
  std::vector<std::pair<CLI::App*, const Cmd*>> subs;
  for (const auto& c : cmds) subs.emplace_back(app.add_subcommand(c.name, c.help), &c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    for (const auto& [sub, c] : subs)
      if (sub->parsed()) return c->run();
  } catch (const FormatError& e) {
    std::cerr << "phasecert: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "phasecert: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "phasecert: " << e.what() << "\n";
    return 2;
  } catch (const FrameError& e) {
    std::cerr << "phasecert: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "phasecert: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
