#pragma once

// File formats and JSON payloads.
//
// Frame JSON:
//   {"m": 2, "n": 3, "mode": "float" | "rational",
//    "vectors": [ [[re, im], ... m pairs], ... n vectors ]}
// with numbers in float mode and "p/q" strings in rational mode.
//
// Frame CSV: one line per vector, 2m comma-separated values
//   re_1,im_1,...,re_m,im_m

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "phasecert/certificate.hpp"
#include "phasecert/combinatorics.hpp"
#include "phasecert/constraints.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/harness.hpp"
#include "phasecert/realframes.hpp"

namespace phasecert {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using AnyFrame = std::variant<Frame<double>, Frame<Rational>>;

inline ScalarMode mode_of(const AnyFrame& f) {
  return std::holds_alternative<Frame<double>>(f) ? ScalarMode::Float : ScalarMode::Rational;
}

/// Exact conversion of a float frame (every double is a dyadic rational).
inline Frame<Rational> to_rational(const Frame<double>& f) {
  Dense<Rational> u(f.m(), f.n()), v(f.m(), f.n());
  for (std::size_t r = 0; r < f.m(); ++r)
    for (std::size_t c = 0; c < f.n(); ++c) {
      u(r, c) = Rational(f.u()(r, c));
      v(r, c) = Rational(f.v()(r, c));
    }
  return Frame<Rational>(std::move(u), std::move(v));
}

inline Frame<double> as_float(const AnyFrame& f) {
  return std::visit([](const auto& fr) { return fr.to_float(); }, f);
}

inline Frame<Rational> as_rational(const AnyFrame& f) {
  if (const auto* r = std::get_if<Frame<Rational>>(&f)) return *r;
  return to_rational(std::get<Frame<double>>(f));
}

// ---------------------------------------------------------------------------
// Frames

template <Scalar T>
json scalar_json(const T& x) {
  if constexpr (is_exact_v<T>)
    return rational_to_string(x);
  else
    return x;
}

template <Scalar T>
json frame_to_json(const Frame<T>& f) {
  json vecs = json::array();
  for (std::size_t c = 0; c < f.n(); ++c) {
    json vec = json::array();
    for (std::size_t r = 0; r < f.m(); ++r) vec.push_back({scalar_json(f.u()(r, c)), scalar_json(f.v()(r, c))});
    vecs.push_back(std::move(vec));
  }
  return json{{"m", f.m()}, {"n", f.n()}, {"mode", to_string(f.mode())}, {"vectors", std::move(vecs)}};
}

inline json frame_to_json(const AnyFrame& f) {
  return std::visit([](const auto& fr) { return frame_to_json(fr); }, f);
}

namespace detail {

template <Scalar T>
T parse_json_scalar(const json& v) {
  if constexpr (is_exact_v<T>) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw FormatError("rational frame entries must be \"p/q\" strings or integers");
  } else {
    if (!v.is_number()) throw FormatError("float frame entries must be numbers");
    return v.get<double>();
  }
}

template <Scalar T>
Frame<T> frame_from_json_as(const json& j, std::size_t m, std::size_t n) {
  const auto& vecs = j.at("vectors");
  if (!vecs.is_array() || vecs.size() != n) throw FormatError("\"vectors\" must hold n entries");
  Dense<T> u(m, n), v(m, n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& vec = vecs[c];
    if (!vec.is_array() || vec.size() != m) throw FormatError("each vector must hold m [re, im] pairs");
    for (std::size_t r = 0; r < m; ++r) {
      const auto& pair = vec[r];
      if (!pair.is_array() || pair.size() != 2) throw FormatError("entries must be [re, im] pairs");
      u(r, c) = parse_json_scalar<T>(pair[0]);
      v(r, c) = parse_json_scalar<T>(pair[1]);
    }
  }
  return Frame<T>(std::move(u), std::move(v));
}

}  // namespace detail

inline AnyFrame frame_from_json(const json& j) {
  try {
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const auto mode = parse_scalar_mode(j.value("mode", std::string("float")));
    if (mode == ScalarMode::Rational) return detail::frame_from_json_as<Rational>(j, m, n);
    return detail::frame_from_json_as<double>(j, m, n);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed frame JSON: ") + e.what());
  }
}

/// CSV frames are read as float unless `mode` is Rational, in which case
/// every token (decimal or p/q) is parsed exactly.
inline AnyFrame frame_from_csv(std::istream& in, ScalarMode mode = ScalarMode::Float) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> toks;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    rows.push_back(std::move(toks));
  }
  if (rows.empty()) throw FormatError("empty CSV frame");
  const std::size_t width = rows.front().size();
  if (width % 2 != 0 || width < 4) throw FormatError("CSV rows need 2m values with m >= 2");
  const std::size_t m = width / 2, n = rows.size();
  auto build = [&]<Scalar T>(auto parse) {
    Dense<T> u(m, n), v(m, n);
    for (std::size_t c = 0; c < n; ++c) {
      if (rows[c].size() != width) throw FormatError("CSV rows differ in length");
      for (std::size_t r = 0; r < m; ++r) {
        u(r, c) = parse(rows[c][2 * r]);
        v(r, c) = parse(rows[c][2 * r + 1]);
      }
    }
    return Frame<T>(std::move(u), std::move(v));
  };
  try {
    if (mode == ScalarMode::Rational)
      return build.template operator()<Rational>([](const std::string& s) { return parse_rational(s); });
    return build.template operator()<double>([](const std::string& s) {
      std::size_t pos = 0;
      const double x = std::stod(s, &pos);
      if (s.find_first_not_of(" \t\r", pos) != std::string::npos) throw FormatError("bad number '" + s + "'");
      return x;
    });
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed CSV frame: ") + e.what());
  }
}

template <Scalar T>
std::string frame_to_csv(const Frame<T>& f) {
  std::string out;
  auto text = [](const T& x) {
    if constexpr (is_exact_v<T>)
      return rational_to_string(x);
    else
      return double_to_string(x);
  };
  for (std::size_t c = 0; c < f.n(); ++c) {
    for (std::size_t r = 0; r < f.m(); ++r) {
      if (r) out += ',';
      out += text(f.u()(r, c)) + ',' + text(f.v()(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Reads a frame file; the format is chosen by extension (.csv) or content.
inline AnyFrame read_frame_file(const std::string& path, ScalarMode csv_mode = ScalarMode::Float) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open frame file '" + path + "'");
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return frame_from_csv(in, csv_mode);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("frame file is not valid JSON: ") + e.what());
  }
  return frame_from_json(j);
}

// ---------------------------------------------------------------------------
// Results

inline json complex_vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline json complex_matrix_json(const Eigen::MatrixXcd& q) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      rr.push_back(q(r, c).real());
      ri.push_back(q(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

template <Scalar T>
json coords_json(const HermitianCoords<T>& q) {
  json out = json::array();
  for (const auto& c : q.coords()) out.push_back(scalar_json(c));
  return out;
}

inline json certificate_json(const Certificate& c) {
  json j{{"m", c.q.m()},
         {"coords", coords_json(c.q)},
         {"matrix", complex_matrix_json(c.matrix())},
         {"linear_residual", c.linear_residual},
         {"rank_residual", c.rank_residual},
         {"frobenius_norm", c.frobenius_norm}};
  if (c.exact) j["exact_coords"] = coords_json(*c.exact);
  return j;
}

inline json witness_json(const Frame<double>& frame, const WitnessPair& w) {
  const auto check = check_witness(frame, w);
  return json{{"x", complex_vector_json(w.x)},
              {"y", complex_vector_json(w.y)},
              {"max_measurement_gap", check.max_gap},
              {"phase_distance", phase_distance(w.x, w.y)},
              {"separation", check.separation}};
}

inline json budget_json(const BudgetReport& b) {
  return json{{"restarts", b.restarts},
              {"max_iters", b.max_iters},
              {"iterations_used", b.iterations_used},
              {"best_rank_residual", b.best_rank_residual},
              {"note", b.note}};
}

inline json verdict_json(const Frame<double>& frame, const Verdict& v) {
  json j{{"verdict", tag_name(v)}};
  std::visit(
      [&](const auto& alt) {
        using A = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<A, Injective> || std::is_same_v<A, Indeterminate>) {
          j["reason"] = alt.reason;
        } else if constexpr (std::is_same_v<A, NonInjective>) {
          j["certificate"] = certificate_json(alt.certificate);
          j["witness"] = witness_json(frame, alt.witness);
        } else {
          j["budget"] = budget_json(alt.budget);
        }
      },
      v);
  return j;
}

inline json complex_certificate_json(const ComplexCertificate& c) {
  return json{{"matrix", complex_matrix_json(c.q)},
              {"linear_residual", c.linear_residual},
              {"rank_residual", c.rank_residual},
              {"hermitian_deviation", c.hermitian_deviation}};
}

template <Scalar T>
json kernel_json(const KernelBasis<T>& kb) {
  json basis = json::array();
  for (const auto& b : kb.basis) basis.push_back(coords_json(b));
  return json{{"m", kb.m}, {"dim", kb.dim()}, {"orthonormal", kb.orthonormal}, {"basis", std::move(basis)}};
}

inline json degree_json(const DegreeReport& r) {
  return json{{"m", r.m},
              {"degree", r.degree.get_str()},
              {"two_adic_valuation", r.two_adic_valuation},
              {"is_odd", r.is_odd},
              {"is_power_of_two_plus_one", r.is_power_of_two_plus_one},
              {"expected_resultant_exponent", r.expected_resultant_exponent}};
}

/// CSV: m, d_{M,2}, v2, is_odd, 2^k+1 flag, hmw_bound, 4m-5, 4m-4.
inline std::string parity_table_csv(std::uint64_t m_lo, std::uint64_t m_hi) {
  std::string out = "m,degree,v2,is_odd,power_of_two_plus_one,hmw_bound,4m-5,4m-4\n";
  for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
    const auto r = degree_report(m);
    out += std::to_string(m) + ',' + r.degree.get_str() + ',' + std::to_string(r.two_adic_valuation) + ',' +
           (r.is_odd ? "true" : "false") + ',' + (r.is_power_of_two_plus_one ? "true" : "false") + ',' +
           std::to_string(hmw_bound(m)) + ',' + std::to_string(4 * m - 5) + ',' + std::to_string(4 * m - 4) + '\n';
  }
  return out;
}

inline json stats_json(const ResidualStats& s) {
  return json{{"count", s.count}, {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

/// Wall-clock time is left out unless asked for, so reports with the same
/// arguments are byte-identical.
inline json report_json(const ExperimentReport& r, bool include_timing = false) {
  json counts = json::object();
  for (const auto& [k, v] : r.counts) counts[k] = v;
  json records = json::array();
  for (const auto& t : r.records) {
    json rec{{"index", t.index}, {"seed", t.seed}, {"method", t.method}, {"verdict", t.verdict}};
    if (t.determinant) rec["determinant"] = *t.determinant;
    if (t.linear_residual) rec["linear_residual"] = *t.linear_residual;
    if (t.rank_residual) rec["rank_residual"] = *t.rank_residual;
    if (t.witness_gap) rec["witness_gap"] = *t.witness_gap;
    if (!t.note.empty()) rec["note"] = t.note;
    records.push_back(std::move(rec));
  }
  json j{{"experiment", r.experiment}, {"m", r.m},           {"n", r.n},
         {"trials", r.trials},         {"seed", r.seed},     {"method", r.method},
         {"counts", std::move(counts)}};
  if (r.found_rate) j["found_rate"] = *r.found_rate;
  j["linear_residuals"] = stats_json(r.linear_residuals);
  j["rank_residuals"] = stats_json(r.rank_residuals);
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  j["records"] = std::move(records);
  return j;
}

inline std::string report_csv(const ExperimentReport& r) {
  std::string out = "index,seed,method,verdict,determinant,linear_residual,rank_residual,witness_gap\n";
  auto opt = [](const std::optional<double>& x) { return x ? double_to_string(*x) : std::string(); };
  for (const auto& t : r.records)
    out += std::to_string(t.index) + ',' + std::to_string(t.seed) + ',' + t.method + ',' + t.verdict + ',' +
           t.determinant.value_or("") + ',' + opt(t.linear_residual) + ',' + opt(t.rank_residual) + ',' +
           opt(t.witness_gap) + '\n';
  return out;
}

inline json invariance_json(const InvarianceReport& r) {
  json base = json::object();
  for (const auto& [k, v] : r.base_counts) base[k] = v;
  return json{{"experiment", "invariance"},
              {"m", r.m},
              {"n", r.n},
              {"trials", r.trials},
              {"transforms", r.transforms},
              {"seed", r.seed},
              {"base_verdicts", std::move(base)},
              {"exact_mismatches", r.exact_mismatches},
              {"search_mismatches", r.search_mismatches},
              {"kernel_dim_mismatches", r.kernel_dim_mismatches},
              {"passed", r.passed()}};
}

inline json fcp_json(const FcpResult& r) {
  json j{{"finite_complement_property", r.holds}};
  if (!r.holds) j["failing_subset"] = r.failing_subset;
  return j;
}

}  // namespace phasecert
