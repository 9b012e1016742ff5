#include <gtest/gtest.h>

#include "phasecert/io.hpp"

using namespace phasecert;

namespace {

Eigen::MatrixXcd diag3(double a, double b, double c) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(3, 3);
  q(0, 0) = a;
  q(1, 1) = b;
  q(2, 2) = c;
  return q;
}

Eigen::VectorXcd random_vector(Rng& rng, Eigen::Index m) {
  Eigen::VectorXcd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = cplx(standard_normal(rng), standard_normal(rng));
  return v;
}

double singular(const Eigen::MatrixXcd& q, Eigen::Index i) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q);
  return svd.singularValues()(i);
}

}  // namespace

TEST(ProjectRank2, Examples) {
  EXPECT_LE((project_rank2(diag3(3, 2, 1), SearchMode::Hermitian) - diag3(3, 2, 0)).norm(), 1e-14);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  const auto p = project_rank2(id, SearchMode::Hermitian);
  EXPECT_NEAR((id - p).norm(), 1.0, 1e-14);
  EXPECT_NEAR(p.trace().real(), 2.0, 1e-14);
  EXPECT_LE((project_rank2(diag3(3, -2, 1), SearchMode::Hermitian) - diag3(3, -2, 0)).norm(), 1e-14);
  EXPECT_LE((project_rank2(diag3(3, 2, 1), SearchMode::Complex) - diag3(3, 2, 0)).norm(), 1e-14);
}

TEST(ProjectRank2, TieBreakIsDeterministic) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(4, 4);
  EXPECT_EQ(project_rank2(id, SearchMode::Hermitian), project_rank2(id, SearchMode::Hermitian));
}

TEST(ProjectRank2, IdempotentOnRankTwo) {
  auto rng = make_rng(51);
  for (int t = 0; t < 30; ++t) {
    const auto x = random_vector(rng, 5), y = random_vector(rng, 5);
    const Eigen::MatrixXcd q = x * x.adjoint() - y * y.adjoint();
    EXPECT_LE((project_rank2(q, SearchMode::Hermitian) - q).norm(), 1e-12 * q.norm());
    const Eigen::MatrixXcd g = x * y.adjoint() + y * x.transpose();
    EXPECT_LE((project_rank2(g, SearchMode::Complex) - g).norm(), 1e-12 * g.norm());
  }
}

TEST(ProjectRank2, NearestAmongHermitianRankTwo) {
  // Eckart-Young for Hermitian matrices: the error equals the dropped eigenvalues.
  auto rng = make_rng(52);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXcd a(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(r, c) = cplx(standard_normal(rng), standard_normal(rng));
    const Eigen::MatrixXcd q = a + a.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
    std::vector<double> mags;
    for (int i = 0; i < 4; ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mags.begin(), mags.end());
    const double want = std::sqrt(mags[0] * mags[0] + mags[1] * mags[1]);
    EXPECT_NEAR((q - project_rank2(q, SearchMode::Hermitian)).norm(), want, 1e-10 * q.norm());
  }
}

TEST(ProjectLinear, IdempotentAndFixesKernel) {
  auto rng = make_rng(53);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = random_frame<double>(3, 5, s);
    const auto kb = kernel_basis(constraint_matrix(f));
    Eigen::MatrixXcd a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = cplx(standard_normal(rng), standard_normal(rng));
    const Eigen::MatrixXcd q = a + a.adjoint();
    const auto p = project_linear(q, kb);
    EXPECT_LE((project_linear(p, kb) - p).norm(), 1e-12 * q.norm());
    const auto in_l = hermitian_from_coords(kb.basis[0]);
    EXPECT_LE((project_linear(in_l, kb) - in_l).norm(), 1e-12);
    // Frobenius orthogonality: the residual is orthogonal to every element of L_Phi.
    for (const auto& b : kb.basis)
      EXPECT_NEAR((hermitian_from_coords(b).adjoint() * (q - p)).trace().real(), 0.0, 1e-10 * q.norm());
    // The projection satisfies the constraints.
    const auto d = verify_certificate(f, p, 1.0);
    EXPECT_LE(d.linear_residual, 1e-10 * q.norm());
  }
}

TEST(ProjectLinear, EmptyBasisGivesZero) {
  const auto kb = kernel_basis(constraint_matrix(random_frame<double>(2, 4, 1)));
  ASSERT_TRUE(kb.empty());
  EXPECT_EQ(project_linear(Eigen::MatrixXcd::Identity(2, 2), kb).norm(), 0.0);
}

TEST(SearchOptions, Validation) {
  SearchOptions so;
  so.tol = 0.0;
  EXPECT_THROW(so.validate(), std::invalid_argument);
  so = {};
  so.max_iters = 0;
  EXPECT_THROW(so.validate(), std::invalid_argument);
  so = {};
  so.restarts = 0;
  EXPECT_THROW(so.validate(), std::invalid_argument);
  EXPECT_EQ(parse_search_mode("complex"), SearchMode::Complex);
  EXPECT_THROW(parse_search_mode("real"), std::invalid_argument);
}

TEST(AlternatingSearch, M2N3MatchesKernelCertificate) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_frame<double>(2, 3, s);
    SearchOptions so;
    so.seed = s;
    const auto out = alternating_search(f, so);
    ASSERT_EQ(tag_name(out.verdict), "NonInjective");
    const auto a = std::get<NonInjective>(out.verdict).certificate.matrix();
    const auto b = std::get<NonInjective>(kernel_cert_m2n3(f)).certificate.matrix();
    EXPECT_LE(std::min((a - b).norm(), (a + b).norm()), 1e-8);
  }
}

TEST(AlternatingSearch, EmptyKernelIsInjective) {
  const auto out = alternating_search(random_frame<double>(2, 4, 3), {});
  EXPECT_EQ(tag_name(out.verdict), "Injective");
  SearchOptions so;
  so.mode = SearchMode::Complex;
  EXPECT_EQ(tag_name(alternating_search(random_frame<double>(2, 4, 3), so).verdict), "Injective");
}

TEST(AlternatingSearch, ExhaustedBudgetIsNotFound) {
  SearchOptions so;
  so.restarts = 2;
  so.max_iters = 5;
  const auto out = alternating_search(random_frame<double>(3, 8, 1), so);
  ASSERT_EQ(tag_name(out.verdict), "NotFound");
  const auto& b = std::get<NotFound>(out.verdict).budget;
  EXPECT_EQ(b.note, "no certificate found within budget");
  EXPECT_EQ(b.restarts, 2u);
  EXPECT_LE(b.iterations_used, 10u);
}

TEST(AlternatingSearch, PowerOfTwoPlusOneFindsCertificates) {
  for (auto [m, n] : {std::pair{3u, 7u}, {5u, 15u}}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto f = random_frame<double>(m, n, s);
      SearchOptions so;
      so.seed = derive_seed(s, 9);
      const auto out = alternating_search(f, so);
      ASSERT_EQ(tag_name(out.verdict), "NonInjective") << m << "," << n << " seed " << s;
      const auto& ni = std::get<NonInjective>(out.verdict);
      const auto d = verify_certificate(f, ni.certificate.matrix(), 1e-8);
      EXPECT_TRUE(d.passed);
      EXPECT_TRUE(check_witness(f, ni.witness).agrees(kWitnessTolerance));
      EXPECT_GE(check_witness(f, ni.witness).separation, 0.1 * ni.certificate.matrix().norm());
    }
  }
}

TEST(AlternatingSearch, StepNormsAreRecorded) {
  const auto f = random_frame<double>(3, 7, 4);
  SearchOptions so;
  so.seed = 4;
  const auto out = alternating_search(f, so);
  ASSERT_EQ(tag_name(out.verdict), "NonInjective");
  for (double s : out.trace.step_norms) EXPECT_GE(s, 0.0);
  EXPECT_LE(out.trace.step_norms.size(), so.max_iters);
}

TEST(AlternatingSearch, ComplexModeFindsRankTwoPoint) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = random_frame<double>(4, 11, s);
    SearchOptions so;
    so.mode = SearchMode::Complex;
    so.seed = s;
    const auto out = alternating_search(f, so);
    ASSERT_TRUE(out.complex_point.has_value()) << "seed " << s;
    EXPECT_EQ(tag_name(out.verdict), "Indeterminate");
    const auto& cp = *out.complex_point;
    EXPECT_LE(cp.linear_residual, 1e-8);
    EXPECT_LE(cp.rank_residual, 1e-8);
    EXPECT_NEAR(cp.q.norm(), 1.0, 1e-12);
    const auto d = verify_certificate(f, cp.q, 1e-8, false);
    EXPECT_TRUE(d.passed);
  }
}

TEST(AlternatingSearch, SameSeedSameResult) {
  const auto f = random_frame<double>(3, 7, 8);
  SearchOptions so;
  so.seed = 123;
  const auto a = alternating_search(f, so), b = alternating_search(f, so);
  ASSERT_EQ(tag_name(a.verdict), "NonInjective");
  EXPECT_EQ(std::get<NonInjective>(a.verdict).certificate.q, std::get<NonInjective>(b.verdict).certificate.q);
  EXPECT_EQ(a.trace.step_norms, b.trace.step_norms);
}

TEST(VerifyCertificate, RejectsRankOneAndZero) {
  const auto f = random_frame<double>(3, 5, 2);
  const Eigen::VectorXcd phi1 = f.complex_matrix().col(0);
  const auto d = verify_certificate(f, phi1 * phi1.adjoint(), 1e-8);
  EXPECT_FALSE(d.passed);
  EXPECT_GE(d.linear_residual, d.row_residuals[0]);
  EXPECT_EQ(d.linear_residual, d.row_residuals[d.worst_row]);
  EXPECT_NEAR(d.row_residuals[0], std::pow(phi1.squaredNorm(), 2), 1e-10 * std::pow(phi1.squaredNorm(), 2));
  EXPECT_FALSE(verify_certificate(f, Eigen::MatrixXcd::Zero(3, 3), 1e-8).passed);
}

TEST(VerifyCertificate, IndependentOfProducer) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = random_frame<double>(3, 7, s);
    const auto r = pencil_cubic_m3n7(f);
    const auto& ni = std::get<NonInjective>(r.verdict);
    EXPECT_TRUE(verify_certificate(f, ni.certificate.matrix(), 1e-8).passed);
    EXPECT_TRUE(verify_certificate(f, 7.5 * ni.certificate.matrix(), 1e-8).passed);
  }
}

TEST(Witness, RoundTripFromOuterProducts) {
  auto rng = make_rng(54);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index m = 2 + t % 5;
    const auto x = random_vector(rng, m), y = random_vector(rng, m);
    const Eigen::MatrixXcd q = x * x.adjoint() - y * y.adjoint();
    const auto w = witness_from_certificate(q);
    EXPECT_LE((w.x * w.x.adjoint() - w.y * w.y.adjoint() - q).norm(), 1e-10 * std::max(1.0, q.norm()));
  }
}

TEST(Witness, SemidefiniteRejected) {
  auto rng = make_rng(55);
  const auto x = random_vector(rng, 3);
  EXPECT_THROW(witness_from_certificate(x * x.adjoint()), CertificateError);
  EXPECT_THROW(witness_from_certificate(-(x * x.adjoint())), CertificateError);
  EXPECT_THROW(witness_from_certificate(Eigen::MatrixXcd::Zero(3, 3)), CertificateError);
}

TEST(Witness, MeasurementsAgreeOnEveryEmittedCertificate) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_frame<double>(3, 7, s);
    const auto r = pencil_cubic_m3n7(f);
    const auto& ni = std::get<NonInjective>(r.verdict);
    const auto ax = intensity_measurements(f, ni.witness.x), ay = intensity_measurements(f, ni.witness.y);
    EXPECT_LE((ax - ay).cwiseAbs().maxCoeff(), 1e-8 * std::max(ax.cwiseAbs().maxCoeff(), 1.0));
    EXPECT_GT(phase_distance(ni.witness.x, ni.witness.y), 1e-6);
    EXPECT_LE(singular(ni.certificate.matrix(), 2), 1e-8);
  }
}

TEST(Invariance, SearchTagStableUnderTransforms) {
  auto rng = make_rng(56);
  for (auto [m, n] : {std::pair{2u, 3u}, {3u, 7u}, {2u, 4u}}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto f = random_frame<Rational>(m, n, s);
      SearchOptions so;
      so.seed = s;
      const auto base = tag_name(alternating_search(f.to_float(), so).verdict);
      const auto g = detail::random_transform(f, rng);
      EXPECT_EQ(tag_name(alternating_search(g.to_float(), so).verdict), base);
    }
  }
}
