#include <gtest/gtest.h>

#include <sstream>

#include "phasecert/io.hpp"

using namespace phasecert;

TEST(FrameJson, RoundTripBothModes) {
  const auto fq = random_frame<Rational>(3, 5, 1);
  const auto back = frame_from_json(json::parse(frame_to_json(fq).dump()));
  EXPECT_EQ(std::get<Frame<Rational>>(back), fq);
  const auto ff = random_frame<double>(2, 4, 2);
  EXPECT_EQ(std::get<Frame<double>>(frame_from_json(json::parse(frame_to_json(ff).dump()))), ff);
}

TEST(FrameJson, Layout) {
  const auto j = frame_to_json(frame_from_columns<Rational>(
      {{{Rational(1, 2), Rational(0)}, {Rational(0), Rational(-3)}}}));
  EXPECT_EQ(j.dump(), R"({"m":2,"n":1,"mode":"rational","vectors":[[["1/2","0"],["0","-3"]]]})");
}

TEST(FrameJson, MalformedInputs) {
  for (const char* text : {R"({"m":2})", R"({"m":2,"n":2,"vectors":[[[1,0],[0,1]]]})",
                           R"({"m":2,"n":1,"vectors":[[[1,0],[0]]]})",
                           R"({"m":2,"n":1,"mode":"rational","vectors":[[["1/x","0"],["0","1"]]]})",
                           R"({"m":2,"n":1,"mode":"float","vectors":[[["a",0],[0,1]]]})",
                           R"({"m":2,"n":1,"mode":"complex","vectors":[[[1,0],[0,1]]]})",
                           R"({"m":1,"n":1,"vectors":[[[1,0]]]})"})
    EXPECT_THROW(frame_from_json(json::parse(text)), FormatError) << text;
}

TEST(FrameCsv, RoundTrip) {
  const auto fq = random_frame<Rational>(3, 4, 3);
  std::istringstream in(frame_to_csv(fq));
  EXPECT_EQ(std::get<Frame<Rational>>(frame_from_csv(in, ScalarMode::Rational)), fq);
  const auto ff = random_frame<double>(2, 5, 4);
  std::istringstream inf(frame_to_csv(ff));
  EXPECT_EQ(std::get<Frame<double>>(frame_from_csv(inf)), ff);
}

TEST(FrameCsv, MalformedInputs) {
  for (const char* text : {"", "1,0,0\n", "1,0,0,1\n1,0\n", "1,0,zz,1\n", "1,0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(frame_from_csv(in), FormatError) << text;
  }
}

TEST(FrameFile, MissingFileIsFormatError) {
  EXPECT_THROW(read_frame_file("/nonexistent/frame.json"), FormatError);
}

TEST(Conversions, FloatToRationalIsExact) {
  const auto ff = random_frame<double>(2, 3, 5);
  const auto fq = to_rational(ff);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(fq.u()(r, c).get_d(), ff.u()(r, c));
  EXPECT_EQ(fq.to_float(), ff);
}

TEST(VerdictJson, NonInjectiveCarriesCertificateAndWitness) {
  const auto f = random_frame<Rational>(2, 3, 6);
  const auto j = verdict_json(f.to_float(), kernel_cert_m2n3(f));
  EXPECT_EQ(j["verdict"], "NonInjective");
  EXPECT_EQ(j["certificate"]["coords"].size(), 4u);
  EXPECT_EQ(j["certificate"]["exact_coords"].size(), 4u);
  EXPECT_LE(j["witness"]["max_measurement_gap"].get<double>(), 1e-8);
  EXPECT_EQ(j["witness"]["x"].size(), 2u);
}

TEST(VerdictJson, NotFoundCarriesBudget) {
  SearchOptions so;
  so.restarts = 1;
  so.max_iters = 3;
  const auto f = random_frame<double>(3, 8, 1);
  const auto j = verdict_json(f, alternating_search(f, so).verdict);
  EXPECT_EQ(j["verdict"], "NotFound");
  EXPECT_EQ(j["budget"]["note"], "no certificate found within budget");
}

TEST(DegreeJson, MatchesDocumentedShape) {
  const auto j = degree_json(degree_report(3));
  EXPECT_EQ(j.dump().rfind(R"({"m":3,"degree":"3",)", 0), 0u);
  EXPECT_EQ(j["is_odd"], true);
}

TEST(ParityTable, HeaderAndRows) {
  const auto csv = parity_table_csv(2, 5);
  EXPECT_EQ(csv,
            "m,degree,v2,is_odd,power_of_two_plus_one,hmw_bound,4m-5,4m-4\n"
            "2,1,0,true,true,2,3,4\n"
            "3,3,0,true,true,6,7,8\n"
            "4,20,2,false,false,8,11,12\n"
            "5,175,0,true,true,14,15,16\n");
}

TEST(ReportJson, TimingOnlyWhenAsked) {
  const auto r = montecarlo(2, 4, 3, 1);
  EXPECT_FALSE(report_json(r).contains("wall_clock_seconds"));
  EXPECT_TRUE(report_json(r, true).contains("wall_clock_seconds"));
  const auto csv = report_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(KernelJson, ExactBasis) {
  using C = Complex<Rational>;
  const auto f = frame_from_columns<Rational>({{C{1, 0}, C{0, 0}}, {C{0, 0}, C{1, 0}}, {C{1, 0}, C{1, 0}}});
  const auto j = kernel_json(kernel_basis(constraint_matrix(f)));
  EXPECT_EQ(j.dump(), R"({"m":2,"dim":1,"orthonormal":false,"basis":[["0","0","0","1"]]})");
}
