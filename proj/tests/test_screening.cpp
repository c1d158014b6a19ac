#include "doctest.h"

#include <random>

#include "region_oracle.hpp"
#include "safescreen/screening.hpp"

using namespace safescreen;
using test_oracles::max_linear_bruteforce;
using test_oracles::max_linear_circle_grid;

namespace {

using Vec = Vector<double>;
using Mat = Matrix<double>;

Vec gaussian(Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0, 1);
  Vec v(p);
  for (Index j = 0; j < p; ++j) v[j] = normal(rng);
  return v;
}

CutRegion<double> unit_disk(std::optional<Vec> g, Vec center = Vec::Zero(2)) {
  return {Ellipsoid<double>::ball(std::move(center), 1.0), std::move(g), 0, 1.0};
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ErmProblem<double> regression_problem(Penalty pen, double mu, double lambda, std::uint64_t seed) {
  const auto s = gen_synthetic_regression<double>(100, 5, 3, 0.1, seed);
  return ErmProblem<double>::linear(
      s.data, SafeLoss<double>(LossFamily::ScreeningFriendlyRegression, mu), pen, lambda);
}

ErmProblem<double> sqhinge_problem(double mu, double lambda, std::uint64_t seed) {
  const auto s = gen_synthetic_classification<double>(100, 5, 3, 0.0, seed);
  return ErmProblem<double>::linear(s.data, SafeLoss<double>(LossFamily::SquaredHinge, mu),
                                    Penalty::L2sq, lambda);
}

CutRegion<double> ball_region(const Vec& center, double radius) {
  return {Ellipsoid<double>::ball(center, radius), std::nullopt, 0, radius};
}

}  // namespace

TEST_CASE("closed-form maximum on the unit disk") {
  CHECK(max_linear_over_region(vec2(1, 0), 0.0, unit_disk(vec2(-1, 0))) == doctest::Approx(1.0));
  CHECK(max_linear_over_region(vec2(1, 0), 1.0, unit_disk(std::nullopt, vec2(2, 0))) ==
        doctest::Approx(2.0));
  // a cut at 45 degrees: the maximum lies where the boundary meets the line
  const double v = max_linear_over_region(vec2(1, 0), 0.0, unit_disk(vec2(1, 1)));
  CHECK(v == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  const Vec g = vec2(1, 1);
  CHECK(std::abs(max_linear_bruteforce(Mat::Identity(2, 2), Vec::Zero(2), vec2(1, 0), 0.0, &g) - v) <= 1e-5);
  CHECK(std::abs(max_linear_circle_grid(Mat::Identity(2, 2), Vec::Zero(2), vec2(1, 0), 0.0, &g) - v) <= 1e-5);
  // the 1/(2 gamma) scaling would give 1 here, outside the half-disk's range
  CHECK(v < 1.0 - 0.25);
}

TEST_CASE("a vector parallel to the cut") {
  // g'Ea > 0 with w = 0: the cut pins a'x to its center value
  CHECK(max_linear_over_region(vec2(2, 2), 0.0, unit_disk(vec2(1, 1))) == doctest::Approx(0.0));
  CHECK(max_linear_over_region(vec2(-1, -1), 0.0, unit_disk(vec2(1, 1))) ==
        doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("region probe matches the oracle on ellipsoids built by the method") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const Index p = 2 + trial % 9;
    auto e = init_ball<double>(gaussian(p, rng), 1.0 + trial % 3);
    for (int k = 0; k < trial % 7; ++k) e = e.step(gaussian(p, rng));
    const Vec g = gaussian(p, rng);
    const bool with_cut = trial % 3 != 0;
    const CutRegion<double> region{e, with_cut ? std::optional<Vec>(g) : std::nullopt, 0, 1.0};
    const Vec a = gaussian(p, rng);
    const double b = gaussian(1, rng)[0];
    const double oracle = max_linear_bruteforce(e.dense(), e.center(), a, b, with_cut ? &g : nullptr);
    CHECK(std::abs(max_linear_over_region(a, b, region) - oracle) <= 1e-5);
    const auto r = RegionProbe<double>(region).range(a);
    const double oracle_min = -max_linear_bruteforce(e.dense(), e.center(), Vec(-a), 0.0,
                                                     with_cut ? &g : nullptr);
    CHECK(std::abs(r.lo - oracle_min) <= 1e-5);
  }
}

TEST_CASE("sampled region points never exceed the closed-form maximum") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 2 + trial % 5;
    auto e = init_ball<double>(gaussian(p, rng), 1.0);
    for (int k = 0; k < 4; ++k) e = e.step(gaussian(p, rng));
    const CutRegion<double> region{e, gaussian(p, rng), 4, 1.0};
    const Mat root = e.dense().llt().matrixL();
    const Vec a = gaussian(p, rng);
    const double bound = max_linear_over_region(a, 0.0, region);
    for (int s = 0; s < 500; ++s) {
      Vec u = gaussian(p, rng);
      u *= std::pow(unif(rng), 1.0 / static_cast<double>(p)) / u.norm();
      const Vec x = e.center() + root * u;
      if (!verify_containment(region, x, 0.0)) continue;
      CHECK(a.dot(x) <= bound + 1e-9);
    }
  }
}

TEST_CASE("tiny ball around the optimum screens exactly the flat-interior samples") {
  for (auto pen : {Penalty::L1, Penalty::L2sq}) {
    const auto pb = regression_problem(pen, 0.1, 0.01, 10);
    const Vec x = solve(pb, 200000, 1e-14).final.coefficients;
    const auto report = screen(pb, ball_region(x, 1e-9));
    const Vec t = margin_vector(pb, x);
    int checked = 0;
    for (Index i = 0; i < pb.n(); ++i) {
      const double slack = 0.1 - std::abs(t[i]);
      if (std::abs(slack - 1e-9) < 1e-6) continue;
      CHECK(report.mask.keep[static_cast<std::size_t>(i)] == !(slack > 1e-9));
      ++checked;
    }
    CHECK(checked > 90);
    CHECK(report.n_screened > 0);
    CHECK(report.n_screened == report.mask.n_discarded());
  }
}

TEST_CASE("a huge ball screens nothing") {
  const auto pb = regression_problem(Penalty::L2sq, 0.1, 0.01, 11);
  const auto report = screen(pb, ball_region(Vec::Zero(5), 1e6));
  CHECK(report.n_screened == 0);
  CHECK(report.settings.radius == 1e6);
  CHECK(report.region_volume_logdet == doctest::Approx(5 * std::log(1e12)));
}

TEST_CASE("screening rejects unsafe losses and foreign regions") {
  const auto s = gen_synthetic_classification<double>(20, 3, 2, 0.0, 12);
  const auto logistic = ErmProblem<double>::linear(s.data, SafeLoss<double>(LossFamily::Logistic, 0),
                                                   Penalty::L2sq, 0.1);
  CHECK_THROWS_AS(screen(logistic, ball_region(Vec::Zero(3), 1.0)), InvalidArgument);
  const auto pb = sqhinge_problem(0.1, 0.1, 13);
  CHECK_THROWS_AS(screen(pb, ball_region(Vec::Zero(3), 1.0)), InvalidArgument);
}

TEST_CASE("discarded samples have zero optimal dual variables") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const auto pb = seed % 2 ? regression_problem(Penalty::L2sq, 0.2, 0.05, seed)
                             : sqhinge_problem(0.3, 0.05, seed);
    const auto x0 = solve(pb, 30, 1e-12).final.coefficients;
    const double radius = *strong_convexity_radius(pb, x0);
    const auto region = build_region(pb, x0, radius, 5);
    const Vec opt = solve(pb, 200000, 1e-14).final.coefficients;
    REQUIRE(verify_containment(region, opt, 1e-8));
    const auto report = screen(pb, region);
    const Vec nu = dual_from_primal(pb, opt);
    for (Index i = 0; i < pb.n(); ++i)
      if (!report.mask.keep[static_cast<std::size_t>(i)]) CHECK(nu[i] == 0.0);
    CHECK(verify_safety(pb, report.mask, 1e-12, 1e-6));
  }
}

TEST_CASE("interval-regression toy discards samples and refits the same model") {
  const auto data = gen_interval_dataset<double>(20, 2, 0.5, 14);
  const auto pb = ErmProblem<double>::linear(
      data, SafeLoss<double>(LossFamily::ScreeningFriendlyRegression, 0.5), Penalty::L2sq, 0.01);
  const Vec x0 = solve(pb, 50, 1e-12).final.coefficients;
  const auto region = build_region(pb, x0, *strong_convexity_radius(pb, x0), 10);
  const auto report = screen(pb, region);
  CHECK(report.n_screened >= 1);
  // a 2-sample refit pins x only to about sqrt(gap / lambda)
  CHECK(verify_safety(pb, report.mask, 1e-13, SafetyTolerances<double>{1e-6, 1e-4}));
}

TEST_CASE("gap ball baseline") {
  const auto pb = sqhinge_problem(0.2, 0.1, 15);
  const Vec x = Vec::Constant(5, 0.1);
  const double gap = duality_gap(pb, x);
  const auto region = gap_ball_region(pb, x);
  CHECK(std::sqrt(region.ellipsoid.scale()) == doctest::Approx(2 * gap / 0.1));
  const auto stronger = gap_ball_region(pb.with_lambda(0.2), x);
  CHECK(std::sqrt(stronger.ellipsoid.scale()) / duality_gap(pb.with_lambda(0.2), x) ==
        doctest::Approx(2 / 0.2));
  CHECK_FALSE(region.halfspace_g);

  try {
    gap_ball_region(regression_problem(Penalty::L1, 0.1, 0.1, 16), Vec(Vec::Zero(5)));
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("baseline requires strong convexity") != std::string::npos);
  }
}

TEST_CASE("gap ball with zero gap is an exact margin test") {
  // a single sample deep inside the flat region: x = 0 is optimal with zero gap
  Mat a(2, 2);
  a << 1, 0, 0, 1;
  Vec b(2);
  b << 0.01, -0.02;
  const auto pb = ErmProblem<double>::linear(Dataset<double>(a, b, ProblemKind::Regression),
                                             SafeLoss<double>(LossFamily::ScreeningFriendlyRegression, 0.5),
                                             Penalty::L2sq, 1.0);
  const auto region = gap_ball_region(pb, Vec(Vec::Zero(2)));
  CHECK(region.ellipsoid.scale() == 0.0);
  const auto report = screen(pb, region);
  CHECK(report.n_screened == 2);
  CHECK(report.mask.scores[0] == doctest::Approx(0.49));
}

TEST_CASE("gap ball and ellipsoid screening are both safe on a solved toy") {
  const auto pb = sqhinge_problem(0.3, 0.05, 17);
  const Vec x = solve(pb, 100000, 1e-10).final.coefficients;
  const auto ball = screen(pb, gap_ball_region(pb, x));
  CHECK(verify_safety(pb, ball.mask, 1e-12, 1e-6));
  const auto ellipsoid = screen(pb, build_region(pb, x, *strong_convexity_radius(pb, x), 20));
  CHECK(verify_safety(pb, ellipsoid.mask, 1e-12, 1e-6));
  CHECK(ellipsoid.n_screened > 0);
}

TEST_CASE("smaller regions screen at least as much") {
  const auto pb = regression_problem(Penalty::L2sq, 0.2, 0.05, 18);
  const Vec x = solve(pb, 100000, 1e-10).final.coefficients;
  Index previous = -1;
  for (double r : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    const auto report = screen(pb, ball_region(x, r));
    CHECK(report.n_screened >= previous);
    previous = report.n_screened;
    // cutting the same ball can only help
    CutRegion<double> cut = ball_region(x, r);
    cut.halfspace_g = objective_subgradient(pb, x) + Vec::Constant(5, 1e-3);
    CHECK(screen(pb, cut).n_screened >= report.n_screened);
  }
}

TEST_CASE("compression scores") {
  auto s = gen_synthetic_regression<double>(30, 3, 2, 0.05, 19);
  Mat a = s.data.features();
  Vec b = s.data.labels();
  a.row(7) = a.row(3);
  b[7] = b[3];
  const auto pb = ErmProblem<double>::linear(Dataset<double>(a, b, ProblemKind::Regression),
                                             SafeLoss<double>(LossFamily::ScreeningFriendlyRegression, 0.1),
                                             Penalty::L2sq, 0.05);
  const Vec x = solve(pb, 100000, 1e-10).final.coefficients;
  const auto region = build_region(pb, x, *strong_convexity_radius(pb, x), 3);
  const Vec scores = compression_scores(pb, region);
  CHECK(scores[3] == scores[7]);
  const auto report = screen(pb, region);
  const auto order = compression_order(scores);
  REQUIRE(report.n_screened > 0);
  for (Index k = 0; k < report.n_screened; ++k)
    CHECK_FALSE(report.mask.keep[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);

  Vec ties(4);
  ties << 1, 2, 2, 0;
  CHECK(compression_order(ties) == std::vector<Index>{1, 2, 0, 3});
}

TEST_CASE("verify_safety catches a mask that drops a support sample") {
  const auto pb = regression_problem(Penalty::L2sq, 0.1, 0.05, 21);
  CHECK(verify_safety(pb, SampleMask<double>::keep_all(pb.n()), 1e-12, 1e-6));
  const Vec x = solve(pb, 100000, 1e-13).final.coefficients;
  const Vec t = margin_vector(pb, x);
  Index worst = 0;
  t.cwiseAbs().maxCoeff(&worst);
  auto mask = SampleMask<double>::keep_all(pb.n());
  mask.keep[static_cast<std::size_t>(worst)] = false;
  CHECK_FALSE(verify_safety(pb, mask, 1e-12, 1e-6));
  auto short_mask = SampleMask<double>::keep_all(3);
  CHECK_THROWS_AS(verify_safety(pb, short_mask, 1e-12, 1e-6), InvalidArgument);
}

TEST_CASE("screening is deterministic") {
  const auto pb = sqhinge_problem(0.2, 0.05, 22);
  const Vec x = solve(pb, 20, 1e-12).final.coefficients;
  const auto region = build_region(pb, x, *strong_convexity_radius(pb, x), 5);
  CHECK(screen(pb, region).mask == screen(pb, region).mask);
}
