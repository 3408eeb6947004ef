#include <doctest.h>

#include <cmath>
#include <string>

#include "axiflow/errors.hpp"
#include "axiflow/speeds.hpp"
#include "oracles.hpp"

using namespace axiflow;

namespace {

std::vector<double> full(const CurvatureVector& k) {
  std::vector<double> v(std::size_t(k.n), k.mu);
  v[0] = k.lambda;
  return v;
}

void check_against_differences(const SpeedSpec& s, const CurvatureVector& k) {
  const oracle::Fn f = [&](const std::vector<double>& v) { return s.value(v); };
  const std::vector<double> x = full(k);
  const SpeedDerivatives d = derivatives(s, k);
  const double scale = d.f;
  CHECK(d.f == doctest::Approx(f(x)).epsilon(1e-14));
  CHECK(std::abs(d.df1 - oracle::d1(f, x, 0, 1e-6)) < 1e-7 * scale);
  CHECK(std::abs(d.df2 - oracle::d1(f, x, 1, 1e-6)) < 1e-7 * scale);
  CHECK(std::abs(d.d2f11 - oracle::d2(f, x, 0, 0, 1e-4)) < 1e-5 * scale);
  CHECK(std::abs(d.d2f12 - oracle::d2(f, x, 0, 1, 1e-4)) < 1e-5 * scale);
  CHECK(std::abs(d.d2f22 - oracle::d2(f, x, 1, 1, 1e-4)) < 1e-5 * scale);
  if (k.n >= 3) CHECK(std::abs(d.d2f23 - oracle::d2(f, x, 1, 2, 1e-4)) < 1e-5 * scale);
}

}  // namespace

TEST_CASE("built-in speeds are normalized to n^alpha at the umbilic point") {
  for (int n : {2, 3, 5}) {
    for (double a : {1.0, 2.0, 3.5}) {
      const CurvatureVector one{n, 1.0, 1.0};
      CHECK(evaluate(SpeedSpec::mean_power(n, a), one) == doctest::Approx(std::pow(n, a)));
      CHECK(evaluate(SpeedSpec::blended_quadratic(n, a, 1.0, 0.5), one) ==
            doctest::Approx(std::pow(n, a)));
      if (n >= 3)
        CHECK(evaluate(SpeedSpec::sigma2_power(n, a), one) == doctest::Approx(std::pow(n, a)));
    }
  }
}

TEST_CASE("mean-power is a power of the mean curvature") {
  const SpeedSpec s = SpeedSpec::mean_power(3, 2.0);
  CHECK(evaluate(s, {3, 0.5, 2.0}) == doctest::Approx(std::pow(0.5 + 2 * 2.0, 2)));
}

TEST_CASE("analytic derivatives match central differences") {
  for (const CurvatureVector& k : {CurvatureVector{2, 0.3, 1.1}, CurvatureVector{3, 0.7, 1.3},
                                   CurvatureVector{4, 0.05, 0.9}}) {
    check_against_differences(SpeedSpec::mean_power(k.n, 1.0), k);
    check_against_differences(SpeedSpec::mean_power(k.n, 2.5), k);
    check_against_differences(SpeedSpec::blended_quadratic(k.n, 3.0, 0.4, 1.1), k);
    if (k.n >= 3) check_against_differences(SpeedSpec::sigma2_power(k.n, 2.0), k);
  }
}

TEST_CASE("user-supplied speeds take their derivatives by differences") {
  const auto cubic_mean = [](std::span<const double> v) {
    double h = 0;
    for (double x : v) h += x;
    return h * h * h;
  };
  const SpeedSpec s = SpeedSpec::user_supplied(3, 3.0, cubic_mean);
  const CurvatureVector k{3, 0.4, 1.0};
  const SpeedDerivatives d = derivatives(s, k);
  const double h = k.mean();
  CHECK(d.f == doctest::Approx(h * h * h));
  CHECK(d.df1 == doctest::Approx(3 * h * h).epsilon(1e-6));
  CHECK(d.d2f23 == doctest::Approx(6 * h).epsilon(1e-4));
}

TEST_CASE("alpha below one is rejected") {
  try {
    SpeedSpec::mean_power(2, 0.5);
    FAIL("no exception");
  } catch (const BadParam& e) {
    CHECK(std::string(e.what()).find("homogeneity must be >= 1") != std::string::npos);
  }
  CHECK_THROWS_AS(SpeedSpec::create(SpeedKind::BlendedQuadratic, 2, 2.0, {0.0, 1.0}), BadParam);
  CHECK_THROWS_AS(SpeedSpec::create(SpeedKind::MeanPower, 1, 2.0), BadParam);
  CHECK_THROWS_AS(speed_kind_from_string("gauss"), BadParam);
}

TEST_CASE("sigma2-power is not cone admissible in dimension two") {
  CHECK_THROWS_AS(SpeedSpec::sigma2_power(2, 2.0), BadParam);
  const SpeedSpec loose = SpeedSpec::create(SpeedKind::Sigma2Power, 2, 2.0, {}, false);
  CHECK_FALSE(loose.cone_admissible());
}

TEST_CASE("outside the cone evaluation raises DomainError") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  CHECK_THROWS_AS(evaluate(s, {2, -1.0, -1.0}), DomainError);
  CHECK_THROWS_AS(evaluate(s, {3, 0.5, 1.0}), DomainError);
}

TEST_CASE("assumption sampling accepts the catalog and flags broken speeds") {
  CHECK(verify_assumptions(SpeedSpec::mean_power(2, 2.0), 2, 500).pass());
  CHECK(verify_assumptions(SpeedSpec::sigma2_power(3, 1.0), 3, 500).pass());
  CHECK(verify_assumptions(SpeedSpec::blended_quadratic(3, 2.0, 1.0, 1.0), 3, 500).pass());

  const auto lopsided = [](std::span<const double> v) {
    return std::pow(2 * v[0] + v[1], 2.0);
  };
  const AssumptionReport r =
      verify_assumptions(SpeedSpec::user_supplied(2, 2.0, lopsided), 2, 500);
  CHECK_FALSE(r.symmetric);
  CHECK_FALSE(r.pass());

  const auto wrong_degree = [](std::span<const double> v) {
    return std::pow(v[0] + v[1], 3.0);
  };
  CHECK_FALSE(verify_assumptions(SpeedSpec::user_supplied(2, 2.0, wrong_degree), 2, 500)
                  .homogeneous);
}

TEST_CASE("Tso constant of the mean curvature flow is 1/n") {
  // (sum lambda_i^2) / H^2 on the unit sphere of the cone is smallest at the
  // umbilic point.
  for (int n : {2, 3, 4})
    CHECK(tso_constant(SpeedSpec::mean_power(n, 1.0), n, 101) == doctest::Approx(1.0 / n));
}

TEST_CASE("comparability constants") {
  const Comparability mp = comparability_bounds(SpeedSpec::mean_power(3, 2.0), 101);
  CHECK(mp.m1 == doctest::Approx(1.0));
  CHECK(mp.m2 == doctest::Approx(1.0));
  // blended (1, 1): f / H^2 = c (1 + |h|^2/H^2), |h|^2/H^2 in [1/n, 1/(n-1)]
  const Comparability bq = comparability_bounds(SpeedSpec::blended_quadratic(2, 2.0, 1.0, 1.0), 101);
  const double c = 4.0 / (4.0 + 2.0);
  CHECK(bq.m1 == doctest::Approx(c * 1.5));
  CHECK(bq.m2 == doctest::Approx(c * 2.0));
}
