#include <doctest.h>

#include <cmath>
#include <random>

#include "homokinetics/analysis.hpp"
#include "homokinetics/errors.hpp"

using namespace homokinetics;

namespace {

TimeSeries synthetic(double t0, double t1, int n, auto f)
{
  TimeSeries s;
  for (int i = 0; i < n; ++i) {
    MomentSummary r;
    r.t = t0 * std::pow(t1 / t0, double(i) / (n - 1));
    r.tau = std::log1p(r.t);
    r.beta = f(r.t);
    s.rows.push_back(r);
  }
  return s;
}

FitResult fake_fit(double slope, double stderr_)
{
  FitResult f;
  f.slope = slope;
  f.stderr_ = stderr_;
  f.x_min = 10;
  f.x_max = 100;
  f.points = 100;
  return f;
}

}  // namespace

TEST_CASE("exact power law")
{
  auto s = synthetic(1, 1000, 301, [](double t) { return 3 * t * t; });
  auto f = fit_power_law(s, "beta");
  CHECK(f.slope == doctest::Approx(2).epsilon(1e-13));
  CHECK(f.stderr_ == 0);
  CHECK(f.r_squared == doctest::Approx(1));
  CHECK(std::exp(f.intercept) == doctest::Approx(3).epsilon(1e-11));
  CHECK(f.x_max == doctest::Approx(1000));
  CHECK(f.x_min >= 100 * (1 - 1e-12));
  CHECK(f.points == 101);
}

TEST_CASE("noisy two-thirds law")
{
  std::mt19937_64 rng(7);
  std::normal_distribution<double> eps(0, 0.01);
  auto s = synthetic(10, 100, 101, [&](double t) { return std::pow(t, 2.0 / 3) * (1 + eps(rng)); });
  auto f = fit_power_law(s, "beta");
  CHECK(f.slope >= 0.63);
  CHECK(f.slope <= 0.70);
  CHECK(f.stderr_ > 0);
  CHECK(std::abs(f.slope - 2.0 / 3) < 4 * f.stderr_ + 1e-12);
}

TEST_CASE("constant column")
{
  auto s = synthetic(1, 100, 50, [](double) { return 0.7; });
  auto f = fit_power_law(s, "beta");
  CHECK(std::abs(f.slope) < 1e-14);
  CHECK(f.stderr_ == 0);
}

TEST_CASE("fit windows and abscissae")
{
  auto s = synthetic(1, 1e4, 401, [](double t) { return 1 / ((1 + t) * (1 + t)); });
  auto tau_fit = fit_power_law(s, "beta", {}, Abscissa::ExpTau);
  CHECK(tau_fit.slope == doctest::Approx(-2).epsilon(1e-12));
  auto win = fit_power_law(s, "beta", FitWindow{1000, 1e4});
  CHECK(win.slope == doctest::Approx(-2).epsilon(2e-3));
  CHECK(fit_power_law(s, "T").slope == doctest::Approx(-win.slope));
  CHECK_THROWS_AS(fit_power_law(s, "nope"), ConfigError);
  CHECK_THROWS_AS(fit_power_law(s, "beta", FitWindow{10, 5}), ConfigError);
  CHECK(to_string(abscissa_from_string("exp_tau")) == "exp_tau");
}

TEST_CASE("fit failure modes")
{
  auto few = synthetic(1, 10, 15, [](double t) { return t; });
  CHECK_THROWS_AS(fit_power_law(few, "beta"), InsufficientData);
  CHECK_THROWS_AS(fit_power_law(TimeSeries{}, "beta"), InsufficientData);
  auto neg = synthetic(1, 10, 40, [](double t) { return t - 5; });
  CHECK_THROWS_AS(fit_power_law(neg, "beta"), NonPositiveValues);
  CHECK_THROWS_AS(fit_power_law(neg, "beta"), NumericalError);
}

TEST_CASE("compare examples")
{
  Prediction p;
  p.regime = PredictionRegime::Case2PowerLaw;
  p.beta_exponent = -2;
  auto c = compare(p, fake_fit(-1.95, 0.03), 0.2);
  CHECK(c.pass);
  CHECK(c.tolerance == 0.2);
  CHECK_FALSE(c.prefactor_ratio);

  p.beta_exponent = 2.0 / 3;
  CHECK_FALSE(compare(p, fake_fit(0.2, 0.01), 0.2).pass);

  auto ss = predict(FlowCase::simple_shear(1), 1);
  CHECK(compare(ss, fake_fit(-1.85, 0.05)).pass);
  CHECK(compare(ss, fake_fit(-1.85, 0.05)).tolerance == doctest::Approx(0.2));
  CHECK_FALSE(compare(ss, fake_fit(-1.75, 0.05)).pass);
  CHECK(default_tolerance(0.5) == doctest::Approx(0.1));

  auto out = predict(FlowCase::simple_shear(1), -1);
  REQUIRE_FALSE(out.power_law());
  CHECK_THROWS_AS(compare(out, fake_fit(-2, 0)), RegimeMismatch);
  CHECK_THROWS_AS(compare(out, fake_fit(-2, 0)), ConfigError);
}

TEST_CASE("compare under rescaled time")
{
  const double b = 0.03;
  auto pred = predict(FlowCase::simple_shear(1), 1, b, true);
  REQUIRE(pred.prefactor);
  const double C = *pred.prefactor;
  auto law = [&](double t) { return 1.1 * C * std::pow(t, -2.0) * (1 + 0.5 / t); };
  auto s = synthetic(10, 1e4, 301, law);
  const double c = 7.5;
  auto sc = s;
  for (auto& r : sc.rows) r.t *= c;
  auto a = compare(pred, fit_power_law(s, "beta"));
  auto a2 = compare(pred, fit_power_law(s, "beta"));
  auto bcmp = compare(pred, fit_power_law(sc, "beta"));
  CHECK(a.fit.slope == a2.fit.slope);
  CHECK(*a.prefactor_ratio == *a2.prefactor_ratio);
  CHECK(bcmp.fit.slope == doctest::Approx(a.fit.slope).epsilon(1e-12));
  CHECK(bcmp.pass == a.pass);
  CHECK(*a.prefactor_ratio == doctest::Approx(1.1).epsilon(1e-3));
  // Fitted values are unchanged while the predicted curve moves by c^p.
  CHECK(*bcmp.prefactor_ratio == doctest::Approx(*a.prefactor_ratio * std::pow(c, 2.0)).epsilon(1e-10));
}
