#include "homokinetics/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "homokinetics/errors.hpp"

namespace homokinetics {

std::string_view to_string(Abscissa a)
{
  return a == Abscissa::T ? "t" : "exp_tau";
}

Abscissa abscissa_from_string(std::string_view name)
{
  if (name == "t") return Abscissa::T;
  if (name == "exp_tau") return Abscissa::ExpTau;
  throw ConfigError("unknown abscissa '" + std::string(name) + "'");
}

FitResult fit_log_log(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size()) throw DomainError("fit needs equal-length samples");
  const int n = static_cast<int>(x.size());
  if (n < kMinFitPoints)
    throw InsufficientData("fit window holds " + std::to_string(n) + " points, needs " +
                           std::to_string(kMinFitPoints));
  for (int i = 0; i < n; ++i)
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw NonPositiveValues("power-law fit needs positive finite values");
  std::vector<double> lx(n), ly(n);
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0)) throw InsufficientData("fit window has no spread in the abscissa");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - f.intercept - f.slope * lx[i];
    rss += r * r;
  }
  // Residuals at rounding level count as an exact fit.
  if (rss <= 1e-24 * std::max(syy, 1.0) * n) rss = 0;
  f.stderr_ = std::sqrt(rss / (n - 2) / sxx);
  f.r_squared = syy > 0 ? 1 - rss / syy : 1;
  f.x_min = *std::min_element(x.begin(), x.end());
  f.x_max = *std::max_element(x.begin(), x.end());
  f.points = n;
  return f;
}

double column_value(const MomentSummary& r, std::string_view c)
{
  if (c == "beta") return r.beta;
  if (c == "T") return 1 / (2 * r.beta);
  if (c == "norm_1_2") return r.norm_1_2;
  if (c == "c4") return r.fourth_cumulant;
  if (c == "p_xy") return r.pressure_offdiag.x();
  if (c == "p_xz") return r.pressure_offdiag.y();
  if (c == "p_yz") return r.pressure_offdiag.z();
  if (c == "abs_p_xy") return std::abs(r.pressure_offdiag.x());
  if (c == "abs_p_xz") return std::abs(r.pressure_offdiag.y());
  if (c == "abs_p_yz") return std::abs(r.pressure_offdiag.z());
  if (c == "collisions") return static_cast<double>(r.collisions);
  throw ConfigError("unknown column '" + std::string(c) + "'");
}

FitResult fit_power_law(const TimeSeries& series, std::string_view column, const FitWindow& window, Abscissa abscissa)
{
  if (series.rows.empty()) throw InsufficientData("empty time series");
  auto abscissa_of = [&](const MomentSummary& r) { return abscissa == Abscissa::T ? r.t : std::exp(r.tau); };
  const double last = abscissa_of(series.rows.back());
  const double hi = window.x_max.value_or(last);
  const double lo = window.x_min.value_or(hi / 10);
  if (!(hi > lo)) throw ConfigError("fit window must have x_min < x_max");
  std::vector<double> x, y;
  for (const auto& r : series.rows) {
    const double xv = abscissa_of(r);
    if (xv >= lo * (1 - 1e-12) && xv <= hi * (1 + 1e-12)) {
      x.push_back(xv);
      y.push_back(column_value(r, column));
    }
  }
  FitResult f = fit_log_log(x, y);
  f.column = std::string(column);
  f.abscissa = abscissa;
  return f;
}

double default_tolerance(double exponent)
{
  return std::max(0.1 * std::abs(exponent), 0.1);
}

Comparison compare(const Prediction& prediction, const FitResult& fit, std::optional<double> tolerance)
{
  if (!prediction.power_law() || !prediction.beta_exponent)
    throw RegimeMismatch("prediction for " + std::string(to_string(prediction.flow_case.tag)) + " at gamma = " +
                         std::to_string(prediction.gamma) + " is out of scope (" +
                         std::string(to_string(prediction.label)) + ")");
  Comparison c;
  c.prediction = prediction;
  c.fit = fit;
  const double p = *prediction.beta_exponent;
  c.tolerance = tolerance.value_or(default_tolerance(p));
  if (!(c.tolerance >= 0)) throw ConfigError("tolerance must be nonnegative");
  c.pass = std::abs(fit.slope - p) <= c.tolerance;
  if (prediction.prefactor && fit.x_min > 0) {
    const double lx = 0.5 * (std::log(fit.x_min) + std::log(fit.x_max));
    c.prefactor_ratio = std::exp(fit.intercept + fit.slope * lx - std::log(*prediction.prefactor) - p * lx);
  }
  return c;
}

}  // namespace homokinetics
