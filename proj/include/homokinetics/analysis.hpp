#pragma once

// Power-law fits of moment histories and comparison with predicted laws.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homokinetics/dsmc.hpp"
#include "homokinetics/hilbert.hpp"

namespace homokinetics {

/// Abscissa of a fit: the flow time t, or e^tau (so exponential laws in tau
/// become power laws).
enum class Abscissa { T, ExpTau };

std::string_view to_string(Abscissa a);
Abscissa abscissa_from_string(std::string_view name);

/// Fit window in abscissa units; unset bounds select the last full decade.
struct FitWindow {
  std::optional<double> x_min;
  std::optional<double> x_max;
};

struct FitResult {
  std::string column;
  Abscissa abscissa = Abscissa::T;
  double slope = 0;
  double intercept = 0;  // log y = intercept + slope log x
  double stderr_ = 0;
  double r_squared = 1;
  double x_min = 0;
  double x_max = 0;
  int points = 0;
};

/// Minimum number of rows inside a fit window.
inline constexpr int kMinFitPoints = 20;

/// Ordinary least squares of log y against log x.
FitResult fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

/// Value of a named CSV column in a row.
double column_value(const MomentSummary& row, std::string_view column);

FitResult fit_power_law(const TimeSeries& series, std::string_view column = "beta", const FitWindow& window = {},
                        Abscissa abscissa = Abscissa::T);

/// max(0.1 |p|, 0.1).
double default_tolerance(double exponent);

struct Comparison {
  Prediction prediction;
  FitResult fit;
  double tolerance = 0;
  bool pass = false;
  /// Fitted over predicted value at the geometric centre of the window.
  std::optional<double> prefactor_ratio;
};

/// Throws RegimeMismatch if the prediction is out of scope.
Comparison compare(const Prediction& prediction, const FitResult& fit, std::optional<double> tolerance = std::nullopt);

}  // namespace homokinetics
