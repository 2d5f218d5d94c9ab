#pragma once

// Long-time temperature laws of the collision-dominated regime.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homokinetics/flow.hpp"
#include "homokinetics/linop.hpp"

namespace homokinetics {

enum class RegimeLabel { HilbertExpansion, SelfSimilar, FrozenCollisions, NonMaxwellian, NotTabulated };

enum class PredictionRegime { Case1Exponential, Case2PowerLaw, ShearDilatationPowerLaw, OutOfScope };

std::string_view to_string(RegimeLabel label);
std::string_view to_string(PredictionRegime regime);

/// Long-time behaviour of (case, gamma) as summarised per flow family.
RegimeLabel regime_table(FlowCaseTag tag, double gamma);

struct Prediction {
  FlowCase flow_case;
  double gamma = 0;
  PredictionRegime regime = PredictionRegime::OutOfScope;
  RegimeLabel label = RegimeLabel::NotTabulated;
  std::optional<double> beta_exponent;  // p in beta ~ C t^p
  std::optional<double> tau_rate;       // a in beta ~ C e^{a tau}, exponential laws only
  std::optional<double> prefactor;      // C, needs b
  std::optional<double> b;
  double dominance_exponent = 0;  // growth exponent of mu beta^{-gamma/2} along the law
  std::string validity;
  bool asymptotic_only = true;

  bool power_law() const { return regime != PredictionRegime::OutOfScope; }
};

/// Predicted law for a flow case. Throws MissingB if `want_prefactor` and the
/// law has a closed-form prefactor but `b` is absent.
Prediction predict(const FlowCase& c, double gamma, std::optional<double> b = std::nullopt,
                   bool want_prefactor = false);

struct Case1Rate {
  double a = 0;
  /// Exponent r in mu(tau) e^{-gamma a tau / 2} ~ e^{r tau} for the 1/t
  /// families, where mu(tau) ~ e^{(1 - Tr L0) tau}.
  double dominance_rate = 0;
  bool collision_dominated = false;
};

/// a = (2/3) Tr L0 together with the collision-dominance check.
Case1Rate case1_rate(const Eigen::Matrix3d& L0, double gamma = 0);

/// Green-Kubo constant of the leading deformation L0 of a power-law case.
GreenKubo case_b(const GalerkinOperator& op, const FlowCase& c);

enum class BetaOdeForm { Case2, ShearDilatation };

struct BetaTrajectory {
  std::vector<double> t;
  std::vector<double> beta;         // adaptive integration
  std::vector<double> closed_form;  // exact solution through beta0
  std::vector<double> asymptotic;   // leading law without the initial datum
  std::vector<double> lambda;       // int_{t0}^t ds / mu(s)
  long steps = 0;
  long rejected = 0;
};

struct BetaOdeOptions {
  double rtol = 1e-12;
  long max_steps = 10'000'000;
};

/// Integrates beta' = -(8/3) b beta^{gamma/2+1} / mu (Case2) or
/// beta' = 2 beta / (3t) - (8/3) b beta^{gamma/2+1} / mu (ShearDilatation)
/// from beta(t_grid[0]) = beta0 with an embedded Dormand-Prince 5(4) pair.
BetaTrajectory beta_ode(double gamma, double b, const std::function<double(double)>& mu, double beta0,
                        const std::vector<double>& t_grid, BetaOdeForm form = BetaOdeForm::Case2,
                        const BetaOdeOptions& options = {});

/// Adaptive Simpson quadrature of f on [a, b] to relative tolerance `rtol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rtol = 1e-13);

}  // namespace homokinetics
