#include "homokinetics/hilbert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "homokinetics/errors.hpp"

namespace homokinetics {

std::string_view to_string(RegimeLabel label)
{
  switch (label) {
    case RegimeLabel::HilbertExpansion: return "HilbertExpansion";
    case RegimeLabel::SelfSimilar: return "SelfSimilar";
    case RegimeLabel::FrozenCollisions: return "FrozenCollisions";
    case RegimeLabel::NonMaxwellian: return "NonMaxwellian";
    case RegimeLabel::NotTabulated: return "NotTabulated";
  }
  return "?";
}

std::string_view to_string(PredictionRegime regime)
{
  switch (regime) {
    case PredictionRegime::Case1Exponential: return "Case1Exponential";
    case PredictionRegime::Case2PowerLaw: return "Case2PowerLaw";
    case PredictionRegime::ShearDilatationPowerLaw: return "ShearDilatationPowerLaw";
    case PredictionRegime::OutOfScope: return "OutOfScope";
  }
  return "?";
}

RegimeLabel regime_table(FlowCaseTag tag, double gamma)
{
  using R = RegimeLabel;
  if (!std::isfinite(gamma)) return R::NotTabulated;
  switch (tag) {
    case FlowCaseTag::SimpleShear:
      if (gamma == 0) return R::SelfSimilar;
      return gamma > 0 ? R::HilbertExpansion : R::NotTabulated;
    case FlowCaseTag::HomogeneousDilatation: return gamma <= -2 ? R::HilbertExpansion : R::NotTabulated;
    case FlowCaseTag::PlanarShear:
      if (gamma == 0) return R::SelfSimilar;
      return gamma < 0 ? R::HilbertExpansion : R::NotTabulated;
    case FlowCaseTag::CylindricalDilatation:
    case FlowCaseTag::CylindricalDilatationShear:
      return gamma < -1.5 ? R::HilbertExpansion : R::FrozenCollisions;
    case FlowCaseTag::CombinedOrthogonalShear:
      if (gamma == 0) return R::NonMaxwellian;
      return gamma > 0 ? R::HilbertExpansion : R::NotTabulated;
    case FlowCaseTag::SimpleShearDecayingDilatation: return gamma > 0 ? R::HilbertExpansion : R::NotTabulated;
  }
  return R::NotTabulated;
}

Case1Rate case1_rate(const Eigen::Matrix3d& L0, double gamma)
{
  if (!L0.allFinite() || !std::isfinite(gamma)) throw DomainError("case1_rate needs finite input");
  const double tr = L0.trace();
  if (tr == 0) throw DomainError("case1_rate needs Tr L0 != 0");
  Case1Rate r;
  r.a = 2 * tr / 3;
  r.dominance_rate = 1 - tr - gamma * r.a / 2;
  r.collision_dominated = r.dominance_rate > 0;
  return r;
}

GreenKubo case_b(const GalerkinOperator& op, const FlowCase& c)
{
  switch (c.tag) {
    case FlowCaseTag::SimpleShear:
    case FlowCaseTag::SimpleShearDecayingDilatation: return green_kubo_b(op, c.constant_part());
    case FlowCaseTag::CombinedOrthogonalShear: return green_kubo_b(op, c.linear_part());
    default: throw DomainError("Green-Kubo constant is only defined for the power-law shear cases");
  }
}

namespace {

std::string format_gamma(double g)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

}  // namespace

Prediction predict(const FlowCase& c, double gamma, std::optional<double> b, bool want_prefactor)
{
  c.validate();
  if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
  if (b && (!std::isfinite(*b) || *b < 0)) throw DomainError("b must be finite and nonnegative");

  Prediction p;
  p.flow_case = c;
  p.gamma = gamma;
  p.b = b;
  p.label = regime_table(c.tag, gamma);

  auto need_b = [&] {
    if (want_prefactor && !b) throw MissingB("prefactor of " + std::string(to_string(c.tag)) + " requires b");
  };

  switch (c.tag) {
    case FlowCaseTag::HomogeneousDilatation:
    case FlowCaseTag::CylindricalDilatation:
    case FlowCaseTag::CylindricalDilatationShear:
    case FlowCaseTag::PlanarShear: {
      const Case1Rate r = case1_rate(c.inverse_time_part(), gamma);
      const bool critical = c.tag == FlowCaseTag::HomogeneousDilatation && gamma == -2;
      if (c.tag == FlowCaseTag::HomogeneousDilatation) p.validity = "gamma <= -2 (gamma = -2: collision time s = tau)";
      else if (c.tag == FlowCaseTag::PlanarShear) p.validity = "gamma < 0";
      else p.validity = "gamma < -3/2";
      p.dominance_exponent = r.dominance_rate;
      if (p.label != RegimeLabel::HilbertExpansion || !(r.collision_dominated || critical)) break;
      p.regime = PredictionRegime::Case1Exponential;
      p.tau_rate = r.a;
      // tau = log t asymptotically, so e^{a tau} = t^a.
      p.beta_exponent = r.a;
      return p;
    }
    case FlowCaseTag::SimpleShear:
      p.validity = "gamma > 0";
      if (p.label != RegimeLabel::HilbertExpansion) break;
      need_b();
      p.regime = PredictionRegime::Case2PowerLaw;
      p.beta_exponent = -2 / gamma;
      p.dominance_exponent = 1;
      if (b && *b > 0) p.prefactor = std::pow(4 * gamma * *b / 3, -2 / gamma);
      return p;
    case FlowCaseTag::CombinedOrthogonalShear:
      p.validity = "gamma > 0";
      if (p.label != RegimeLabel::HilbertExpansion) break;
      need_b();
      p.regime = PredictionRegime::Case2PowerLaw;
      p.beta_exponent = -6 / gamma;
      p.dominance_exponent = 2;
      if (b && *b > 0) p.prefactor = std::pow(2.0, 3 / gamma) * std::pow(4 * gamma * *b / 3, -2 / gamma);
      return p;
    case FlowCaseTag::SimpleShearDecayingDilatation:
      p.validity = "gamma > 0";
      if (p.label != RegimeLabel::HilbertExpansion) break;
      need_b();
      p.regime = PredictionRegime::ShearDilatationPowerLaw;
      p.beta_exponent = -4 / gamma;
      p.dominance_exponent = 1;
      if (b && *b > 0) p.prefactor = std::pow(4 * gamma * *b / (gamma + 6), -2 / gamma);
      return p;
  }
  p.regime = PredictionRegime::OutOfScope;
  p.beta_exponent.reset();
  p.validity += " (gamma = " + format_gamma(gamma) + " is outside)";
  return p;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m, double fm, double b,
                    double fb, double whole, double tol, int depth)
{
  const double lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
  return simpson_step(f, a, fa, lm, flm, m, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rtol)
{
  if (a == b) return 0;
  const double m = (a + b) / 2;
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  // Coarse pass fixes the absolute tolerance scale.
  double coarse = 0;
  constexpr int kPanels = 16;
  for (int i = 0; i < kPanels; ++i) {
    const double x0 = a + (b - a) * i / kPanels, x1 = a + (b - a) * (i + 1) / kPanels;
    coarse += std::abs((x1 - x0) / 6 * (f(x0) + 4 * f((x0 + x1) / 2) + f(x1)));
  }
  const double tol = rtol * std::max(coarse, std::abs(whole));
  return simpson_step(f, a, fa, m, fm, b, fb, whole, tol, 50);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

BetaTrajectory beta_ode(double gamma, double b, const std::function<double(double)>& mu, double beta0,
                        const std::vector<double>& t_grid, BetaOdeForm form, const BetaOdeOptions& options)
{
  if (!std::isfinite(gamma) || !std::isfinite(b) || b < 0) throw DomainError("beta_ode needs finite gamma and b >= 0");
  if (!(beta0 > 0) || !std::isfinite(beta0)) throw DomainError("beta_ode needs beta0 > 0");
  if (t_grid.empty()) throw DomainError("beta_ode needs a nonempty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
  if (form == BetaOdeForm::ShearDilatation && !(t_grid.front() > 0))
    throw DomainError("shear-dilatation form needs t > 0");
  for (double t : t_grid)
    if (!(mu(t) > 0)) throw DomainError("mu must be positive on the grid");

  const double t0 = t_grid.front();
  auto rhs = [&](double t, double beta) {
    const double m = mu(t);
    if (!(m > 0) || !std::isfinite(m)) throw DomainError("mu must be positive along the integration");
    double d = -(8.0 / 3) * b * std::pow(beta, gamma / 2 + 1) / m;
    if (form == BetaOdeForm::ShearDilatation) d += 2 * beta / (3 * t);
    return d;
  };

  BetaTrajectory out;
  const std::size_t n = t_grid.size();
  out.t = t_grid;
  out.beta.resize(n);
  out.closed_form.resize(n);
  out.asymptotic.resize(n);
  out.lambda.resize(n);

  // Closed forms. With u = beta^{-gamma/2}:
  //   Case2:            u = u0 + (4/3) gamma b lambda
  //   ShearDilatation:  u = (t0/t)^{gamma/3} [u0 + (4/3) gamma b int_{t0}^t (s/t0)^{gamma/3} / mu ds]
  // and for gamma = 0 beta decays exponentially in lambda.
  auto inv_mu = [&](double s) { return 1 / mu(s); };
  auto weighted = [&](double s) { return std::pow(s / t0, gamma / 3) / mu(s); };
  double lambda = 0, weighted_lambda = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      lambda += adaptive_simpson(inv_mu, t_grid[i - 1], t_grid[i]);
      if (form == BetaOdeForm::ShearDilatation)
        weighted_lambda += adaptive_simpson(weighted, t_grid[i - 1], t_grid[i]);
    }
    out.lambda[i] = lambda;
    const double t = t_grid[i];
    if (form == BetaOdeForm::Case2) {
      if (gamma == 0) {
        out.closed_form[i] = beta0 * std::exp(-(8.0 / 3) * b * lambda);
        out.asymptotic[i] = out.closed_form[i];
      } else {
        const double u = std::pow(beta0, -gamma / 2) + 4 * gamma * b * lambda / 3;
        out.closed_form[i] = std::pow(u, -2 / gamma);
        out.asymptotic[i] = std::pow(4 * gamma * b * lambda / 3, -2 / gamma);
      }
    } else {
      if (gamma == 0) {
        out.closed_form[i] = beta0 * std::pow(t / t0, 2.0 / 3) * std::exp(-(8.0 / 3) * b * lambda);
        out.asymptotic[i] = out.closed_form[i];
      } else {
        const double u =
            std::pow(t0 / t, gamma / 3) * (std::pow(beta0, -gamma / 2) + 4 * gamma * b * weighted_lambda / 3);
        out.closed_form[i] = std::pow(u, -2 / gamma);
        out.asymptotic[i] = std::pow(4 * gamma * b * t * t / (gamma + 6), -2 / gamma);
      }
    }
  }

  // Adaptive integration, landing exactly on each grid point.
  double t = t0, y = beta0;
  out.beta[0] = beta0;
  double h = 0;
  double k1 = rhs(t, y);
  {
    const double span = n > 1 ? t_grid[1] - t0 : 1;
    const double scale = std::abs(k1) > 0 ? std::abs(y / k1) : span;
    h = std::min(span, 1e-3 * scale);
  }
  const double rtol = options.rtol;
  for (std::size_t i = 1; i < n; ++i) {
    const double target = t_grid[i];
    while (t < target) {
      if (out.steps + out.rejected > options.max_steps) throw StiffnessFailure("beta_ode exceeded the step budget");
      bool last = false;
      const double h_free = h;
      if (t + h >= target || target - (t + h) < 1e-12 * std::abs(target)) {
        h = target - t;
        last = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) throw StiffnessFailure("beta_ode step size collapsed");
      const double k2 = rhs(t + c2 * h, y + h * a21 * k1);
      const double k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const double k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const double k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const double k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const double y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double k7 = rhs(t + h, y5);
      const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double sc = rtol * std::max(std::abs(y), std::abs(y5));
      const double ratio = (std::isfinite(y5) && y5 > 0 && sc > 0) ? std::abs(err) / sc
                                                                   : std::numeric_limits<double>::infinity();
      if (ratio <= 1) {
        t = last ? target : t + h;
        y = y5;
        k1 = k7;
        ++out.steps;
        const double grow = ratio == 0 ? 5 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h = last ? std::max(h_free, h * grow) : h * grow;
      } else {
        ++out.rejected;
        h *= std::isfinite(ratio) ? std::max(0.2, 0.9 * std::pow(ratio, -0.2)) : 0.2;
      }
    }
    out.beta[i] = y;
  }
  return out;
}

}  // namespace homokinetics
