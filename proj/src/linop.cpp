#include "homokinetics/linop.hpp"

#include <cmath>

#include "homokinetics/errors.hpp"
#include "homokinetics/parallel.hpp"
#include "homokinetics/quadrature.hpp"

namespace homokinetics {

namespace {

double radial_norm(int n, int l)
{
  return std::exp(0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(n + l + 1.5)));
}

// L_n^{(l+1/2)}(r2) for n = 0..R, scaled by norm[n].
void radial_values(int l, double r2, int R, const double* norm, double* out)
{
  const double a = l + 0.5;
  double prev = 1, cur = 1 + a - r2;
  out[0] = norm[0];
  if (R >= 1) out[1] = cur * norm[1];
  for (int n = 2; n <= R; ++n) {
    const double next = ((2 * n - 1 + a - r2) * cur - (n - 1 + a) * prev) / n;
    prev = cur;
    cur = next;
    out[n] = cur * norm[n];
  }
}

// |x|^l |y|^l P_l(cos angle) for l = 0..A.
void zonal_values(int A, double dot, double norms2, double* out)
{
  out[0] = 1;
  if (A >= 1) out[1] = dot;
  for (int l = 2; l <= A; ++l) out[l] = ((2 * l - 1) * dot * out[l - 1] - (l - 1) * norms2 * out[l - 2]) / l;
}

struct Rules {
  QuadratureRule s, g, ca, ct, phi;
};

Rules make_rules(const KernelSpec& k, const BasisSpec& b, double mult)
{
  const int D = 2 * (2 * b.radial_order + b.angular_order);
  auto count = [&](int base) { return std::max(1, static_cast<int>(std::ceil(mult * base))); };
  Rules r;
  r.s = gauss_laguerre(count(D / 4 + 2), (1 + k.gamma) / 2);
  r.g = gauss_laguerre(count(D / 4 + 2), 0.5);
  r.ca = gauss_legendre(count(D / 2 + 1), -1, 1);
  r.ct = gauss_legendre(count(D / 2 + 2), 0, 1);
  r.phi = periodic_trapezoid(count(D + 2));
  return r;
}

using Blocks = std::vector<Eigen::MatrixXd>;

// Raw (unsymmetrised) l-blocks
//   M^l_nn' = (1/4pi) int e^{-|xi|^2-|xi*|^2} B R_n(|xi|) sum_y +-R_n'(|y|) Z_l(xi, y)
// with y in {xi*', xi', xi, xi*}, over G = (xi+xi*)/2 and V = xi* - xi.
Blocks assemble_blocks(const KernelSpec& k, const BasisSpec& b, double mult)
{
  const int R = b.radial_order, A = b.angular_order;
  const Rules rules = make_rules(k, b, mult);
  const int ns = static_cast<int>(rules.s.nodes.size());
  const double s_factor = std::pow(2.0, (1 + k.gamma) / 2);
  const double g_factor = 1 / (4 * std::sqrt(2.0));
  // 4 pi (direction of V) * 2 pi (azimuth of G) * 2 (omega -> -omega) / 4 pi.
  const double prefactor = 4 * M_PI * k.strength * s_factor * g_factor;

  std::vector<double> norms((A + 1) * (R + 1));
  for (int l = 0; l <= A; ++l)
    for (int n = 0; n <= R; ++n) norms[l * (R + 1) + n] = radial_norm(n, l);

  std::vector<Blocks> partial(ns, Blocks(A + 1, Eigen::MatrixXd::Zero(R + 1, R + 1)));
  parallel_for(ns, [&](int is) {
    Blocks& out = partial[is];
    const double s = std::sqrt(2 * rules.s.nodes(is));
    const Eigen::Vector3d V(0, 0, s);
    std::vector<double> rx((A + 1) * (R + 1)), ry((A + 1) * (R + 1)), zl(A + 1);
    Eigen::MatrixXd T(R + 1, A + 1);
    for (Eigen::Index ig = 0; ig < rules.g.nodes.size(); ++ig) {
      const double g = std::sqrt(rules.g.nodes(ig) / 2);
      for (Eigen::Index ia = 0; ia < rules.ca.nodes.size(); ++ia) {
        const double ca = rules.ca.nodes(ia);
        const Eigen::Vector3d G(g * std::sqrt(std::max(0.0, 1 - ca * ca)), 0, g * ca);
        const Eigen::Vector3d xi = G - V / 2, xs = G + V / 2;
        for (int l = 0; l <= A; ++l) radial_values(l, xi.squaredNorm(), R, &norms[l * (R + 1)], &rx[l * (R + 1)]);
        for (Eigen::Index it = 0; it < rules.ct.nodes.size(); ++it) {
          const double ct = rules.ct.nodes(it);
          const double st = std::sqrt(std::max(0.0, 1 - ct * ct));
          const double w_outer = prefactor * rules.s.weights(is) * rules.g.weights(ig) * rules.ca.weights(ia) *
                                 rules.ct.weights(it) * k.angular_value(ct);
          for (Eigen::Index ip = 0; ip < rules.phi.nodes.size(); ++ip) {
            const double ph = rules.phi.nodes(ip);
            const Eigen::Vector3d omega(st * std::cos(ph), st * std::sin(ph), ct);
            const Eigen::Vector3d Vp = V - 2 * V.dot(omega) * omega;
            const Eigen::Vector3d targets[4] = {G + Vp / 2, G - Vp / 2, xi, xs};
            const double signs[4] = {1, 1, -1, -1};
            T.setZero();
            for (int y = 0; y < 4; ++y) {
              const Eigen::Vector3d& Y = targets[y];
              const double y2 = Y.squaredNorm();
              zonal_values(A, xi.dot(Y), xi.squaredNorm() * y2, zl.data());
              for (int l = 0; l <= A; ++l) {
                radial_values(l, y2, R, &norms[l * (R + 1)], &ry[l * (R + 1)]);
                for (int n = 0; n <= R; ++n) T(n, l) += signs[y] * ry[l * (R + 1) + n] * zl[l];
              }
            }
            const double w = w_outer * rules.phi.weights(ip);
            for (int l = 0; l <= A; ++l) {
              Eigen::Map<const Eigen::VectorXd> Rx(&rx[l * (R + 1)], R + 1);
              out[l].noalias() += (w * Rx) * T.col(l).transpose();
            }
          }
        }
      }
    }
  });

  Blocks total(A + 1, Eigen::MatrixXd::Zero(R + 1, R + 1));
  for (const auto& p : partial)
    for (int l = 0; l <= A; ++l) total[l] += p[l];
  return total;
}

// Relative size of summation rounding in the assembled entries.
constexpr double kRoundingFloor = 1e-11;

double blocks_max_abs(const Blocks& b)
{
  double m = 0;
  for (const auto& x : b) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

void BasisSpec::validate() const
{
  if (radial_order < 0 || angular_order < 0) throw DomainError("basis orders must be nonnegative");
  if (radial_order > 30 || angular_order > 12) throw DomainError("basis orders are limited to n <= 30, l <= 12");
}

std::vector<BasisIndex> basis_indices(const BasisSpec& basis)
{
  std::vector<BasisIndex> out;
  for (int l = 0; l <= basis.angular_order; ++l)
    for (int m = -l; m <= l; ++m)
      for (int n = 0; n <= basis.radial_order; ++n) out.push_back({n, l, m});
  return out;
}

double solid_harmonic(int l, int m, const Eigen::Vector3d& xi)
{
  const double r = xi.norm();
  if (r == 0) return l == 0 ? 1 / std::sqrt(4 * M_PI) : 0;
  const int am = std::abs(m);
  const double x = xi.z() / r;
  const double sx = std::sqrt(std::max(0.0, 1 - x * x));
  double pmm = 1;
  for (int i = 1; i <= am; ++i) pmm *= (2 * i - 1) * sx;
  double p = pmm;
  if (l > am) {
    double p1 = x * (2 * am + 1) * pmm;
    double p0 = pmm;
    for (int ll = am + 2; ll <= l; ++ll) {
      const double p2 = ((2 * ll - 1) * x * p1 - (ll + am - 1) * p0) / (ll - am);
      p0 = p1;
      p1 = p2;
    }
    p = p1;
  }
  const double K = std::sqrt((2 * l + 1) / (4 * M_PI) * std::exp(std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0)));
  const double phi = std::atan2(xi.y(), xi.x());
  double angular = K * p;
  if (m > 0) angular *= std::sqrt(2.0) * std::cos(m * phi);
  if (m < 0) angular *= std::sqrt(2.0) * std::sin(am * phi);
  return angular * std::pow(r, l);
}

double basis_value(const BasisIndex& k, const Eigen::Vector3d& xi)
{
  std::vector<double> rad(k.n + 1), norm(k.n + 1);
  for (int n = 0; n <= k.n; ++n) norm[n] = radial_norm(n, k.l);
  radial_values(k.l, xi.squaredNorm(), k.n, norm.data(), rad.data());
  return rad[k.n] * solid_harmonic(k.l, k.m, xi);
}

Eigen::VectorXd project(const BasisSpec& basis, const std::function<double(const Eigen::Vector3d&)>& f, int points)
{
  basis.validate();
  if (points <= 0) points = basis.radial_order + basis.angular_order + 3;
  const auto rule = gauss_hermite(points);
  const auto idx = basis_indices(basis);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      for (int k = 0; k < points; ++k) {
        const Eigen::Vector3d xi(rule.nodes(i), rule.nodes(j), rule.nodes(k));
        const double w = rule.weights(i) * rule.weights(j) * rule.weights(k) * f(xi);
        if (w == 0) continue;
        for (size_t q = 0; q < idx.size(); ++q) c(static_cast<Eigen::Index>(q)) += w * basis_value(idx[q], xi);
      }
  return c;
}

Eigen::VectorXd quadratic_form_coefficients(const BasisSpec& basis, const Eigen::Matrix3d& S)
{
  const Eigen::Matrix3d sym = (S + S.transpose()) / 2;
  return project(basis, [&](const Eigen::Vector3d& xi) { return xi.dot(sym * xi); });
}

int GalerkinOperator::index_of(int n, int l, int m) const
{
  if (l > basis.angular_order || n > basis.radial_order || std::abs(m) > l || n < 0) return -1;
  return (l * l + (m + l)) * (basis.radial_order + 1) + n;
}

GalerkinOperator assemble(const KernelSpec& kernel, const BasisSpec& basis, const QuadBudget& quad)
{
  kernel.validate();
  basis.validate();
  if (!(kernel.gamma > -3)) throw DomainError("the Galerkin quadrature needs gamma > -3");
  if (!(quad.multiplier > 0) || quad.max_doublings < 1) throw DomainError("invalid quadrature budget");

  double mult = quad.multiplier;
  Blocks coarse = assemble_blocks(kernel, basis, mult);
  for (int d = 0;; ++d) {
    Blocks fine = assemble_blocks(kernel, basis, 2 * mult);
    double diff = 0;
    for (size_t l = 0; l < fine.size(); ++l) diff = std::max(diff, (fine[l] - coarse[l]).cwiseAbs().maxCoeff());
    const double scale = blocks_max_abs(fine);
    const double err = std::max(diff, kRoundingFloor * scale);
    if (err <= quad.relative_target * scale) {
      GalerkinOperator op;
      op.kernel = kernel;
      op.basis = basis;
      op.index = basis_indices(basis);
      op.quad_error = err;
      op.budget = 2 * mult;
      const int k = op.size();
      op.raw = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          if (op.index[i].l == op.index[j].l && op.index[i].m == op.index[j].m)
            op.raw(i, j) = fine[op.index[i].l](op.index[i].n, op.index[j].n);
      op.matrix = (op.raw + op.raw.transpose()) / 2;
      op.invariant_projector = Eigen::MatrixXd::Zero(k, k);
      for (int i : {op.index_of(0, 0, 0), op.index_of(1, 0, 0), op.index_of(0, 1, -1), op.index_of(0, 1, 0),
                    op.index_of(0, 1, 1)})
        if (i >= 0) op.invariant_projector(i, i) = 1;
      return op;
    }
    if (d + 1 >= quad.max_doublings)
      throw QuadratureBudgetExceeded("quadrature error " + std::to_string(err / scale) + " above target " +
                                     std::to_string(quad.relative_target));
    mult *= 2;
    coarse = std::move(fine);
  }
}

Eigen::VectorXd solve_on_W(const GalerkinOperator& op, const Eigen::VectorXd& rhs)
{
  const int k = op.size();
  if (rhs.size() != k) throw DomainError("right-hand side has the wrong length");
  const double tol = 10 * op.quad_error * std::max(1.0, rhs.norm());
  if ((op.invariant_projector * rhs).norm() > tol)
    throw CompatibilityError("right-hand side has a component along the collision invariants");
  const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(k, k) - op.invariant_projector;
  const Eigen::MatrixXd A = -(W * op.matrix * W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXd r = W * rhs;
  const double floor = 10 * op.quad_error;
  Eigen::VectorXd H = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= floor) continue;
    const auto v = es.eigenvectors().col(i);
    H += v * (v.dot(r) / lambda);
  }
  return W * H;
}

GreenKubo green_kubo_b(const GalerkinOperator& op, const Eigen::Matrix3d& L0)
{
  if (std::abs(L0.trace()) > 1e-12) throw CompatibilityError("Green-Kubo constant needs a traceless L0");
  const Eigen::VectorXd f = quadratic_form_coefficients(op.basis, L0);
  const Eigen::VectorXd h = solve_on_W(op, f);
  return {f.dot(h), h.squaredNorm() * op.size() * op.quad_error};
}

Eigen::VectorXd hilbert_h1(const GalerkinOperator& op, double gamma, double mu, double beta, const Eigen::Matrix3d& Q)
{
  if (std::abs(Q.trace()) > 1e-12) throw CompatibilityError("H1 needs a traceless Q");
  if (!(mu > 0) || !(beta > 0)) throw DomainError("H1 needs mu > 0 and beta > 0");
  if (Q.isZero(0)) return Eigen::VectorXd::Zero(op.size());
  // e^{|xi|^2} div(Q xi G0) = -2 C0 xi.Q xi since Tr Q = 0.
  const Eigen::VectorXd f = quadratic_form_coefficients(op.basis, Q);
  return -(2 * std::pow(beta, gamma / 2) / (kC0 * mu)) * solve_on_W(op, f);
}

}  // namespace homokinetics
