#include "homokinetics/quadrature.hpp"

#include <cmath>

#include "homokinetics/errors.hpp"

namespace homokinetics {

namespace {

// Nodes are the eigenvalues of the symmetric Jacobi matrix, weights are mu0
// times the squared first components of its eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0)
{
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  J.diagonal() = diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule r;
  r.nodes = es.eigenvalues();
  r.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return r;
}

// Rules for even weights: enforce exact reflection symmetry of the nodes.
void symmetrize(QuadratureRule& r)
{
  const Eigen::Index n = r.nodes.size();
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index j = n - 1 - i;
    const double x = (r.nodes(j) - r.nodes(i)) / 2;
    const double w = (r.weights(i) + r.weights(j)) / 2;
    r.nodes(i) = -x;
    r.nodes(j) = x;
    r.weights(i) = r.weights(j) = w;
  }
  if (n % 2) r.nodes(n / 2) = 0;
}

void require_points(int n)
{
  if (n < 1) throw DomainError("a quadrature rule needs at least one node");
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b)
{
  require_points(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1);
  QuadratureRule r = golub_welsch(d, e, 2);
  symmetrize(r);
  r.nodes = (a + b) / 2 + (b - a) / 2 * r.nodes.array();
  r.weights *= (b - a) / 2;
  return r;
}

QuadratureRule gauss_laguerre(int n, double alpha)
{
  require_points(n);
  if (!(alpha > -1)) throw DomainError("Gauss-Laguerre needs alpha > -1");
  Eigen::VectorXd d(n), e(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) d(k) = 2 * k + alpha + 1;
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(k * (k + alpha));
  return golub_welsch(d, e, std::tgamma(alpha + 1));
}

QuadratureRule gauss_hermite(int n)
{
  require_points(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(k / 2.0);
  QuadratureRule r = golub_welsch(d, e, std::sqrt(M_PI));
  symmetrize(r);
  return r;
}

QuadratureRule periodic_trapezoid(int n)
{
  require_points(n);
  QuadratureRule r;
  r.nodes = Eigen::VectorXd::LinSpaced(n, 0, 2 * M_PI * (n - 1) / n);
  r.weights = Eigen::VectorXd::Constant(n, 2 * M_PI / n);
  return r;
}

}  // namespace homokinetics
