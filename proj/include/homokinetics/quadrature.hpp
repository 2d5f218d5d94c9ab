#pragma once

// Gauss rules from the Golub-Welsch eigenvalue problem.

#include <Eigen/Dense>

namespace homokinetics {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  template <typename F>
  double integrate(F&& f) const
  {
    double s = 0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) s += weights(i) * f(nodes(i));
    return s;
  }
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1, double b = 1);

/// n-point generalised Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf), alpha > -1.
QuadratureRule gauss_laguerre(int n, double alpha = 0);

/// n-point Gauss-Hermite rule for the weight e^{-x^2} on the real line.
QuadratureRule gauss_hermite(int n);

/// n-point trapezoid rule on the periodic interval [0, 2 pi).
QuadratureRule periodic_trapezoid(int n);

}  // namespace homokinetics
