#pragma once

// Galerkin matrix of the linearised collision operator
//   L[H](xi) = int dxi* int domega B e^{-|xi*|^2} (H*' + H' - H - H*)
// in the basis psi_nlm = N_nl L_n^{(l+1/2)}(|xi|^2) |xi|^l Y_lm, orthonormal
// for <f, g>_w = int f g e^{-|xi|^2} dxi.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "homokinetics/kernel.hpp"

namespace homokinetics {

/// Normalisation of the unit Maxwellian, pi^{-3/2}.
inline const double kC0 = std::pow(M_PI, -1.5);

struct BasisSpec {
  int radial_order = 2;   // n <= radial_order
  int angular_order = 2;  // l <= angular_order

  void validate() const;
  int size() const { return (radial_order + 1) * (angular_order + 1) * (angular_order + 1); }
};

struct BasisIndex {
  int n = 0;
  int l = 0;
  int m = 0;
};

/// Basis functions ordered by l, then m = -l..l, then n.
std::vector<BasisIndex> basis_indices(const BasisSpec& basis);

/// Real spherical harmonic times |xi|^l (a homogeneous harmonic polynomial).
double solid_harmonic(int l, int m, const Eigen::Vector3d& xi);

double basis_value(const BasisIndex& k, const Eigen::Vector3d& xi);

/// Coefficients <psi_k, f>_w by tensor Gauss-Hermite quadrature with
/// `points` nodes per axis (exact for polynomial f of degree < 2 points - 2R - L).
Eigen::VectorXd project(const BasisSpec& basis, const std::function<double(const Eigen::Vector3d&)>& f,
                        int points = 0);

/// Coefficients of xi . S xi.
Eigen::VectorXd quadratic_form_coefficients(const BasisSpec& basis, const Eigen::Matrix3d& S);

struct QuadBudget {
  double multiplier = 1;        // scales every node count of the base rule
  int max_doublings = 3;        // refinements allowed before giving up
  double relative_target = 1e-8;  // on quad_error / max |M_jk|
};

struct GalerkinOperator {
  KernelSpec kernel;
  BasisSpec basis;
  std::vector<BasisIndex> index;
  Eigen::MatrixXd matrix;               // M_jk = <psi_j, L psi_k>_w, symmetrised
  Eigen::MatrixXd raw;                  // before symmetrisation
  Eigen::MatrixXd invariant_projector;  // onto span{1, xi, |xi|^2}
  double quad_error = 0;                // absolute entry error estimate
  double budget = 1;                    // multiplier that produced `matrix`

  int size() const { return static_cast<int>(index.size()); }
  /// Position of psi_nlm, or -1 if outside the basis.
  int index_of(int n, int l, int m) const;
};

/// Assembles the operator with a product Gauss rule over the reduced
/// five-dimensional collision domain. Node counts are chosen so the rule is
/// exact for the polynomial integrand; the error estimate compares the
/// assembly at the final budget with the one at half that budget.
GalerkinOperator assemble(const KernelSpec& kernel, const BasisSpec& basis, const QuadBudget& quad = {});

/// Solves (-L) H = rhs on the complement of the collision invariants.
Eigen::VectorXd solve_on_W(const GalerkinOperator& op, const Eigen::VectorXd& rhs);

struct GreenKubo {
  double b = 0;
  double error = 0;
};

/// b = <xi.L0 xi, (-L)^{-1} xi.L0 xi>_w for traceless L0.
GreenKubo green_kubo_b(const GalerkinOperator& op, const Eigen::Matrix3d& L0);

/// First Hilbert correction H1 = -(beta^{gamma/2} / (C0^2 mu)) L^{-1}[e^{|xi|^2} div(Q xi G0)]
/// for traceless Q, in basis coefficients.
Eigen::VectorXd hilbert_h1(const GalerkinOperator& op, double gamma, double mu, double beta,
                           const Eigen::Matrix3d& Q);

}  // namespace homokinetics
