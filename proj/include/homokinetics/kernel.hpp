#pragma once

// Homogeneous cut-off collision kernels B = strength |V|^gamma a(n.omega),
// the elastic collision rule and sampling of scattering directions.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string_view>

#include "homokinetics/errors.hpp"

namespace homokinetics {

/// Angular densities on the sphere, normalised so that int a(n.omega) domega = 1.
enum class AngularDensity {
  Constant,  // a = 1/(4 pi)
  Cosine,    // a = |n.omega| / (2 pi)
};

std::string_view to_string(AngularDensity a);
AngularDensity angular_density_from_string(std::string_view name);

struct KernelSpec {
  double gamma = 1;
  AngularDensity angular = AngularDensity::Constant;
  double strength = 1;

  /// Throws DomainError for non-finite gamma or nonpositive strength.
  void validate() const;

  double angular_value(double n_dot_omega) const;

  /// int_{S^2} B(n.omega, s) domega.
  double total_rate(double speed) const { return strength * std::pow(speed, gamma); }
};

/// Variable-hard-sphere kernel equal to |omega.(v - v*)| (gamma = 1, cosine density).
inline KernelSpec hard_sphere_kernel() { return {1.0, AngularDensity::Cosine, 2 * M_PI}; }

double evaluate_kernel(const KernelSpec& spec, double n_dot_omega, double speed);

template <typename Scalar>
struct CollisionOutcome {
  Eigen::Matrix<Scalar, 3, 1> v_prime;
  Eigen::Matrix<Scalar, 3, 1> vstar_prime;
};

/// v' = v + ((v*-v).omega) omega, v*' = v* - ((v*-v).omega) omega.
template <typename Derived1, typename Derived2, typename Derived3>
CollisionOutcome<typename Derived1::Scalar> collide(const Eigen::MatrixBase<Derived1>& v,
                                                    const Eigen::MatrixBase<Derived2>& vstar,
                                                    const Eigen::MatrixBase<Derived3>& omega)
{
  using Scalar = typename Derived1::Scalar;
  if (std::abs(omega.squaredNorm() - Scalar(1)) > Scalar(2e-12))
    throw DomainError("collide requires a unit scattering vector");
  const Scalar p = (vstar - v).dot(omega);
  return {v + p * omega, vstar - p * omega};
}

/// A unit vector distributed with density proportional to B(n.omega, |V|), n = V/|V|.
Eigen::Vector3d sample_omega(const KernelSpec& spec, const Eigen::Vector3d& V, std::mt19937_64& rng);

/// Upper bound of total_rate(s) over s <= max_rel_speed (gamma >= 0) or over
/// s >= speed_floor (gamma < 0).
double rate_majorant(const KernelSpec& spec, double max_rel_speed, double speed_floor = 0);

}  // namespace homokinetics
