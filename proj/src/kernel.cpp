#include "homokinetics/kernel.hpp"

#include <string>

namespace homokinetics {

std::string_view to_string(AngularDensity a)
{
  return a == AngularDensity::Constant ? "constant" : "cosine";
}

AngularDensity angular_density_from_string(std::string_view name)
{
  if (name == "constant") return AngularDensity::Constant;
  if (name == "cosine") return AngularDensity::Cosine;
  throw DomainError("unknown angular density '" + std::string(name) + "'");
}

void KernelSpec::validate() const
{
  if (!std::isfinite(gamma)) throw DomainError("kernel gamma must be finite");
  if (!(strength > 0) || !std::isfinite(strength)) throw DomainError("kernel strength must be positive");
}

double KernelSpec::angular_value(double c) const
{
  return angular == AngularDensity::Constant ? 1 / (4 * M_PI) : std::abs(c) / (2 * M_PI);
}

double evaluate_kernel(const KernelSpec& spec, double n_dot_omega, double speed)
{
  if (!(std::abs(n_dot_omega) <= 1)) throw DomainError("n.omega outside [-1, 1]");
  if (!(speed >= 0)) throw DomainError("negative relative speed");
  return spec.strength * std::pow(speed, spec.gamma) * spec.angular_value(n_dot_omega);
}

Eigen::Vector3d sample_omega(const KernelSpec& spec, const Eigen::Vector3d& V, std::mt19937_64& rng)
{
  const double s = V.norm();
  if (!(s > 0)) throw DomainError("sample_omega needs a nonzero relative velocity");
  const Eigen::Vector3d n = V / s;
  std::uniform_real_distribution<double> u(0, 1);
  double c;
  if (spec.angular == AngularDensity::Constant) {
    c = 2 * u(rng) - 1;
  } else {
    c = std::sqrt(u(rng));
    if (u(rng) < 0.5) c = -c;
  }
  const double phi = 2 * M_PI * u(rng);
  const Eigen::Vector3d trial = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (trial - trial.dot(n) * n).normalized();
  const Eigen::Vector3d e2 = n.cross(e1);
  const double r = std::sqrt(std::max(0.0, 1 - c * c));
  return (c * n + r * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

double rate_majorant(const KernelSpec& spec, double max_rel_speed, double speed_floor)
{
  if (spec.gamma >= 0) {
    if (!(max_rel_speed > 0)) throw DomainError("rate_majorant needs a positive speed bound");
    return spec.total_rate(max_rel_speed);
  }
  if (!(speed_floor > 0)) throw DomainError("soft kernels need a positive speed floor");
  return spec.total_rate(speed_floor);
}

}  // namespace homokinetics
