#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "homokinetics/kernel.hpp"

using namespace homokinetics;
using Eigen::Vector3d;

TEST_CASE("evaluate_kernel")
{
  auto hs = hard_sphere_kernel();
  Vector3d V(0.3, -1.1, 0.7);
  Vector3d omega = Vector3d(1, 2, -0.5).normalized();
  const double c = V.normalized().dot(omega);
  // The angular density integrates to one, so B matches |omega.V| pointwise.
  CHECK(evaluate_kernel(hs, c, V.norm()) == doctest::Approx(std::abs(omega.dot(V))).epsilon(1e-14));

  KernelSpec k{1.0, AngularDensity::Constant, 2.0};
  CHECK(evaluate_kernel(k, 0.2, 0.0) == 0);
  CHECK(evaluate_kernel(k, 0.2, 2.6) == doctest::Approx(2 * evaluate_kernel(k, 0.2, 1.3)).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate_kernel(k, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(evaluate_kernel(k, 0.5, -1.0), DomainError);
}

TEST_CASE("homogeneity")
{
  for (double gamma : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
    KernelSpec k{gamma, AngularDensity::Cosine, 1.7};
    for (double lambda : {0.25, 3.0, 17.0}) {
      const double lhs = evaluate_kernel(k, -0.4, lambda * 1.9);
      const double rhs = std::pow(lambda, gamma) * evaluate_kernel(k, -0.4, 1.9);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(rhs));
    }
  }
}

TEST_CASE("angular densities are normalised")
{
  for (auto a : {AngularDensity::Constant, AngularDensity::Cosine}) {
    KernelSpec k{0.0, a, 1.0};
    // Midpoint rule in c = n.omega, the azimuth contributes 2 pi.
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += k.angular_value(-1 + (i + 0.5) * 2.0 / n);
    CHECK(2 * M_PI * s * 2.0 / n == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("collide examples")
{
  Vector3d v(0, 0, 0), vs(1, 0, 0);
  auto out = collide(v, vs, Vector3d::UnitX());
  CHECK((out.v_prime - Vector3d(1, 0, 0)).norm() == 0);
  CHECK(out.vstar_prime.norm() == 0);

  auto graze = collide(v, vs, Vector3d::UnitY());
  CHECK(graze.v_prime == v);
  CHECK(graze.vstar_prime == vs);

  CHECK_THROWS_AS(collide(v, vs, Vector3d(1, 1, 0)), DomainError);
}

TEST_CASE("collisions conserve momentum and energy and are involutions")
{
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  KernelSpec k{1.0, AngularDensity::Cosine, 1.0};
  for (int i = 0; i < 10000; ++i) {
    Vector3d v(n(rng), n(rng), n(rng)), vs(n(rng), n(rng), n(rng));
    Vector3d omega = sample_omega(k, vs - v, rng);
    auto out = collide(v, vs, omega);
    const double p0 = (v + vs).norm() + v.norm() + vs.norm();
    CHECK((out.v_prime + out.vstar_prime - v - vs).norm() <= 1e-14 * p0);
    const double e0 = v.squaredNorm() + vs.squaredNorm();
    CHECK(std::abs(out.v_prime.squaredNorm() + out.vstar_prime.squaredNorm() - e0) <= 1e-13 * e0);
    auto back = collide(out.v_prime, out.vstar_prime, omega);
    CHECK((back.v_prime - v).norm() <= 1e-14 * p0);
    CHECK((back.vstar_prime - vs).norm() <= 1e-14 * p0);
  }
}

namespace {

// Kolmogorov-Smirnov statistic of samples against a CDF.
template <typename F>
double ks_statistic(std::vector<double> x, F cdf)
{
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double F_ = cdf(x[i]);
    d = std::max({d, F_ - i / n, (i + 1) / n - F_});
  }
  return d;
}

}  // namespace

TEST_CASE("constant density samples the sphere uniformly")
{
  KernelSpec k{0.0, AngularDensity::Constant, 1.0};
  std::mt19937_64 rng(1);
  Vector3d V(0.2, 0.5, -1.0);
  const int N = 100000;
  // 8 equal-area cells: octants of the sphere.
  std::vector<int> counts(8, 0);
  for (int i = 0; i < N; ++i) {
    Vector3d w = sample_omega(k, V, rng);
    CHECK(std::abs(w.norm() - 1) < 1e-14);
    counts[(w.x() > 0) + 2 * (w.y() > 0) + 4 * (w.z() > 0)]++;
  }
  double chi2 = 0;
  const double expect = N / 8.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 7 degrees of freedom, 0.999 quantile.
  CHECK(chi2 < 24.32);
}

TEST_CASE("cosine density matches the |c| law")
{
  KernelSpec k{1.0, AngularDensity::Cosine, 1.0};
  std::mt19937_64 rng(2);
  Vector3d V(1.0, -0.3, 0.4);
  const Vector3d n = V.normalized();
  std::vector<double> c;
  const int N = 100000;
  for (int i = 0; i < N; ++i) c.push_back(sample_omega(k, V, rng).dot(n));
  // CDF of density |c| on [-1, 1] (normalised to 1).
  auto cdf = [](double x) { return x < 0 ? (1 - x * x) / 2 : (1 + x * x) / 2; };
  // 1.95/sqrt(N) is the 0.001 critical value.
  CHECK(ks_statistic(c, cdf) < 1.95 / std::sqrt(double(N)));
}

TEST_CASE("sample_omega is deterministic and rejects zero V")
{
  KernelSpec k{1.0, AngularDensity::Cosine, 1.0};
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(sample_omega(k, Vector3d(1, 2, 3), a) == sample_omega(k, Vector3d(1, 2, 3), b));
  CHECK_THROWS_AS(sample_omega(k, Vector3d::Zero(), a), DomainError);
}

TEST_CASE("rate majorant")
{
  KernelSpec hard{1.0, AngularDensity::Constant, 3.0};
  const double a = 1 / (4 * M_PI);
  CHECK(rate_majorant(hard, 2.5) == doctest::Approx(4 * M_PI * a * 3.0 * 2.5));
  KernelSpec maxwell{0.0, AngularDensity::Cosine, 3.0};
  CHECK(rate_majorant(maxwell, 1.0) == rate_majorant(maxwell, 100.0));
  KernelSpec soft{-1.0, AngularDensity::Constant, 3.0};
  CHECK(rate_majorant(soft, 10.0, 0.2) == doctest::Approx(4 * M_PI * a * 3.0 / 0.2));
  CHECK_THROWS_AS(rate_majorant(soft, 10.0, 0.0), DomainError);
  CHECK_THROWS_AS(rate_majorant(hard, 0.0), DomainError);
  for (double s : {0.01, 0.7, 2.5}) CHECK(hard.total_rate(s) <= rate_majorant(hard, 2.5));
  for (double s : {0.2, 0.7, 25.0}) CHECK(soft.total_rate(s) <= rate_majorant(soft, 10.0, 0.2));
}
