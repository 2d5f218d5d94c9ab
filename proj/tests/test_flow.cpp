#include "doctest.h"

#include <random>

#include "homokinetics/flow.hpp"

using namespace homokinetics;
using Mat = Matrix3<double>;
using Vec = Vector3<double>;

namespace {

Mat random_rotation(std::mt19937_64& rng)
{
  std::normal_distribution<double> n;
  Mat G;
  for (int i = 0; i < 9; ++i) G(i) = n(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat R = qr.householderQ();
  if (R.determinant() < 0) R.col(0) *= -1;
  return R;
}

// Classical RK4 on dw/dt = -L(t) w with L evaluated from its definition.
Vec rk4(const Mat& A, double t0, double t1, Vec w, int steps)
{
  auto f = [&](double t, const Vec& y) -> Vec {
    Mat L = A * (Mat::Identity() + t * A).inverse();
    return -L * y;
  };
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    Vec k1 = f(t, w);
    Vec k2 = f(t + h / 2, w + h / 2 * k1);
    Vec k3 = f(t + h / 2, w + h / 2 * k2);
    Vec k4 = f(t + h, w + h * k3);
    w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return w;
}

// Composite Simpson rule.
template <typename F>
double simpson(F f, double a, double b, int n)
{
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

std::vector<FlowCase> fixtures()
{
  return {
      FlowCase::homogeneous_dilatation(),
      FlowCase::cylindrical(0),
      FlowCase::cylindrical(1.5),
      FlowCase::planar_shear(0.7),
      FlowCase::simple_shear(2),
      FlowCase::shear_decaying_dilatation(0.5, 1.25, 2),
      FlowCase::combined_orthogonal_shear(1, 0.3, 2),
  };
}

}  // namespace

TEST_CASE("make_flow examples")
{
  auto f = make_flow(Mat::Identity());
  CHECK(f.global());
  CHECK(max_abs(f.deformation(3.0) - Mat::Identity() / 4) < 1e-15);

  Mat S = Mat::Zero();
  S(0, 1) = 2;
  auto s = make_flow(S);
  CHECK(s.global());
  CHECK(max_abs(s.deformation(17.0) - S) < 1e-14);

  auto n = make_flow(Mat(-Mat::Identity()));
  CHECK(n.horizon() == doctest::Approx(1.0));

  Mat D = Mat::Zero();
  D(0, 0) = -1;
  D(1, 1) = -1;
  CHECK(make_flow(D).horizon() == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_flow(Mat(Mat::Zero())), DegenerateFlow);
  Mat bad = Mat::Identity();
  bad(1, 2) = std::nan("");
  CHECK_THROWS_AS(make_flow(bad), DomainError);
}

TEST_CASE("nilpotent flows have no spurious horizon")
{
  for (const auto& c : fixtures()) {
    std::mt19937_64 rng(7);
    Mat R = random_rotation(rng);
    CHECK(make_flow(Mat(R * c.representative() * R.transpose())).global());
  }
}

TEST_CASE("Riccati residual by finite differences")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A;
    for (int i = 0; i < 9; ++i) A(i) = 2 * u(rng) - 1;
    auto f = make_flow(A);
    const double T = std::min(f.horizon(), 10.0);
    const double t = 0.8 * T * u(rng);
    const double h = 1e-4 * (1 + t);
    Mat dL = (f.deformation(t + h) - f.deformation(t - h)) / (2 * h);
    if (t < h) continue;
    Mat L = f.deformation(t);
    CHECK((dL + L * L).norm() <= 1e-6 * std::max(1.0, (L * L).norm()));
  }
}

TEST_CASE("density")
{
  Mat S = Mat::Zero();
  S(0, 1) = 1.3;
  auto s = make_flow(S);
  CHECK(density(s, 1.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));

  auto f = make_flow(Mat(Mat::Identity()));
  const double integral = simpson([&](double t) { return f.deformation(t).trace(); }, 0, 1, 2000);
  CHECK(std::exp(-integral) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(density(f, 1.0, 1.0) == doctest::Approx(std::exp(-integral)).epsilon(1e-12));

  Mat C = Mat::Identity();
  C(2, 2) = 0;
  auto c = make_flow(C);
  CHECK(density(c, 1.0, 1e6) * 1e12 == doctest::Approx(1.0).epsilon(1e-5));

  auto n = make_flow(Mat(-Mat::Identity()));
  CHECK_THROWS_AS(density(n, 1.0, 1.0), FiniteHorizon);
  CHECK_THROWS_AS(density(n, -1.0, 0.5), DomainError);
}

TEST_CASE("density times determinant is constant")
{
  for (const auto& c : fixtures()) {
    auto f = make_flow(c.representative());
    for (double t : {0.0, 0.5, 3.0, 100.0, 1e4})
      CHECK(density(f, 2.5, t) * f.det(t) == doctest::Approx(2.5).epsilon(1e-10));
  }
}

TEST_CASE("propagator")
{
  Mat S = Mat::Zero();
  S(0, 1) = 2;
  auto s = make_flow(S);
  Vec w(1, -2, 3);
  Vec p = s.propagate(0, 1.5, w);
  CHECK((p - Vec(1 - 2 * 1.5 * -2, -2, 3)).norm() < 1e-14);
  CHECK((s.propagate(2, 2, w) - w).norm() == 0);

  auto cos = FlowCase::combined_orthogonal_shear(1.5, 0.5, 2);
  const double t = 3;
  Vec expected(-cos.K2 * t + cos.K1 * cos.K3 * t * t, -cos.K1 * t, 1);
  Vec exact = canonical_propagator(cos, 0, t) * Vec::UnitZ();
  CHECK((exact - expected).norm() < 1e-13);
  // Canonical L for case vii is exact for the representative, so RK4 applies.
  Vec numeric = rk4(cos.representative(), 0, t, Vec::UnitZ(), 4000);
  CHECK((numeric - expected).norm() <= 1e-10 * expected.norm());
  auto f = make_flow(cos.representative());
  CHECK((f.propagate(0, t, Vec::UnitZ()) - expected).norm() < 1e-12);
}

TEST_CASE("propagator composition and derivative")
{
  std::mt19937_64 rng(5);
  for (const auto& c : fixtures()) {
    Mat R = random_rotation(rng);
    auto f = make_flow(Mat(R * c.representative() * R.transpose()));
    Mat P02 = f.propagator(0.3, 4.0);
    Mat P = f.propagator(1.7, 4.0) * f.propagator(0.3, 1.7);
    CHECK(max_abs(P - P02) <= 1e-12 * max_abs(P02));

    const double t = 1.1;
    Vec w(0.3, -1.2, 0.8);
    auto quotient = [&](double h) -> Vec { return (f.propagate(t, t + h, w) - w) / h; };
    Vec rich = 2 * quotient(1e-4) - quotient(2e-4);
    Vec target = -f.deformation(t) * w;
    CHECK((rich - target).norm() <= 1e-6 * std::max(1.0, target.norm()));
  }
}

TEST_CASE("canonical propagators solve the canonical ODE")
{
  for (const auto& c : fixtures()) {
    const double t0 = 2, t1 = 5;
    Vec w(0.4, -0.7, 1.1);
    auto f = [&](double t, const Vec& y) -> Vec { return -c.canonical(t) * y; };
    Vec y = w;
    const int steps = 4000;
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int i = 0; i < steps; ++i) {
      Vec k1 = f(t, y), k2 = f(t + h / 2, y + h / 2 * k1), k3 = f(t + h / 2, y + h / 2 * k2),
          k4 = f(t + h, y + h * k3);
      y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    CAPTURE(to_string(c.tag));
    CHECK((canonical_propagator(c, t0, t1) * w - y).norm() <= 1e-10 * y.norm());
  }
}

TEST_CASE("classify examples")
{
  CHECK(classify(make_flow(Mat(Mat::Identity()))).tag == FlowCaseTag::HomogeneousDilatation);
  Mat C = Mat::Identity();
  C(2, 2) = 0;
  auto c = classify(make_flow(C));
  CHECK(c.tag == FlowCaseTag::CylindricalDilatation);
  CHECK(c.K == 0);
  Mat S = Mat::Zero();
  S(0, 1) = 2;
  auto s = classify(make_flow(S));
  CHECK(s.tag == FlowCaseTag::SimpleShear);
  CHECK(s.K == doctest::Approx(2));

  CHECK_THROWS_AS(classify(make_flow(Mat(-Mat::Identity()))), FiniteHorizon);
  Mat rot = Mat::Zero();
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  CHECK_THROWS_AS(classify(make_flow(rot)), UnclassifiableFlow);
}

TEST_CASE("all canonical fixtures classify to themselves, also after rotation")
{
  std::mt19937_64 rng(3);
  for (const auto& fx : fixtures()) {
    CAPTURE(to_string(fx.tag));
    for (int trial = 0; trial < 4; ++trial) {
      Mat R = trial == 0 ? Mat(Mat::Identity()) : random_rotation(rng);
      Mat A = R * fx.representative() * R.transpose();
      FlowCase c = classify(make_flow(A));
      CHECK(c.tag == fx.tag);
      CHECK(c.K == doctest::Approx(fx.K).epsilon(1e-9));
      CHECK(c.K1 == doctest::Approx(fx.K1).epsilon(1e-9));
      CHECK(c.K2 == doctest::Approx(fx.K2).epsilon(1e-9));
      CHECK(c.K3 == doctest::Approx(fx.K3).epsilon(1e-9));
      CHECK(max_abs(c.basis.transpose() * c.basis - Mat::Identity()) < 1e-12);
      CHECK(c.basis.determinant() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("classification works in long double")
{
  Matrix3<long double> A = FlowCase::combined_orthogonal_shear(1, 0, 1).representative().cast<long double>();
  auto c = classify(make_flow(A));
  CHECK(c.tag == FlowCaseTag::CombinedOrthogonalShear);
}

TEST_CASE("FlowCase validation")
{
  CHECK_THROWS_AS(FlowCase::simple_shear(0).validate(), DomainError);
  CHECK_THROWS_AS(FlowCase::combined_orthogonal_shear(0, 1, 1).validate(), DomainError);
  CHECK_NOTHROW(FlowCase::planar_shear(0).validate());
}

TEST_CASE("scaled decomposition")
{
  auto ss = scaled_decomposition(FlowCase::simple_shear(1.5));
  CHECK(ss.scale() == TimeScale::Constant);
  for (double tau : {0.0, 1.0, 50.0}) {
    CHECK(ss.mu(tau) == doctest::Approx(1.0));
    CHECK(max_abs(ss.Q(tau) - ss.L0()) < 1e-14);
  }

  auto hd = scaled_decomposition(FlowCase::homogeneous_dilatation());
  CHECK(hd.scale() == TimeScale::Inverse);
  for (double tau : {0.0, 2.0, 10.0}) {
    CHECK(hd.mu(tau) == doctest::Approx(std::exp(-2 * tau)));
    CHECK(hd.t_of_tau(tau) == doctest::Approx(std::expm1(tau)));
  }

  auto cyl = scaled_decomposition(FlowCase::cylindrical(0));
  for (double tau : {0.5, 3.0, 12.0}) CHECK(cyl.mu(tau) == doctest::Approx(std::exp(-tau)));

  auto cos = scaled_decomposition(FlowCase::combined_orthogonal_shear(1, 0, 1));
  CHECK(cos.scale() == TimeScale::Linear);
  for (double tau : {1e4, 1e6}) CHECK(cos.mu(tau) * std::sqrt(2 * tau) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(max_abs(cos.Q(1e8) - cos.L0()) < 1e-3);
  CHECK(cos.L0()(0, 2) == doctest::Approx(-1.0));

  auto sd = scaled_decomposition(FlowCase::shear_decaying_dilatation(0.5, 2, 1));
  for (double t : {10.0, 1e3}) CHECK(sd.mu(t) * (1 + t) == doctest::Approx(1.0));
}

TEST_CASE("scaled decomposition invariants")
{
  for (const auto& c : fixtures()) {
    auto d = scaled_decomposition(c);
    CAPTURE(to_string(c.tag));
    CHECK(d.tau_of_t(0) == 0);
    double prev = 0;
    for (double t : {0.1, 1.0, 10.0, 1e3, 1e6}) {
      const double tau = d.tau_of_t(t);
      CHECK(tau > prev);
      CHECK(d.t_of_tau(tau) == doctest::Approx(t).epsilon(1e-12));
      prev = tau;
    }
    CHECK(d.L0().norm() > 0);
    // mu stays within exp(+-2 tau) of 1 (the two-sided exponential bound).
    for (double tau : {1.0, 5.0, 20.0}) {
      const double m = d.mu(tau);
      CHECK(m >= std::exp(-3 * tau));
      CHECK(m <= 2 * std::exp(3 * tau));
    }
    const double far = d.scale() == TimeScale::Inverse ? 25.0 : 1e8;
    CHECK(max_abs(d.Q(far) - d.L0()) < 1e-3 * std::max(1.0, max_abs(d.L0())));
  }
}

TEST_CASE("scaled decomposition of a rotated flow matches the canonical one")
{
  std::mt19937_64 rng(9);
  auto fx = FlowCase::planar_shear(0.7);
  Mat R = random_rotation(rng);
  auto flow = make_flow(Mat(R * fx.representative() * R.transpose()));
  auto c = classify(flow);
  auto d = scaled_decomposition(flow, c);
  auto ref = scaled_decomposition(fx);
  for (double tau : {0.5, 4.0}) {
    CHECK(d.mu(tau) == doctest::Approx(ref.mu(tau)));
    CHECK(max_abs(d.Q(tau) - ref.Q(tau)) < 1e-10);
  }
}
