#pragma once

// Deformation matrices L(t) = A (I + tA)^{-1} of homoenergetic flows: exact
// evaluation and propagation, long-time classification into the seven
// canonical flow families, and the rescaled (tau, mu, Q) description used by
// the particle solver.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "homokinetics/errors.hpp"

namespace homokinetics {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

enum class FlowCaseTag {
  HomogeneousDilatation,
  CylindricalDilatation,
  CylindricalDilatationShear,
  PlanarShear,
  SimpleShear,
  SimpleShearDecayingDilatation,
  CombinedOrthogonalShear,
};

inline constexpr std::array<FlowCaseTag, 7> kAllFlowCases = {
    FlowCaseTag::HomogeneousDilatation,       FlowCaseTag::CylindricalDilatation,
    FlowCaseTag::CylindricalDilatationShear,  FlowCaseTag::PlanarShear,
    FlowCaseTag::SimpleShear,                 FlowCaseTag::SimpleShearDecayingDilatation,
    FlowCaseTag::CombinedOrthogonalShear,
};

inline std::string_view to_string(FlowCaseTag tag)
{
  switch (tag) {
    case FlowCaseTag::HomogeneousDilatation: return "HomogeneousDilatation";
    case FlowCaseTag::CylindricalDilatation: return "CylindricalDilatation";
    case FlowCaseTag::CylindricalDilatationShear: return "CylindricalDilatationShear";
    case FlowCaseTag::PlanarShear: return "PlanarShear";
    case FlowCaseTag::SimpleShear: return "SimpleShear";
    case FlowCaseTag::SimpleShearDecayingDilatation: return "SimpleShearDecayingDilatation";
    case FlowCaseTag::CombinedOrthogonalShear: return "CombinedOrthogonalShear";
  }
  return "?";
}

inline std::optional<FlowCaseTag> flow_case_from_string(std::string_view name)
{
  for (FlowCaseTag tag : kAllFlowCases)
    if (to_string(tag) == name) return tag;
  return std::nullopt;
}

/// Largest entry in absolute value.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m)
{
  return m.cwiseAbs().maxCoeff();
}

/// The path L(t) = A (I + tA)^{-1}, the unique solution of dL/dt + L^2 = 0
/// with L(0) = A, on its maximal interval [0, horizon).
template <typename Scalar = double>
class FlowPath {
 public:
  using Mat = Matrix3<Scalar>;
  using Vec = Vector3<Scalar>;

  FlowPath(const Mat& A, Scalar horizon) : A_(A), horizon_(horizon) {}

  const Mat& A() const { return A_; }
  Scalar horizon() const { return horizon_; }
  bool global() const { return horizon_ == std::numeric_limits<Scalar>::infinity(); }

  Mat deformation(Scalar t) const { return A_ * (Mat::Identity() + t * A_).inverse(); }

  Scalar det(Scalar t) const { return (Mat::Identity() + t * A_).determinant(); }

  /// int_0^t Tr L(s) ds, which is log det(I + tA).
  Scalar trace_integral(Scalar t) const
  {
    check_time(t);
    return std::log(det(t));
  }

  /// Fundamental matrix of dw/dt = -L(t) w from t0 to t1.
  Mat propagator(Scalar t0, Scalar t1) const
  {
    check_time(t0);
    check_time(t1);
    return (Mat::Identity() + t1 * A_).inverse() * (Mat::Identity() + t0 * A_);
  }

  Vec propagate(Scalar t0, Scalar t1, const Vec& w) const
  {
    if (t1 < t0) throw DomainError("propagate requires t0 <= t1");
    return propagator(t0, t1) * w;
  }

  void check_time(Scalar t) const
  {
    if (!(t < horizon_)) throw FiniteHorizon("time is past the flow horizon");
    if (t < Scalar(0)) throw DomainError("negative time");
  }

  template <typename Other>
  FlowPath<Other> cast() const
  {
    return FlowPath<Other>(A_.template cast<Other>(), static_cast<Other>(horizon_));
  }

 private:
  Mat A_;
  Scalar horizon_;
};

namespace detail {

// First positive root of det(I + tA). Roots sit at t = -1/lambda for real
// negative eigenvalues; a candidate is kept only if the determinant really
// vanishes there, which discards rounding noise of defective zero eigenvalues.
template <typename Scalar>
Scalar flow_horizon(const Matrix3<Scalar>& A)
{
  using Long = long double;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  Eigen::EigenSolver<Matrix3<Scalar>> es(A, false);
  const auto& ev = es.eigenvalues();
  const Matrix3<Long> Al = A.template cast<Long>();
  Scalar horizon = inf;
  for (int i = 0; i < 3; ++i) {
    const Scalar re = ev(i).real();
    const Scalar im = ev(i).imag();
    if (!(re < Scalar(0)) || std::abs(im) > Scalar(1e-6) * std::abs(ev(i))) continue;
    const Scalar T = Scalar(-1) / re;
    Long scale = 1;
    for (int j = 0; j < 3; ++j) scale *= 1 + static_cast<Long>(T) * std::abs(static_cast<Long>(ev(j).real()));
    const Long d = (Matrix3<Long>::Identity() + static_cast<Long>(T) * Al).determinant();
    if (std::abs(d) <= Long(1e-6) * scale && T < horizon) horizon = T;
  }
  return horizon;
}

}  // namespace detail

template <typename Derived>
FlowPath<typename Derived::Scalar> make_flow(const Eigen::MatrixBase<Derived>& A)
{
  using Scalar = typename Derived::Scalar;
  const Matrix3<Scalar> M = A;
  if (!M.allFinite()) throw DomainError("matrix A has non-finite entries");
  if (max_abs(M) == Scalar(0)) throw DegenerateFlow("A = 0 gives L identically zero");
  return FlowPath<Scalar>(M, detail::flow_horizon(M));
}

/// rho(t) = rho(0) exp(-int_0^t Tr L) = rho(0) / det(I + tA).
template <typename Scalar>
Scalar density(const FlowPath<Scalar>& flow, Scalar rho0, Scalar t)
{
  if (!(rho0 > Scalar(0))) throw DomainError("rho0 must be positive");
  flow.check_time(t);
  return rho0 / flow.det(t);
}

/// Long-time class of a flow together with an orthonormal basis (columns of
/// `basis`) in which L(t) takes the canonical asymptotic form.
struct FlowCase {
  FlowCaseTag tag = FlowCaseTag::SimpleShear;
  double K = 0;   // shear constant of cases ii-v
  double K1 = 0;  // cases vi and vii
  double K2 = 0;
  double K3 = 0;
  Matrix3<double> basis = Matrix3<double>::Identity();

  static FlowCase homogeneous_dilatation() { return {FlowCaseTag::HomogeneousDilatation}; }
  static FlowCase cylindrical(double K)
  {
    FlowCase c{K == 0 ? FlowCaseTag::CylindricalDilatation : FlowCaseTag::CylindricalDilatationShear};
    c.K = K;
    return c;
  }
  static FlowCase planar_shear(double K)
  {
    FlowCase c{FlowCaseTag::PlanarShear};
    c.K = K;
    return c;
  }
  static FlowCase simple_shear(double K)
  {
    FlowCase c{FlowCaseTag::SimpleShear};
    c.K = K;
    return c;
  }
  static FlowCase shear_decaying_dilatation(double K1, double K2, double K3)
  {
    FlowCase c{FlowCaseTag::SimpleShearDecayingDilatation};
    c.K1 = K1;
    c.K2 = K2;
    c.K3 = K3;
    return c;
  }
  static FlowCase combined_orthogonal_shear(double K1, double K2, double K3)
  {
    FlowCase c{FlowCaseTag::CombinedOrthogonalShear};
    c.K1 = K1;
    c.K2 = K2;
    c.K3 = K3;
    return c;
  }

  /// Throws DomainError unless the constants are admissible for the tag.
  void validate() const
  {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(K) || !finite(K1) || !finite(K2) || !finite(K3))
      throw DomainError("flow case constants must be finite");
    switch (tag) {
      case FlowCaseTag::CylindricalDilatation:
        if (K != 0) throw DomainError("CylindricalDilatation requires K = 0");
        break;
      case FlowCaseTag::CylindricalDilatationShear:
        if (K == 0) throw DomainError("CylindricalDilatationShear requires K != 0");
        break;
      case FlowCaseTag::SimpleShear:
        if (K == 0) throw DomainError("SimpleShear requires K != 0");
        break;
      case FlowCaseTag::SimpleShearDecayingDilatation:
        if (K2 == 0) throw DomainError("SimpleShearDecayingDilatation requires K2 != 0");
        break;
      case FlowCaseTag::CombinedOrthogonalShear:
        if (K1 * K3 == 0) throw DomainError("CombinedOrthogonalShear requires K1*K3 != 0");
        break;
      default: break;
    }
  }

  /// A matrix A, written in the canonical basis, whose flow L(t) equals the
  /// canonical form with t replaced by t + 1 (exactly, not only
  /// asymptotically).
  Matrix3<double> representative() const
  {
    Matrix3<double> A = Matrix3<double>::Zero();
    switch (tag) {
      case FlowCaseTag::HomogeneousDilatation: A.setIdentity(); break;
      case FlowCaseTag::CylindricalDilatation:
      case FlowCaseTag::CylindricalDilatationShear:
        A(0, 0) = 1;
        A(1, 1) = 1;
        A(0, 2) = K;
        break;
      case FlowCaseTag::PlanarShear:
        A(1, 2) = K;
        A(2, 2) = 1;
        break;
      case FlowCaseTag::SimpleShear: A(0, 1) = K; break;
      case FlowCaseTag::SimpleShearDecayingDilatation:
        A(0, 1) = K2 + K1 * K3;
        A(0, 2) = K1;
        A(2, 1) = K3;
        A(2, 2) = 1;
        break;
      case FlowCaseTag::CombinedOrthogonalShear:
        A(0, 1) = K3;
        A(0, 2) = K2;
        A(1, 2) = K1;
        break;
    }
    return A;
  }

  /// Constant part of the canonical form (zero for the 1/t families).
  Matrix3<double> constant_part() const
  {
    Matrix3<double> M = Matrix3<double>::Zero();
    switch (tag) {
      case FlowCaseTag::SimpleShear: M(0, 1) = K; break;
      case FlowCaseTag::SimpleShearDecayingDilatation: M(0, 1) = K2; break;
      case FlowCaseTag::CombinedOrthogonalShear:
        M(0, 1) = K3;
        M(0, 2) = K2;
        M(1, 2) = K1;
        break;
      default: break;
    }
    return M;
  }

  /// Coefficient of 1/t in the canonical form (case vii has a term linear
  /// in t instead, see linear_part).
  Matrix3<double> inverse_time_part() const
  {
    Matrix3<double> M = Matrix3<double>::Zero();
    switch (tag) {
      case FlowCaseTag::HomogeneousDilatation: M.setIdentity(); break;
      case FlowCaseTag::CylindricalDilatation:
      case FlowCaseTag::CylindricalDilatationShear:
      case FlowCaseTag::PlanarShear: M = representative(); break;
      case FlowCaseTag::SimpleShearDecayingDilatation:
        M(0, 1) = K1 * K3;
        M(0, 2) = K1;
        M(2, 1) = K3;
        M(2, 2) = 1;
        break;
      default: break;
    }
    return M;
  }

  Matrix3<double> linear_part() const
  {
    Matrix3<double> M = Matrix3<double>::Zero();
    if (tag == FlowCaseTag::CombinedOrthogonalShear) M(0, 2) = -K1 * K3;
    return M;
  }

  /// Canonical L(t) (without the O(1/t^2) remainder).
  Matrix3<double> canonical(double t) const
  {
    return constant_part() + inverse_time_part() / t + t * linear_part();
  }
};

namespace detail {

template <typename Scalar>
Vector3<Scalar> any_orthogonal(const Vector3<Scalar>& n)
{
  const Vector3<Scalar> trial =
      std::abs(n.x()) < Scalar(0.9) ? Vector3<Scalar>::UnitX() : Vector3<Scalar>::UnitY();
  return (trial - trial.dot(n) * n).normalized();
}

template <typename Scalar>
int numerical_rank(const Matrix3<Scalar>& M, Scalar scale, Scalar rtol)
{
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(M);
  int r = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()(i) > rtol * scale) ++r;
  return r;
}

// A written in the case basis with the nilpotent part replaced by its exact
// Jordan form. Rounding noise in a nilpotent block moves its eigenvalues by
// O(eps^(1/k)), which is visible in L(t) at large t, so the long-time check
// is done on this matrix and its distance to A is checked separately.
inline Matrix3<long double> structured_matrix(const Matrix3<long double>& Ab, const FlowCase& c)
{
  using Long = long double;
  switch (c.tag) {
    case FlowCaseTag::SimpleShear:
    case FlowCaseTag::CombinedOrthogonalShear: return c.representative().template cast<Long>();
    case FlowCaseTag::SimpleShearDecayingDilatation:
      return c.constant_part().template cast<Long>() + Ab.trace() * c.inverse_time_part().template cast<Long>();
    default: return Ab;
  }
}

// Residual of the canonical form at time t for a matrix given in the case basis.
inline double canonical_residual(const Matrix3<long double>& Ab, const FlowCase& c, long double t)
{
  using Long = long double;
  const Matrix3<Long> Lb = Ab * (Matrix3<Long>::Identity() + t * Ab).inverse();
  const Matrix3<Long> C0 = c.constant_part().template cast<Long>();
  const Matrix3<Long> C1 = c.inverse_time_part().template cast<Long>();
  const Matrix3<Long> C2 = c.linear_part().template cast<Long>();
  Long res = 0;
  Long scale = 1;
  switch (c.tag) {
    case FlowCaseTag::SimpleShear:
      res = max_abs(Lb - C0);
      scale = std::max(Long(1), max_abs(C0));
      break;
    case FlowCaseTag::SimpleShearDecayingDilatation:
      res = max_abs(t * (Lb - C0) - C1);
      scale = std::max(Long(1), max_abs(C1));
      break;
    case FlowCaseTag::CombinedOrthogonalShear:
      res = max_abs(Lb - C0 - t * C2);
      scale = std::max(Long(1), max_abs(C0 + t * C2));
      break;
    default:
      res = max_abs(t * Lb - C1);
      scale = std::max(Long(1), max_abs(C1));
      break;
  }
  return static_cast<double>(res / scale);
}

}  // namespace detail

/// Tolerance on the canonical-form match at t = 1e6.
inline constexpr double kCanonicalTolerance = 1e-4;

/// Classify a globally defined flow by the Jordan structure of A. Supported
/// inputs have real spectrum in [0, inf); anything else is reported as
/// UnclassifiableFlow. The result is checked against the canonical form at
/// t = 1e3 and t = 1e6.
template <typename Scalar>
FlowCase classify(const FlowPath<Scalar>& flow)
{
  using Mat = Matrix3<Scalar>;
  using Vec = Vector3<Scalar>;
  if (!flow.global()) throw FiniteHorizon("classification needs det(I+tA) > 0 for all t >= 0");
  const Mat& A = flow.A();
  const Scalar scale = A.norm();
  const Scalar rtol = Scalar(1e-9);

  const int rank = detail::numerical_rank<Scalar>(A, scale, rtol);
  const int rank3 = detail::numerical_rank<Scalar>(A * A * A, scale * scale * scale, Scalar(1e-10));
  const int zero_mult = 3 - rank3;

  // The nonzero part of the spectrum must be real and positive.
  Eigen::EigenSolver<Mat> es(A, false);
  std::array<std::complex<Scalar>, 3> ev{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  for (int i = 0; i < 3 - zero_mult; ++i) {
    if (std::abs(ev[i].imag()) > Scalar(1e-6) * std::abs(ev[i]))
      throw UnclassifiableFlow("A has complex eigenvalues");
    if (!(ev[i].real() > Scalar(0))) throw UnclassifiableFlow("A has a nonpositive nonzero eigenvalue");
  }

  FlowCase c;
  Vec e1, e2, e3;
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);

  if (zero_mult == 0) {
    c.tag = FlowCaseTag::HomogeneousDilatation;
    e1 = Vec::UnitX();
    e2 = Vec::UnitY();
    e3 = Vec::UnitZ();
  } else if (zero_mult == 1) {
    // Rank-2 projection onto range(A) along ker(A).
    e3 = svd.matrixU().col(2);
    Vec n = svd.matrixV().col(2);
    if (n.dot(e3) < 0) n = -n;
    const Vec nr = n - n.dot(e3) * e3;
    e1 = nr.norm() > rtol ? Vec(-nr.normalized()) : detail::any_orthogonal<Scalar>(e3);
    e2 = e3.cross(e1);
    c.K = static_cast<double>(nr.norm() / n.dot(e3));
    if (c.K < 1e-12) c.K = 0;
    c.tag = c.K == 0 ? FlowCaseTag::CylindricalDilatation : FlowCaseTag::CylindricalDilatationShear;
  } else if (zero_mult == 2 && rank == 1) {
    // A = u v^T with v.u > 0; the 1/t limit is the projection u v^T / (v.u).
    const Vec u = svd.singularValues()(0) * svd.matrixU().col(0);
    const Vec v = svd.matrixV().col(0);
    e3 = v;
    Vec r = u / v.dot(u);
    const Vec d = r - e3;
    if (d.norm() > rtol) {
      e2 = d.normalized();
      c.K = static_cast<double>(d.norm());
    } else {
      e2 = detail::any_orthogonal<Scalar>(e3);
    }
    e1 = e2.cross(e3);
    c.tag = FlowCaseTag::PlanarShear;
  } else if (zero_mult == 2) {
    // A = N + lambda P with N^2 = 0, NP = PN = 0; A^2 = lambda^2 P.
    const Scalar lambda = A.trace();
    const Mat P = A * A / (lambda * lambda);
    const Mat N = A - lambda * P;
    Eigen::JacobiSVD<Mat> nsvd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
    e1 = nsvd.matrixU().col(0);
    e2 = nsvd.matrixV().col(0);
    e3 = e1.cross(e2);
    c.K2 = static_cast<double>(nsvd.singularValues()(0));
    Mat B;
    B << e1, e2, e3;
    Mat Pb = B.transpose() * P * B;
    if (Pb(0, 2) < 0 || (std::abs(Pb(0, 2)) < rtol && Pb(2, 1) < 0)) {
      e1 = -e1;
      e2 = -e2;
      B << e1, e2, e3;
      Pb = B.transpose() * P * B;
    }
    c.K1 = static_cast<double>(Pb(0, 2));
    c.K3 = static_cast<double>(Pb(2, 1));
    c.tag = FlowCaseTag::SimpleShearDecayingDilatation;
  } else if (rank == 1) {
    const Vec u = svd.singularValues()(0) * svd.matrixU().col(0);
    const Vec v = svd.matrixV().col(0);
    e1 = u.normalized();
    e2 = v;
    e3 = e1.cross(e2);
    c.K = static_cast<double>(u.norm());
    c.tag = FlowCaseTag::SimpleShear;
  } else {
    // Nilpotent of index 3: e1 spans range(A^2) = ker(A), e2 completes ker(A^2).
    Eigen::JacobiSVD<Mat> s2(A * A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    e1 = s2.matrixU().col(0);
    e2 = e1.cross(Vec(s2.matrixV().col(0))).normalized();
    e3 = e1.cross(e2);
    // Sign flips of two basis vectors keep the basis right-handed:
    // (e1,e2) flips K1,K2; (e2,e3) flips K3,K2; (e1,e3) flips K1,K3.
    const Scalar k1 = e2.dot(A * e3);
    const Scalar k3 = e1.dot(A * e2);
    if (k1 < 0 && k3 > 0) {
      e1 = -e1;
      e2 = -e2;
    } else if (k1 > 0 && k3 < 0) {
      e2 = -e2;
      e3 = -e3;
    } else if (k1 < 0 && k3 < 0) {
      e1 = -e1;
      e3 = -e3;
    }
    c.K1 = static_cast<double>(e2.dot(A * e3));
    c.K2 = static_cast<double>(e1.dot(A * e3));
    c.K3 = static_cast<double>(e1.dot(A * e2));
    c.tag = FlowCaseTag::CombinedOrthogonalShear;
  }

  Mat B;
  B << e1, e2, e3;
  c.basis = B.template cast<double>();

  using Long = long double;
  const Matrix3<Long> Ab = B.template cast<Long>().transpose() * A.template cast<Long>() * B.template cast<Long>();
  const Matrix3<Long> As = detail::structured_matrix(Ab, c);
  if (max_abs(Ab - As) > Long(1e-8) * static_cast<Long>(scale))
    throw UnclassifiableFlow("A does not have the Jordan structure of " + std::string(to_string(c.tag)));
  const double r6 = detail::canonical_residual(As, c, 1e6L);
  const double r3 = detail::canonical_residual(As, c, 1e3L);
  if (!(r6 <= kCanonicalTolerance) || !(r6 <= r3 + kCanonicalTolerance))
    throw UnclassifiableFlow("canonical form does not match (residual " + std::to_string(r6) + ")");
  return c;
}

/// Propagator of dw/dt = -L(t) w for the canonical asymptotic L of a case,
/// written in the case basis. The 1/t families need t0 > 0.
inline Matrix3<double> canonical_propagator(const FlowCase& c, double t0, double t1)
{
  using Mat = Matrix3<double>;
  if (t1 < t0) throw DomainError("canonical_propagator requires t0 <= t1");
  const Mat I = Mat::Identity();
  const double dt = t1 - t0;
  switch (c.tag) {
    case FlowCaseTag::SimpleShear: return I - c.constant_part() * dt;
    case FlowCaseTag::CombinedOrthogonalShear: {
      // Upper-triangular back-substitution of w3' = 0, w2' = -K1 w3,
      // w1' = -K3 w2 - (K2 - t K1 K3) w3.
      Mat P = I;
      P(1, 2) = -c.K1 * dt;
      P(0, 1) = -c.K3 * dt;
      P(0, 2) = c.K1 * c.K3 * dt * dt / 2 - c.K2 * dt + c.K1 * c.K3 * (t1 * t1 - t0 * t0) / 2;
      return P;
    }
    default: break;
  }
  if (!(t0 > 0)) throw DomainError("1/t canonical forms need t0 > 0");
  // Every 1/t coefficient here is a projection, so (t1/t0)^{-M} = I + (t0/t1 - 1) M.
  const Mat M = c.inverse_time_part();
  const Mat scaled = I + (t0 / t1 - 1) * M;
  if (c.tag == FlowCaseTag::SimpleShearDecayingDilatation) return (I - c.constant_part() * dt) * scaled;
  return scaled;
}

/// Normalisation l(t) of the leading part L(t) ~ l(t) L0.
enum class TimeScale { Linear, Constant, Inverse };

inline std::string_view to_string(TimeScale s)
{
  switch (s) {
    case TimeScale::Linear: return "Linear";
    case TimeScale::Constant: return "Constant";
    case TimeScale::Inverse: return "Inverse";
  }
  return "?";
}

/// Rescaled description of a flow: tau = int_0^t l, mu(tau) = exp(-int Tr L)/l
/// and Q(tau) = L(t)/l(t) -> L0. Everything is expressed in the case basis.
class ScaledDecomposition {
 public:
  ScaledDecomposition(FlowCase c, FlowPath<double> flow) : case_(c), flow_(std::move(flow))
  {
    switch (c.tag) {
      case FlowCaseTag::SimpleShear:
      case FlowCaseTag::SimpleShearDecayingDilatation:
        scale_ = TimeScale::Constant;
        L0_ = c.constant_part();
        break;
      case FlowCaseTag::CombinedOrthogonalShear:
        scale_ = TimeScale::Linear;
        L0_ = c.linear_part();
        break;
      default:
        scale_ = TimeScale::Inverse;
        L0_ = c.inverse_time_part();
        break;
    }
  }

  TimeScale scale() const { return scale_; }
  const Matrix3<double>& L0() const { return L0_; }
  const FlowCase& flow_case() const { return case_; }
  const FlowPath<double>& flow() const { return flow_; }

  double l(double t) const
  {
    switch (scale_) {
      case TimeScale::Linear: return t + 1;
      case TimeScale::Constant: return 1;
      case TimeScale::Inverse: return 1 / (t + 1);
    }
    return 1;
  }

  double tau_of_t(double t) const
  {
    switch (scale_) {
      case TimeScale::Linear: return t + t * t / 2;
      case TimeScale::Constant: return t;
      case TimeScale::Inverse: return std::log1p(t);
    }
    return t;
  }

  double t_of_tau(double tau) const
  {
    switch (scale_) {
      case TimeScale::Linear: return 2 * tau / (std::sqrt(1 + 2 * tau) + 1);
      case TimeScale::Constant: return tau;
      case TimeScale::Inverse: return std::expm1(tau);
    }
    return tau;
  }

  /// Collision-rate factor for unit initial density.
  double mu(double tau) const
  {
    const double t = t_of_tau(tau);
    return static_cast<double>(1 / (static_cast<long double>(l(t)) * long_flow().det(t)));
  }

  Matrix3<double> Q(double tau) const
  {
    const double t = t_of_tau(tau);
    return (long_flow().deformation(t) / static_cast<long double>(l(t))).template cast<double>();
  }

  /// Exact propagator of dw/dtau = -Q(tau) w.
  Matrix3<double> propagator(double tau0, double tau1) const
  {
    return long_flow().propagator(t_of_tau(tau0), t_of_tau(tau1)).template cast<double>();
  }

 private:
  FlowPath<long double> long_flow() const { return flow_.template cast<long double>(); }

  FlowCase case_;
  FlowPath<double> flow_;
  TimeScale scale_ = TimeScale::Constant;
  Matrix3<double> L0_ = Matrix3<double>::Zero();
};

/// Decomposition of the canonical representative of a case.
inline ScaledDecomposition scaled_decomposition(const FlowCase& c)
{
  c.validate();
  return ScaledDecomposition(c, make_flow(c.representative()));
}

/// Decomposition of an arbitrary classified flow, rotated into the case basis.
inline ScaledDecomposition scaled_decomposition(const FlowPath<double>& flow, const FlowCase& c)
{
  const Matrix3<double> Ab = c.basis.transpose() * flow.A() * c.basis;
  return ScaledDecomposition(c, FlowPath<double>(Ab, flow.horizon()));
}

}  // namespace homokinetics
