#pragma once

// Particle Monte Carlo solver for the rescaled homoenergetic equation
//   d_tau g - div_w (Q(tau) w g) = mu(tau) C[g]
// with exact transport and event-driven collision thinning.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "homokinetics/flow.hpp"
#include "homokinetics/kernel.hpp"

namespace homokinetics {

enum class InitialKind { Maxwellian, UniformBall, TwoTemperature };

std::string_view to_string(InitialKind k);
InitialKind initial_kind_from_string(std::string_view name);

struct InitialDistribution {
  InitialKind kind = InitialKind::Maxwellian;
  double beta0 = 1;   // beta after moment matching
  double radius = 1;  // UniformBall
  double beta_a = 1;  // TwoTemperature, first half
  double beta_b = 4;  // TwoTemperature, second half

  void validate() const;
};

/// Velocity frame of the particles.
///   Rescaled:   particles carry w, collision rate mu(tau).
///   Dilatation: particles carry xi = e^tau w, collision rate mu e^{-gamma tau}
///               (the s-time form of homogeneous dilatation, ds = mu e^{-gamma tau} dtau).
enum class Frame { Rescaled, Dilatation };

std::string_view to_string(Frame f);

struct SimConfig {
  std::optional<FlowCase> flow_case;      // neither set: Q = 0, mu = 1
  std::optional<Eigen::Matrix3d> matrix;  // raw A, classified on construction
  KernelSpec kernel;
  int N = 10000;
  double dt_policy = 0.1;  // step as a fraction of the majorant collision time
  double duration = 1;     // length of the run in tau
  double t_start = 0;      // flow time at which the run starts
  int checkpoints = 200;   // rows, geometric in 1 + t
  std::uint64_t seed = 1;
  int replicas = 1;
  InitialDistribution initial;
  Frame frame = Frame::Rescaled;
  double floor_fraction = 0;  // soft-kernel speed clamp / rms speed; 0 picks the default
  bool check_conservation = false;

  void validate() const;
};

/// Time maps, drift and collision-rate factor of a configured run.
class Dynamics {
 public:
  explicit Dynamics(const SimConfig& config);

  bool has_flow() const { return decomposition_.has_value(); }
  const std::optional<FlowCase>& flow_case() const { return case_; }
  Frame frame() const { return frame_; }

  double tau_of_t(double t) const;
  double t_of_tau(double tau) const;
  double mu(double tau) const;
  /// Drift matrix of the particle velocities: Q, or Q - I in the dilatation frame.
  Eigen::Matrix3d drift(double tau) const;
  /// Propagator of dv/dtau = -drift(tau) v.
  Eigen::Matrix3d propagator(double tau0, double tau1) const;
  /// Collision-rate multiplier at tau.
  double rate_factor(double tau) const;
  /// int_{tau0}^{tau1} rate_factor.
  double collision_time(double tau0, double tau1) const;
  /// Velocity frame scale: particle velocity = frame_scale * w.
  double frame_scale(double tau) const;

 private:
  std::optional<FlowCase> case_;
  std::optional<ScaledDecomposition> decomposition_;
  Frame frame_ = Frame::Rescaled;
  double gamma_ = 0;
};

struct ParticleEnsemble {
  std::vector<Eigen::Vector3d> v;  // frame velocities
  double weight = 1;               // total mass
  double tau = 0;
  double collision_clock = 0;  // accumulated collision time
  std::mt19937_64 rng;
  std::int64_t collisions = 0;
  std::int64_t candidates = 0;

  int size() const { return static_cast<int>(v.size()); }
};

/// Samples N velocities, then shifts to zero mean and scales to beta0.
ParticleEnsemble init_ensemble(const SimConfig& config, int replica = 0);

/// Applies the exact transport over [e.tau, e.tau + dtau].
void step_transport(ParticleEnsemble& e, const Dynamics& dyn, double dtau);

struct CollisionControl {
  double floor_fraction = 0.1;
  bool check_conservation = false;
  double max_momentum_defect = 0;  // relative, per collision
  double max_energy_defect = 0;
  double majorant_frequency = 0;  // per particle at unit rate, after the last step
};

/// Default soft-kernel clamp fraction for a given gamma.
double default_floor_fraction(double gamma);

/// Collision rate of a pair with relative speed s as used by the solver:
/// the kernel rate with speeds below `floor` raised to `floor` when gamma < 0.
double effective_pair_rate(const KernelSpec& kernel, double s, double floor);

/// Runs the collision process for a collision time mu_now * dtau by Poisson
/// thinning of a pair majorant. Throws MajorantViolation if a pair rate
/// exceeds its bound.
void step_collisions(ParticleEnsemble& e, const KernelSpec& kernel, double mu_now, double dtau,
                     CollisionControl& control);

struct MomentSummary {
  double t = 0;
  double tau = 0;
  double clock = 0;  // accumulated collision time (s in the dilatation frame)
  double mass = 1;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  double beta = 0;
  Eigen::Vector3d pressure_offdiag = Eigen::Vector3d::Zero();  // <w_x w_y>, <w_x w_z>, <w_y w_z>
  double fourth_cumulant = 0;
  double norm_1_2 = 0;
  double beta_stderr = 0;
  double c4_stderr = 0;
  std::int64_t collisions = 0;
};

/// Pooled raw moments of frame velocities.
struct MomentSums {
  double count = 0;
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  double p4 = 0, p6 = 0, p8 = 0;  // sums of |v - mean|^{4,6,8}

  void add(const ParticleEnsemble& e);
  void merge(const MomentSums& o);
};

/// Moments of the physical velocities w = v / scale.
MomentSummary summarize(const MomentSums& sums, double scale);

struct TimeSeries {
  std::vector<MomentSummary> rows;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int replicas = 0;
  std::int64_t candidates = 0;
  std::int64_t steps = 0;
  double max_momentum_defect = 0;
  double max_energy_defect = 0;
};

/// Checkpoint flow times: geometric in 1 + t from t_start to t_end.
std::vector<double> checkpoint_times(double t_start, double t_end, int count);

/// Runs all replicas and pools their moments at common checkpoints.
TimeSeries run(const SimConfig& config);

/// CSV with a header row and 17 significant digits.
void write_csv(const TimeSeries& series, std::ostream& out);
TimeSeries read_csv(std::istream& in);

/// Stable hash of the configuration fields that affect the output.
std::uint64_t config_hash(const SimConfig& config);

}  // namespace homokinetics
