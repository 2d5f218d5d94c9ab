#include "homokinetics/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "homokinetics/errors.hpp"
#include "homokinetics/parallel.hpp"

namespace homokinetics {

std::string_view to_string(InitialKind k)
{
  switch (k) {
    case InitialKind::Maxwellian: return "Maxwellian";
    case InitialKind::UniformBall: return "UniformBall";
    case InitialKind::TwoTemperature: return "TwoTemperature";
  }
  return "?";
}

InitialKind initial_kind_from_string(std::string_view name)
{
  for (InitialKind k : {InitialKind::Maxwellian, InitialKind::UniformBall, InitialKind::TwoTemperature})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown initial distribution '" + std::string(name) + "'");
}

std::string_view to_string(Frame f)
{
  return f == Frame::Rescaled ? "Rescaled" : "Dilatation";
}

void InitialDistribution::validate() const
{
  auto positive = [](double x) { return std::isfinite(x) && x > 0; };
  if (!positive(beta0)) throw ConfigError("initial.beta0 must be positive");
  if (kind == InitialKind::UniformBall && !positive(radius)) throw ConfigError("initial.radius must be positive");
  if (kind == InitialKind::TwoTemperature && (!positive(beta_a) || !positive(beta_b)))
    throw ConfigError("initial.beta_a and initial.beta_b must be positive");
}

void SimConfig::validate() const
{
  kernel.validate();
  initial.validate();
  if (N < 2) throw ConfigError("N must be at least 2");
  if (!(dt_policy > 0 && dt_policy <= 0.5)) throw ConfigError("dt_policy must lie in (0, 0.5]");
  if (!(duration > 0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(t_start >= 0) || !std::isfinite(t_start)) throw ConfigError("t_start must be nonnegative");
  if (checkpoints < 2) throw ConfigError("checkpoints must be at least 2");
  if (replicas < 1) throw ConfigError("replicas must be at least 1");
  if (!(floor_fraction >= 0) || !std::isfinite(floor_fraction)) throw ConfigError("floor_fraction must be >= 0");
  if (flow_case) flow_case->validate();
  if (frame == Frame::Dilatation) {
    const bool hd = (flow_case && flow_case->tag == FlowCaseTag::HomogeneousDilatation) || matrix;
    if (!hd) throw ConfigError("the dilatation frame needs a homogeneous dilatation flow");
  }
}

// ---------------------------------------------------------------------------
// Dynamics

namespace {

std::optional<ScaledDecomposition> make_decomposition(const SimConfig& c, std::optional<FlowCase>& resolved)
{
  if (c.matrix) {
    const FlowPath<double> flow = make_flow(*c.matrix);
    if (!flow.global()) throw FiniteHorizon("flow matrix leaves the admissible set at t = " + std::to_string(flow.horizon()));
    FlowCase fc = classify(flow);
    if (c.flow_case && c.flow_case->tag != fc.tag)
      throw ConfigError("flow matrix classifies as " + std::string(to_string(fc.tag)) + ", not " +
                        std::string(to_string(c.flow_case->tag)));
    resolved = fc;
    return scaled_decomposition(flow, fc);
  }
  if (c.flow_case) {
    resolved = *c.flow_case;
    return scaled_decomposition(*c.flow_case);
  }
  return std::nullopt;
}

}  // namespace

Dynamics::Dynamics(const SimConfig& config) : frame_(config.frame), gamma_(config.kernel.gamma)
{
  decomposition_ = make_decomposition(config, case_);
  if (frame_ == Frame::Dilatation && (!case_ || case_->tag != FlowCaseTag::HomogeneousDilatation))
    throw ConfigError("the dilatation frame needs a homogeneous dilatation flow");
}

double Dynamics::tau_of_t(double t) const
{
  return decomposition_ ? decomposition_->tau_of_t(t) : t;
}

double Dynamics::t_of_tau(double tau) const
{
  return decomposition_ ? decomposition_->t_of_tau(tau) : tau;
}

double Dynamics::mu(double tau) const
{
  return decomposition_ ? decomposition_->mu(tau) : 1;
}

Eigen::Matrix3d Dynamics::drift(double tau) const
{
  if (!decomposition_) return Eigen::Matrix3d::Zero();
  Eigen::Matrix3d Q = decomposition_->Q(tau);
  if (frame_ == Frame::Dilatation) Q -= Eigen::Matrix3d::Identity();
  return Q;
}

Eigen::Matrix3d Dynamics::propagator(double tau0, double tau1) const
{
  if (!decomposition_) return Eigen::Matrix3d::Identity();
  Eigen::Matrix3d P = decomposition_->propagator(tau0, tau1);
  if (frame_ == Frame::Dilatation) P *= std::exp(tau1 - tau0);
  return P;
}

double Dynamics::rate_factor(double tau) const
{
  const double m = mu(tau);
  return frame_ == Frame::Dilatation ? m * std::exp(-gamma_ * tau) : m;
}

double Dynamics::collision_time(double tau0, double tau1) const
{
  if (!decomposition_) return tau1 - tau0;
  const double mid = (tau0 + tau1) / 2, half = (tau1 - tau0) / 2;
  const double x = half * std::sqrt(0.6);
  return half * (5 * rate_factor(mid - x) + 8 * rate_factor(mid) + 5 * rate_factor(mid + x)) / 9;
}

double Dynamics::frame_scale(double tau) const
{
  return frame_ == Frame::Dilatation ? std::exp(tau) : 1;
}

// ---------------------------------------------------------------------------
// Ensembles

namespace {

std::mt19937_64 replica_rng(std::uint64_t seed, int replica)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ParticleEnsemble init_ensemble(const SimConfig& config, int replica)
{
  config.validate();
  const InitialDistribution& init = config.initial;
  ParticleEnsemble e;
  e.rng = replica_rng(config.seed, replica);
  e.v.resize(config.N);
  std::normal_distribution<double> normal;
  for (int i = 0; i < config.N; ++i) {
    Eigen::Vector3d x;
    switch (init.kind) {
      case InitialKind::Maxwellian:
        for (int k = 0; k < 3; ++k) x[k] = normal(e.rng);
        break;
      case InitialKind::UniformBall: {
        for (int k = 0; k < 3; ++k) x[k] = normal(e.rng);
        const double r = init.radius * std::cbrt(uniform01(e.rng));
        x *= r / x.norm();
        break;
      }
      case InitialKind::TwoTemperature: {
        const double beta = i < config.N / 2 ? init.beta_a : init.beta_b;
        for (int k = 0; k < 3; ++k) x[k] = normal(e.rng) / std::sqrt(2 * beta);
        break;
      }
    }
    e.v[i] = x;
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& x : e.v) mean += x;
  mean /= config.N;
  double second = 0;
  for (auto& x : e.v) {
    x -= mean;
    second += x.squaredNorm();
  }
  second /= config.N;
  const Dynamics dyn(config);
  e.tau = dyn.tau_of_t(config.t_start);
  // beta = 3 / (2 <|w|^2>), in the frame velocities.
  const double scale = dyn.frame_scale(e.tau);
  const double target = 3 / (2 * init.beta0) * scale * scale;
  const double factor = std::sqrt(target / second);
  for (auto& x : e.v) x *= factor;
  return e;
}

void step_transport(ParticleEnsemble& e, const Dynamics& dyn, double dtau)
{
  if (!(dtau > 0)) throw DomainError("step_transport needs dtau > 0");
  if (dyn.has_flow()) {
    const Eigen::Matrix3d P = dyn.propagator(e.tau, e.tau + dtau);
    for (auto& x : e.v) x = P * x;
  }
  e.tau += dtau;
}

namespace {

// |v|^gamma from |v|^2.
inline double speed_power(double r2, double gamma)
{
  if (gamma == 1) return std::sqrt(r2);
  if (gamma == 2) return r2;
  if (gamma == 0.5) return std::sqrt(std::sqrt(r2));
  if (gamma == -1) return 1 / std::sqrt(r2);
  if (gamma == -3) return 1 / (r2 * std::sqrt(r2));
  return std::pow(r2, gamma / 2);
}

}  // namespace

double default_floor_fraction(double gamma)
{
  return gamma <= -2.5 ? 0.25 : 0.1;
}

double effective_pair_rate(const KernelSpec& kernel, double s, double floor)
{
  if (kernel.gamma == 0) return kernel.strength;
  if (kernel.gamma < 0) s = std::max(s, floor);
  return kernel.strength * speed_power(s * s, kernel.gamma);
}

namespace {

// Fenwick tree over nonnegative weights with prefix search.
class Fenwick {
 public:
  void build(const std::vector<double>& w)
  {
    n_ = static_cast<int>(w.size());
    tree_.assign(n_ + 1, 0.0);
    for (int i = 1; i <= n_; ++i) {
      tree_[i] += w[i - 1];
      const int parent = i + (i & -i);
      if (parent <= n_) tree_[parent] += tree_[i];
    }
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
  }

  void add(int i, double delta)
  {
    for (++i; i <= n_; i += i & -i) tree_[i] += delta;
  }

  /// Smallest index whose inclusive prefix sum exceeds `target`.
  int find(double target) const
  {
    int pos = 0;
    for (int step = top_; step > 0; step /= 2) {
      const int next = pos + step;
      if (next <= n_ && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, n_ - 1);
  }

 private:
  int n_ = 0;
  int top_ = 1;
  std::vector<double> tree_;
};

double hard_factor(double gamma)
{
  return gamma >= 1 ? std::pow(2.0, gamma - 1) : 1.0;
}

double rms_speed(const std::vector<Eigen::Vector3d>& v)
{
  double s = 0;
  for (const auto& x : v) s += x.squaredNorm();
  return std::sqrt(s / v.size());
}

struct Majorant {
  bool per_particle = false;  // gamma > 0
  double pair_bound = 0;      // gamma <= 0
  double floor = 0;
  double c = 1;
  std::vector<double> m;
  double total = 0;
  Fenwick tree;

  double gamma_ = 0;

  void init(const ParticleEnsemble& e, const KernelSpec& k, double floor_fraction)
  {
    gamma_ = k.gamma;
    per_particle = k.gamma > 0;
    if (!per_particle) {
      floor = k.gamma < 0 ? floor_fraction * rms_speed(e.v) : 0;
      pair_bound = k.gamma < 0 ? (floor > 0 ? k.total_rate(floor) : 0) : k.strength;
      return;
    }
    c = hard_factor(k.gamma) * k.strength;
    m.resize(e.v.size());
    total = 0;
    for (std::size_t i = 0; i < e.v.size(); ++i) {
      m[i] = c * speed_power(e.v[i].squaredNorm(), k.gamma);
      total += m[i];
    }
    tree.build(m);
  }

  void update(int i, const Eigen::Vector3d& v)
  {
    const double nm = c * speed_power(v.squaredNorm(), gamma_);
    tree.add(i, nm - m[i]);
    total += nm - m[i];
    m[i] = nm;
  }

  /// Majorant rate summed over unordered pairs, per unit collision time, times N.
  double pair_sum(int N) const
  {
    if (per_particle) return (N - 1) * std::max(total, 0.0);
    return pair_bound * N * (N - 1) / 2.0;
  }
};

}  // namespace

void step_collisions(ParticleEnsemble& e, const KernelSpec& kernel, double mu_now, double dtau,
                     CollisionControl& control)
{
  if (!(mu_now >= 0) || !(dtau >= 0)) throw DomainError("step_collisions needs mu_now >= 0 and dtau >= 0");
  const int N = e.size();
  const double budget = mu_now * dtau;
  if (budget == 0 || N < 2) return;
  if (kernel.gamma < 0 && !(control.floor_fraction > 0))
    throw DomainError("soft kernels need a positive floor fraction");

  Majorant maj;
  maj.init(e, kernel, control.floor_fraction);
  if (kernel.gamma < 0 && maj.floor == 0) return;  // all particles at rest

  double clock = 0;
  std::uniform_int_distribution<int> pick_other(0, N - 2);
  std::uniform_int_distribution<int> pick_any(0, N - 1);
  while (true) {
    // Pair rate is mu * B / N, so the total majorant is pair_sum / N.
    const double rate = maj.pair_sum(N) / N;
    if (!(rate > 0)) break;
    clock += -std::log1p(-uniform01(e.rng)) / rate;
    if (clock >= budget) break;
    ++e.candidates;
    int i, j;
    double bound;
    if (maj.per_particle) {
      i = maj.tree.find(uniform01(e.rng) * maj.total);
      j = pick_other(e.rng);
      if (j >= i) ++j;
      bound = maj.m[i] + maj.m[j];
    } else {
      i = pick_any(e.rng);
      j = pick_other(e.rng);
      if (j >= i) ++j;
      bound = maj.pair_bound;
    }
    const Eigen::Vector3d V = e.v[i] - e.v[j];
    const double s = V.norm();
    const double b = effective_pair_rate(kernel, s, maj.floor);
    if (b > bound * (1 + 1e-12)) throw MajorantViolation("pair rate exceeds its majorant");
    if (uniform01(e.rng) * bound >= b) continue;
    ++e.collisions;
    if (!(s > 0)) continue;
    const Eigen::Vector3d omega = sample_omega(kernel, V, e.rng);
    const Eigen::Vector3d vi = e.v[i], vj = e.v[j];
    const auto out = collide(vi, vj, omega);
    e.v[i] = out.v_prime;
    e.v[j] = out.vstar_prime;
    if (control.check_conservation) {
      const double pscale = vi.norm() + vj.norm();
      const double escale = vi.squaredNorm() + vj.squaredNorm();
      if (pscale > 0) {
        const double dp = ((out.v_prime + out.vstar_prime) - (vi + vj)).norm() / pscale;
        const double de =
            std::abs(out.v_prime.squaredNorm() + out.vstar_prime.squaredNorm() - escale) / escale;
        control.max_momentum_defect = std::max(control.max_momentum_defect, dp);
        control.max_energy_defect = std::max(control.max_energy_defect, de);
      }
    }
    if (maj.per_particle) {
      maj.update(i, e.v[i]);
      maj.update(j, e.v[j]);
    }
  }
  e.collision_clock += budget;
  control.majorant_frequency = 2 * maj.pair_sum(N) / (double(N) * N);
}

// ---------------------------------------------------------------------------
// Moments

void MomentSums::add(const ParticleEnsemble& e)
{
  const double n = e.size();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& x : e.v) mean += x;
  first += mean;
  mean /= n;
  for (const auto& x : e.v) {
    const Eigen::Vector3d d = x - mean;
    second += d * d.transpose();
    const double r2 = d.squaredNorm();
    const double r4 = r2 * r2;
    p4 += r4;
    p6 += r4 * r2;
    p8 += r4 * r4;
  }
  count += n;
}

void MomentSums::merge(const MomentSums& o)
{
  count += o.count;
  first += o.first;
  second += o.second;
  p4 += o.p4;
  p6 += o.p6;
  p8 += o.p8;
}

MomentSummary summarize(const MomentSums& s, double scale)
{
  if (!(s.count > 0)) throw DomainError("no particles to summarize");
  MomentSummary r;
  const double n = s.count;
  const Eigen::Matrix3d cov = s.second / n;
  const double m2 = cov.trace(), m4 = s.p4 / n, m6 = s.p6 / n, m8 = s.p8 / n;
  const double s2 = scale * scale;
  r.mass = 1;
  r.mean = s.first / n / scale;
  r.beta = 3 / (2 * m2) * s2;
  r.pressure_offdiag = Eigen::Vector3d(cov(0, 1), cov(0, 2), cov(1, 2)) / s2;
  r.fourth_cumulant = 0.6 * m4 / (m2 * m2) - 1;
  r.norm_1_2 = 1 + m2 / s2 + r.mean.squaredNorm();
  // Delta method on the sample moments of |v|^2 and |v|^4.
  const double var2 = std::max(m4 - m2 * m2, 0.0) / n;
  const double var4 = std::max(m8 - m4 * m4, 0.0) / n;
  const double cov24 = (m6 - m2 * m4) / n;
  r.beta_stderr = r.beta * std::sqrt(var2) / m2;
  const double g2 = -1.2 * m4 / (m2 * m2 * m2), g4 = 0.6 / (m2 * m2);
  r.c4_stderr = std::sqrt(std::max(g2 * g2 * var2 + g4 * g4 * var4 + 2 * g2 * g4 * cov24, 0.0));
  return r;
}

// ---------------------------------------------------------------------------
// Runs

std::vector<double> checkpoint_times(double t_start, double t_end, int count)
{
  if (count < 2 || !(t_end > t_start)) throw ConfigError("checkpoints need t_end > t_start and count >= 2");
  std::vector<double> out(count);
  const double a = std::log1p(t_start), b = std::log1p(t_end);
  for (int k = 0; k < count; ++k) out[k] = std::expm1(a + (b - a) * k / (count - 1));
  out.front() = t_start;
  out.back() = t_end;
  return out;
}

namespace {

struct ReplicaResult {
  std::vector<MomentSums> sums;
  std::vector<std::int64_t> collisions;
  std::vector<double> clocks;
  std::int64_t candidates = 0;
  std::int64_t steps = 0;
  double max_momentum_defect = 0;
  double max_energy_defect = 0;
};

double per_particle_majorant(const ParticleEnsemble& e, const KernelSpec& k, double floor_fraction)
{
  const int N = e.size();
  if (k.gamma > 0) {
    const double c = hard_factor(k.gamma) * k.strength;
    double total = 0;
    for (const auto& x : e.v) total += c * speed_power(x.squaredNorm(), k.gamma);
    return 2.0 * (N - 1) * total / (double(N) * N);
  }
  if (k.gamma == 0) return k.strength * (N - 1) / double(N);
  const double floor = floor_fraction * rms_speed(e.v);
  return floor > 0 ? k.total_rate(floor) * (N - 1) / double(N) : 0;
}

ReplicaResult run_replica(const SimConfig& config, const Dynamics& dyn, const std::vector<double>& tau_marks,
                          int replica)
{
  ReplicaResult out;
  ParticleEnsemble e = init_ensemble(config, replica);
  e.tau = tau_marks.front();
  CollisionControl control;
  control.floor_fraction = config.floor_fraction > 0 ? config.floor_fraction : default_floor_fraction(config.kernel.gamma);
  control.check_conservation = config.check_conservation;

  auto record = [&] {
    MomentSums s;
    s.add(e);
    out.sums.push_back(s);
    out.collisions.push_back(e.collisions);
    out.clocks.push_back(e.collision_clock);
  };
  record();
  // Strang splitting T(h/2) C(h) T(h/2); consecutive half transports are fused.
  double tau = e.tau;
  for (std::size_t k = 1; k < tau_marks.size(); ++k) {
    const double target = tau_marks[k];
    while (tau < target) {
      double freq = control.majorant_frequency;
      if (!(freq > 0)) freq = per_particle_majorant(e, config.kernel, control.floor_fraction);
      freq *= dyn.rate_factor(tau);
      const double drift = dyn.drift(tau).norm();
      double h = config.dt_policy / std::max(freq + drift, 1e-300);
      const double remaining = target - tau;
      if (h >= remaining || remaining - h < 1e-12 * std::max(1.0, std::abs(target))) h = remaining;
      const double ct = dyn.collision_time(tau, tau + h);
      const double mid = tau + h / 2;
      if (mid > e.tau) step_transport(e, dyn, mid - e.tau);
      step_collisions(e, config.kernel, ct / h, h, control);
      tau = h == remaining ? target : tau + h;
      ++out.steps;
    }
    if (tau > e.tau) step_transport(e, dyn, tau - e.tau);
    e.tau = tau;
    record();
  }
  out.candidates = e.candidates;
  out.max_momentum_defect = control.max_momentum_defect;
  out.max_energy_defect = control.max_energy_defect;
  return out;
}

}  // namespace

TimeSeries run(const SimConfig& config)
{
  config.validate();
  const Dynamics dyn(config);
  const double tau_start = dyn.tau_of_t(config.t_start);
  const double tau_end = tau_start + config.duration;
  const double t_end = dyn.t_of_tau(tau_end);
  std::vector<double> t_marks = checkpoint_times(config.t_start, t_end, config.checkpoints);
  std::vector<double> tau_marks(t_marks.size());
  for (std::size_t k = 0; k < t_marks.size(); ++k) tau_marks[k] = dyn.tau_of_t(t_marks[k]);
  tau_marks.front() = tau_start;
  tau_marks.back() = tau_end;
  for (std::size_t k = 1; k < tau_marks.size(); ++k)
    if (!(tau_marks[k] > tau_marks[k - 1])) throw ConfigError("checkpoints are too dense for the run length");

  std::vector<ReplicaResult> results(config.replicas);
  parallel_for(config.replicas, [&](int r) { results[r] = run_replica(config, dyn, tau_marks, r); });

  TimeSeries series;
  series.config_hash = config_hash(config);
  series.seed = config.seed;
  series.replicas = config.replicas;
  for (std::size_t k = 0; k < tau_marks.size(); ++k) {
    MomentSums pooled;
    std::int64_t collisions = 0;
    for (const auto& r : results) {
      pooled.merge(r.sums[k]);
      collisions += r.collisions[k];
    }
    MomentSummary row = summarize(pooled, dyn.frame_scale(tau_marks[k]));
    row.t = t_marks[k];
    row.tau = tau_marks[k];
    row.clock = results.front().clocks[k];
    row.collisions = collisions;
    series.rows.push_back(row);
  }
  for (const auto& r : results) {
    series.candidates += r.candidates;
    series.steps += r.steps;
    series.max_momentum_defect = std::max(series.max_momentum_defect, r.max_momentum_defect);
    series.max_energy_defect = std::max(series.max_energy_defect, r.max_energy_defect);
  }
  return series;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr const char* kColumns =
    "t,tau,beta,T,mean_x,mean_y,mean_z,p_xy,p_xz,p_yz,c4,collisions,norm_1_2,beta_stderr,c4_stderr,clock";

std::string fmt(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_csv(const TimeSeries& s, std::ostream& out)
{
  out << "# config_hash=" << s.config_hash << " seed=" << s.seed << " replicas=" << s.replicas << "\n";
  out << kColumns << "\n";
  for (const auto& r : s.rows) {
    out << fmt(r.t) << ',' << fmt(r.tau) << ',' << fmt(r.beta) << ',' << fmt(1 / (2 * r.beta)) << ','
        << fmt(r.mean.x()) << ',' << fmt(r.mean.y()) << ',' << fmt(r.mean.z()) << ','
        << fmt(r.pressure_offdiag.x()) << ',' << fmt(r.pressure_offdiag.y()) << ',' << fmt(r.pressure_offdiag.z())
        << ',' << fmt(r.fourth_cumulant) << ',' << r.collisions << ',' << fmt(r.norm_1_2) << ','
        << fmt(r.beta_stderr) << ',' << fmt(r.c4_stderr) << ',' << fmt(r.clock) << "\n";
  }
}

TimeSeries read_csv(std::istream& in)
{
  TimeSeries s;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "config_hash") s.config_hash = std::stoull(value);
        else if (key == "seed") s.seed = std::stoull(value);
        else if (key == "replicas") s.replicas = std::stoi(value);
      }
      continue;
    }
    if (!header) {
      if (line != kColumns) throw ConfigError("line " + std::to_string(lineno) + ": unexpected CSV header");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 16) throw ConfigError("line " + std::to_string(lineno) + ": expected 16 columns");
    MomentSummary r;
    try {
      r.t = std::stod(cells[0]);
      r.tau = std::stod(cells[1]);
      r.beta = std::stod(cells[2]);
      r.mean = Eigen::Vector3d(std::stod(cells[4]), std::stod(cells[5]), std::stod(cells[6]));
      r.pressure_offdiag = Eigen::Vector3d(std::stod(cells[7]), std::stod(cells[8]), std::stod(cells[9]));
      r.fourth_cumulant = std::stod(cells[10]);
      r.collisions = std::stoll(cells[11]);
      r.norm_1_2 = std::stod(cells[12]);
      r.beta_stderr = std::stod(cells[13]);
      r.c4_stderr = std::stod(cells[14]);
      r.clock = std::stod(cells[15]);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": malformed number");
    }
    if (!s.rows.empty() && !(r.t > s.rows.back().t))
      throw ConfigError("line " + std::to_string(lineno) + ": t must be strictly increasing");
    s.rows.push_back(r);
  }
  if (!header) throw ConfigError("CSV has no header row");
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n)
  {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  }
  void real(double x) { bytes(&x, sizeof x); }
  void integer(std::int64_t x) { bytes(&x, sizeof x); }
};

}  // namespace

std::uint64_t config_hash(const SimConfig& c)
{
  Fnv f;
  if (c.flow_case) {
    f.integer(static_cast<int>(c.flow_case->tag) + 1);
    f.real(c.flow_case->K);
    f.real(c.flow_case->K1);
    f.real(c.flow_case->K2);
    f.real(c.flow_case->K3);
  } else {
    f.integer(0);
  }
  if (c.matrix)
    for (int i = 0; i < 9; ++i) f.real((*c.matrix)(i / 3, i % 3));
  f.real(c.kernel.gamma);
  f.integer(static_cast<int>(c.kernel.angular));
  f.real(c.kernel.strength);
  f.integer(c.N);
  f.real(c.dt_policy);
  f.real(c.duration);
  f.real(c.t_start);
  f.integer(c.checkpoints);
  f.integer(c.replicas);
  f.integer(static_cast<int>(c.initial.kind));
  f.real(c.initial.beta0);
  f.real(c.initial.radius);
  f.real(c.initial.beta_a);
  f.real(c.initial.beta_b);
  f.integer(static_cast<int>(c.frame));
  f.real(c.floor_fraction);
  return f.h;
}

}  // namespace homokinetics
