#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "homokinetics/analysis.hpp"
#include "homokinetics/dsmc.hpp"
#include "homokinetics/errors.hpp"
#include "homokinetics/flow.hpp"
#include "homokinetics/hilbert.hpp"
#include "homokinetics/linop.hpp"
#include "homokinetics/scenario.hpp"

using namespace homokinetics;
using nlohmann::json;

namespace {

struct Options {
  bool quiet = false;
  std::string out;

  // classify
  std::vector<double> matrix;

  // simulate, report
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;

  // predict, linop-b
  std::string flow_case = "SimpleShear";
  double K = 1, K1 = 1, K2 = 0, K3 = 1;
  double gamma = 1;
  std::optional<double> b;
  bool with_b = false;
  std::string angular = "cosine";
  double strength = 2 * M_PI;
  int radial_order = 2;
  int angular_order = 2;

  // fit, report
  std::string csv;
  std::string column = "beta";
  std::string abscissa = "t";
  std::optional<double> window_min, window_max;
  std::optional<double> tolerance;
};

void emit(const Options& o, const json& j)
{
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw ConfigError("cannot write " + o.out);
  f << text;
  if (!o.quiet) std::cerr << "wrote " << o.out << "\n";
}

FlowCase requested_case(const Options& o)
{
  json j = {{"case", o.flow_case}};
  const auto tag = flow_case_from_string(o.flow_case);
  if (!tag) throw ConfigError("--case: unknown flow case '" + o.flow_case + "'");
  if (*tag == FlowCaseTag::SimpleShearDecayingDilatation || *tag == FlowCaseTag::CombinedOrthogonalShear) {
    j["K1"] = o.K1;
    j["K2"] = o.K2;
    j["K3"] = o.K3;
  } else if (*tag != FlowCaseTag::HomogeneousDilatation && *tag != FlowCaseTag::CylindricalDilatation) {
    j["K"] = o.K;
  }
  return flow_case_from_json(j, "--case");
}

KernelSpec requested_kernel(const Options& o)
{
  KernelSpec k{o.gamma, angular_density_from_string(o.angular), o.strength};
  k.validate();
  return k;
}

GreenKubo compute_b(const KernelSpec& kernel, const BasisSpec& basis, const FlowCase& c, bool quiet)
{
  if (!quiet) std::cerr << "assembling basis (" << basis.radial_order << ", " << basis.angular_order << ")\n";
  const auto op = assemble(kernel, basis);
  return case_b(op, c);
}

int cmd_classify(const Options& o)
{
  if (o.matrix.size() != 9) throw ConfigError("classify: expected 9 matrix entries (row major)");
  Eigen::Matrix3d A;
  for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = o.matrix[i];
  const auto flow = make_flow(A);
  if (std::isfinite(flow.horizon()))
    throw FiniteHorizon("det(I + tA) vanishes at t = " + std::to_string(flow.horizon()));
  const FlowCase c = classify(flow);
  json j = to_json(c);
  j["trace_A"] = A.trace();
  emit(o, j);
  return 0;
}

int cmd_simulate(const Options& o)
{
  Scenario s = load_scenario(o.scenario);
  if (o.seed) s.sim.seed = *o.seed;
  if (o.replicas) s.sim.replicas = *o.replicas;
  s.sim.validate();
  const auto path = o.out.empty() ? s.csv_path() : std::filesystem::path(o.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const TimeSeries series = run(s.sim);
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  write_csv(series, f);
  if (!o.quiet)
    std::cerr << "wrote " << series.rows.size() << " rows to " << path.string() << " ("
              << series.rows.back().collisions << " collisions)\n";
  return 0;
}

int cmd_linop_b(const Options& o)
{
  const FlowCase c = requested_case(o);
  const KernelSpec k = requested_kernel(o);
  const BasisSpec basis{o.radial_order, o.angular_order};
  basis.validate();
  const auto op = assemble(k, basis);
  const GreenKubo gk = case_b(op, c);
  emit(o, {{"case", to_json(c)},
           {"kernel", to_json(k)},
           {"basis", {{"radial_order", basis.radial_order}, {"angular_order", basis.angular_order}}},
           {"b", gk.b},
           {"error", gk.error},
           {"quad_error", op.quad_error}});
  return 0;
}

int cmd_predict(const Options& o)
{
  const FlowCase c = requested_case(o);
  std::optional<double> b = o.b;
  if (!b && o.with_b) {
    const BasisSpec basis{o.radial_order, o.angular_order};
    basis.validate();
    b = compute_b(requested_kernel(o), basis, c, o.quiet).b;
  }
  emit(o, to_json(predict(c, o.gamma, b, b.has_value())));
  return 0;
}

TimeSeries read_series(const std::string& path)
{
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  return read_csv(f);
}

FitWindow requested_window(const Options& o, FitWindow fallback)
{
  if (o.window_min) fallback.x_min = o.window_min;
  if (o.window_max) fallback.x_max = o.window_max;
  return fallback;
}

int cmd_fit(const Options& o)
{
  const TimeSeries s = read_series(o.csv);
  emit(o, to_json(fit_power_law(s, o.column, requested_window(o, {}), abscissa_from_string(o.abscissa))));
  return 0;
}

int cmd_report(const Options& o)
{
  const Scenario sc = load_scenario(o.scenario);
  const TimeSeries s = read_series(o.csv);
  const Dynamics dyn(sc.sim);
  if (!dyn.flow_case()) throw RegimeMismatch("scenario has no flow, so there is no temperature law to compare");
  const FlowCase c = *dyn.flow_case();
  std::optional<double> b = sc.analysis.b;
  if (!b && sc.analysis.basis) b = compute_b(sc.sim.kernel, *sc.analysis.basis, c, o.quiet).b;
  const Prediction p = predict(c, sc.sim.kernel.gamma, b, b.has_value());
  const FitResult fit =
      fit_power_law(s, sc.analysis.column, requested_window(o, sc.analysis.window), sc.analysis.abscissa);
  const Comparison cmp = compare(p, fit, o.tolerance ? o.tolerance : sc.analysis.tolerance);
  json j = to_json(cmp);
  j["scenario"] = sc.name;
  j["config_hash"] = s.config_hash;
  j["seed"] = s.seed;
  j["replicas"] = s.replicas;
  emit(o, j);
  if (!o.quiet) std::cerr << (cmp.pass ? "PASS" : "FAIL") << " slope " << fit.slope << " vs " << *p.beta_exponent << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Homoenergetic Boltzmann flows: classification, particle simulation and temperature laws"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress messages");

  auto add_out = [&](CLI::App* c, const std::string& what) { c->add_option("-o,--out", o.out, what); };
  auto add_case = [&](CLI::App* c) {
    c->add_option("--case", o.flow_case, "Flow case tag")->capture_default_str();
    c->add_option("--K", o.K, "Shear constant")->capture_default_str();
    c->add_option("--K1", o.K1)->capture_default_str();
    c->add_option("--K2", o.K2)->capture_default_str();
    c->add_option("--K3", o.K3)->capture_default_str();
  };
  auto add_kernel = [&](CLI::App* c) {
    c->add_option("--angular", o.angular, "Angular density: constant or cosine")->capture_default_str();
    c->add_option("--strength", o.strength, "Kernel strength")->capture_default_str();
    c->add_option("--radial-order", o.radial_order)->capture_default_str();
    c->add_option("--angular-order", o.angular_order)->capture_default_str();
  };
  auto add_fit = [&](CLI::App* c) {
    c->add_option("--window-min", o.window_min, "Lower end of the fit window");
    c->add_option("--window-max", o.window_max, "Upper end of the fit window");
  };

  auto* classify = app.add_subcommand("classify", "Classify a matrix A and print the flow case as JSON");
  classify->add_option("entries", o.matrix, "Nine entries of A, row major")->required()->expected(9);
  add_out(classify, "Write JSON here");

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its moment CSV");
  simulate->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  simulate->add_option("--seed", o.seed, "Override the scenario seed");
  simulate->add_option("--replicas", o.replicas, "Override the replica count");
  add_out(simulate, "CSV path (default <outputs.directory>/<name>.csv)");

  auto* linop_b = app.add_subcommand("linop-b", "Green-Kubo constant of a flow case");
  add_case(linop_b);
  linop_b->add_option("--gamma", o.gamma)->capture_default_str();
  add_kernel(linop_b);
  add_out(linop_b, "Write JSON here");

  auto* predict_cmd = app.add_subcommand("predict", "Predicted temperature law as JSON");
  add_case(predict_cmd);
  predict_cmd->add_option("--gamma", o.gamma)->capture_default_str();
  predict_cmd->add_option("--b", o.b, "Green-Kubo constant for the prefactor");
  predict_cmd->add_flag("--with-b", o.with_b, "Compute b with the Galerkin operator");
  add_kernel(predict_cmd);
  add_out(predict_cmd, "Write JSON here");

  auto* fit = app.add_subcommand("fit", "Power-law fit of a CSV column");
  fit->add_option("csv", o.csv, "Moment CSV")->required();
  fit->add_option("--column", o.column)->capture_default_str();
  fit->add_option("--abscissa", o.abscissa, "t or exp_tau")->capture_default_str();
  add_fit(fit);
  add_out(fit, "Write JSON here");

  auto* report = app.add_subcommand("report", "Compare a CSV with the prediction for its scenario");
  report->add_option("csv", o.csv, "Moment CSV")->required();
  report->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  report->add_option("--tolerance", o.tolerance, "Slope tolerance");
  add_fit(report);
  add_out(report, "Write JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*simulate) return cmd_simulate(o);
    if (*linop_b) return cmd_linop_b(o);
    if (*predict_cmd) return cmd_predict(o);
    if (*fit) return cmd_fit(o);
    if (*report) return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
