#include "homokinetics/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "homokinetics/errors.hpp"

namespace homokinetics {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
  throw ConfigError(path + ": " + what);
}

/// Object reader that rejects fields outside an allowed set.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path))
  {
    if (!j.is_object()) fail(path_, "must be an object");
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(at(key), "unknown field");
    }
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const
  {
    if (!has(key)) fail(at(key), "required field missing");
    return j_.at(key);
  }

  double number(const char* key) const
  {
    const json& v = raw(key);
    if (!v.is_number()) fail(at(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(at(key), "must be finite");
    return x;
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> maybe_number(const char* key) const
  {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  long long integer(const char* key, long long fallback) const
  {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(at(key), "must be an integer");
    return v.get<long long>();
  }

  std::string string(const char* key) const
  {
    const json& v = raw(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    return v.get<std::string>();
  }
  std::string string(const char* key, const std::string& fallback) const { return has(key) ? string(key) : fallback; }

  bool boolean(const char* key, bool fallback) const
  {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(at(key), "must be true or false");
    return v.get<bool>();
  }

 private:
  const json& j_;
  std::string path_;
};

/// Runs `f`, prefixing ConfigError messages with a field path.
template <typename F>
auto within(const std::string& path, F&& f)
{
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  }
}

Frame frame_from_string(const std::string& s, const std::string& path)
{
  if (s == "Rescaled") return Frame::Rescaled;
  if (s == "Dilatation") return Frame::Dilatation;
  fail(path, "unknown frame '" + s + "' (Rescaled or Dilatation)");
}

KernelSpec kernel_from_json(const json& j)
{
  Fields f(j, "kernel", {"gamma", "angular", "strength"});
  KernelSpec k;
  k.gamma = f.number("gamma");
  k.angular = within(f.at("angular"), [&] { return angular_density_from_string(f.string("angular", "constant")); });
  k.strength = f.number("strength", 1);
  within("kernel", [&] {
    k.validate();
    return 0;
  });
  return k;
}

InitialDistribution initial_from_json(const json& j, const std::string& path)
{
  Fields f(j, path, {"kind", "beta0", "radius", "beta_a", "beta_b"});
  InitialDistribution d;
  d.kind = within(f.at("kind"), [&] { return initial_kind_from_string(f.string("kind", "Maxwellian")); });
  d.beta0 = f.number("beta0", d.beta0);
  d.radius = f.number("radius", d.radius);
  d.beta_a = f.number("beta_a", d.beta_a);
  d.beta_b = f.number("beta_b", d.beta_b);
  return d;
}

void sim_from_json(const json& j, SimConfig& s)
{
  Fields f(j, "sim", {"N", "dt_policy", "duration", "t_start", "t_end", "checkpoints", "seed", "replicas", "initial",
                      "frame", "floor_fraction", "check_conservation"});
  auto positive_int = [&](const char* key, long long fallback) {
    const long long v = f.integer(key, fallback);
    if (v <= 0 || v > std::numeric_limits<int>::max()) fail(f.at(key), "must be a positive integer");
    return static_cast<int>(v);
  };
  s.N = positive_int("N", s.N);
  s.checkpoints = positive_int("checkpoints", s.checkpoints);
  s.replicas = positive_int("replicas", s.replicas);
  const long long seed = f.integer("seed", static_cast<long long>(s.seed));
  if (seed < 0) fail(f.at("seed"), "must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.dt_policy = f.number("dt_policy", s.dt_policy);
  s.t_start = f.number("t_start", s.t_start);
  s.floor_fraction = f.number("floor_fraction", s.floor_fraction);
  s.check_conservation = f.boolean("check_conservation", s.check_conservation);
  if (f.has("frame")) s.frame = frame_from_string(f.string("frame"), f.at("frame"));
  if (f.has("initial")) s.initial = initial_from_json(f.raw("initial"), f.at("initial"));
  if (f.has("duration") && f.has("t_end")) fail("sim", "give either duration or t_end, not both");
  if (f.has("duration")) s.duration = f.number("duration");
  if (f.has("t_end")) {
    const double t_end = f.number("t_end");
    if (!(t_end > s.t_start)) fail(f.at("t_end"), "must exceed t_start");
    s.duration = within(f.at("t_end"), [&] {
      Dynamics d(s);
      return d.tau_of_t(t_end) - d.tau_of_t(s.t_start);
    });
  }
}

AnalysisSpec analysis_from_json(const json& j)
{
  Fields f(j, "analysis", {"column", "abscissa", "window", "tolerance", "b", "basis"});
  AnalysisSpec a;
  a.column = f.string("column", a.column);
  within(f.at("column"), [&] { return column_value(MomentSummary{}, a.column); });
  a.abscissa = within(f.at("abscissa"), [&] { return abscissa_from_string(f.string("abscissa", "t")); });
  if (f.has("window")) {
    Fields w(f.raw("window"), f.at("window"), {"min", "max"});
    a.window.x_min = w.maybe_number("min");
    a.window.x_max = w.maybe_number("max");
    if (a.window.x_min && a.window.x_max && !(*a.window.x_min < *a.window.x_max))
      fail(f.at("window"), "min must be below max");
  }
  a.tolerance = f.maybe_number("tolerance");
  if (a.tolerance && *a.tolerance < 0) fail(f.at("tolerance"), "must be nonnegative");
  a.b = f.maybe_number("b");
  if (a.b && *a.b < 0) fail(f.at("b"), "must be nonnegative");
  if (f.has("basis")) {
    Fields b(f.raw("basis"), f.at("basis"), {"radial_order", "angular_order"});
    BasisSpec spec;
    spec.radial_order = static_cast<int>(b.integer("radial_order", spec.radial_order));
    spec.angular_order = static_cast<int>(b.integer("angular_order", spec.angular_order));
    within(f.at("basis"), [&] {
      spec.validate();
      return 0;
    });
    a.basis = spec;
  }
  return a;
}

std::size_t line_of(const std::string& text, std::size_t byte)
{
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

Eigen::Matrix3d matrix_from_json(const json& j, const std::string& path)
{
  if (!j.is_array() || j.size() != 9) fail(path, "must be an array of 9 numbers (row major)");
  Eigen::Matrix3d A;
  for (int i = 0; i < 9; ++i) {
    if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "must be a number");
    A(i / 3, i % 3) = j[i].get<double>();
  }
  if (!A.allFinite()) fail(path, "entries must be finite");
  return A;
}

FlowCase flow_case_from_json(const json& j, const std::string& path)
{
  Fields f(j, path, {"case", "K", "K1", "K2", "K3"});
  const std::string name = f.string("case");
  const auto tag = flow_case_from_string(name);
  if (!tag) fail(f.at("case"), "unknown flow case '" + name + "'");
  FlowCase c;
  c.tag = *tag;
  const bool triple = *tag == FlowCaseTag::SimpleShearDecayingDilatation || *tag == FlowCaseTag::CombinedOrthogonalShear;
  const bool single = !triple && *tag != FlowCaseTag::HomogeneousDilatation && *tag != FlowCaseTag::CylindricalDilatation;
  for (const char* k : {"K1", "K2", "K3"})
    if (f.has(k) && !triple) fail(f.at(k), "not a constant of " + name);
  if (f.has("K") && !single) fail(f.at("K"), "not a constant of " + name);
  if (single) c.K = f.number("K");
  if (triple) {
    c.K1 = f.number("K1");
    c.K2 = f.number("K2");
    c.K3 = f.number("K3");
  }
  within(path, [&] {
    c.validate();
    return 0;
  });
  return c;
}

SimConfig& apply_flow(SimConfig& sim, const json& flow, const std::string& path)
{
  sim.flow_case.reset();
  sim.matrix.reset();
  if (flow.is_null()) return sim;
  if (flow.is_object() && flow.contains("matrix")) {
    Fields f(flow, path, {"matrix"});
    sim.matrix = matrix_from_json(f.raw("matrix"), f.at("matrix"));
  } else {
    sim.flow_case = flow_case_from_json(flow, path);
  }
  return sim;
}

Scenario parse_scenario(const json& doc)
{
  Fields f(doc, "", {"schema", "name", "flow", "kernel", "sim", "analysis", "outputs"});
  const long long schema = f.integer("schema", -1);
  if (!f.has("schema")) fail("schema", "required field missing");
  if (schema != kScenarioSchema)
    fail("schema", "unsupported version " + std::to_string(schema) + " (expected " + std::to_string(kScenarioSchema) + ")");
  Scenario s;
  s.name = f.string("name");
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
    fail("name", "must be a nonempty file stem");
  if (f.has("flow")) apply_flow(s.sim, f.raw("flow"));
  s.sim.kernel = kernel_from_json(f.raw("kernel"));
  if (f.has("sim")) sim_from_json(f.raw("sim"), s.sim);
  within("sim", [&] {
    s.sim.validate();
    Dynamics d(s.sim);
    return 0;
  });
  if (f.has("analysis")) s.analysis = analysis_from_json(f.raw("analysis"));
  if (f.has("outputs")) {
    Fields o(f.raw("outputs"), "outputs", {"directory"});
    s.output_directory = o.string("directory", ".");
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte)) + ": JSON syntax error: " + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& s)
{
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = s.name;
  if (s.sim.matrix) {
    json m = json::array();
    for (int i = 0; i < 9; ++i) m.push_back((*s.sim.matrix)(i / 3, i % 3));
    j["flow"] = {{"matrix", m}};
  } else if (s.sim.flow_case) {
    json c = to_json(*s.sim.flow_case);
    c.erase("basis");
    j["flow"] = c;
  }
  j["kernel"] = to_json(s.sim.kernel);
  const auto& c = s.sim;
  j["sim"] = {{"N", c.N},
              {"dt_policy", c.dt_policy},
              {"duration", c.duration},
              {"t_start", c.t_start},
              {"checkpoints", c.checkpoints},
              {"seed", c.seed},
              {"replicas", c.replicas},
              {"initial",
               {{"kind", to_string(c.initial.kind)},
                {"beta0", c.initial.beta0},
                {"radius", c.initial.radius},
                {"beta_a", c.initial.beta_a},
                {"beta_b", c.initial.beta_b}}},
              {"frame", to_string(c.frame)},
              {"floor_fraction", c.floor_fraction},
              {"check_conservation", c.check_conservation}};
  json a = {{"column", s.analysis.column}, {"abscissa", to_string(s.analysis.abscissa)}};
  json w = json::object();
  if (s.analysis.window.x_min) w["min"] = *s.analysis.window.x_min;
  if (s.analysis.window.x_max) w["max"] = *s.analysis.window.x_max;
  if (!w.empty()) a["window"] = w;
  if (s.analysis.tolerance) a["tolerance"] = *s.analysis.tolerance;
  if (s.analysis.b) a["b"] = *s.analysis.b;
  if (s.analysis.basis)
    a["basis"] = {{"radial_order", s.analysis.basis->radial_order}, {"angular_order", s.analysis.basis->angular_order}};
  j["analysis"] = a;
  j["outputs"] = {{"directory", s.output_directory.string()}};
  return j;
}

json to_json(const FlowCase& c)
{
  json j;
  j["case"] = to_string(c.tag);
  switch (c.tag) {
    case FlowCaseTag::HomogeneousDilatation:
    case FlowCaseTag::CylindricalDilatation: break;
    case FlowCaseTag::SimpleShearDecayingDilatation:
    case FlowCaseTag::CombinedOrthogonalShear:
      j["K1"] = c.K1;
      j["K2"] = c.K2;
      j["K3"] = c.K3;
      break;
    default: j["K"] = c.K;
  }
  json basis = json::array();
  for (int i = 0; i < 3; ++i) basis.push_back({c.basis(i, 0), c.basis(i, 1), c.basis(i, 2)});
  j["basis"] = basis;
  return j;
}

json to_json(const KernelSpec& k)
{
  return {{"gamma", k.gamma}, {"angular", to_string(k.angular)}, {"strength", k.strength}};
}

json to_json(const Prediction& p)
{
  json j;
  json c = to_json(p.flow_case);
  c.erase("basis");
  j["case"] = c;
  j["gamma"] = p.gamma;
  j["regime"] = to_string(p.regime);
  j["label"] = to_string(p.label);
  j["exponent"] = p.beta_exponent ? json(*p.beta_exponent) : json(nullptr);
  if (p.tau_rate) j["tau_rate"] = *p.tau_rate;
  if (p.prefactor) j["prefactor"] = *p.prefactor;
  if (p.b) j["b"] = *p.b;
  j["dominance_exponent"] = p.dominance_exponent;
  j["validity"] = p.validity;
  j["asymptotic_only"] = p.asymptotic_only;
  return j;
}

json to_json(const FitResult& f)
{
  return {{"column", f.column},     {"abscissa", to_string(f.abscissa)}, {"slope", f.slope},
          {"stderr", f.stderr_},    {"intercept", f.intercept},          {"r_squared", f.r_squared},
          {"window", {f.x_min, f.x_max}}, {"points", f.points}};
}

json to_json(const Comparison& c)
{
  json j = {{"prediction", to_json(c.prediction)},
            {"fit", to_json(c.fit)},
            {"tolerance", c.tolerance},
            {"pass", c.pass}};
  if (c.prefactor_ratio) j["prefactor_ratio"] = *c.prefactor_ratio;
  return j;
}

}  // namespace homokinetics
