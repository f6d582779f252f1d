#include "thermobeam/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "thermobeam/error.hpp"

namespace thermobeam {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKinds = {
    {ExperimentKind::PointwiseDecay, "pointwise-decay"},   {ExperimentKind::SobolevDecay, "sobolev-decay"},
    {ExperimentKind::RegularityLoss, "regularity-loss"},   {ExperimentKind::DissipationAudit, "dissipation-audit"},
    {ExperimentKind::LyapunovAudit, "lyapunov-audit"},     {ExperimentKind::CompareLaws, "compare-laws"},
    {ExperimentKind::ChiSweep, "chi-sweep"},
};

// A JSON object whose keys must all be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + name() + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const json* v = raw(key)) out = convert<T>(*v, field(key));
  }

  Section child(const std::string& key) {
    const json* v = raw(key);
    return Section(v ? *v : empty(), field(key));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + field(it.key()) + "'");
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("field '" + where + "' must be a number");
        return v.get<double>();
      } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, int> ||
                           std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 && !std::is_same_v<T, int>))
          throw ConfigError("field '" + where + "' must be a non-negative integer");
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw ConfigError("field '" + where + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(convert<double>(e, where + "[]"));
        return out;
      } else {
        return v.get<T>();
      }
    } catch (const json::exception& e) {
      throw ConfigError("field '" + where + "': " + e.what());
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string name() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

cplx parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("field '" + where + "' must be a number or a [re, im] pair");
}

Profile parse_profile(const json& j, const std::string& where) {
  Section s(j, where);
  std::string type = "zero";
  s.read("type", type);
  Profile p;
  if (type == "zero") {
    p = ZeroProfile{};
  } else if (type == "gaussian") {
    GaussianProfile g;
    s.read("amplitude", g.amplitude);
    s.read("width", g.width);
    p = g;
  } else if (type == "band") {
    BandProfile b;
    s.read("center", b.center);
    s.read("half_width", b.half_width);
    s.read("amplitude", b.amplitude);
    p = b;
  } else if (type == "tabulated") {
    TabulatedProfile t;
    s.read("xi", t.xi);
    if (const json* v = s.raw("values")) {
      if (!v->is_array()) throw ConfigError("field '" + s.field("values") + "' must be an array");
      for (const auto& e : *v) t.values.push_back(parse_complex(e, s.field("values") + "[]"));
    }
    p = t;
  } else {
    throw ConfigError("field '" + s.field("type") + "': unknown profile type '" + type + "'");
  }
  s.finish();
  try {
    validate(p);
  } catch (const InvalidParameters& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
  return p;
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

void apply_kind_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::DissipationAudit:
      c.time.t_end = 1.0;
      c.time.output_stride = 1e-4;
      c.time.dt_max = 1e-4;
      c.xi_values = {0.1, 1.0, 10.0};
      break;
    case ExperimentKind::PointwiseDecay:
      c.xi_values = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
      break;
    case ExperimentKind::SobolevDecay:
    case ExperimentKind::CompareLaws:
      c.time.t_end = 1000.0;
      c.time.output_stride = 1.0;
      c.xi_values = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
      break;
    default:
      break;
  }
}

const char* kComponentNames[kComponents] = {"v", "u", "z", "y", "theta", "q"};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kKinds)
    if (n == name) return k;
  std::string known;
  for (const auto& [k, n] : kKinds) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown experiment '" + name + "' (expected one of " + known + ")");
}

Regime ExperimentConfig::resolved_regime() const { return regime ? *regime : detect_regime(params, law); }

ExperimentConfig config_from_json(const json& j) {
  Section root(j, "");
  ExperimentConfig c;

  std::string kind;
  root.read("experiment", kind);
  if (kind.empty()) throw ConfigError("field 'experiment' is required");
  c.kind = experiment_from_string(kind);
  apply_kind_defaults(c);

  // Parameters: a preset, optionally overridden field by field.
  root.read("preset", c.preset);
  bool have_params = false;
  if (!c.preset.empty()) {
    const Preset& p = preset(c.preset);
    c.params = p.params;
    c.kernel = p.kernel;
    have_params = true;
  }
  if (root.has("params")) {
    Section p = root.child("params");
    p.read("rho1", c.params.rho1);
    p.read("rho2", c.params.rho2);
    p.read("rho3", c.params.rho3);
    p.read("k", c.params.k);
    p.read("b", c.params.b);
    p.read("m", c.params.m);
    p.read("delta", c.params.delta);
    p.read("beta", c.params.beta);
    p.read("tau", c.params.tau);
    p.finish();
    have_params = true;
  }
  if (const json* k = root.raw("kernel")) {
    if (!k->is_array()) throw ConfigError("field 'kernel' must be an array of {g, mu} modes");
    c.kernel.modes.clear();
    for (std::size_t i = 0; i < k->size(); ++i) {
      Section m((*k)[i], "kernel[" + std::to_string(i) + "]");
      KernelMode mode;
      m.read("g", mode.g);
      m.read("mu", mode.mu);
      m.finish();
      c.kernel.modes.push_back(mode);
    }
  }
  if (!have_params) throw ConfigError("either 'preset' or 'params' is required");

  std::string law = "cattaneo";
  root.read("law", law);
  c.law = law_from_string(law);
  std::string regime = "auto";
  root.read("regime", regime);
  if (regime != "auto") c.regime = regime_from_string(regime);

  // Default data: unit Gaussians on the point fields, quasi-static flux.
  for (std::size_t i = 0; i < kComponents - 1; ++i) c.initial.components[i] = GaussianProfile{1.0, 1.0};
  c.initial.q_mode = QMode::QuasiStatic;
  if (root.has("initial_data")) {
    Section d = root.child("initial_data");
    for (std::size_t i = 0; i < kComponents; ++i) {
      if (const json* v = d.raw(kComponentNames[i])) c.initial.components[i] = parse_profile(*v, d.field(kComponentNames[i]));
    }
    std::string q_mode = c.initial.q_mode == QMode::QuasiStatic ? "quasi-static" : "profile";
    d.read("q_mode", q_mode);
    if (q_mode == "quasi-static") {
      c.initial.q_mode = QMode::QuasiStatic;
    } else if (q_mode == "profile") {
      c.initial.q_mode = QMode::Profile;
    } else {
      throw ConfigError("field 'initial_data.q_mode' must be 'profile' or 'quasi-static'");
    }
    if (d.has("history")) {
      Section h = d.child("history");
      if (const json* w = h.raw("w")) {
        if (!w->is_array()) throw ConfigError("field 'initial_data.history.w' must be an array");
        for (const auto& e : *w) c.initial.history.w.push_back(parse_complex(e, "initial_data.history.w[]"));
      }
      h.read("p", c.initial.history.p);
      if (const json* e = h.raw("envelope")) c.initial.history.envelope = parse_profile(*e, "initial_data.history.envelope");
      h.finish();
    }
    d.finish();
  }

  if (root.has("xi_grid")) {
    Section g = root.child("xi_grid");
    g.read("xi_max", c.xi_max);
    g.read("panels", c.panels);
    g.finish();
  }
  if (root.has("time")) {
    Section t = root.child("time");
    t.read("t_end", c.time.t_end);
    t.read("dt_max", c.time.dt_max);
    t.read("output_stride", c.time.output_stride);
    t.read("c_stab", c.time.c_stab);
    t.finish();
  }
  root.read("xi_values", c.xi_values);

  if (root.has("sobolev")) {
    Section s = root.child("sobolev");
    s.read("k_max", c.sobolev.k_max);
    s.read("l", c.sobolev.l);
    s.read("t_cal", c.sobolev.t_cal);
    s.read("t_hi", c.sobolev.t_hi);
    s.read("fit_lo", c.sobolev.fit_lo);
    s.read("fit_hi", c.sobolev.fit_hi);
    s.finish();
  }
  if (root.has("pointwise")) {
    Section s = root.child("pointwise");
    s.read("t_factor", c.pointwise.t_factor);
    s.read("t_cap", c.pointwise.t_cap);
    s.read("outputs", c.pointwise.outputs);
    s.read("fit_from", c.pointwise.fit_from);
    s.read("write_trajectories", c.pointwise.write_trajectories);
    s.finish();
  }
  if (root.has("regularity_loss")) {
    Section s = root.child("regularity_loss");
    s.read("centers", c.centers);
    s.read("half_width", c.band.half_width);
    s.read("amplitude", c.band.amplitude);
    s.read("panels", c.band.panels);
    s.read("t_budget", c.band.t_budget);
    s.read("relative_tolerance", c.band.relative_tolerance);
    s.finish();
  }
  if (root.has("chi_sweep")) {
    Section s = root.child("chi_sweep");
    s.read("rho2", c.chi_sweep.rho2);
    s.read("center", c.chi_sweep.center);
    s.finish();
  }
  if (root.has("reduction")) {
    Section s = root.child("reduction");
    s.read("tau", c.reduction.tau);
    s.read("xi", c.reduction.xi);
    s.read("t_end", c.reduction.t_end);
    s.read("output_stride", c.reduction.output_stride);
    s.finish();
  }
  if (root.has("lyapunov")) {
    Section s = root.child("lyapunov");
    s.read("samples_per_xi", c.lyapunov.samples_per_xi);
    s.read("calibration_xi", c.lyapunov.calibration_xi);
    s.read("equivalence_xi", c.lyapunov.equivalence_xi);
    s.read("equivalence_samples", c.lyapunov.equivalence_samples);
    s.read("trajectories", c.lyapunov.trajectories);
    s.read("t_end", c.lyapunov.t_end);
    s.read("output_stride", c.lyapunov.output_stride);
    if (const json* v = s.raw("coefficients")) c.lyapunov.coefficients = coefficients_from_json(*v, s.field("coefficients"));
    s.finish();
  }
  if (root.has("thresholds")) {
    Section s = root.child("thresholds");
    s.read("dissipation_relative", c.thresholds.dissipation_relative);
    s.read("cauchy_schwarz", c.thresholds.cauchy_schwarz);
    s.read("pointwise_c_max", c.thresholds.pointwise_c_max);
    s.read("slope_chi_zero", c.thresholds.slope_chi_zero);
    s.read("slope_chi_nonzero", c.thresholds.slope_chi_nonzero);
    s.read("slope_tolerance", c.thresholds.slope_tolerance);
    s.read("bound_growth", c.thresholds.bound_growth);
    s.read("reduction", c.thresholds.reduction);
    s.read("sobolev_exponent_max", c.thresholds.sobolev_exponent_max);
    s.finish();
  }
  root.read("output_dir", c.output_dir);
  root.read("seed", c.seed);
  root.read("workers", c.workers);
  root.finish();

  // Validation, reported against the offending field.
  try {
    c.params.validate();
  } catch (const InvalidParameters& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  Model model = c.model();  // throws HypothesisError naming H1/H2/H3
  try {
    c.time.validate();
  } catch (const InvalidParameters& e) {
    throw ConfigError(std::string("time: ") + e.what());
  }
  if (c.law == Law::Cattaneo && !(c.params.tau > 0.0) && c.kind != ExperimentKind::CompareLaws) {
    throw ConfigError("params.tau must be positive for the Cattaneo law");
  }
  if (c.kind == ExperimentKind::CompareLaws && !(c.params.tau > 0.0)) {
    throw ConfigError("params.tau must be positive to compare the two laws");
  }
  if (c.panels == 0 || !(c.xi_max > 0.0)) throw ConfigError("xi_grid needs xi_max > 0 and panels > 0");
  for (double xi : c.xi_values)
    if (!std::isfinite(xi)) throw ConfigError("xi_values must be finite");
  if (c.regime && *c.regime != detect_regime(c.params, c.law)) {
    throw ConfigError("regime '" + to_string(*c.regime) + "' disagrees with the stability number of the parameters");
  }
  const Law data_law = c.kind == ExperimentKind::CompareLaws ? Law::Fourier : c.law;
  try {
    c.initial.validate(model, data_law);
  } catch (const Error& e) {
    throw ConfigError(std::string("initial_data: ") + e.what());
  }
  if (const auto& co = c.lyapunov.coefficients) {
    if (co->law != c.law) throw ConfigError("field 'lyapunov.coefficients.law' disagrees with 'law'");
    if (co->regime != c.resolved_regime()) {
      throw ConfigError("field 'lyapunov.coefficients.regime' disagrees with the stability number of the parameters");
    }
  }
  c.band.integration = c.time;
  return c;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << column << ": JSON syntax error: " << e.what();
    throw ConfigError(msg.str());
  }
  return config_from_json(j);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

json profile_to_json(const Profile& profile) {
  struct V {
    json operator()(const ZeroProfile&) const { return {{"type", "zero"}}; }
    json operator()(const GaussianProfile& g) const {
      return {{"type", "gaussian"}, {"amplitude", g.amplitude}, {"width", g.width}};
    }
    json operator()(const BandProfile& b) const {
      return {{"type", "band"}, {"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}};
    }
    json operator()(const TabulatedProfile& t) const {
      json values = json::array();
      for (auto v : t.values) values.push_back(complex_json(v));
      return {{"type", "tabulated"}, {"xi", t.xi}, {"values", values}};
    }
  };
  return std::visit(V{}, profile);
}

json coefficients_to_json(const LyapunovCoefficients& c) {
  return {{"regime", to_string(c.regime)},
          {"law", to_string(c.law)},
          {"weights", std::vector<double>(c.weights.begin(), c.weights.end())},
          {"N", c.N}};
}

LyapunovCoefficients coefficients_from_json(const json& j, const std::string& where) {
  Section s(j, where);
  LyapunovCoefficients c;
  std::string regime, law;
  s.read("regime", regime);
  s.read("law", law);
  if (regime.empty() || law.empty()) throw ConfigError("field '" + where + "' needs 'regime' and 'law'");
  c.regime = regime_from_string(regime);
  c.law = law_from_string(law);
  std::vector<double> weights;
  s.read("weights", weights);
  if (weights.size() != 3) throw ConfigError("field '" + s.field("weights") + "' must hold three numbers");
  std::copy(weights.begin(), weights.end(), c.weights.begin());
  s.read("N", c.N);
  s.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
  return c;
}

json ExperimentConfig::echo() const {
  json j;
  j["experiment"] = to_string(kind);
  if (!preset.empty()) j["preset"] = preset;
  j["params"] = {{"rho1", params.rho1}, {"rho2", params.rho2}, {"rho3", params.rho3}, {"k", params.k},
                 {"b", params.b},       {"m", params.m},       {"delta", params.delta}, {"beta", params.beta},
                 {"tau", params.tau}};
  json kernel_json = json::array();
  for (const auto& m : kernel.modes) kernel_json.push_back({{"g", m.g}, {"mu", m.mu}});
  j["kernel"] = kernel_json;
  j["law"] = to_string(law);
  j["regime"] = regime ? to_string(*regime) : "auto";
  json data;
  for (std::size_t i = 0; i < kComponents; ++i) data[kComponentNames[i]] = profile_to_json(initial.components[i]);
  data["q_mode"] = initial.q_mode == QMode::QuasiStatic ? "quasi-static" : "profile";
  if (!initial.history.w.empty()) {
    json w = json::array();
    for (auto v : initial.history.w) w.push_back(complex_json(v));
    data["history"] = {{"w", w}, {"p", initial.history.p}, {"envelope", profile_to_json(initial.history.envelope)}};
  }
  j["initial_data"] = data;
  j["xi_grid"] = {{"xi_max", xi_max}, {"panels", panels}};
  j["time"] = {{"t_end", time.t_end}, {"dt_max", time.dt_max}, {"output_stride", time.output_stride},
               {"c_stab", time.c_stab}};
  j["xi_values"] = xi_values;
  j["sobolev"] = {{"k_max", sobolev.k_max}, {"l", sobolev.l},         {"t_cal", sobolev.t_cal},
                  {"t_hi", sobolev.t_hi},   {"fit_lo", sobolev.fit_lo}, {"fit_hi", sobolev.fit_hi}};
  j["pointwise"] = {{"t_factor", pointwise.t_factor},
                    {"t_cap", pointwise.t_cap},
                    {"outputs", pointwise.outputs},
                    {"fit_from", pointwise.fit_from},
                    {"write_trajectories", pointwise.write_trajectories}};
  j["regularity_loss"] = {{"centers", centers},
                          {"half_width", band.half_width},
                          {"amplitude", band.amplitude},
                          {"panels", band.panels},
                          {"t_budget", band.t_budget},
                          {"relative_tolerance", band.relative_tolerance}};
  j["chi_sweep"] = {{"rho2", chi_sweep.rho2}, {"center", chi_sweep.center}};
  j["reduction"] = {{"tau", reduction.tau},
                    {"xi", reduction.xi},
                    {"t_end", reduction.t_end},
                    {"output_stride", reduction.output_stride}};
  j["lyapunov"] = {{"samples_per_xi", lyapunov.samples_per_xi},
                   {"calibration_xi", lyapunov.calibration_xi},
                   {"equivalence_xi", lyapunov.equivalence_xi},
                   {"equivalence_samples", lyapunov.equivalence_samples},
                   {"trajectories", lyapunov.trajectories},
                   {"t_end", lyapunov.t_end},
                   {"output_stride", lyapunov.output_stride}};
  if (lyapunov.coefficients) j["lyapunov"]["coefficients"] = coefficients_to_json(*lyapunov.coefficients);
  j["thresholds"] = {{"dissipation_relative", thresholds.dissipation_relative},
                     {"cauchy_schwarz", thresholds.cauchy_schwarz},
                     {"pointwise_c_max", thresholds.pointwise_c_max},
                     {"slope_chi_zero", thresholds.slope_chi_zero},
                     {"slope_chi_nonzero", thresholds.slope_chi_nonzero},
                     {"slope_tolerance", thresholds.slope_tolerance},
                     {"bound_growth", thresholds.bound_growth},
                     {"reduction", thresholds.reduction},
                     {"sobolev_exponent_max", thresholds.sobolev_exponent_max}};
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["workers"] = workers;
  return j;
}

}  // namespace thermobeam
