#include "omrav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "omrav/channel.hpp"
#include "omrav/error.hpp"

namespace omrav {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ParseError, path + ": " + what);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ValidationError, what);
}

// Object view that records which keys were read so leftovers can be rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) parse_fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) parse_fail(at(key), "expected a number");
    return v->get<double>();
  }

  std::optional<double> number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) parse_fail(at(key), "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) parse_fail(at(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) parse_fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  // Exactly one of `a` (converted by fa) or `b` (converted by fb) may be given.
  template <class FA, class FB>
  double either(const std::string& a, FA fa, const std::string& b, FB fb, double fallback) {
    auto va = number(a);
    auto vb = number(b);
    if (va && vb) parse_fail(at(a), "conflicts with " + b);
    if (va) return fa(*va);
    if (vb) return fb(*vb);
    return fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) parse_fail(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_fail(idx(path, i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Vec3 vec3(Obj& o, const std::string& key, const Vec3& fallback) {
  const json* v = o.get(key);
  if (!v) return fallback;
  auto n = numbers(*v, o.at(key));
  if (n.size() != 3) parse_fail(o.at(key), "expected 3 components");
  return {n[0], n[1], n[2]};
}

std::pair<double, double> range(Obj& o, const std::string& key, std::pair<double, double> fallback) {
  const json* v = o.get(key);
  if (!v) return fallback;
  auto n = numbers(*v, o.at(key));
  if (n.size() != 2) parse_fail(o.at(key), "expected [lo, hi]");
  return {n[0], n[1]};
}

double ident(double v) { return v; }
double deg(double v) { return v * kDeg; }
double ghz(double v) { return v * 1e9; }

RadioParams parse_radio(const json& j, const std::string& path) {
  Obj o(j, path);
  RadioParams r;
  r.carrier_hz = o.either("carrier_hz", ident, "carrier_ghz", ghz, r.carrier_hz);
  r.noise_power_w = o.either("noise_power_w", ident, "noise_power_dbm", dbm_to_w, r.noise_power_w);
  r.min_distance_m = o.number("min_distance_m", r.min_distance_m);
  o.finish();
  return r;
}

json dump_radio(const RadioParams& r) {
  return {{"carrier_hz", r.carrier_hz},
          {"noise_power_w", r.noise_power_w},
          {"min_distance_m", r.min_distance_m}};
}

RadiationPattern parse_pattern(const json& j, const std::string& path, const RadiationPattern& def) {
  Obj o(j, path);
  const std::string kind_name = o.string("kind", std::string(to_string(def.kind())));
  PatternKind kind;
  try {
    kind = pattern_kind_from_string(kind_name);
  } catch (const Error& e) {
    parse_fail(o.at("kind"), e.what());
  }
  RadiationPattern p = RadiationPattern::isotropic();
  switch (kind) {
    case PatternKind::Isotropic: p = RadiationPattern::isotropic(); break;
    case PatternKind::ShortDipole: p = RadiationPattern::short_dipole(); break;
    case PatternKind::HalfWaveDipole: p = RadiationPattern::half_wave_dipole(); break;
    case PatternKind::AxialLobe: {
      const bool same = def.kind() == PatternKind::AxialLobe;
      const double q = o.number("q", same ? def.exponent() : 4.0);
      const double floor = o.number("backlobe_floor", same ? def.backlobe_floor() : 0.0);
      try {
        p = RadiationPattern::axial_lobe(q, floor);
      } catch (const Error& e) {
        throw Error(ErrorKind::ValidationError, path + ": " + e.what());
      }
      break;
    }
  }
  o.finish();
  return p;
}

json dump_pattern(const RadiationPattern& p) {
  json j = {{"kind", std::string(to_string(p.kind()))}};
  if (p.kind() == PatternKind::AxialLobe) {
    j["q"] = p.exponent();
    j["backlobe_floor"] = p.backlobe_floor();
  }
  return j;
}

json dump_vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

GroundNode parse_node(const json& j, const std::string& path, GroundNode def, bool has_power) {
  Obj o(j, path);
  def.position = vec3(o, "pos_m", def.position);
  if (has_power) def.tx_power_w = o.either("power_w", ident, "power_dbm", dbm_to_w, def.tx_power_w);
  o.finish();
  return def;
}

json dump_node(const GroundNode& n, bool has_power) {
  json j = {{"pos_m", dump_vec(n.position)}};
  if (has_power) j["power_w"] = n.tx_power_w;
  return j;
}

SearchBox parse_box(const json& j, const std::string& path, const SearchBox& def) {
  Obj o(j, path);
  SearchBox b = def;
  std::tie(b.x_min, b.x_max) = range(o, "x_m", {def.x_min, def.x_max});
  std::tie(b.y_min, b.y_max) = range(o, "y_m", {def.y_min, def.y_max});
  std::tie(b.z_min, b.z_max) = range(o, "altitude_m", {def.z_min, def.z_max});
  o.finish();
  return b;
}

json dump_box(const SearchBox& b) {
  return {{"x_m", {b.x_min, b.x_max}}, {"y_m", {b.y_min, b.y_max}}, {"altitude_m", {b.z_min, b.z_max}}};
}

OptimizerParams parse_optimizer(const json& j, const std::string& path) {
  Obj o(j, path);
  OptimizerParams p;
  p.grid_resolution = static_cast<int>(o.integer("grid_resolution", p.grid_resolution));
  p.axis_resolution = static_cast<int>(o.integer("axis_resolution", p.axis_resolution));
  p.starts = static_cast<int>(o.integer("starts", p.starts));
  p.step_init_m = o.number("step_init_m", p.step_init_m);
  p.step_tol_m = o.number("step_tol_m", p.step_tol_m);
  p.step_init_rad = o.number("step_init_rad", p.step_init_rad);
  p.step_tol_rad = o.number("step_tol_rad", p.step_tol_rad);
  p.step_init_frac = o.number("step_init_frac", p.step_init_frac);
  p.step_tol_frac = o.number("step_tol_frac", p.step_tol_frac);
  const std::int64_t evals = o.integer("max_evals", static_cast<std::int64_t>(p.max_evals));
  require(evals > 0, "max_evals: must be positive");
  p.max_evals = static_cast<std::size_t>(evals);
  o.finish();
  return p;
}

json dump_optimizer(const OptimizerParams& p) {
  return {{"grid_resolution", p.grid_resolution}, {"axis_resolution", p.axis_resolution},
          {"starts", p.starts},                   {"step_init_m", p.step_init_m},
          {"step_tol_m", p.step_tol_m},           {"step_init_rad", p.step_init_rad},
          {"step_tol_rad", p.step_tol_rad},       {"step_init_frac", p.step_init_frac},
          {"step_tol_frac", p.step_tol_frac},     {"max_evals", p.max_evals}};
}

Rotor parse_rotor(const json& j, const std::string& path) {
  Obj o(j, path);
  Rotor r;
  r.position_m = vec3(o, "pos_m", r.position_m);
  r.tilt_axis = vec3(o, "tilt_axis", r.tilt_axis);
  r.tilt_angle_rad = o.either("tilt_rad", ident, "tilt_deg", deg, 0.0);
  r.spin = static_cast<int>(o.integer("spin", 1));
  std::tie(r.f_lo_n, r.f_hi_n) = range(o, "thrust_bounds_n", {r.f_lo_n, r.f_hi_n});
  r.drag_coeff_m = o.number("drag_coeff_m", r.drag_coeff_m);
  o.finish();
  return r;
}

json dump_rotor(const Rotor& r) {
  return {{"pos_m", dump_vec(r.position_m)},        {"tilt_axis", dump_vec(r.tilt_axis)},
          {"tilt_rad", r.tilt_angle_rad},            {"spin", r.spin},
          {"thrust_bounds_n", {r.f_lo_n, r.f_hi_n}}, {"drag_coeff_m", r.drag_coeff_m}};
}

// Either a preset with optional overrides or an explicit rotor list.
RotorConfig parse_rotor_config(const json& j, const std::string& path) {
  Obj o(j, path);
  RotorConfig c;
  if (const json* preset = o.get("preset")) {
    if (!preset->is_string()) parse_fail(o.at("preset"), "expected a string");
    const std::string name = preset->get<std::string>();
    if (o.get("rotors")) parse_fail(o.at("rotors"), "conflicts with preset");
    if (name == "planar_quad") {
      const RotorConfig d = planar_quad();
      const double arm = o.number("arm_m", 0.25);
      const double f_hi = o.number("f_hi_n", d.rotors[0].f_hi_n);
      const double mass = o.number("mass_kg", d.mass_kg);
      const double drag = o.number("drag_coeff_m", d.rotors[0].drag_coeff_m);
      c = planar_quad(arm, f_hi, mass, drag);
    } else if (name == "tilted_cube") {
      const RotorConfig d = tilted_cube(0.0);
      const double alpha = o.either("tilt_rad", ident, "tilt_deg", deg, 35.0 * kDeg);
      const double half = o.number("half_edge_m", 0.25);
      const double f_hi = o.number("f_hi_n", d.rotors[0].f_hi_n);
      const double mass = o.number("mass_kg", d.mass_kg);
      const double drag = o.number("drag_coeff_m", d.rotors[0].drag_coeff_m);
      c = tilted_cube(alpha, half, f_hi, mass, drag);
    } else {
      parse_fail(o.at("preset"), "unknown preset '" + name + "'");
    }
    c.name = o.string("name", name);
  } else {
    c.name = o.string("name", "");
    c.mass_kg = o.number("mass_kg", c.mass_kg);
    const json* rotors = o.get("rotors");
    if (!rotors) parse_fail(path, "needs either preset or rotors");
    if (!rotors->is_array()) parse_fail(o.at("rotors"), "expected an array");
    for (std::size_t i = 0; i < rotors->size(); ++i)
      c.rotors.push_back(parse_rotor((*rotors)[i], idx(o.at("rotors"), i)));
  }
  o.finish();
  require(!c.name.empty(), path + ".name: must be non-empty");
  require(c.name.find_first_of(",\n\r\"") == std::string::npos,
          path + ".name: must not contain commas, quotes or line breaks");
  c.validate();
  return c;
}

json dump_rotor_config(const RotorConfig& c) {
  json rotors = json::array();
  for (const Rotor& r : c.rotors) rotors.push_back(dump_rotor(r));
  return {{"name", c.name}, {"mass_kg", c.mass_kg}, {"rotors", rotors}};
}

ExperimentKind experiment_from_string(const std::string& s, const std::string& path) {
  if (s == "sweep_a") return ExperimentKind::SweepA;
  if (s == "sweep_b") return ExperimentKind::SweepB;
  if (s == "classify") return ExperimentKind::Classify;
  if (s == "tilt_sweep") return ExperimentKind::TiltSweep;
  parse_fail(path, "unknown experiment '" + s + "'");
}

std::vector<double> default_sweep(ExperimentKind k) {
  if (k == ExperimentKind::SweepA) {
    std::vector<double> v;
    for (int p = -140; p <= 40; p += 10) v.push_back(p);
    return v;
  }
  if (k == ExperimentKind::SweepB) return {-20, -10, 0, 10, 20, 30};
  return {};
}

void parse_scenario_a(const json& j, const std::string& path, ScenarioA& s) {
  Obj o(j, path);
  if (const json* users = o.get("users")) {
    const std::string p = o.at("users");
    if (!users->is_array() || users->size() != 2) parse_fail(p, "expected exactly 2 users");
    for (std::size_t i = 0; i < 2; ++i) s.users[i] = parse_node((*users)[i], idx(p, i), s.users[i], true);
  }
  if (const json* jam = o.get("jammer")) s.jammer = parse_node(*jam, o.at("jammer"), s.jammer, false);
  if (const json* pat = o.get("uav_pattern"))
    s.uav_pattern = parse_pattern(*pat, o.at("uav_pattern"), s.uav_pattern);
  if (const json* box = o.get("box")) s.box = parse_box(*box, o.at("box"), s.box);
  o.finish();
}

json dump_scenario_a(const ScenarioA& s) {
  return {{"users", {dump_node(s.users[0], true), dump_node(s.users[1], true)}},
          {"jammer", dump_node(s.jammer, false)},
          {"uav_pattern", dump_pattern(s.uav_pattern)},
          {"box", dump_box(s.box)}};
}

void parse_scenario_b(const json& j, const std::string& path, ScenarioB& s) {
  Obj o(j, path);
  if (const json* u = o.get("legit_user")) s.legit_user = parse_node(*u, o.at("legit_user"), s.legit_user, false);
  if (const json* eaves = o.get("eavesdroppers")) {
    const std::string p = o.at("eavesdroppers");
    if (!eaves->is_array()) parse_fail(p, "expected an array");
    s.eavesdroppers.clear();
    for (std::size_t i = 0; i < eaves->size(); ++i)
      s.eavesdroppers.push_back(
          parse_node((*eaves)[i], idx(p, i), GroundNode{Vec3::Zero(), NodeRole::Eavesdropper, 0.0}, false));
  }
  if (const json* p = o.get("comm_pattern")) s.comm_pattern = parse_pattern(*p, o.at("comm_pattern"), s.comm_pattern);
  if (const json* p = o.get("jam_pattern")) s.jam_pattern = parse_pattern(*p, o.at("jam_pattern"), s.jam_pattern);
  if (const json* b = o.get("comm_box")) s.comm_box = parse_box(*b, o.at("comm_box"), s.comm_box);
  if (const json* b = o.get("jam_box")) s.jam_box = parse_box(*b, o.at("jam_box"), s.jam_box);
  o.finish();
}

json dump_scenario_b(const ScenarioB& s) {
  json eaves = json::array();
  for (const GroundNode& e : s.eavesdroppers) eaves.push_back(dump_node(e, false));
  return {{"legit_user", dump_node(s.legit_user, false)},
          {"eavesdroppers", eaves},
          {"comm_pattern", dump_pattern(s.comm_pattern)},
          {"jam_pattern", dump_pattern(s.jam_pattern)},
          {"comm_box", dump_box(s.comm_box)},
          {"jam_box", dump_box(s.jam_box)}};
}

// Sweep-dependent scenario fields follow the first grid point.
void sync_sweep(ExperimentConfig& c) {
  if (c.sweep_dbm.empty()) return;
  c.scenario_a.jammer.tx_power_w = dbm_to_w(c.sweep_dbm.front());
  c.scenario_b.p_max_w = dbm_to_w(c.sweep_dbm.front());
}

void validate_config(ExperimentConfig& c) {
  c.optimizer.seed = c.seed;
  c.optimizer.validate();
  require(c.threads >= 1, "threads: must be >= 1");
  const bool is_sweep = c.experiment == ExperimentKind::SweepA || c.experiment == ExperimentKind::SweepB;
  if (is_sweep) {
    require(!c.sweep_dbm.empty(), "sweep: grid must be non-empty");
    for (std::size_t i = 1; i < c.sweep_dbm.size(); ++i)
      require(c.sweep_dbm[i] > c.sweep_dbm[i - 1], "sweep: grid must be strictly increasing");
    for (double v : c.sweep_dbm) require(std::isfinite(v), "sweep: values must be finite");
  }
  sync_sweep(c);
  if (c.experiment == ExperimentKind::SweepA) c.scenario_a.validate();
  if (c.experiment == ExperimentKind::SweepB) c.scenario_b.validate();
  if (c.experiment == ExperimentKind::Classify) {
    require(!c.rotor_configs.empty(), "rotor_configs: must be non-empty");
    require(c.orientation_samples >= 10, "orientation_samples: must be >= 10");
    for (const RotorConfig& rc : c.rotor_configs) rc.validate();
  }
  if (c.experiment == ExperimentKind::TiltSweep) {
    c.tilt_template.validate();
    require(c.alpha_lo_rad < c.alpha_hi_rad, "tilt.alpha: range must be increasing");
    require(c.tilt_steps >= 2, "tilt.steps: must be >= 2");
    require(c.orientation_samples >= 1, "orientation_samples: must be >= 1");
  }
}

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::SweepA: return "sweep_a";
    case ExperimentKind::SweepB: return "sweep_b";
    case ExperimentKind::Classify: return "classify";
    case ExperimentKind::TiltSweep: return "tilt_sweep";
  }
  return "?";
}

std::string_view to_string(OutputFormat f) noexcept {
  return f == OutputFormat::Csv ? "csv" : "json";
}

ScenarioA default_scenario_a() {
  ScenarioA s;
  s.users = {GroundNode{Vec3(-50, 0, 0), NodeRole::User, dbm_to_w(20.0)},
             GroundNode{Vec3(50, 0, 0), NodeRole::User, dbm_to_w(20.0)}};
  s.jammer = GroundNode{Vec3(0, 80, 0), NodeRole::Jammer, 0.0};
  s.box = SearchBox{-100, 100, -100, 100, 10, 120};
  return s;
}

ScenarioB default_scenario_b() {
  ScenarioB s;
  s.legit_user = GroundNode{Vec3(0, 0, 0), NodeRole::User, 0.0};
  s.eavesdroppers = {GroundNode{Vec3(40, 30, 0), NodeRole::Eavesdropper, 0.0},
                     GroundNode{Vec3(-35, 45, 0), NodeRole::Eavesdropper, 0.0}};
  s.comm_box = SearchBox{-100, 100, -100, 100, 10, 120};
  s.jam_box = s.comm_box;
  return s;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.scenario_a = default_scenario_a();
  c.scenario_b = default_scenario_b();
  c.sweep_dbm = default_sweep(kind);
  if (kind == ExperimentKind::Classify) c.rotor_configs = {planar_quad(), tilted_cube(35.0 * kDeg)};
  RotorConfig tmpl = tilted_cube(0.0);
  tmpl.name = "tilted_cube";
  c.tilt_template = tmpl;
  c.alpha_lo_rad = 0.0;
  c.alpha_hi_rad = 90.0 * kDeg;
  c.tilt_steps = 19;
  sync_sweep(c);
  return c;
}

ExperimentConfig parse_config(std::string_view document, std::optional<ExperimentKind> expected) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("<document>: ") + e.what());
  }
  Obj o(j, "");
  std::optional<ExperimentKind> kind;
  if (const json* e = o.get("experiment")) {
    if (!e->is_string()) parse_fail("experiment", "expected a string");
    kind = experiment_from_string(e->get<std::string>(), "experiment");
  }
  if (kind && expected && *kind != *expected)
    throw Error(ErrorKind::ValidationError,
                "experiment: document says " + std::string(to_string(*kind)) + " but " +
                    std::string(to_string(*expected)) + " was requested");
  if (!kind) kind = expected;
  if (!kind) parse_fail("experiment", "missing");

  ExperimentConfig c = default_config(*kind);
  if (const json* s = o.get("seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0))
      parse_fail("seed", "expected a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  c.output = o.string("output", c.output);
  const std::string fmt = o.string("format", "csv");
  if (fmt == "csv") c.format = OutputFormat::Csv;
  else if (fmt == "json") c.format = OutputFormat::Json;
  else parse_fail("format", "expected csv or json");
  c.threads = static_cast<int>(o.integer("threads", c.threads));

  if (const json* r = o.get("radio")) {
    c.scenario_a.radio = parse_radio(*r, "radio");
    c.scenario_b.radio = c.scenario_a.radio;
  }
  if (const json* p = o.get("optimizer")) c.optimizer = parse_optimizer(*p, "optimizer");
  if (const json* s = o.get("scenario_a")) parse_scenario_a(*s, "scenario_a", c.scenario_a);
  if (const json* s = o.get("scenario_b")) parse_scenario_b(*s, "scenario_b", c.scenario_b);
  if (const json* s = o.get("sweep")) {
    Obj so(*s, "sweep");
    if (const json* v = so.get("values_dbm")) c.sweep_dbm = numbers(*v, "sweep.values_dbm");
    so.finish();
  }
  if (const json* rc = o.get("rotor_configs")) {
    if (!rc->is_array()) parse_fail("rotor_configs", "expected an array");
    c.rotor_configs.clear();
    for (std::size_t i = 0; i < rc->size(); ++i)
      c.rotor_configs.push_back(parse_rotor_config((*rc)[i], idx("rotor_configs", i)));
  }
  c.orientation_samples = static_cast<int>(o.integer("orientation_samples", c.orientation_samples));
  if (const json* t = o.get("tilt")) {
    Obj to(*t, "tilt");
    if (const json* tm = to.get("template")) c.tilt_template = parse_rotor_config(*tm, "tilt.template");
    c.alpha_lo_rad = to.either("alpha_lo_rad", ident, "alpha_lo_deg", deg, c.alpha_lo_rad);
    c.alpha_hi_rad = to.either("alpha_hi_rad", ident, "alpha_hi_deg", deg, c.alpha_hi_rad);
    c.tilt_steps = static_cast<int>(to.integer("steps", c.tilt_steps));
    to.finish();
  }
  o.finish();
  validate_config(c);
  return c;
}

namespace {

json canonical(const ExperimentConfig& c, bool with_io) {
  json rc = json::array();
  for (const RotorConfig& r : c.rotor_configs) rc.push_back(dump_rotor_config(r));
  json j = {{"experiment", std::string(to_string(c.experiment))},
            {"seed", c.seed},
            {"radio", dump_radio(c.scenario_a.radio)},
            {"optimizer", dump_optimizer(c.optimizer)},
            {"scenario_a", dump_scenario_a(c.scenario_a)},
            {"scenario_b", dump_scenario_b(c.scenario_b)},
            {"sweep", {{"values_dbm", c.sweep_dbm}}},
            {"rotor_configs", rc},
            {"orientation_samples", c.orientation_samples},
            {"tilt",
             {{"template", dump_rotor_config(c.tilt_template)},
              {"alpha_lo_rad", c.alpha_lo_rad},
              {"alpha_hi_rad", c.alpha_hi_rad},
              {"steps", c.tilt_steps}}}};
  if (with_io) {
    j["output"] = c.output;
    j["format"] = std::string(to_string(c.format));
    j["threads"] = c.threads;
  }
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) { return canonical(c, true).dump(2) + "\n"; }

std::uint64_t config_digest(const ExperimentConfig& c) {
  const std::string text = canonical(c, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ScenarioA scenario_a_at(const ExperimentConfig& c, double jammer_dbm) {
  ScenarioA s = c.scenario_a;
  s.jammer.tx_power_w = dbm_to_w(jammer_dbm);
  return s;
}

ScenarioB scenario_b_at(const ExperimentConfig& c, double p_max_dbm) {
  ScenarioB s = c.scenario_b;
  s.p_max_w = dbm_to_w(p_max_dbm);
  return s;
}

namespace {

// Runs job(i) for i in [0, n) on `threads` workers; results land by index.
template <class T, class Job>
std::vector<T> parallel_map(std::size_t n, int threads, Job job) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t width = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_kind(const ExperimentConfig& c, ExperimentKind k) {
  if (c.experiment != k)
    throw Error(ErrorKind::ValidationError,
                "experiment: expected " + std::string(to_string(k)) + ", got " +
                    std::string(to_string(c.experiment)));
}

}  // namespace

std::vector<SweepRow> run_sweep_a(const ExperimentConfig& c) {
  require_kind(c, ExperimentKind::SweepA);
  OptimizerParams params = c.optimizer;
  params.seed = c.seed;
  auto points = parallel_map<std::vector<SweepRow>>(c.sweep_dbm.size(), c.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto outcomes = optimize_all_strategies_a(scenario_a_at(c, c.sweep_dbm[i]), params);
    const double wall = seconds_since(t0);
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < kAllStrategies.size(); ++k)
      rows.push_back({i, c.sweep_dbm[i], std::string(to_string(kAllStrategies[k])), outcomes[k], wall});
    return rows;
  });
  std::vector<SweepRow> rows;
  for (auto& p : points) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::vector<SweepRow> run_sweep_b(const ExperimentConfig& c) {
  require_kind(c, ExperimentKind::SweepB);
  OptimizerParams params = c.optimizer;
  params.seed = c.seed;
  auto points = parallel_map<std::vector<SweepRow>>(c.sweep_dbm.size(), c.threads, [&](std::size_t i) {
    const ScenarioB s = scenario_b_at(c, c.sweep_dbm[i]);
    std::vector<SweepRow> rows;
    for (SecrecyMethod m : kAllSecrecyMethods) {
      const auto t0 = std::chrono::steady_clock::now();
      StrategyOutcome o = optimize_scenario_b(s, m, params);
      rows.push_back({i, c.sweep_dbm[i], std::string(to_string(m)), std::move(o), seconds_since(t0)});
    }
    return rows;
  });
  std::vector<SweepRow> rows;
  for (auto& p : points) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::vector<CapabilityReport> run_classify(const ExperimentConfig& c) {
  require_kind(c, ExperimentKind::Classify);
  return parallel_map<CapabilityReport>(c.rotor_configs.size(), c.threads, [&](std::size_t i) {
    return classify(c.rotor_configs[i], c.orientation_samples, c.seed);
  });
}

TiltSweepResult run_tilt_sweep(const ExperimentConfig& c) {
  require_kind(c, ExperimentKind::TiltSweep);
  return tilt_sweep(c.tilt_template, c.alpha_lo_rad, c.alpha_hi_rad, c.tilt_steps,
                    c.orientation_samples, c.seed);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

void write_metadata(std::ostream& os, const ExperimentConfig& c) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(config_digest(c)));
  os << "# tool=omrav " << kToolVersion << "\n"
     << "# experiment=" << to_string(c.experiment) << "\n"
     << "# seed=" << c.seed << "\n"
     << "# config_digest=" << digest << "\n";
  if (c.experiment == ExperimentKind::SweepB)
    os << "# joint_local=single-start joint pattern search (stand-in for a local NLP solver)\n";
}

json meta_json(const ExperimentConfig& c) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(config_digest(c)));
  return {{"tool", "omrav " + std::string(kToolVersion)},
          {"experiment", std::string(to_string(c.experiment))},
          {"seed", c.seed},
          {"config_digest", digest}};
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << "\n";
}

void write_json_row(std::ostream& os, const std::vector<std::string>& keys,
                    const std::vector<std::string>& cells, const std::vector<bool>& quoted) {
  os << "{";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    os << (i ? "," : "") << json(keys[i]).dump() << ":";
    os << (quoted[i] ? json(cells[i]).dump() : cells[i]);
  }
  os << "}\n";
}

struct Table {
  std::vector<std::string> header;
  std::vector<bool> quoted;  // string-valued columns
  std::vector<std::vector<std::string>> rows;
};

void emit(std::ostream& os, const ExperimentConfig& c, const Table& t,
          const std::vector<std::string>& trailer_meta = {}) {
  if (c.format == OutputFormat::Csv) {
    write_metadata(os, c);
    for (const auto& m : trailer_meta) os << "# " << m << "\n";
    write_csv_row(os, t.header);
    for (const auto& r : t.rows) write_csv_row(os, r);
    return;
  }
  json meta = meta_json(c);
  for (const auto& m : trailer_meta) {
    const auto eq = m.find('=');
    meta[m.substr(0, eq)] = m.substr(eq + 1);
  }
  os << json{{"meta", meta}}.dump() << "\n";
  for (const auto& r : t.rows) {
    // Floats keep the CSV text; non-finite or absent values become null.
    std::vector<std::string> cells = r;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (!t.quoted[i] && (cells[i] == "nan" || cells[i] == "inf" || cells[i] == "-inf" || cells[i].empty()))
        cells[i] = "null";
    write_json_row(os, t.header, cells, t.quoted);
  }
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

}  // namespace

void write_sweep(std::ostream& os, const ExperimentConfig& c, const std::vector<SweepRow>& rows,
                 const EmitOptions& opts) {
  Table t;
  const bool a = c.experiment == ExperimentKind::SweepA;
  if (a) {
    t.header = {"jammer_power_dbm", "strategy", "min_sinr_db", "x_m", "y_m", "z_m",
                "axis_x", "axis_y", "axis_z", "evaluations", "budget_exhausted"};
  } else {
    t.header = {"p_max_dbm", "method", "secrecy_bps_hz", "comm_x_m", "comm_y_m", "comm_z_m",
                "comm_axis_x", "comm_axis_y", "comm_axis_z", "jam_x_m", "jam_y_m", "jam_z_m",
                "jam_axis_x", "jam_axis_y", "jam_axis_z", "p_comm_w", "p_jam_w", "evaluations",
                "budget_exhausted"};
  }
  if (opts.timing) t.header.push_back("wall_time_s");
  t.quoted.assign(t.header.size(), false);
  t.quoted[1] = true;
  for (const SweepRow& r : rows) {
    std::vector<std::string> cells = {format_real(r.sweep_dbm), r.label, format_real(r.outcome.objective)};
    for (const Pose& p : r.outcome.poses) {
      for (int k = 0; k < 3; ++k) cells.push_back(format_real(p.position[k]));
      const Vec3 axis = p.antenna_axis().vec();
      for (int k = 0; k < 3; ++k) cells.push_back(format_real(axis[k]));
    }
    if (!a)
      for (double w : r.outcome.powers_w) cells.push_back(format_real(w));
    cells.push_back(std::to_string(r.outcome.evaluations));
    cells.push_back(r.outcome.budget_exhausted ? "1" : "0");
    if (opts.timing) cells.push_back(format_real(r.wall_time_s));
    t.rows.push_back(std::move(cells));
  }
  emit(os, c, t);
}

void write_classify(std::ostream& os, const ExperimentConfig& c,
                    const std::vector<CapabilityReport>& reports) {
  Table t;
  t.header = {"config", "static_hover", "omnidirectional_hover", "worst_margin",
              "single_failure_hover", "mean_efficiency", "orientation_samples"};
  t.quoted = {true, false, false, false, true, false, false};
  for (const CapabilityReport& r : reports) {
    std::string failures;
    for (bool ok : r.per_rotor_failure_hover) failures += ok ? '1' : '0';
    t.rows.push_back({r.name, r.static_hover ? "1" : "0", r.omnidirectional_hover ? "1" : "0",
                      opt_real(r.worst_margin), failures, opt_real(r.mean_efficiency),
                      std::to_string(r.orientation_samples)});
  }
  emit(os, c, t);
}

void write_tilt_sweep(std::ostream& os, const ExperimentConfig& c, const TiltSweepResult& r) {
  Table t;
  t.header = {"alpha_rad", "alpha_deg", "feasible", "worst_margin"};
  t.quoted.assign(t.header.size(), false);
  for (const TiltPoint& p : r.curve)
    t.rows.push_back({format_real(p.alpha_rad), format_real(p.alpha_rad / kDeg),
                      p.worst_margin ? "1" : "0", opt_real(p.worst_margin)});
  std::vector<std::string> extra = {"best_alpha_rad=" + opt_real(r.best_alpha_rad)};
  emit(os, c, t, extra);
}

void run_experiment(std::ostream& os, const ExperimentConfig& c, const EmitOptions& opts) {
  switch (c.experiment) {
    case ExperimentKind::SweepA: write_sweep(os, c, run_sweep_a(c), opts); break;
    case ExperimentKind::SweepB: write_sweep(os, c, run_sweep_b(c), opts); break;
    case ExperimentKind::Classify: write_classify(os, c, run_classify(c)); break;
    case ExperimentKind::TiltSweep: write_tilt_sweep(os, c, run_tilt_sweep(c)); break;
  }
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::ParseError, "csv: bad number '" + s + "'");
  return v;
}

Pose pose_from(const std::vector<std::string>& cells, std::size_t at) {
  const Vec3 pos(real(cells[at]), real(cells[at + 1]), real(cells[at + 2]));
  const Vec3 axis(real(cells[at + 3]), real(cells[at + 4]), real(cells[at + 5]));
  return Pose{pos, Rotation::aligning_z_to(unit(axis))};
}

}  // namespace

std::vector<double> reevaluation_errors(const ExperimentConfig& c, std::string_view csv) {
  const bool a = c.experiment == ExperimentKind::SweepA;
  if (!a) require_kind(c, ExperimentKind::SweepB);
  std::vector<double> errors;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == csv.npos) end = csv.size();
    const std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto cells = split_csv(line);
    const double sweep = real(cells[0]);
    const double stored = real(cells[2]);
    double recomputed = 0.0;
    if (a) {
      recomputed = min_sinr_objective(scenario_a_at(c, sweep), pose_from(cells, 3));
    } else {
      recomputed = secrecy_objective(scenario_b_at(c, sweep), pose_from(cells, 3), pose_from(cells, 9),
                                     real(cells[15]), real(cells[16]));
    }
    errors.push_back(std::abs(stored - recomputed));
  }
  return errors;
}

}  // namespace omrav
