#include "omrav/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "omrav/error.hpp"
#include "omrav/random.hpp"

namespace omrav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double step_init(const OptimizerParams& p, DimKind k) {
  switch (k) {
    case DimKind::Length: return p.step_init_m;
    case DimKind::Angle: return p.step_init_rad;
    case DimKind::Fraction: return p.step_init_frac;
  }
  return p.step_init_m;
}

double step_tol(const OptimizerParams& p, DimKind k) {
  switch (k) {
    case DimKind::Length: return p.step_tol_m;
    case DimKind::Angle: return p.step_tol_rad;
    case DimKind::Fraction: return p.step_tol_frac;
  }
  return p.step_tol_m;
}

std::vector<double> grid_nodes(const Dimension& d, const OptimizerParams& p) {
  std::vector<double> nodes;
  const double span = d.hi - d.lo;
  if (d.periodic) {
    const int n = d.kind == DimKind::Angle ? p.axis_resolution : p.grid_resolution;
    for (int j = 0; j < n; ++j) nodes.push_back(d.lo + span * j / n);
  } else if (d.kind == DimKind::Angle) {
    const int n = p.axis_resolution;
    for (int j = 0; j < n; ++j) nodes.push_back(d.lo + span * (j + 0.5) / n);
  } else {
    const int n = p.grid_resolution;
    for (int j = 0; j < n; ++j) nodes.push_back(j + 1 == n ? d.hi : d.lo + span * j / (n - 1));
  }
  return nodes;
}

// Objective wrapper: geometric failures (coincident points, links shorter
// than the minimum distance) score as -inf rather than aborting the search.
template <typename F>
double guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CoincidentPoints || e.kind() == ErrorKind::BelowMinDistance)
      return kNegInf;
    throw;
  }
}

Dimension length_dim(std::string name, double lo, double hi) {
  return Dimension{std::move(name), lo, hi, DimKind::Length, false};
}

void push_position(SearchSpace& sp, const SearchBox& b, const std::string& prefix) {
  sp.dims.push_back(length_dim(prefix + "x", b.x_min, b.x_max));
  sp.dims.push_back(length_dim(prefix + "y", b.y_min, b.y_max));
  sp.dims.push_back(length_dim(prefix + "z", b.z_min, b.z_max));
}

void push_axis(SearchSpace& sp, const RadiationPattern& pattern, const std::string& prefix) {
  // Mirror-symmetric patterns only need the upper hemisphere.
  const double polar_hi = pattern.is_mirror_symmetric() ? 0.5 * kPi : kPi;
  sp.dims.push_back(Dimension{prefix + "polar", 0.0, polar_hi, DimKind::Angle, false});
  sp.dims.push_back(Dimension{prefix + "azimuth", 0.0, 2.0 * kPi, DimKind::Angle, true});
}

void push_power(SearchSpace& sp, const std::string& name) {
  sp.dims.push_back(Dimension{name, 0.0, 1.0, DimKind::Fraction, false});
}

Vec3 position_at(std::span<const double> x, std::size_t offset) {
  return {x[offset], x[offset + 1], x[offset + 2]};
}

void append_axis_angles(std::vector<double>& x, const UnitVec3& axis, bool hemisphere) {
  Vec3 a = axis.vec();
  if (hemisphere) a = canonical_sign(a);
  const double polar = std::acos(std::clamp(a.z(), -1.0, 1.0));
  double az = std::atan2(a.y(), a.x());
  if (az < 0.0) az += 2.0 * kPi;
  if (az >= 2.0 * kPi) az = 0.0;
  x.push_back(polar);
  x.push_back(az);
}

}  // namespace

// ---------------------------------------------------------------------------

bool SearchSpace::contains(std::span<const double> x) const noexcept {
  if (x.size() != dims.size()) return false;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    if (!std::isfinite(x[i])) return false;
    if (d.periodic ? (x[i] < d.lo || x[i] >= d.hi) : (x[i] < d.lo || x[i] > d.hi)) return false;
  }
  return true;
}

void SearchSpace::project(std::span<double> x) const noexcept {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    if (d.periodic) {
      const double span = d.hi - d.lo;
      double v = std::fmod(x[i] - d.lo, span);
      if (v < 0.0) v += span;
      x[i] = d.lo + v;
      if (x[i] >= d.hi) x[i] = d.lo;
    } else {
      x[i] = std::clamp(x[i], d.lo, d.hi);
    }
  }
}

std::vector<double> SearchSpace::sample(Rng& rng) const {
  std::vector<double> x(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) x[i] = rng.uniform(dims[i].lo, dims[i].hi);
  project(x);
  return x;
}

void OptimizerParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::ValidationError, what);
  };
  require(grid_resolution >= 3, "grid_resolution: must be >= 3");
  require(axis_resolution >= 3, "axis_resolution: must be >= 3");
  require(starts >= 1, "starts: must be >= 1");
  require(step_init_m > 0.0 && step_init_rad > 0.0 && step_init_frac > 0.0,
          "step_init: must be positive");
  require(step_tol_m > 0.0 && step_tol_rad > 0.0 && step_tol_frac > 0.0,
          "step_tol: must be positive");
  require(max_evals > 0, "max_evals: must be positive");
}

SearchResult grid_search(const Objective& objective, const SearchSpace& space,
                         const OptimizerParams& params) {
  std::vector<std::vector<double>> nodes;
  double total = 1.0;
  for (const auto& d : space.dims) {
    nodes.push_back(grid_nodes(d, params));
    total *= static_cast<double>(nodes.back().size());
  }
  if (total > static_cast<double>(params.max_evals))
    throw Error(ErrorKind::BudgetExceeded, "grid has more points than max_evals");

  SearchResult best;
  best.value = kNegInf;
  std::vector<std::size_t> idx(space.size(), 0);
  std::vector<double> x(space.size());
  bool first = true;
  while (true) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = nodes[i][idx[i]];
    const double v = objective(x);
    ++best.evaluations;
    if (first || v > best.value) {
      best.value = v;
      best.x = x;
      first = false;
    }
    // odometer, last dimension fastest
    std::size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < nodes[k].size()) break;
      idx[k] = 0;
      if (k == 0) return best;
    }
    if (idx.empty()) return best;
  }
}

SearchResult pattern_search(const Objective& objective, std::span<const double> start,
                            const SearchSpace& space, const OptimizerParams& params,
                            std::size_t budget) {
  if (!space.contains(start)) throw Error(ErrorKind::DomainError, "start outside search space");
  const std::size_t n = space.size();
  std::vector<double> steps(n), tols(n);
  for (std::size_t i = 0; i < n; ++i) {
    steps[i] = step_init(params, space.dims[i].kind);
    tols[i] = step_tol(params, space.dims[i].kind);
  }

  SearchResult r;
  r.x.assign(start.begin(), start.end());
  r.value = objective(r.x);
  r.evaluations = 1;
  std::vector<double> trial(n);

  auto converged = [&] {
    for (std::size_t i = 0; i < n; ++i)
      if (steps[i] >= tols[i]) return false;
    return true;
  };

  // Each coordinate keeps its own step: doubled after a successful poll
  // (capped at the dimension span), halved after both directions fail.
  std::vector<double> caps(n);
  for (std::size_t i = 0; i < n; ++i)
    caps[i] = std::max(steps[i], space.dims[i].hi - space.dims[i].lo);

  while (!converged()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (steps[i] < tols[i]) continue;
      bool moved = false;
      for (double sign : {1.0, -1.0}) {
        if (r.evaluations >= budget) {
          r.budget_exhausted = true;
          r.history.push_back(r.value);
          return r;
        }
        trial = r.x;
        trial[i] += sign * steps[i];
        space.project(trial);
        if (trial[i] == r.x[i]) continue;
        const double v = objective(trial);
        ++r.evaluations;
        if (v > r.value) {
          r.x = trial;
          r.value = v;
          moved = true;
          break;
        }
      }
      steps[i] = moved ? std::min(2.0 * steps[i], caps[i]) : 0.5 * steps[i];
    }
    r.history.push_back(r.value);
  }
  return r;
}

SearchResult multi_start(const Objective& objective, const SearchSpace& space,
                         const OptimizerParams& params,
                         std::span<const std::vector<double>> extra_starts) {
  if (params.starts < 1) throw Error(ErrorKind::ValidationError, "starts: must be >= 1");
  std::vector<std::vector<double>> starts;
  Rng rng(params.seed);
  for (int k = 0; k < params.starts; ++k) starts.push_back(space.sample(rng));
  for (const auto& s : extra_starts) {
    std::vector<double> x = s;
    space.project(x);
    starts.push_back(std::move(x));
  }
  const std::size_t per_start = std::max<std::size_t>(1, params.max_evals / starts.size());

  SearchResult best;
  std::size_t total = 0;
  bool exhausted = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    SearchResult r = pattern_search(objective, starts[k], space, params, per_start);
    total += r.evaluations;
    exhausted = exhausted || r.budget_exhausted;
    if (k == 0 || r.value > best.value) best = std::move(r);
  }
  best.evaluations = total;
  best.budget_exhausted = exhausted;
  return best;
}

UnitVec3 axis_from_angles(double polar, double azimuth) {
  const double s = std::sin(polar);
  return UnitVec3::from_unit(Vec3(s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)));
}

// ---------------------------------------------------------------------------
// Scenario A

SearchSpace scenario_a_space(const ScenarioA& s, Strategy strategy) {
  SearchSpace sp;
  push_position(sp, s.box, "");
  if (strategy == Strategy::OptimumPose) push_axis(sp, s.uav_pattern, "axis_");
  return sp;
}

Pose decode_scenario_a(const ScenarioA& s, Strategy strategy, std::span<const double> x) {
  Pose pose;
  pose.position = position_at(x, 0);
  if (strategy == Strategy::OptimumPose)
    pose.orientation = Rotation::aligning_z_to(axis_from_angles(x[3], x[4]));
  else
    pose.orientation = orient_for(strategy, s, pose.position);
  return pose;
}

StrategyOutcome outcome_from_search_a(const ScenarioA& s, Strategy strategy,
                                      const SearchResult& r) {
  StrategyOutcome o;
  o.poses.push_back(decode_scenario_a(s, strategy, r.x));
  o.objective = r.value;
  o.evaluations = r.evaluations;
  o.budget_exhausted = r.budget_exhausted;
  return o;
}

namespace {

Objective scenario_a_objective(const ScenarioA& s, Strategy strategy) {
  return [&s, strategy](std::span<const double> x) {
    return guarded([&] { return min_sinr_objective(s, decode_scenario_a(s, strategy, x)); });
  };
}

StrategyOutcome optimize_a_with_warm(const ScenarioA& s, Strategy strategy,
                                     const OptimizerParams& params,
                                     std::span<const StrategyOutcome> warm) {
  const SearchSpace space = scenario_a_space(s, strategy);
  std::vector<std::vector<double>> extra;
  for (const auto& w : warm) {
    const Pose& p = w.poses.front();
    std::vector<double> x{p.position.x(), p.position.y(), p.position.z()};
    append_axis_angles(x, p.antenna_axis(), s.uav_pattern.is_mirror_symmetric());
    extra.push_back(std::move(x));
  }
  const SearchResult r = multi_start(scenario_a_objective(s, strategy), space, params, extra);
  return outcome_from_search_a(s, strategy, r);
}

}  // namespace

std::array<StrategyOutcome, 4> optimize_all_strategies_a(const ScenarioA& s,
                                                         const OptimizerParams& params) {
  s.validate();
  params.validate();
  std::array<StrategyOutcome, 4> out;
  std::vector<StrategyOutcome> rules;
  for (std::size_t i = 1; i < kAllStrategies.size(); ++i) {
    out[i] = optimize_a_with_warm(s, kAllStrategies[i], params, {});
    rules.push_back(out[i]);
  }
  out[0] = optimize_a_with_warm(s, Strategy::OptimumPose, params, rules);
  return out;
}

StrategyOutcome optimize_scenario_a(const ScenarioA& s, Strategy strategy,
                                    const OptimizerParams& params) {
  if (strategy == Strategy::OptimumPose) return optimize_all_strategies_a(s, params)[0];
  s.validate();
  params.validate();
  return optimize_a_with_warm(s, strategy, params, {});
}

StrategyOutcome grid_scenario_a(const ScenarioA& s, Strategy strategy,
                                const OptimizerParams& params) {
  s.validate();
  params.validate();
  const SearchResult r =
      grid_search(scenario_a_objective(s, strategy), scenario_a_space(s, strategy), params);
  return outcome_from_search_a(s, strategy, r);
}

// ---------------------------------------------------------------------------
// Scenario B

std::string_view to_string(SecrecyMethod m) noexcept {
  switch (m) {
    case SecrecyMethod::Proposed: return "proposed";
    case SecrecyMethod::JointLocal: return "joint_local";
    case SecrecyMethod::FixedVertical: return "fixed_vertical";
  }
  return "unknown";
}

double evaluate_outcome_b(const ScenarioB& s, const StrategyOutcome& o) {
  return secrecy_objective(s, o.poses.at(0), o.poses.at(1), o.powers_w.at(0), o.powers_w.at(1));
}

std::pair<double, double> bracketed_golden_max(const std::function<double(double)>& f, double lo,
                                               double hi, int scan_nodes, double tol,
                                               std::size_t& evaluations) {
  scan_nodes = std::max(scan_nodes, 3);
  std::vector<double> xs(scan_nodes), fs(scan_nodes);
  std::size_t best = 0;
  for (int k = 0; k < scan_nodes; ++k) {
    xs[k] = k + 1 == scan_nodes ? hi : lo + (hi - lo) * k / (scan_nodes - 1);
    fs[k] = f(xs[k]);
    ++evaluations;
    if (fs[k] > fs[best]) best = k;
  }
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[std::min<std::size_t>(best + 1, scan_nodes - 1)];
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  evaluations += 2;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  std::pair<double, double> out{xs[best], fs[best]};
  if (fc > out.second) out = {c, fc};
  if (fd > out.second) out = {d, fd};
  return out;
}

namespace {

struct BLayout {
  SearchSpace space;
  bool free_axes = false;
  bool free_powers = false;
};

BLayout scenario_b_layout(const ScenarioB& s, SecrecyMethod m) {
  BLayout l;
  l.free_axes = m == SecrecyMethod::JointLocal;
  l.free_powers = m != SecrecyMethod::Proposed;
  push_position(l.space, s.comm_box, "comm_");
  if (l.free_axes) push_axis(l.space, s.comm_pattern, "comm_axis_");
  push_position(l.space, s.jam_box, "jam_");
  if (l.free_axes) push_axis(l.space, s.jam_pattern, "jam_axis_");
  if (l.free_powers) {
    push_power(l.space, "comm_power_frac");
    push_power(l.space, "jam_power_frac");
  }
  return l;
}

// Decodes a search vector; `powers` supplies the fractions when the layout
// does not search them.
StrategyOutcome decode_b(const ScenarioB& s, SecrecyMethod m, const BLayout& l,
                         std::span<const double> x, double comm_frac, double jam_frac) {
  StrategyOutcome o;
  std::size_t k = 0;
  Pose comm, jam;
  comm.position = position_at(x, k);
  k += 3;
  if (l.free_axes) {
    comm.orientation = Rotation::aligning_z_to(axis_from_angles(x[k], x[k + 1]));
    k += 2;
  }
  jam.position = position_at(x, k);
  k += 3;
  if (l.free_axes) {
    jam.orientation = Rotation::aligning_z_to(axis_from_angles(x[k], x[k + 1]));
    k += 2;
  }
  if (l.free_powers) {
    comm_frac = x[k];
    jam_frac = x[k + 1];
  }
  if (m == SecrecyMethod::Proposed) {
    auto [rc, rj] = proposed_orientation_rule(s, comm.position, jam.position);
    comm.orientation = rc;
    jam.orientation = rj;
  } else if (m == SecrecyMethod::FixedVertical) {
    comm.orientation = orient_vertical();
    jam.orientation = orient_vertical();
  }
  o.poses = {comm, jam};
  o.powers_w = {comm_frac * s.p_max_w, jam_frac * s.p_max_w};
  return o;
}

double score(const ScenarioB& s, const StrategyOutcome& o) {
  return guarded([&] { return evaluate_outcome_b(s, o); });
}

StrategyOutcome finish(const ScenarioB& s, StrategyOutcome o, std::size_t evals, bool exhausted) {
  o.objective = score(s, o);
  o.evaluations = evals;
  o.budget_exhausted = exhausted;
  return o;
}

StrategyOutcome optimize_proposed(const ScenarioB& s, const OptimizerParams& params) {
  const BLayout l = scenario_b_layout(s, SecrecyMethod::Proposed);
  double fc = 1.0, fj = 1.0;
  auto objective = [&](std::span<const double> x) {
    return score(s, decode_b(s, SecrecyMethod::Proposed, l, x, fc, fj));
  };

  OptimizerParams first = params;
  first.max_evals = std::max<std::size_t>(1, params.max_evals / 2);
  SearchResult r = multi_start(objective, l.space, first, {});
  std::size_t evals = r.evaluations;
  bool exhausted = r.budget_exhausted;
  double current = r.value;

  constexpr double kImprovement = 1e-6;
  constexpr int kMaxRounds = 8;
  for (int round = 0; round < kMaxRounds; ++round) {
    const double round_start = current;
    // Cyclic coordinate ascent over the two power fractions.
    while (true) {
      const double before = current;
      for (double* frac : {&fc, &fj}) {
        const double keep = *frac;
        auto f1 = [&](double u) {
          *frac = u;
          return objective(r.x);
        };
        auto [u, v] = bracketed_golden_max(f1, 0.0, 1.0, 21, 1e-10, evals);
        *frac = v > current ? u : keep;
        if (v > current) current = v;
      }
      if (current - before < kImprovement) break;
    }
    // Re-polish positions at the new powers.
    const std::size_t remaining = params.max_evals > evals ? params.max_evals - evals : 0;
    if (remaining == 0) {
      exhausted = true;
      break;
    }
    SearchResult polish = pattern_search(objective, r.x, l.space, params, remaining);
    evals += polish.evaluations;
    exhausted = exhausted || polish.budget_exhausted;
    if (polish.value > current) {
      r = std::move(polish);
      current = r.value;
    }
    if (current - round_start < kImprovement) break;
  }
  return finish(s, decode_b(s, SecrecyMethod::Proposed, l, r.x, fc, fj), evals, exhausted);
}

}  // namespace

StrategyOutcome optimize_scenario_b(const ScenarioB& s, SecrecyMethod method,
                                    const OptimizerParams& params) {
  s.validate();
  params.validate();
  if (method == SecrecyMethod::Proposed) return optimize_proposed(s, params);

  const BLayout l = scenario_b_layout(s, method);
  auto objective = [&](std::span<const double> x) {
    return score(s, decode_b(s, method, l, x, 0.0, 0.0));
  };
  SearchResult r;
  if (method == SecrecyMethod::JointLocal) {
    Rng rng(params.seed);
    const std::vector<double> start = l.space.sample(rng);
    r = pattern_search(objective, start, l.space, params, params.max_evals);
  } else {
    r = multi_start(objective, l.space, params, {});
  }
  return finish(s, decode_b(s, method, l, r.x, 0.0, 0.0), r.evaluations, r.budget_exhausted);
}

}  // namespace omrav
