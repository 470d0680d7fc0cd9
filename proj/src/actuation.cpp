#include "omrav/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "omrav/error.hpp"
#include "omrav/lp.hpp"
#include "omrav/random.hpp"

namespace omrav {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ValidationError, what);
}

// Normalization for the peak-thrust objective.
double thrust_scale(const Rotor& r) { return std::max(std::abs(r.f_lo_n), std::abs(r.f_hi_n)); }

// Least-norm correction of the equality residual using only rotors that are
// strictly inside their bounds; applied only if it keeps every bound.
void polish(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const std::vector<int>& active,
            const RotorConfig& c, Eigen::VectorXd& f) {
  const Eigen::VectorXd r = w - a * f;
  std::vector<int> free_cols;
  for (int k = 0; k < static_cast<int>(active.size()); ++k) {
    const Rotor& rot = c.rotors[active[k]];
    if (f(k) > rot.f_lo_n + 1e-9 && f(k) < rot.f_hi_n - 1e-9) free_cols.push_back(k);
  }
  if (free_cols.empty()) return;
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) sub.col(k) = a.col(free_cols[k]);
  const Eigen::VectorXd delta = sub.completeOrthogonalDecomposition().solve(r);
  Eigen::VectorXd candidate = f;
  for (std::size_t k = 0; k < free_cols.size(); ++k) candidate(free_cols[k]) += delta(k);
  for (int k = 0; k < static_cast<int>(active.size()); ++k) {
    const Rotor& rot = c.rotors[active[k]];
    if (candidate(k) < rot.f_lo_n || candidate(k) > rot.f_hi_n) return;
  }
  if ((w - a * candidate).norm() < r.norm()) f = candidate;
}

}  // namespace

void RotorConfig::validate() const {
  require(rotors.size() >= 3, "rotors: at least 3 required");
  require(mass_kg > 0.0 && std::isfinite(mass_kg), "mass: must be positive");
  for (std::size_t i = 0; i < rotors.size(); ++i) {
    const Rotor& r = rotors[i];
    const std::string at = "rotors[" + std::to_string(i) + "]";
    require(r.position_m.allFinite(), at + ".position: must be finite");
    require(std::abs(r.tilt_axis.norm() - 1.0) <= 1e-9, at + ".tilt_axis: must be unit");
    require(std::isfinite(r.tilt_angle_rad), at + ".tilt_angle: must be finite");
    require(r.spin == 1 || r.spin == -1, at + ".spin: must be +1 or -1");
    require(r.f_lo_n < r.f_hi_n, at + ".thrust_bounds: f_lo must be below f_hi");
    require(r.f_lo_n <= 0.0 && r.f_hi_n > 0.0, at + ".thrust_bounds: must bracket zero");
    require(std::isfinite(r.drag_coeff_m), at + ".drag_coeff: must be finite");
  }
}

Eigen::Matrix<double, 6, 1> Wrench::stacked() const {
  Eigen::Matrix<double, 6, 1> v;
  v << force_n, torque_nm;
  return v;
}

UnitVec3 thrust_direction(const Rotor& r) {
  const Vec3 u = Eigen::AngleAxisd(r.tilt_angle_rad, r.tilt_axis) * Vec3::UnitZ();
  return unit(u);
}

Eigen::MatrixXd allocation_matrix(const RotorConfig& c) {
  Eigen::MatrixXd a(6, static_cast<Eigen::Index>(c.rotors.size()));
  for (std::size_t i = 0; i < c.rotors.size(); ++i) {
    const Rotor& r = c.rotors[i];
    const Vec3 u = thrust_direction(r).vec();
    a.col(i).head<3>() = u;
    a.col(i).tail<3>() = r.position_m.cross(u) + r.spin * r.drag_coeff_m * u;
  }
  return a;
}

Wrench hover_wrench(const RotorConfig& c, const Rotation& orientation) {
  Wrench w;
  w.force_n = orientation.apply_inverse(Vec3(0.0, 0.0, c.mass_kg * kGravity));
  return w;
}

std::optional<HoverSolution> hover_thrusts(const RotorConfig& c, const Rotation& orientation,
                                           const std::vector<bool>& failed) {
  c.validate();
  const Eigen::MatrixXd full = allocation_matrix(c);
  const Eigen::VectorXd w = hover_wrench(c, orientation).stacked();

  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(c.rotors.size()); ++i)
    if (failed.empty() || !failed[i]) active.push_back(i);
  const int n = static_cast<int>(active.size());
  Eigen::MatrixXd a(6, n);
  for (int k = 0; k < n; ++k) a.col(k) = full.col(active[k]);

  // Variables [f_active ; t]; minimize t with |f_k| <= t * scale_k.
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(n + 1);
  lp.c(n) = 1.0;
  lp.a_eq = Eigen::MatrixXd::Zero(6, n + 1);
  lp.a_eq.leftCols(n) = a;
  lp.b_eq = w;
  lp.a_ub = Eigen::MatrixXd::Zero(2 * n, n + 1);
  lp.b_ub = Eigen::VectorXd::Zero(2 * n);
  lp.lower.resize(n + 1);
  lp.upper.resize(n + 1);
  for (int k = 0; k < n; ++k) {
    const Rotor& r = c.rotors[active[k]];
    const double s = thrust_scale(r);
    lp.a_ub(2 * k, k) = 1.0;
    lp.a_ub(2 * k, n) = -s;
    lp.a_ub(2 * k + 1, k) = -1.0;
    lp.a_ub(2 * k + 1, n) = -s;
    lp.lower(k) = r.f_lo_n;
    lp.upper(k) = r.f_hi_n;
  }
  lp.lower(n) = 0.0;
  lp.upper(n) = std::numeric_limits<double>::infinity();

  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return std::nullopt;

  Eigen::VectorXd f = res.x.head(n);
  for (int k = 0; k < n; ++k) {
    const Rotor& r = c.rotors[active[k]];
    f(k) = std::clamp(f(k), r.f_lo_n, r.f_hi_n);
  }
  polish(a, w, active, c, f);

  HoverSolution sol;
  sol.thrusts_n = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.rotors.size()));
  for (int k = 0; k < n; ++k) {
    sol.thrusts_n(active[k]) = f(k);
    sol.max_normalized = std::max(sol.max_normalized, std::abs(f(k)) / thrust_scale(c.rotors[active[k]]));
  }
  sol.residual = (full * sol.thrusts_n - w).norm();
  if (sol.residual > 1e-6) return std::nullopt;
  return sol;
}

double efficiency(const RotorConfig& c, const Eigen::VectorXd& thrusts_n) {
  const double total = thrusts_n.cwiseAbs().sum();
  if (!(total > 0.0)) throw Error(ErrorKind::ZeroThrust, "no thrust to rate");
  Vec3 net = Vec3::Zero();
  for (std::size_t i = 0; i < c.rotors.size(); ++i)
    net += thrust_direction(c.rotors[i]).vec() * thrusts_n(static_cast<Eigen::Index>(i));
  return std::min(1.0, net.norm() / total);
}

CapabilityReport classify(const RotorConfig& c, int orientation_samples, std::uint64_t seed) {
  if (orientation_samples < 10)
    throw Error(ErrorKind::ValidationError, "orientation_samples: must be >= 10");
  c.validate();
  CapabilityReport rep;
  rep.name = c.name;
  rep.orientation_samples = orientation_samples;
  rep.static_hover = hover_thrusts(c, Rotation::identity()).has_value();

  Rng rng(seed);
  bool all = true;
  double worst = 1.0;
  double eff_sum = 0.0;
  int feasible = 0;
  for (int k = 0; k < orientation_samples; ++k) {
    const Rotation r = Rotation::random(rng);
    const auto sol = hover_thrusts(c, r);
    if (!sol) {
      all = false;
      continue;
    }
    worst = std::min(worst, sol->margin());
    eff_sum += efficiency(c, sol->thrusts_n);
    ++feasible;
  }
  rep.omnidirectional_hover = rep.static_hover && all;
  if (all) rep.worst_margin = worst;
  if (feasible > 0) rep.mean_efficiency = eff_sum / feasible;

  std::vector<bool> failed(c.rotors.size(), false);
  for (std::size_t i = 0; i < c.rotors.size(); ++i) {
    failed[i] = true;
    rep.per_rotor_failure_hover.push_back(hover_thrusts(c, Rotation::identity(), failed).has_value());
    failed[i] = false;
  }
  return rep;
}

RotorConfig with_tilt(const RotorConfig& c, double alpha_rad) {
  RotorConfig out = c;
  for (auto& r : out.rotors) r.tilt_angle_rad = alpha_rad;
  return out;
}

TiltSweepResult tilt_sweep(const RotorConfig& tmpl, double alpha_lo_rad, double alpha_hi_rad,
                           int steps, int orientation_samples, std::uint64_t seed) {
  if (steps < 2) throw Error(ErrorKind::ValidationError, "steps: must be >= 2");
  if (orientation_samples < 1)
    throw Error(ErrorKind::ValidationError, "orientation_samples: must be >= 1");
  tmpl.validate();

  std::vector<Rotation> samples;
  Rng rng(seed);
  for (int k = 0; k < orientation_samples; ++k) samples.push_back(Rotation::random(rng));

  TiltSweepResult out;
  std::optional<double> best_margin;
  for (int i = 0; i < steps; ++i) {
    const double alpha = i + 1 == steps
                             ? alpha_hi_rad
                             : alpha_lo_rad + (alpha_hi_rad - alpha_lo_rad) * i / (steps - 1);
    const RotorConfig cfg = with_tilt(tmpl, alpha);
    TiltPoint pt{alpha, std::nullopt};
    double worst = 1.0;
    bool ok = true;
    for (const auto& r : samples) {
      const auto sol = hover_thrusts(cfg, r);
      if (!sol) {
        ok = false;
        break;
      }
      worst = std::min(worst, sol->margin());
    }
    if (ok) {
      pt.worst_margin = worst;
      if (!best_margin || worst > *best_margin) {
        best_margin = worst;
        out.best_alpha_rad = alpha;
      }
    }
    out.curve.push_back(pt);
  }
  return out;
}

RotorConfig planar_quad(double arm_m, double f_hi_n, double mass_kg, double drag_coeff_m) {
  RotorConfig c;
  c.name = "planar_quad";
  c.mass_kg = mass_kg;
  const Vec3 arms[] = {{arm_m, 0, 0}, {0, arm_m, 0}, {-arm_m, 0, 0}, {0, -arm_m, 0}};
  for (int i = 0; i < 4; ++i) {
    Rotor r;
    r.position_m = arms[i];
    r.spin = i % 2 == 0 ? 1 : -1;
    r.f_lo_n = 0.0;
    r.f_hi_n = f_hi_n;
    r.drag_coeff_m = drag_coeff_m;
    c.rotors.push_back(r);
  }
  return c;
}

RotorConfig tilted_cube(double alpha_rad, double half_edge_m, double f_hi_n, double mass_kg,
                        double drag_coeff_m) {
  RotorConfig c;
  c.name = "tilted_cube";
  c.mass_kg = mass_kg;
  const double corners[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  for (int layer = 0; layer < 2; ++layer) {
    const double sz = layer == 0 ? 1.0 : -1.0;
    for (int k = 0; k < 4; ++k) {
      const double sx = corners[k][0];
      const double sy = corners[k][1];
      Rotor r;
      r.position_m = Vec3(sx, sy, sz) * half_edge_m;
      r.tilt_axis = sz * Vec3(sx, sy, 0.0) / std::numbers::sqrt2;
      r.tilt_angle_rad = alpha_rad;
      r.spin = ((k % 2 == 0) != (layer == 1)) ? 1 : -1;
      r.f_lo_n = -f_hi_n;
      r.f_hi_n = f_hi_n;
      r.drag_coeff_m = drag_coeff_m;
      c.rotors.push_back(r);
    }
  }
  return c;
}

}  // namespace omrav
