// Acceptance run: one PASS/FAIL line per criterion.
// Usage: omrav_acceptance <cli-binary> <configs-dir> <scratch-dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "omrav/actuation.hpp"
#include "omrav/channel.hpp"
#include "omrav/error.hpp"
#include "omrav/harness.hpp"
#include "omrav/random.hpp"

using namespace omrav;

namespace {

std::string g_cli, g_configs, g_scratch;
int g_failed = 0;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load(const std::string& name) {
  return parse_config(slurp(g_configs + "/" + name));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// objective[strategy][point]
using Curves = std::map<std::string, std::vector<double>>;

Curves curves_of(const std::vector<SweepRow>& rows) {
  Curves c;
  for (const auto& r : rows) c[r.label].push_back(r.outcome.objective);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <cli> <configs-dir> <scratch-dir>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_configs = argv[2];
  g_scratch = argv[3];

  // 1. Null invariance of ZeroInterference across -20..40 dBm.
  guarded(1, "zero-interference min-SINR constant over jammer power", [] {
    const ExperimentConfig cfg = load("sweep_a.json");
    const auto t0 = std::chrono::steady_clock::now();
    double lo = INFINITY, hi = -INFINITY;
    int points = 0;
    for (double dbm = -20.0; dbm <= 40.0; dbm += 10.0) {
      const double v = optimize_scenario_a(scenario_a_at(cfg, dbm), Strategy::ZeroInterference, cfg.optimizer).objective;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++points;
    }
    const double t = seconds_since(t0);
    report(1, "zero-interference min-SINR constant over jammer power", hi - lo <= 1e-9 && t < 10.0,
           "spread " + fmt("%.3g dB", hi - lo) + " over " + std::to_string(points) + " points, " + fmt("%.2f s", t));
  });

  // Full default sweep shared by criteria 2-5.
  ExperimentConfig sweep_cfg;
  std::vector<SweepRow> sweep_rows;
  double sweep_seconds = 0.0;
  bool sweep_ok = false;
  try {
    sweep_cfg = load("sweep_a.json");
    const auto t0 = std::chrono::steady_clock::now();
    sweep_rows = run_sweep_a(sweep_cfg);
    sweep_seconds = seconds_since(t0);
    sweep_ok = true;
  } catch (const std::exception& e) {
    std::printf("sweep_a failed: %s\n", e.what());
  }
  Curves cur = curves_of(sweep_rows);
  const std::vector<double>& grid = sweep_cfg.sweep_dbm;
  const std::size_t n = grid.size();

  guarded(2, "optimum pose converges to zero-interference at high jamming", [&] {
    if (!sweep_ok || n < 2) throw Error(ErrorKind::IoError, "no sweep");
    double worst = 0.0;
    for (std::size_t i = n - 2; i < n; ++i)
      worst = std::max(worst, std::abs(cur["optimum_pose"][i] - cur["zero_interference"][i]));
    report(2, "optimum pose converges to zero-interference at high jamming",
           worst <= 0.5 && sweep_seconds < 60.0,
           "max gap " + fmt("%.4f dB", worst) + " at top two points, sweep " + fmt("%.2f s", sweep_seconds));
  });

  guarded(3, "optimum pose aligns with max-gain at low jamming", [&] {
    if (!sweep_ok) throw Error(ErrorKind::IoError, "no sweep");
    const double noise_dbm = w_to_dbm(sweep_cfg.scenario_a.radio.noise_power_w);
    double worst = 0.0;
    int points = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (grid[i] > noise_dbm - 20.0 + 1e-9) continue;
      worst = std::max(worst, std::abs(cur["optimum_pose"][i] - cur["max_gain"][i]));
      ++points;
    }
    report(3, "optimum pose aligns with max-gain at low jamming", points > 0 && worst <= 0.5,
           "max gap " + fmt("%.3g dB", worst) + " over " + std::to_string(points) + " points at <= " +
               fmt("%.0f dBm", noise_dbm - 20.0));
  });

  guarded(4, "dominance, monotonicity and saturation", [&] {
    if (!sweep_ok || n < 3) throw Error(ErrorKind::IoError, "no sweep");
    double dom = 0.0, rise = 0.0, tail = 0.0;
    for (const auto& [label, v] : cur) {
      for (std::size_t i = 0; i < n; ++i) dom = std::max(dom, v[i] - cur["optimum_pose"][i]);
      for (std::size_t i = 1; i < n; ++i) rise = std::max(rise, v[i] - v[i - 1]);
      for (std::size_t i = n - 2; i < n; ++i) tail = std::max(tail, std::abs(v[i] - v[i - 1]));
    }
    report(4, "dominance, monotonicity and saturation", dom <= 0.05 && rise <= 0.05 && tail <= 0.2,
           "worst excess over optimum " + fmt("%.3g dB", dom) + ", worst rise " + fmt("%.3g dB", rise) +
               ", worst step at top three points " + fmt("%.3g dB", tail));
  });

  guarded(5, "omnidirectional beats vertical-fixed at the highest jamming power", [&] {
    if (!sweep_ok) throw Error(ErrorKind::IoError, "no sweep");
    const double gap = cur["optimum_pose"][n - 1] - cur["vertical_fixed"][n - 1];
    report(5, "omnidirectional beats vertical-fixed at the highest jamming power", gap >= 1.0,
           "gap " + fmt("%.3f dB", gap) + " at " + fmt("%.0f dBm", grid[n - 1]));
  });

  guarded(6, "secrecy ordering over five seeds", [] {
    ExperimentConfig cfg = load("sweep_b.json");
    int vs_fixed_ok = 0, vs_joint_ok = 0, total = 0;
    bool nonneg = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.seed = seed;
      cfg.optimizer.seed = seed;
      const auto rows = run_sweep_b(cfg);
      for (std::size_t i = 0; i < rows.size(); i += 3) {
        const double p = rows[i].outcome.objective, j = rows[i + 1].outcome.objective,
                     f = rows[i + 2].outcome.objective;
        vs_fixed_ok += p >= f;
        vs_joint_ok += p >= j;
        nonneg = nonneg && p >= 0 && j >= 0 && f >= 0;
        ++total;
      }
    }
    const double share = static_cast<double>(vs_joint_ok) / total;
    report(6, "secrecy ordering over five seeds", vs_fixed_ok == total && share >= 0.8 && nonneg,
           "proposed >= fixed_vertical " + std::to_string(vs_fixed_ok) + "/" + std::to_string(total) +
               ", proposed >= joint_local " + std::to_string(vs_joint_ok) + "/" + std::to_string(total));
  });

  guarded(7, "radiation patterns integrate to 4 pi", [] {
    double worst = 0.0;
    for (const auto& p : {RadiationPattern::isotropic(), RadiationPattern::short_dipole(),
                          RadiationPattern::half_wave_dipole(), RadiationPattern::axial_lobe(2.0, 0.0),
                          RadiationPattern::axial_lobe(4.0, 0.01)})
      worst = std::max(worst, std::abs(solid_angle_integral(p) / (4.0 * std::numbers::pi) - 1.0));
    report(7, "radiation patterns integrate to 4 pi", worst <= 1e-3, "worst relative error " + fmt("%.3g", worst));
  });

  guarded(8, "pattern search matches or beats the 11^3 x 64 grid", [] {
    ExperimentConfig cfg = load("sweep_a.json");
    cfg.optimizer.grid_resolution = 11;
    cfg.optimizer.axis_resolution = 8;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = -INFINITY;
    for (double dbm : {-120.0, -60.0, 0.0, 40.0}) {
      const ScenarioA s = scenario_a_at(cfg, dbm);
      const auto found = optimize_all_strategies_a(s, cfg.optimizer);
      for (Strategy st : kAllStrategies) {
        const double g = grid_scenario_a(s, st, cfg.optimizer).objective;
        worst = std::max(worst, g - found[static_cast<std::size_t>(st)].objective);
      }
    }
    const double t = seconds_since(t0);
    report(8, "pattern search matches or beats the 11^3 x 64 grid", worst <= 0.1 && t < 120.0,
           "largest grid advantage " + fmt("%.3g dB", worst) + " over 4 powers x 4 strategies, " + fmt("%.2f s", t));
  });

  guarded(9, "capability table", [] {
    const ExperimentConfig cfg = load("classify.json");
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_classify(cfg);
    const double t = seconds_since(t0);
    bool ok = reports.size() == 2 && cfg.orientation_samples == 100;
    std::string detail;
    if (ok) {
      const auto& quad = reports[0];
      const auto& cube = reports[1];
      const bool failures = std::all_of(cube.per_rotor_failure_hover.begin(), cube.per_rotor_failure_hover.end(),
                                        [](bool b) { return b; }) &&
                            cube.per_rotor_failure_hover.size() == 8;
      ok = quad.static_hover && !quad.omnidirectional_hover && cube.static_hover && cube.omnidirectional_hover &&
           failures && t < 10.0;
      detail = "quad static=" + std::to_string(quad.static_hover) + " omni=" + std::to_string(quad.omnidirectional_hover) +
               ", cube static=" + std::to_string(cube.static_hover) + " omni=" + std::to_string(cube.omnidirectional_hover) +
               " single failures ok=" + std::to_string(failures) + ", " + fmt("%.2f s", t);
    }
    report(9, "capability table", ok, detail);
  });

  // Criterion 10 and 11 share the CLI outputs.
  std::map<std::string, std::string> outputs;
  guarded(10, "byte-identical reruns of every subcommand", [&] {
    bool ok = true;
    std::string detail;
    const std::pair<const char*, const char*> jobs[] = {
        {"sweep-a", "sweep_a.json"}, {"sweep-b", "sweep_b.json"},
        {"classify", "classify.json"}, {"tilt-sweep", "tilt_sweep.json"}};
    for (const auto& [cmd, cfg] : jobs) {
      std::string text[2];
      for (int k = 0; k < 2; ++k) {
        const std::string out = g_scratch + "/det_" + cmd + "_" + std::to_string(k) + ".csv";
        std::remove(out.c_str());
        // second run uses a different worker count
        const std::string line = g_cli + " " + cmd + " --config " + g_configs + "/" + cfg + " --seed 7 --threads " +
                                 (k ? "4" : "1") + " --out " + out;
        if (std::system(line.c_str()) != 0) ok = false;
        text[k] = slurp(out);
      }
      const bool same = !text[0].empty() && text[0] == text[1];
      ok = ok && same;
      detail += std::string(detail.empty() ? "" : ", ") + cmd + (same ? " identical" : " DIFFERENT");
      outputs[cmd] = text[0];
    }
    report(10, "byte-identical reruns of every subcommand", ok, detail);
  });

  guarded(11, "rows re-evaluate and hover solutions close the wrench", [&] {
    double worst_row = 0.0;
    std::size_t rows = 0;
    for (const auto& [cmd, cfg_name] : {std::pair{"sweep-a", "sweep_a.json"}, std::pair{"sweep-b", "sweep_b.json"}}) {
      ExperimentConfig cfg = load(cfg_name);
      cfg.seed = 7;
      const auto errs = reevaluation_errors(cfg, outputs[cmd]);
      rows += errs.size();
      for (double e : errs) worst_row = std::max(worst_row, e);
    }
    // hover residuals recomputed from the thrusts, rotor by rotor
    double worst_res = 0.0;
    std::size_t solves = 0;
    const ExperimentConfig cls = load("classify.json");
    const ExperimentConfig tilt = load("tilt_sweep.json");
    std::vector<RotorConfig> configs = cls.rotor_configs;
    for (int k = 0; k < tilt.tilt_steps; ++k)
      configs.push_back(with_tilt(tilt.tilt_template,
                                  tilt.alpha_lo_rad + (tilt.alpha_hi_rad - tilt.alpha_lo_rad) * k / (tilt.tilt_steps - 1)));
    for (const RotorConfig& c : configs) {
      Rng rng(7);
      std::vector<Rotation> qs{Rotation{}};
      for (int i = 0; i < 100; ++i) qs.push_back(Rotation::random(rng));
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const Rotation& q = qs[qi];
        // single-rotor failures are checked at identity
        std::vector<std::vector<bool>> masks{{}};
        if (qi == 0)
          for (std::size_t r = 0; r < c.rotors.size(); ++r) {
            std::vector<bool> m(c.rotors.size(), false);
            m[r] = true;
            masks.push_back(m);
          }
        for (const auto& mask : masks) {
          const auto sol = hover_thrusts(c, q, mask);
          if (!sol) continue;
          Vec3 force = Vec3::Zero(), torque = Vec3::Zero();
          for (std::size_t r = 0; r < c.rotors.size(); ++r) {
            const Rotor& rot = c.rotors[r];
            const Vec3 u = Eigen::AngleAxisd(rot.tilt_angle_rad, rot.tilt_axis.normalized()) * Vec3::UnitZ();
            force += u * sol->thrusts_n[r];
            torque += (rot.position_m.cross(u) + rot.spin * rot.drag_coeff_m * u) * sol->thrusts_n[r];
          }
          const Vec3 need = q.matrix().transpose() * Vec3(0, 0, c.mass_kg * kGravity);
          worst_res = std::max(worst_res, std::sqrt((force - need).squaredNorm() + torque.squaredNorm()));
          ++solves;
        }
      }
    }
    report(11, "rows re-evaluate and hover solutions close the wrench",
           rows > 0 && worst_row <= 1e-9 && solves > 0 && worst_res <= 1e-6,
           std::to_string(rows) + " rows, worst re-evaluation error " + fmt("%.3g", worst_row) + "; " +
               std::to_string(solves) + " hover solutions, worst residual " + fmt("%.3g", worst_res));
  });

  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
