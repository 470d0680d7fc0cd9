#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omrav/netscene.hpp"

namespace omrav {

class Rng;

enum class DimKind { Length, Angle, Fraction };

struct Dimension {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  DimKind kind = DimKind::Length;
  bool periodic = false;  // values wrap into [lo, hi)
};

/// Box-shaped search domain; periodic dimensions wrap instead of clamping.
struct SearchSpace {
  std::vector<Dimension> dims;

  std::size_t size() const noexcept { return dims.size(); }
  bool contains(std::span<const double> x) const noexcept;
  /// Clamps bounded coordinates and wraps periodic ones, in place.
  void project(std::span<double> x) const noexcept;
  std::vector<double> sample(Rng& rng) const;
};

struct OptimizerParams {
  int grid_resolution = 11;  // nodes per length / fraction dimension
  int axis_resolution = 8;   // polar bands and azimuth nodes per antenna axis
  int starts = 16;
  double step_init_m = 25.0;
  double step_tol_m = 1e-7;
  double step_init_rad = 0.5;
  double step_tol_rad = 1e-9;
  double step_init_frac = 0.25;  // power fractions of p_max
  double step_tol_frac = 1e-9;
  std::size_t max_evals = 200000;
  std::uint64_t seed = 1;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const OptimizerParams&) const = default;
};

using Objective = std::function<double(std::span<const double>)>;

struct SearchResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
  std::vector<double> history;  // incumbent value after every polling sweep
};

/// Exhaustive evaluation of the tensor grid implied by `params`, in
/// lexicographic order (first dimension slowest). Ties keep the first point.
/// Throws BudgetExceeded when the grid has more than max_evals points.
SearchResult grid_search(const Objective& objective, const SearchSpace& space,
                         const OptimizerParams& params);

/// Compass search: polls +/- step along each coordinate, accepting strict
/// improvements. A coordinate's step doubles after a move and halves after
/// both polls fail. Stops once every step is below its tolerance or `budget`
/// evaluations are spent (flagged in the result).
/// Throws DomainError if `start` is outside `space`.
SearchResult pattern_search(const Objective& objective, std::span<const double> start,
                            const SearchSpace& space, const OptimizerParams& params,
                            std::size_t budget);

/// Runs pattern_search from `params.starts` seeded uniform starts followed by
/// `extra_starts`, splitting max_evals evenly; returns the best, earliest
/// start winning ties.
SearchResult multi_start(const Objective& objective, const SearchSpace& space,
                         const OptimizerParams& params,
                         std::span<const std::vector<double>> extra_starts = {});

/// Axis from polar/azimuth angles (polar measured from world z).
UnitVec3 axis_from_angles(double polar, double azimuth);

// ---------------------------------------------------------------------------
// Scenario A: anti-jamming min-SINR

SearchSpace scenario_a_space(const ScenarioA& s, Strategy strategy);
Pose decode_scenario_a(const ScenarioA& s, Strategy strategy, std::span<const double> x);
StrategyOutcome outcome_from_search_a(const ScenarioA& s, Strategy strategy,
                                      const SearchResult& r);

/// OptimumPose searches position and axis, seeded additionally from the
/// three closed-form strategies' solutions; the others search position only.
StrategyOutcome optimize_scenario_a(const ScenarioA& s, Strategy strategy,
                                    const OptimizerParams& params);

/// All four strategies in enum order, sharing the rule-based results as
/// OptimumPose warm starts.
std::array<StrategyOutcome, 4> optimize_all_strategies_a(const ScenarioA& s,
                                                         const OptimizerParams& params);

/// Grid oracle for one strategy (grid_resolution^3 positions, times
/// axis_resolution^2 axes for OptimumPose).
StrategyOutcome grid_scenario_a(const ScenarioA& s, Strategy strategy,
                                const OptimizerParams& params);

// ---------------------------------------------------------------------------
// Scenario B: friendly-jammer secrecy

enum class SecrecyMethod { Proposed, JointLocal, FixedVertical };
inline constexpr std::array<SecrecyMethod, 3> kAllSecrecyMethods = {
    SecrecyMethod::Proposed, SecrecyMethod::JointLocal, SecrecyMethod::FixedVertical};
std::string_view to_string(SecrecyMethod m) noexcept;

/// Re-evaluates a Scenario B outcome (poses[0] = comm, poses[1] = jam).
double evaluate_outcome_b(const ScenarioB& s, const StrategyOutcome& o);

/// Maximizes f on [lo, hi]: scans `scan_nodes` equispaced points, then
/// golden-section refines around the best node. Returns (argmax, value) and
/// adds the evaluations used to `evaluations`.
std::pair<double, double> bracketed_golden_max(const std::function<double(double)>& f, double lo,
                                               double hi, int scan_nodes, double tol,
                                               std::size_t& evaluations);

/// proposed: rule orientations, multi-start over both positions, then cyclic
/// golden-section ascent on the two powers (alternated with position polish).
/// joint_local: one seeded start of pattern_search over positions, axes and
/// powers together. fixed_vertical: identity orientations, multi-start over
/// positions and powers.
StrategyOutcome optimize_scenario_b(const ScenarioB& s, SecrecyMethod method,
                                    const OptimizerParams& params);

}  // namespace omrav
