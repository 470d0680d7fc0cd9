#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omrav/actuation.hpp"
#include "omrav/netscene.hpp"
#include "omrav/optimize.hpp"

namespace omrav {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentKind { SweepA, SweepB, Classify, TiltSweep };
enum class OutputFormat { Csv, Json };

std::string_view to_string(ExperimentKind k) noexcept;
std::string_view to_string(OutputFormat f) noexcept;

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SweepA;
  std::uint64_t seed = 1;
  std::string output;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  int threads = 1;
  OptimizerParams optimizer;

  ScenarioA scenario_a;
  ScenarioB scenario_b;
  /// Jammer transmit power (sweep_a) or p_max (sweep_b), dBm, increasing.
  std::vector<double> sweep_dbm;

  std::vector<RotorConfig> rotor_configs;
  int orientation_samples = 100;

  RotorConfig tilt_template;
  double alpha_lo_rad = 0.0;
  double alpha_hi_rad = 0.0;
  int tilt_steps = 19;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Defaults for each experiment (the documented fixtures).
ExperimentConfig default_config(ExperimentKind kind);
ScenarioA default_scenario_a();
ScenarioB default_scenario_b();

/// Parses a JSON document. Unknown keys and type mismatches raise ParseError
/// with the key path; constraint violations raise ValidationError naming the
/// field. When `expected` is given, a missing "experiment" key defaults to
/// it and a conflicting one is rejected.
ExperimentConfig parse_config(std::string_view document,
                              std::optional<ExperimentKind> expected = std::nullopt);

/// Canonical JSON (powers in W, frequencies in Hz, angles in rad); parsing
/// it back yields an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a digest of the canonical config, excluding output path, format and
/// thread count.
std::uint64_t config_digest(const ExperimentConfig& config);

struct SweepRow {
  std::size_t point_index = 0;
  double sweep_dbm = 0.0;
  std::string label;  // strategy or method
  StrategyOutcome outcome;
  double wall_time_s = 0.0;  // not covered by the determinism guarantee
};

/// Scenario A for one sweep point.
ScenarioA scenario_a_at(const ExperimentConfig& c, double jammer_dbm);
/// Scenario B for one sweep point.
ScenarioB scenario_b_at(const ExperimentConfig& c, double p_max_dbm);

/// One row per (jammer power, strategy), ordered by power then strategy.
std::vector<SweepRow> run_sweep_a(const ExperimentConfig& c);
/// One row per (p_max, method), ordered by p_max then method.
std::vector<SweepRow> run_sweep_b(const ExperimentConfig& c);
std::vector<CapabilityReport> run_classify(const ExperimentConfig& c);
TiltSweepResult run_tilt_sweep(const ExperimentConfig& c);

struct EmitOptions {
  bool timing = false;  // adds the wall-time column
};

void write_sweep(std::ostream& os, const ExperimentConfig& c, const std::vector<SweepRow>& rows,
                 const EmitOptions& opts = {});
void write_classify(std::ostream& os, const ExperimentConfig& c,
                    const std::vector<CapabilityReport>& reports);
void write_tilt_sweep(std::ostream& os, const ExperimentConfig& c, const TiltSweepResult& r);

/// Runs the configured experiment and writes its output to `os`.
void run_experiment(std::ostream& os, const ExperimentConfig& c, const EmitOptions& opts = {});

/// Fixed-width float text used in every output file.
std::string format_real(double v);

/// Re-evaluates each data row of a sweep CSV written by write_sweep and
/// returns |stored - recomputed| per row.
std::vector<double> reevaluation_errors(const ExperimentConfig& c, std::string_view csv);

}  // namespace omrav
