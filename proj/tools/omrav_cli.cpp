#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "omrav/error.hpp"
#include "omrav/harness.hpp"

namespace {

// Exit codes: 0 ok, 2 bad config or usage, 3 I/O, 1 anything else.
int exit_code(omrav::ErrorKind k) {
  switch (k) {
    case omrav::ErrorKind::ParseError:
    case omrav::ErrorKind::ValidationError: return 2;
    case omrav::ErrorKind::IoError: return 3;
    default: return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw omrav::Error(omrav::ErrorKind::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string format;
  bool timing = false;
};

int run(omrav::ExperimentKind kind, const Options& opt) {
  const std::string doc = opt.config.empty() ? "{}" : read_file(opt.config);
  omrav::ExperimentConfig cfg = omrav::parse_config(doc, kind);
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.optimizer.seed = cfg.seed;
  if (const char* env = std::getenv("OMRAV_THREADS"); env && *env) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw omrav::Error(omrav::ErrorKind::ValidationError, "OMRAV_THREADS: not an integer");
    }
  }
  if (opt.threads) cfg.threads = *opt.threads;
  if (cfg.threads < 1) throw omrav::Error(omrav::ErrorKind::ValidationError, "threads: must be >= 1");
  if (!opt.out.empty()) cfg.output = opt.out;
  if (opt.format == "json") cfg.format = omrav::OutputFormat::Json;
  if (opt.format == "csv") cfg.format = omrav::OutputFormat::Csv;

  // Render fully before touching the output file so failures leave no partial file.
  std::ostringstream buf;
  omrav::run_experiment(buf, cfg, omrav::EmitOptions{opt.timing});
  if (cfg.output.empty()) {
    std::cout << buf.str();
    return 0;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  out << buf.str();
  if (!out) throw omrav::Error(omrav::ErrorKind::IoError, "cannot write " + cfg.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pose optimization and actuation analysis for omnidirectional multirotor relays"};
  app.set_version_flag("--version", std::string(omrav::kToolVersion));
  app.require_subcommand(1);

  Options opt;
  std::optional<omrav::ExperimentKind> chosen;
  const std::pair<const char*, omrav::ExperimentKind> commands[] = {
      {"sweep-a", omrav::ExperimentKind::SweepA},
      {"sweep-b", omrav::ExperimentKind::SweepB},
      {"classify", omrav::ExperimentKind::Classify},
      {"tilt-sweep", omrav::ExperimentKind::TiltSweep},
  };
  const char* help[] = {
      "Minimum uplink SINR versus jammer power for the four orientation strategies",
      "Secrecy rate versus maximum power for the three secrecy methods",
      "Capability table (static, omnidirectional, rotor-failure hover)",
      "Worst-case hover margin versus rotor tilt angle",
  };
  for (std::size_t i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", opt.config, "JSON experiment config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
    sub->add_option("--out", opt.out, "Output file (standard output when omitted)");
    sub->add_option("--threads", opt.threads, "Worker threads (overrides OMRAV_THREADS and the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--timing", opt.timing, "Add a wall-time column (not deterministic)");
    const omrav::ExperimentKind kind = commands[i].second;
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << "error_category=UsageError\n";
    return code == 0 ? 0 : 2;
  }

  try {
    return run(*chosen, opt);
  } catch (const omrav::Error& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "error_category=" << omrav::to_string(e.kind()) << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\nerror_category=Internal\n";
    return 1;
  }
}
