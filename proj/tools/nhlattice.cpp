#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhlattice/config.hpp"
#include "nhlattice/error.hpp"
#include "nhlattice/io.hpp"
#include "nhlattice/protocols.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3 };

struct Options {
  std::string config;
  std::string preset;
  std::string out = "nhlattice-out";
  std::optional<double> dt;
  std::optional<double> t_final;
  std::string format = "csv+svg";
  bool list = false;
};

// Keeps each diagnostic on a single line.
std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

bool accepts(const std::string& command, nhl::Experiment e) {
  using nhl::Experiment;
  if (command == "preset") return true;
  if (command == "dispersion") return e == Experiment::dispersion_scan;
  if (command == "transport") return e == Experiment::transport_single_site || e == Experiment::transport_gaussian;
  if (command == "storage") return e == Experiment::storage;
  if (command == "reduce-check") return e == Experiment::reduction_check;
  return false;
}

nhl::Experiment default_experiment(const std::string& command) {
  if (command == "dispersion") return nhl::Experiment::dispersion_scan;
  if (command == "storage") return nhl::Experiment::storage;
  if (command == "reduce-check") return nhl::Experiment::reduction_check;
  return nhl::Experiment::transport_single_site;
}

nhl::ExperimentConfig build_config(const std::string& command, const Options& o) {
  if (!o.config.empty() && !o.preset.empty()) {
    throw nhl::InvalidArgument("--config and --preset are mutually exclusive", "config");
  }
  nhl::ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = nhl::load_config(o.config);
  } else if (!o.preset.empty()) {
    cfg = nhl::preset(o.preset);
  } else if (command == "preset") {
    throw nhl::InvalidArgument("the preset command needs --preset NAME", "preset");
  } else {
    cfg.experiment = default_experiment(command);
  }
  if (!accepts(command, cfg.experiment)) {
    throw nhl::InvalidArgument(std::string("experiment '") + nhl::to_string(cfg.experiment) +
                                   "' cannot run under the '" + command + "' command",
                               "experiment");
  }
  if (o.dt) cfg.timing.dt = *o.dt;
  if (o.t_final) cfg.timing.t_final = *o.t_final;
  return cfg;
}

int run(const std::string& command, const Options& o) {
  if (o.list) {
    for (const auto& name : nhl::preset_names()) std::cout << name << '\n';
    return kOk;
  }
  const nhl::ExperimentConfig cfg = build_config(command, o);
  const nhl::ExperimentResult result = nhl::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << one_line(w) << '\n';
  const auto format = o.format == "csv" ? nhl::OutputFormat::csv : nhl::OutputFormat::csv_svg;
  const std::filesystem::path out(o.out);
  for (const auto& name : nhl::write_outputs(result, out, format)) {
    std::cout << (out / name).string() << '\n';
  }
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config or manifest to run");
  sub->add_option("--preset", o.preset, "named preset (see 'preset --list')");
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--dt", o.dt, "RK4 step override")->check(CLI::PositiveNumber);
  sub->add_option("--t-final", o.t_final, "final time override")->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "artifact set")
      ->check(CLI::IsMember({"csv", "csv+svg"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian lattice transport and storage simulator", "nhlattice"};
  app.set_version_flag("--version", NHL_VERSION);
  app.require_subcommand(1);

  Options opts;
  const char* commands[][2] = {{"dispersion", "complex band structure scan"},
                               {"transport", "wave-packet transport on a chain"},
                               {"storage", "capture, hold and release protocol"},
                               {"reduce-check", "sawtooth versus effective-chain comparison"},
                               {"preset", "run a named preset"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, opts);
    if (std::string(name) == "preset") sub->add_flag("--list", opts.list, "print the preset names");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: kind=usage key=argv message=\"" << one_line(e.what()) << "\"\n";
    return kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const nhl::InvalidArgument& e) {
    std::cerr << "error: kind=config key=" << (e.key().empty() ? "-" : e.key()) << " message=\""
              << one_line(e.what()) << "\"\n";
    return kConfigError;
  } catch (const nhl::NumericalError& e) {
    std::cerr << "error: kind=numerical key=- message=\"" << one_line(e.what()) << "\"\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal key=- message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }
}
