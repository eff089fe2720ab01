#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"
#include "subscat/subscat.h"

using namespace subscat::cli;

int main(int argc, char** argv) {
  CLI::App app{"Completed-scattering decomposition, wave packets and characteristic times"};
  app.set_version_flag("--version", std::string(subscat_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string profile = "default";
  bool oracle = false;
  unsigned workers = 0;

  const std::map<std::string, Command> names{{"solve", Command::solve},
                                             {"decompose", Command::decompose},
                                             {"evolve", Command::evolve},
                                             {"times", Command::times},
                                             {"larmor", Command::larmor}};
  const std::map<std::string, std::string> help{
      {"solve", "Transmission/reflection amplitudes over a k-grid"},
      {"decompose", "Transmission/reflection sub-state amplitudes over a k-grid"},
      {"evolve", "Wave-packet snapshots and inner products"},
      {"times", "Dwell, Larmor and phase times"},
      {"larmor", "Larmor-clock readings and extrapolated times"}};
  for (const auto& [name, cmd] : names) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--oracle", oracle, "Cross-check against the independent oracle");
    sub->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    sub->add_option("--tolerance-profile", profile, "Tolerance profile")
        ->check(CLI::IsMember({"strict", "default"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Command command = names.at(name);
  try {
    RunConfig cfg = load_config(config_path);
    validate_for(cfg, command);
    if (profile == "strict") cfg.tolerances.scale(0.1);
    subscat_set_workers(workers);

    CommandOptions opt;
    opt.out = out_dir;
    opt.oracle = oracle;
    opt.profile = profile;
    std::filesystem::create_directories(opt.out);

    int code = kOk;
    switch (command) {
      case Command::solve:
        code = cmd_solve(cfg, opt);
        break;
      case Command::decompose:
        code = cmd_decompose(cfg, opt);
        break;
      case Command::evolve:
        code = cmd_evolve(cfg, opt);
        break;
      case Command::times:
        code = cmd_times(cfg, opt);
        break;
      case Command::larmor:
        code = cmd_larmor(cfg, opt);
        break;
    }
    if (code != kOk) std::cerr << name << ": tolerance check failed, see the artifacts in " << out_dir << "\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const CommandError& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << name << ": internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
