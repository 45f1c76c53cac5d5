#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pref/harness.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pref::ConfigError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw pref::ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"preference-feedback bandit and imitation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool check_invariants = false;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_flag("--check-invariants", check_invariants, "enable per-round checks");
  };
  auto* cmd_cb =
      app.add_subcommand("run-cb", "one contextual run; writes rounds.csv and summary.json");
  add_common(cmd_cb);
  auto* cmd_il =
      app.add_subcommand("run-il", "one episodic run; writes episodes.csv and summary.json");
  add_common(cmd_il);
  auto* cmd_sweep =
      app.add_subcommand("sweep", "grid of runs; writes cells.csv and medians.csv");
  add_common(cmd_sweep);

  std::string class_path;
  double epsilon = 0.0;
  int cap = 12;
  auto* cmd_eluder = app.add_subcommand("eluder", "eluder dimension of a class file");
  cmd_eluder->add_option("class_file", class_path, "function class (JSON)")->required();
  cmd_eluder->add_option("epsilon", epsilon, "separation scale")->required();
  cmd_eluder->add_option("--cap", cap, "largest induced domain accepted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_eluder->parsed()) {
      pref::FunctionClass cls;
      try {
        cls = pref::FunctionClass::from_json(load_json(class_path));
        std::cout << pref::eluder_dimension(cls, epsilon, cap) << "\n";
      } catch (const pref::ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw pref::ConfigError(e.what());
      }
      return 0;
    }

    nlohmann::json config = load_json(config_path);
    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed") > 0) {
      if (cmd_sweep->parsed()) {
        throw pref::ConfigError("sweep takes a seeds list; --seed does not apply");
      }
      config["seed"] = seed;
    }
    if (check_invariants) {
      if (cmd_sweep->parsed()) {
        if (config.contains("cb") && config["cb"].is_object()) {
          config["cb"]["check_invariants"] = true;
        }
      } else {
        config["check_invariants"] = true;
      }
    }

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    if (cmd_cb->parsed()) {
      pref::CbRunOutput out = pref::run_cb(config);
      write_file(dir / "rounds.csv", out.rounds_csv);
      write_file(dir / "summary.json", out.summary.dump(2) + "\n");
    } else if (cmd_il->parsed()) {
      pref::IlRunOutput out = pref::run_il(config);
      write_file(dir / "episodes.csv", out.episodes_csv);
      if (!out.steps_csv.empty()) write_file(dir / "steps.csv", out.steps_csv);
      write_file(dir / "summary.json", out.summary.dump(2) + "\n");
    } else {
      pref::SweepOutput out = pref::sweep(config);
      write_file(dir / "cells.csv", out.cells_csv);
      write_file(dir / "medians.csv", out.medians_csv);
    }
  } catch (const pref::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pref::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const pref::realizability_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
