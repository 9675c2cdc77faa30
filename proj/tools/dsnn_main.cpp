// dsnn — hierarchical dynamic SNN experiment driver.
// Exit codes: 0 success, 1 validation/config error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dsnn/experiment.hpp"

namespace {

dsnn::ExperimentConfig resolve_config(const std::string& config_path, bool synth_defaults,
                                      std::optional<uint64_t> seed,
                                      std::optional<std::string> out,
                                      std::optional<int> threads) {
  dsnn::ExperimentConfig cfg = config_path.empty()
                                   ? (synth_defaults ? dsnn::ExperimentConfig::synth_defaults()
                                                     : dsnn::ExperimentConfig{})
                                   : dsnn::ExperimentConfig::load_file(config_path);
  if (seed) cfg.master_seed = *seed;
  if (out) cfg.output_dir = *out;
  if (threads) cfg.threads = *threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong-learning spiking neural network engine for intrusion detection"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--seed/--out/--threads may follow the subcommand

  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  app.add_option("--config", config_path, "experiment config JSON")->configurable(false);
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--out", out, "override the output directory");
  app.add_option("--threads", threads, "evaluation fan-out (default 1, exact reproducibility)");

  auto* cmd_preprocess = app.add_subcommand("preprocess", "parse, clean, scale and cache CSVs");
  auto* cmd_lifelong =
      app.add_subcommand("lifelong", "run the task-incremental protocol plus the static twin");
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  auto* cmd_synth =
      app.add_subcommand("synth-verify", "synthetic acceptance protocol and self-checks");

  std::string checkpoint_path;
  cmd_eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_preprocess->parsed()) {
      const auto cfg = resolve_config(config_path, false, seed, out, threads);
      dsnn::run_preprocess(cfg);
      return 0;
    }
    if (cmd_lifelong->parsed()) {
      const auto cfg = resolve_config(config_path, false, seed, out, threads);
      dsnn::run_lifelong(cfg);
      return 0;
    }
    if (cmd_eval->parsed()) {
      const auto cfg = resolve_config(config_path, false, seed, out, threads);
      dsnn::run_eval(cfg, checkpoint_path);
      return 0;
    }
    if (cmd_synth->parsed()) {
      const auto cfg = resolve_config(config_path, true, seed, out, threads);
      const auto result = dsnn::run_synth_verify(cfg);

      std::filesystem::create_directories(cfg.output_dir);
      const auto report_path = std::filesystem::path(cfg.output_dir) / "synth_verify_report.json";
      std::ofstream f(report_path);
      if (!f) throw std::runtime_error("cannot write " + report_path.string());
      f << result.report.dump(2) << '\n';

      for (const auto& check : result.report.at("checks"))
        std::cout << (check.at("pass").get<bool>() ? "[PASS] " : "[FAIL] ")
                  << check.at("name").get<std::string>() << '\n';
      std::cout << (result.pass ? "synth-verify: PASS" : "synth-verify: FAIL") << " (report: "
                << report_path.string() << ")\n";
      return result.pass ? 0 : 2;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
