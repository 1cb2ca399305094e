#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vilt/config.hpp"
#include "vilt/experiment.hpp"

namespace {

vilt::ExperimentConfig load(const std::string& config_path, std::uint64_t seed,
                            bool seed_set) {
  vilt::ExperimentConfig cfg = vilt::load_config(config_path);
  if (seed_set) cfg.seed = seed;
  return cfg;
}

std::vector<std::string> expand_methods(const std::string& method) {
  if (method == "all") return {"vi", "sgd", "adam"};
  return {method};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Last-layer training via a variational-inequality equilibrium "
               "with block-iterative forward-backward solvers and SGD/Adam "
               "baselines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_dir, run_dir, out_path, method = "all";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", config_path, "JSON experiment config")
          ->required()
          ->check(CLI::ExistingFile);
      cmd->add_option("--seed", seed, "override the config master seed")
          ->each([&](const std::string&) { seed_set = true; });
    }
  };

  CLI::App* generate = app.add_subcommand(
      "generate", "synthesize the dataset: patches, noise, features");
  add_common(generate, true);
  generate->add_option("--out", out_path, "dataset directory");

  CLI::App* train = app.add_subcommand(
      "train", "run the configured solvers and write traces");
  add_common(train, true);
  train->add_option("--data", data_dir, "dataset directory");
  train->add_option("--out", out_path, "run directory");
  train->add_option("--method", method, "vi|sgd|adam|all")
      ->check(CLI::IsMember({"vi", "sgd", "adam", "all"}));

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "compute SSIM/PSNR/error metrics for trained parameters");
  add_common(evaluate, true);
  evaluate->add_option("--data", data_dir, "dataset directory");
  evaluate->add_option("--run", run_dir, "run directory with theta_*.vlt");
  evaluate->add_option("--out", out_path, "metrics CSV path");

  CLI::App* plot = app.add_subcommand(
      "plot", "render trace CSVs into a convergence-profile SVG");
  plot->add_option("--run", run_dir, "run directory with trace_*.csv")
      ->required();
  plot->add_option("--out", out_path, "SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const auto cfg = load(config_path, seed, seed_set);
      const std::string out = out_path.empty() ? cfg.out_dir + "/data" : out_path;
      vilt::generate_dataset(cfg, out);
      std::printf("dataset written to %s\n", out.c_str());
    } else if (train->parsed()) {
      const auto cfg = load(config_path, seed, seed_set);
      const std::string data = data_dir.empty() ? cfg.out_dir + "/data" : data_dir;
      const std::string run = out_path.empty() ? cfg.out_dir + "/run" : out_path;
      vilt::train_methods(cfg, data, run, expand_methods(method));
      std::printf("traces written to %s\n", run.c_str());
    } else if (evaluate->parsed()) {
      const auto cfg = load(config_path, seed, seed_set);
      const std::string data = data_dir.empty() ? cfg.out_dir + "/data" : data_dir;
      const std::string run = run_dir.empty() ? cfg.out_dir + "/run" : run_dir;
      const std::string out = out_path.empty() ? run + "/metrics.csv" : out_path;
      vilt::evaluate_runs(data, run, out);
      std::printf("metrics written to %s\n", out.c_str());
    } else if (plot->parsed()) {
      const std::string out = out_path.empty() ? run_dir + "/fig.svg" : out_path;
      vilt::plot_traces(run_dir, out);
      std::printf("figure written to %s\n", out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
