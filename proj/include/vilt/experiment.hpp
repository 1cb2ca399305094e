#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vilt/config.hpp"
#include "vilt/tensor.hpp"
#include "vilt/vi_problem.hpp"

namespace vilt {

/// Writes the full dataset under `data_dir`: synthetic clean images split
/// into same-position batched patches (jointly normalized per batch), their
/// noisy versions, frozen-network features, the problem manifests for both
/// splits and the batch partition.
void generate_dataset(const ExperimentConfig& cfg,
                      const std::filesystem::path& data_dir);

/// Runs the requested methods on the generated dataset. Artifacts per
/// method: trace_<m>.csv and theta_<m>.vlt; the shared seeded start point
/// is written as theta_init.vlt.
void train_methods(const ExperimentConfig& cfg,
                   const std::filesystem::path& data_dir,
                   const std::filesystem::path& run_dir,
                   const std::vector<std::string>& methods);

/// Computes the metric table over both splits for every trained method plus
/// the untrained start point, as CSV rows
///   method,split,ssim_mean,ssim_std,psnr_mean,l1,l2
void evaluate_runs(const std::filesystem::path& data_dir,
                   const std::filesystem::path& run_dir,
                   const std::filesystem::path& metrics_csv);

/// Renders the trace CSVs found in `run_dir` into a two-panel SVG: the
/// normalized averaged l1 (top) and l2 (bottom) errors on log scale versus
/// epochs, one polyline per method.
void plot_traces(const std::filesystem::path& run_dir,
                 const std::filesystem::path& svg_path);

// Building blocks shared with the test suites.
VIProblem load_split_problem(const std::filesystem::path& data_dir,
                             const std::string& split);
std::vector<std::vector<std::size_t>> load_partition(
    const std::filesystem::path& data_dir);
Tensor initial_theta(const ExperimentConfig& cfg);

}  // namespace vilt
