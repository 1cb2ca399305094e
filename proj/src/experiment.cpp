#include "vilt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vilt/datagen.hpp"
#include "vilt/metrics.hpp"
#include "vilt/network.hpp"
#include "vilt/rng.hpp"
#include "vilt/solvers.hpp"
#include "vilt/svg.hpp"
#include "vilt/vlt_io.hpp"

namespace vilt {

namespace fs = std::filesystem;

namespace {

// Seed stream labels under the master seed.
enum SeedLabel : std::uint64_t {
  kSeedImageTrain = 1,
  kSeedImageTest = 2,
  kSeedNoiseTrain = 3,
  kSeedNoiseTest = 4,
  kSeedNetwork = 5,
  kSeedInit = 6,
  kSeedScheduleVi = 7,
  kSeedSgd = 8,
  kSeedAdam = 9,
};

std::string index_name(const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu.vlt", stem, k);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SplitFiles {
  std::vector<std::string> clean, noisy, features;
};

// Patches are ordered position-major: index = position * images + image, so
// each same-position batch is a contiguous stripe of `batch_size` images.
SplitFiles generate_split(const ExperimentConfig& cfg, const fs::path& data_dir,
                          const std::string& split, std::size_t num_images,
                          std::uint64_t image_label, std::uint64_t noise_label,
                          std::size_t norm_group_images,
                          const FrozenNetwork& net) {
  const std::size_t positions = cfg.positions();
  const std::size_t total = num_images * positions;

  std::vector<Tensor> clean(total);
  for (std::size_t img = 0; img < num_images; ++img) {
    const Tensor whole =
        synth_image(cfg.image_size, derive_seed(cfg.seed, image_label, img));
    std::vector<Tensor> patches = split_patches(whole, cfg.patch_size);
    for (std::size_t pos = 0; pos < positions; ++pos) {
      clean[pos * num_images + img] = std::move(patches[pos]);
    }
  }

  // Joint [0,1] normalization over each same-position group of images.
  for (std::size_t pos = 0; pos < positions; ++pos) {
    for (std::size_t g = 0; g < num_images; g += norm_group_images) {
      std::vector<Tensor*> group;
      for (std::size_t i = 0; i < norm_group_images; ++i) {
        group.push_back(&clean[pos * num_images + g + i]);
      }
      normalize_group(group);
    }
  }

  SplitFiles files;
  const fs::path dir = data_dir / split;
  fs::create_directories(dir);
  for (std::size_t k = 0; k < total; ++k) {
    Tensor noisy = add_gaussian_noise(clean[k], cfg.noise_std,
                                      derive_seed(cfg.seed, noise_label, k));
    Tensor feat = net.forward(noisy);
    if (feat.shape().rank() == 2) {
      feat = feat.reshaped(Shape{1, cfg.patch_size, cfg.patch_size});
    }
    files.clean.push_back(split + "/" + index_name("clean", k));
    files.noisy.push_back(split + "/" + index_name("noisy", k));
    files.features.push_back(split + "/" + index_name("feat", k));
    write_vlt1(data_dir / files.clean.back(), clean[k]);
    write_vlt1(data_dir / files.noisy.back(), noisy);
    write_vlt1(data_dir / files.features.back(), feat);
    if (cfg.export_pgm && k < positions) {
      write_pgm(data_dir / (split + "/" + std::to_string(k) + "_clean.pgm"), clean[k]);
      write_pgm(data_dir / (split + "/" + std::to_string(k) + "_noisy.pgm"), noisy);
    }
  }
  return files;
}

nlohmann::json load_dataset_json(const fs::path& data_dir) {
  std::ifstream in(data_dir / "dataset.json");
  if (!in) {
    throw std::runtime_error("missing dataset manifest in " + data_dir.string());
  }
  return nlohmann::json::parse(in);
}

}  // namespace

void generate_dataset(const ExperimentConfig& cfg, const fs::path& data_dir) {
  cfg.validate();
  fs::create_directories(data_dir);

  const Activation frozen_act = Activation::parse(cfg.frozen_activation);
  write_pseudo_pretrained_network(data_dir / "network.json", cfg.frozen_layers,
                                  cfg.channels, cfg.frozen_kernel,
                                  cfg.patch_size, frozen_act,
                                  derive_seed(cfg.seed, kSeedNetwork));
  const FrozenNetwork net = load_network_manifest(data_dir / "network.json");

  const SplitFiles train =
      generate_split(cfg, data_dir, "train", cfg.num_images, kSeedImageTrain,
                     kSeedNoiseTrain, cfg.batch_size, net);
  // Test patches are normalized per position across the whole split; there
  // is no batch structure to follow on held-out data.
  const SplitFiles test =
      generate_split(cfg, data_dir, "test", cfg.num_test_images, kSeedImageTest,
                     kSeedNoiseTest, cfg.num_test_images, net);

  const Shape kernel_shape{cfg.channels, 1, cfg.kernel_h, cfg.kernel_w};
  const std::size_t k_train = cfg.num_train_patches();
  const std::size_t k_test = cfg.num_test_images * cfg.positions();
  write_problem_manifest(data_dir / "problem_train.json", train.features,
                         train.clean,
                         std::vector<double>(k_train, 1.0 / static_cast<double>(k_train)),
                         kernel_shape, cfg.activation, cfg.constraint);
  write_problem_manifest(data_dir / "problem_test.json", test.features,
                         test.clean,
                         std::vector<double>(k_test, 1.0 / static_cast<double>(k_test)),
                         kernel_shape, cfg.activation, cfg.constraint);

  // Same-position batches: position-major stripes of batch_size images.
  nlohmann::json partition = nlohmann::json::array();
  const std::size_t groups = cfg.num_images / cfg.batch_size;
  for (std::size_t pos = 0; pos < cfg.positions(); ++pos) {
    for (std::size_t g = 0; g < groups; ++g) {
      std::vector<std::size_t> batch;
      for (std::size_t i = 0; i < cfg.batch_size; ++i) {
        batch.push_back(pos * cfg.num_images + g * cfg.batch_size + i);
      }
      partition.push_back(batch);
    }
  }

  nlohmann::json doc;
  doc["patch_size"] = cfg.patch_size;
  doc["channels"] = cfg.channels;
  doc["kernel_shape"] = kernel_shape.dims;
  doc["num_train"] = k_train;
  doc["num_test"] = k_test;
  doc["partition"] = partition;
  doc["train_clean"] = train.clean;
  doc["train_noisy"] = train.noisy;
  doc["train_features"] = train.features;
  doc["test_clean"] = test.clean;
  doc["test_noisy"] = test.noisy;
  doc["test_features"] = test.features;
  atomic_write(data_dir / "dataset.json", doc.dump(2) + "\n");
}

VIProblem load_split_problem(const fs::path& data_dir, const std::string& split) {
  if (split != "train" && split != "test") {
    throw std::invalid_argument("unknown split: " + split);
  }
  return load_problem_manifest(data_dir / ("problem_" + split + ".json"));
}

std::vector<std::vector<std::size_t>> load_partition(const fs::path& data_dir) {
  const nlohmann::json doc = load_dataset_json(data_dir);
  return doc.at("partition").get<std::vector<std::vector<std::size_t>>>();
}

Tensor initial_theta(const ExperimentConfig& cfg) {
  Tensor theta(Shape{cfg.channels, 1, cfg.kernel_h, cfg.kernel_w});
  Rng rng(derive_seed(cfg.seed, kSeedInit));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = cfg.init_scale * rng.normal();
  }
  return theta;
}

void train_methods(const ExperimentConfig& cfg, const fs::path& data_dir,
                   const fs::path& run_dir,
                   const std::vector<std::string>& methods) {
  cfg.validate();
  const VIProblem problem = load_split_problem(data_dir, "train");
  const auto partition = load_partition(data_dir);
  fs::create_directories(run_dir);

  const Tensor theta0 = initial_theta(cfg);
  write_vlt1(run_dir / "theta_init.vlt", theta0);

  for (const std::string& method : methods) {
    Trace trace;
    if (method == "vi") {
      SolverOptions opt;
      opt.gamma = cfg.gamma_fraction * problem.max_step_size();
      opt.stop.max_iter = cfg.epochs * partition.size();
      opt.stop.residual_tol = cfg.residual_tol;
      opt.record_wall_time = cfg.record_wall_time;
      Schedule sched = Schedule::shuffled_cyclic(
          partition.size(), derive_seed(cfg.seed, kSeedScheduleVi));
      trace = run_alg2(problem, partition, std::move(sched), opt, theta0);
    } else if (method == "sgd" || method == "adam") {
      BaselineOptions opt;
      opt.loss = (cfg.loss == "l2") ? Loss::l2 : Loss::l1;
      opt.lr = (method == "sgd") ? cfg.lr_sgd : cfg.lr_adam;
      opt.epochs = cfg.epochs;
      opt.partition = partition;
      opt.record_wall_time = cfg.record_wall_time;
      opt.beta1 = cfg.adam_beta1;
      opt.beta2 = cfg.adam_beta2;
      opt.eps = cfg.adam_eps;
      opt.seed = derive_seed(cfg.seed, method == "sgd" ? kSeedSgd : kSeedAdam);
      trace = (method == "sgd") ? run_sgd(problem, opt, theta0)
                                : run_adam(problem, opt, theta0);
    } else {
      throw std::invalid_argument("unknown method: " + method);
    }
    write_trace_csv(run_dir / ("trace_" + method + ".csv"), trace);
    write_vlt1(run_dir / ("theta_" + method + ".vlt"), trace.final_theta);
  }
}

void evaluate_runs(const fs::path& data_dir, const fs::path& run_dir,
                   const fs::path& metrics_csv) {
  const VIProblem train_problem = load_split_problem(data_dir, "train");
  const VIProblem test_problem = load_split_problem(data_dir, "test");

  std::vector<std::string> methods = {"init"};
  for (const char* m : {"vi", "sgd", "adam"}) {
    if (fs::exists(run_dir / (std::string("theta_") + m + ".vlt"))) {
      methods.push_back(m);
    }
  }

  std::string csv = "method,split,ssim_mean,ssim_std,psnr_mean,l1,l2\n";
  for (const std::string& method : methods) {
    const Tensor theta = read_vlt1(run_dir / ("theta_" + method + ".vlt"));
    for (const std::string& split : {std::string("train"), std::string("test")}) {
      const VIProblem& p = (split == "train") ? train_problem : test_problem;
      const std::size_t n = p.num_samples();
      std::vector<double> ssim_vals(n);
      double psnr_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        Tensor denoised = p.sample(k).op.apply(theta);
        p.activation().apply_inplace(denoised);
        const Tensor& clean = p.sample(k).target;
        ssim_vals[k] = ssim(clean, denoised);
        psnr_sum += psnr(clean, denoised);
      }
      double mean = 0.0;
      for (double v : ssim_vals) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : ssim_vals) var += (v - mean) * (v - mean);
      const double stddev = (n > 1) ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;

      csv += method + "," + split + "," + fmt_double(mean) + "," +
             fmt_double(stddev) + "," +
             fmt_double(psnr_sum / static_cast<double>(n)) + "," +
             fmt_double(p.training_error(theta, 1)) + "," +
             fmt_double(p.training_error(theta, 2)) + "\n";
    }
  }
  atomic_write(metrics_csv, csv);
}

void plot_traces(const fs::path& run_dir, const fs::path& svg_path) {
  struct MethodStyle {
    const char* name;
    const char* color;
  };
  // Blue for SGD, green for Adam, red for the equilibrium method.
  static constexpr MethodStyle kStyles[] = {
      {"vi", "#d62728"}, {"sgd", "#1f77b4"}, {"adam", "#2ca02c"}};

  PlotPanel l1{"normalized averaged l1 error", "l1 error", true, {}};
  PlotPanel l2{"normalized averaged l2 error", "l2 error", true, {}};
  for (const auto& style : kStyles) {
    const fs::path csv = run_dir / (std::string("trace_") + style.name + ".csv");
    if (!fs::exists(csv)) continue;
    const auto records = read_trace_csv(csv);
    if (records.empty()) continue;
    PlotSeries s1{style.name, style.color, {}};
    PlotSeries s2{style.name, style.color, {}};
    const double l1_0 = records.front().l1_err;
    const double l2_0 = records.front().l2_err;
    for (const TraceRecord& r : records) {
      const double e = static_cast<double>(r.epoch);
      s1.points.emplace_back(e, l1_0 > 0.0 ? r.l1_err / l1_0 : r.l1_err);
      s2.points.emplace_back(e, l2_0 > 0.0 ? r.l2_err / l2_0 : r.l2_err);
    }
    l1.series.push_back(std::move(s1));
    l2.series.push_back(std::move(s2));
  }
  if (l1.series.empty()) {
    throw std::runtime_error("no trace CSVs found in " + run_dir.string());
  }
  atomic_write(svg_path, render_line_chart({l1, l2}, "epoch"));
}

}  // namespace vilt
