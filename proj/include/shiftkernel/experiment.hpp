// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shiftkernel/aggregate.hpp"
#include "shiftkernel/csv.hpp"
#include "shiftkernel/detail/rng.hpp"
#include "shiftkernel/estimator.hpp"
#include "shiftkernel/imaging.hpp"
#include "shiftkernel/metrics.hpp"
#include "shiftkernel/synthetic.hpp"
#include "shiftkernel/weights.hpp"

namespace shiftkernel {

enum class ExperimentMode { BlurSinogram, BlurFaces };
enum class BlurType { Gaussian, Motion };

struct KulsifConfig {
  KernelSpec kernel{KernelFamily::Gaussian, 1e-2};
  std::vector<double> alpha_grid = default_alpha_grid();
  double b_cap = kDefaultBetaCap;
};

/// Everything the deblurring pipeline needs. Weights come from KuLSIF unless
/// an exact-weights CSV path is configured.
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::BlurSinogram;
  BlurType blur = BlurType::Gaussian;
  std::string corpus_dir;
  int n = 200;
  int m = 200;
  int image_size = 64;
  std::vector<KernelSpec> kernels{KernelSpec{KernelFamily::Gaussian, 1e-2}};
  std::vector<double> lambda_grid{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  FilterSpec filter{FilterFamily::Tikhonov, 1.0, 1};
  KulsifConfig kulsif;
  std::optional<std::string> exact_weights_path;
  int n_ang = 60;
  int n_det = 95;
  double cond_threshold = kDefaultCondThreshold;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  void validate() const {
    if (corpus_dir.empty())
      throw std::invalid_argument("config.corpus_dir: missing");
    if (n < 1) throw std::invalid_argument("config.n: must be >= 1");
    if (m < 1) throw std::invalid_argument("config.m: must be >= 1");
    if (image_size < 8)
      throw std::invalid_argument("config.image_size: must be >= 8");
    if (kernels.empty())
      throw std::invalid_argument("config.kernels: must list at least one");
    for (const auto& k : kernels) k.validate();
    if (lambda_grid.empty())
      throw std::invalid_argument("config.lambda_grid: must be non-empty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      if (!(lambda_grid[i] > 0.0))
        throw std::invalid_argument("config.lambda_grid: entries must be > 0");
      if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
        throw std::invalid_argument(
            "config.lambda_grid: must be strictly decreasing");
    }
    FilterSpec probe = filter;
    probe.lambda = lambda_grid.front();
    probe.validate();
    kulsif.kernel.validate();
    if (kulsif.alpha_grid.size() < 2)
      throw std::invalid_argument(
          "config.kulsif.alpha_grid: needs at least 2 entries");
    if (n_ang < 1) throw std::invalid_argument("config.radon.n_ang: must be >= 1");
    if (n_det < 1) throw std::invalid_argument("config.radon.n_det: must be >= 1");
    if (!(cond_threshold > 1.0))
      throw std::invalid_argument("config.cond_threshold: must be > 1");
  }
};

struct TableRow {
  std::string label;
  MetricReport metrics;
};

struct ExperimentResult {
  std::vector<TableRow> rows;       // grid/kernel order, then "Agg."
  MetricReport iradon_baseline;     // direct FBP of the target sinograms
  double alpha = 0.0;               // selected KuLSIF alpha (0 = exact path)
};

namespace detail {

inline Vector flatten(const Eigen::Ref<const Matrix>& M) {
  return Eigen::Map<const Vector>(M.data(), M.size());
}

inline std::vector<std::string> list_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::invalid_argument("config.corpus_dir: not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

// Seeded Fisher-Yates; the split protocol is shuffle, then first n source,
// next m target, so the two sets are disjoint by construction.
inline void seeded_shuffle(std::vector<std::string>& files, std::uint64_t seed) {
  auto rng = stream_rng(seed, 0x5057);
  for (std::size_t i = files.size(); i > 1; --i)
    std::swap(files[i - 1], files[rng.next_below(i)]);
}

struct Prepared {
  ShiftDataset ds;   // Xs: clean sinograms, Y: clean images, Xt: degraded sinograms
  Matrix truth;      // m x p ground-truth images for the targets
  Matrix baseline;   // m x p iradon reconstructions of the target sinograms
  Vector beta;
  double alpha = 0.0;
};

inline Prepared prepare_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto files = list_corpus(cfg.corpus_dir);
  if (static_cast<int>(files.size()) < cfg.n + cfg.m)
    throw std::invalid_argument(
        "config.corpus_dir: needs at least n + m = " +
        std::to_string(cfg.n + cfg.m) + " PGM images, found " +
        std::to_string(files.size()));
  std::vector<std::string> order = files;
  seeded_shuffle(order, cfg.seed);

  const Matrix kern = cfg.blur == BlurType::Gaussian ? gaussian_blur_kernel()
                                                     : motion_blur_kernel();
  const int S = cfg.image_size;
  const Eigen::Index x_dim =
      static_cast<Eigen::Index>(cfg.n_det) * cfg.n_ang;
  const Eigen::Index p = static_cast<Eigen::Index>(S) * S;

  Prepared prep;
  prep.ds.Xs.resize(cfg.n, x_dim);
  prep.ds.Y.resize(cfg.n, p);
  prep.ds.Xt.resize(cfg.m, x_dim);
  prep.truth.resize(cfg.m, p);
  prep.baseline.resize(cfg.m, p);

  for (int i = 0; i < cfg.n; ++i) {
    const GrayImage img =
        resize(read_pgm(order[static_cast<std::size_t>(i)]), S, S);
    const Sinogram sino = radon(img, cfg.n_ang, cfg.n_det);
    prep.ds.Xs.row(i) = flatten(sino.data).transpose();
    prep.ds.Y.row(i) = flatten(img.pixels).transpose();
  }
  for (int j = 0; j < cfg.m; ++j) {
    const GrayImage img =
        resize(read_pgm(order[static_cast<std::size_t>(cfg.n + j)]), S, S);
    Sinogram degraded;
    if (cfg.mode == ExperimentMode::BlurSinogram) {
      degraded = radon(img, cfg.n_ang, cfg.n_det);
      degraded.data = convolve2d(degraded.data, kern);
    } else {
      GrayImage blurred{convolve2d(img.pixels, kern)};
      degraded = radon(blurred.clamp(), cfg.n_ang, cfg.n_det);
    }
    prep.ds.Xt.row(j) = flatten(degraded.data).transpose();
    prep.truth.row(j) = flatten(img.pixels).transpose();
    prep.baseline.row(j) = flatten(iradon(degraded, S, S).pixels).transpose();
  }

  if (cfg.exact_weights_path) {
    prep.beta = read_csv_vector(*cfg.exact_weights_path);
    if (prep.beta.size() != cfg.n)
      throw std::invalid_argument("config.exact_weights: expected " +
                                  std::to_string(cfg.n) + " weights, got " +
                                  std::to_string(prep.beta.size()));
    if ((prep.beta.array() < 0.0).any())
      throw std::invalid_argument("config.exact_weights: negative weight");
    prep.alpha = 0.0;
  } else {
    prep.alpha = select_alpha_quasi_opt(cfg.kulsif.kernel, prep.ds.Xs,
                                        prep.ds.Xt, cfg.kulsif.alpha_grid);
    prep.beta = kulsif_weights(cfg.kulsif.kernel, prep.ds.Xs, prep.ds.Xt,
                               prep.alpha, cfg.kulsif.b_cap)
                    .beta;
  }
  prep.ds.beta = prep.beta;
  return prep;
}

inline Matrix clamp01(Matrix M) {
  return M.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace detail

/// Table 1 shape: one row per lambda, then the aggregate of all of them.
inline ExperimentResult run_lambda_sweep(const ExperimentConfig& cfg);

/// Table 2 shape: per kernel, aggregate across the lambda grid; then
/// aggregate the per-kernel aggregates (multiple kernel learning).
inline ExperimentResult run_kernel_aggregation(const ExperimentConfig& cfg);

namespace detail {

inline std::string lambda_label(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0e", lambda);
  return buf;
}

template <class PrepFn>
ExperimentResult run_sweep_impl(const ExperimentConfig& cfg, PrepFn&& prep_fn) {
  Prepared prep = prep_fn(cfg);
  const KernelSpec& spec = cfg.kernels.front();

  ExperimentResult result;
  result.alpha = prep.alpha;
  result.iradon_baseline = metric_report(prep.baseline, prep.truth);

  std::vector<AnyModel> members;
  members.reserve(cfg.lambda_grid.size());
  for (double lambda : cfg.lambda_grid) {
    FittedModel model = fit(prep.ds, spec, cfg.filter.with_lambda(lambda),
                            prep.beta);
    const Matrix preds = clamp01(model.predict_batch(prep.ds.Xt));
    result.rows.push_back(
        {lambda_label(lambda), metric_report(preds, prep.truth)});
    members.emplace_back(std::move(model));
  }

  AggregateModel agg =
      aggregate(std::move(members), prep.ds, prep.beta, cfg.cond_threshold);
  const Matrix agg_preds = clamp01(agg.predict_batch(prep.ds.Xt));
  result.rows.push_back({"Agg.", metric_report(agg_preds, prep.truth)});
  return result;
}

template <class PrepFn>
ExperimentResult run_mkl_impl(const ExperimentConfig& cfg, PrepFn&& prep_fn) {
  Prepared prep = prep_fn(cfg);

  ExperimentResult result;
  result.alpha = prep.alpha;
  result.iradon_baseline = metric_report(prep.baseline, prep.truth);

  std::vector<AnyModel> per_kernel;
  per_kernel.reserve(cfg.kernels.size());
  for (const auto& spec : cfg.kernels) {
    std::vector<AnyModel> fits;
    fits.reserve(cfg.lambda_grid.size());
    for (double lambda : cfg.lambda_grid)
      fits.emplace_back(
          fit(prep.ds, spec, cfg.filter.with_lambda(lambda), prep.beta));
    AggregateModel km =
        aggregate(std::move(fits), prep.ds, prep.beta, cfg.cond_threshold);
    const Matrix preds = clamp01(km.predict_batch(prep.ds.Xt));
    result.rows.push_back(
        {to_string(spec.family), metric_report(preds, prep.truth)});
    per_kernel.emplace_back(std::move(km));
  }

  AggregateModel final_agg =
      aggregate(std::move(per_kernel), prep.ds, prep.beta, cfg.cond_threshold);
  const Matrix preds = clamp01(final_agg.predict_batch(prep.ds.Xt));
  result.rows.push_back({"Agg.", metric_report(preds, prep.truth)});
  return result;
}

}  // namespace detail

inline ExperimentResult run_lambda_sweep(const ExperimentConfig& cfg) {
  return detail::run_sweep_impl(cfg, detail::prepare_experiment);
}

inline ExperimentResult run_kernel_aggregation(const ExperimentConfig& cfg) {
  return detail::run_mkl_impl(cfg, detail::prepare_experiment);
}

// ---------------------------------------------------------------------------
// Convergence-rate diagnostic on the synthetic test bed.

struct RateCheckConfig {
  std::vector<int> ns{100, 400, 1600};
  int seeds = 10;
  int d = 2;
  int p = 4;
  double shift_strength = 0.5;
  double noise_sd = 0.05;
  int n_mc = 2000;
  KernelSpec kernel{KernelFamily::Gaussian, 1.0};
  std::uint64_t seed = 0;

  void validate() const {
    if (ns.size() < 3)
      throw std::invalid_argument("config.ns: needs at least 3 sample sizes");
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns[i] < 1) throw std::invalid_argument("config.ns: entries must be >= 1");
      if (i > 0 && ns[i] <= ns[i - 1])
        throw std::invalid_argument("config.ns: must be strictly increasing");
    }
    if (seeds < 1) throw std::invalid_argument("config.seeds: must be >= 1");
    if (d < 1) throw std::invalid_argument("config.d: must be >= 1");
    if (p < 1) throw std::invalid_argument("config.p: must be >= 1");
    if (shift_strength < 0.0 || shift_strength > 1.0)
      throw std::invalid_argument("config.shift_strength: outside [0,1]");
    if (noise_sd < 0.0)
      throw std::invalid_argument("config.noise_sd: must be >= 0");
    if (n_mc < 1) throw std::invalid_argument("config.n_mc: must be >= 1");
    kernel.validate();
  }
};

struct RateReport {
  std::vector<int> ns;
  std::vector<double> median_errors;  // per n
  std::vector<double> slopes;         // per seed; NaN when degenerate
  double median_slope = 0.0;
  bool degenerate = false;
};

using RatePredictorFactory = std::function<AnyModel(
    const SyntheticProblem&, const ShiftDataset&, int n)>;

/// Default predictor: Tikhonov fit with exact weights and lambda = n^{-2/3}.
inline RatePredictorFactory tikhonov_rate_factory(const KernelSpec& spec) {
  return [spec](const SyntheticProblem&, const ShiftDataset& ds,
                int n) -> AnyModel {
    FilterSpec filter{FilterFamily::Tikhonov,
                      std::pow(static_cast<double>(n), -2.0 / 3.0), 1};
    return fit(ds, spec, filter, *ds.beta);
  };
}

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace detail

inline RateReport run_rate_check(const RateCheckConfig& cfg,
                                 const RatePredictorFactory& factory_in = {}) {
  cfg.validate();
  const RatePredictorFactory factory =
      factory_in ? factory_in : tikhonov_rate_factory(cfg.kernel);

  RateReport report;
  report.ns = cfg.ns;
  std::vector<std::vector<double>> errs_by_n(cfg.ns.size());
  std::vector<double> finite_slopes;
  for (int s = 0; s < cfg.seeds; ++s) {
    std::vector<double> errs;
    errs.reserve(cfg.ns.size());
    bool usable = true;
    for (int n : cfg.ns) {
      auto [prob, ds] = make_problem(cfg.seed + static_cast<std::uint64_t>(s),
                                     n, n, cfg.d, cfg.p, cfg.shift_strength,
                                     cfg.noise_sd);
      const AnyModel model = factory(prob, ds, n);
      const double err = l2_target_error(
          model, prob, cfg.n_mc,
          cfg.seed + 7919 * static_cast<std::uint64_t>(s + 1));
      errs.push_back(err);
      if (!(err > 1e-14)) usable = false;
    }
    for (std::size_t i = 0; i < errs.size(); ++i)
      errs_by_n[i].push_back(errs[i]);
    if (usable) {
      const double slope = rate_slope(cfg.ns, errs);
      report.slopes.push_back(slope);
      finite_slopes.push_back(slope);
    } else {
      report.slopes.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  report.median_errors.reserve(cfg.ns.size());
  for (auto& e : errs_by_n) report.median_errors.push_back(detail::median(e));
  if (finite_slopes.empty()) {
    report.degenerate = true;
    report.median_slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.median_slope = detail::median(finite_slopes);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Table rendering: aligned text in the paper's column order, plus CSV.

inline std::string format_table(const std::vector<TableRow>& rows,
                                const std::string& first_col) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %-10s %-10s %-8s\n", first_col.c_str(),
                "MSE", "Rel. Err.", "PSNR");
  out += buf;
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %-10.6f %-10.4f %-8.2f\n",
                  row.label.c_str(), row.metrics.mse, row.metrics.rel_err,
                  row.metrics.psnr);
    out += buf;
  }
  return out;
}

inline std::string format_table_csv(const std::vector<TableRow>& rows,
                                    const std::string& first_col) {
  std::string out = first_col + ",mse,rel_err,psnr\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g\n",
                  row.label.c_str(), row.metrics.mse, row.metrics.rel_err,
                  row.metrics.psnr);
    out += buf;
  }
  return out;
}

}  // namespace shiftkernel
