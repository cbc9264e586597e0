// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset generation, Radon/blur transforms, KuLSIF
// weights, fitting, prediction, aggregation, metrics, and the sweep/mkl/rate
// experiment drivers. Exit codes: 0 ok, 2 validation error, 1 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shiftkernel/shiftkernel.hpp"

namespace fs = std::filesystem;
using namespace shiftkernel;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 1;
};

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

void ensure_out(const GlobalOpts& g) { fs::create_directories(g.out_dir); }

KernelSpec kernel_from_flags(const std::string& family, double gamma) {
  json j{{"family", family}, {"gamma", gamma}};
  return kernel_spec_from_json(j);
}

FilterSpec filter_from_flags(const std::string& family, double lambda, int m) {
  json j{{"family", family}, {"lambda", lambda}, {"m", m}};
  return filter_spec_from_json(j);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
}

void print_result(const ExperimentResult& result, const std::string& first_col,
                  const GlobalOpts& g) {
  const std::string table = format_table(result.rows, first_col);
  std::cout << table;
  char line[160];
  std::snprintf(line, sizeof(line),
                "iradon baseline: MSE %.6f  Rel. Err. %.4f  PSNR %.2f\n",
                result.iradon_baseline.mse, result.iradon_baseline.rel_err,
                result.iradon_baseline.psnr);
  std::cout << line;
  if (result.alpha > 0.0)
    std::cout << "kulsif alpha: " << result.alpha << "\n";

  ensure_out(g);
  std::ofstream txt(fs::path(g.out_dir) / "table.txt");
  txt << table;
  std::ofstream csv(fs::path(g.out_dir) / "table.csv");
  csv << format_table_csv(result.rows, first_col);
  json summary{{"alpha", result.alpha},
               {"iradon_baseline",
                {{"mse", result.iradon_baseline.mse},
                 {"rel_err", result.iradon_baseline.rel_err},
                 {"psnr", result.iradon_baseline.psnr}}}};
  json rows = json::array();
  for (const auto& row : result.rows)
    rows.push_back({{"label", row.label},
                    {"mse", row.metrics.mse},
                    {"rel_err", row.metrics.rel_err},
                    {"psnr", row.metrics.psnr}});
  summary["rows"] = rows;
  std::ofstream js(fs::path(g.out_dir) / "result.json");
  js << summary.dump(2) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Regularized vector-valued kernel regression under covariate "
               "shift: estimators, aggregation, and the deblurring pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--seed", g.seed, "Seed override");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads for transforms");

  // shapes: stand-in corpus when no photographic PGM set is available.
  auto* shapes = app.add_subcommand("shapes", "Generate a synthetic-shape PGM corpus");
  int shapes_count = 100;
  int shapes_size = 64;
  int shapes_atoms = 24;
  int shapes_active = 3;
  shapes->add_option("--count", shapes_count, "Number of images");
  shapes->add_option("--size", shapes_size, "Image side length");
  shapes->add_option("--atoms", shapes_atoms,
                     "Dictionary size (0 = independent images)");
  shapes->add_option("--active", shapes_active, "Atoms mixed per image");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic covariate-shift dataset");
  int sy_n = 200, sy_m = 200, sy_d = 2, sy_p = 4;
  double sy_shift = 0.5, sy_noise = 0.05;
  synth->add_option("--n", sy_n, "Source sample size");
  synth->add_option("--m", sy_m, "Target sample size");
  synth->add_option("--d", sy_d, "Input dimension");
  synth->add_option("--p", sy_p, "Output dimension");
  synth->add_option("--shift", sy_shift, "Shift strength in [0,1]");
  synth->add_option("--noise-sd", sy_noise, "Output noise standard deviation");

  auto* radon_cmd = app.add_subcommand("radon", "Sinogram of a PGM image");
  std::string radon_image;
  int radon_n_ang = 60, radon_n_det = 95;
  radon_cmd->add_option("--image", radon_image, "Input PGM")->required();
  radon_cmd->add_option("--n-ang", radon_n_ang, "Projection angles");
  radon_cmd->add_option("--n-det", radon_n_det, "Detector count");

  auto* iradon_cmd = app.add_subcommand("iradon", "Filtered backprojection of a sinogram CSV");
  std::string iradon_sino;
  int iradon_h = 64, iradon_w = 64;
  iradon_cmd->add_option("--sinogram", iradon_sino, "Input sinogram CSV")->required();
  iradon_cmd->add_option("--height", iradon_h, "Output height");
  iradon_cmd->add_option("--width", iradon_w, "Output width");

  auto* blur_cmd = app.add_subcommand("blur", "Convolve a PGM image or CSV matrix with a blur kernel");
  std::string blur_input, blur_kernel = "gaussian";
  blur_cmd->add_option("--input", blur_input, "Input .pgm or .csv")->required();
  blur_cmd->add_option("--kernel", blur_kernel, "gaussian | motion");

  auto* kulsif_cmd = app.add_subcommand("kulsif", "KuLSIF importance weights with quasi-optimal alpha");
  std::string ku_source, ku_target, ku_family = "gaussian", ku_alpha_grid;
  double ku_gamma = 1e-2, ku_alpha = 0.0, ku_bcap = kDefaultBetaCap;
  kulsif_cmd->add_option("--source", ku_source, "Source inputs CSV")->required();
  kulsif_cmd->add_option("--target", ku_target, "Target inputs CSV")->required();
  kulsif_cmd->add_option("--kernel-family", ku_family, "gaussian|cauchy|exponential|imq");
  kulsif_cmd->add_option("--kernel-gamma", ku_gamma, "Kernel bandwidth");
  kulsif_cmd->add_option("--alpha", ku_alpha, "Fixed alpha (skips selection)");
  kulsif_cmd->add_option("--alpha-grid", ku_alpha_grid, "Comma-separated decreasing grid");
  kulsif_cmd->add_option("--b-cap", ku_bcap, "Weight cap");

  auto* fit_cmd = app.add_subcommand("fit", "Fit the spectral-filter estimator; writes a model directory");
  std::string fit_source, fit_outputs, fit_weights, fit_target;
  std::string fit_kfamily = "gaussian", fit_ffamily = "tikhonov";
  double fit_gamma = 1e-2, fit_lambda = 1e-3;
  int fit_m = 1;
  std::string fit_ku_family = "gaussian";
  double fit_ku_gamma = 1e-2;
  fit_cmd->add_option("--source", fit_source, "Source inputs CSV")->required();
  fit_cmd->add_option("--outputs", fit_outputs, "Source outputs CSV")->required();
  fit_cmd->add_option("--weights", fit_weights, "Weights CSV (exact path)");
  fit_cmd->add_option("--target", fit_target, "Target inputs CSV (KuLSIF path)");
  fit_cmd->add_option("--kernel-family", fit_kfamily, "Estimator kernel family");
  fit_cmd->add_option("--kernel-gamma", fit_gamma, "Estimator kernel bandwidth");
  fit_cmd->add_option("--filter-family", fit_ffamily, "tikhonov|iterated_tikhonov|cutoff");
  fit_cmd->add_option("--lambda", fit_lambda, "Regularization parameter");
  fit_cmd->add_option("--filter-m", fit_m, "Iterated Tikhonov order");
  fit_cmd->add_option("--kulsif-kernel-family", fit_ku_family, "KuLSIF kernel family");
  fit_cmd->add_option("--kulsif-kernel-gamma", fit_ku_gamma, "KuLSIF kernel bandwidth");

  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model directory");
  std::string pr_model, pr_inputs;
  predict_cmd->add_option("--model", pr_model, "Model directory")->required();
  predict_cmd->add_option("--inputs", pr_inputs, "Inputs CSV")->required();

  auto* agg_cmd = app.add_subcommand("aggregate", "Aggregate saved models; writes coeffs.json");
  std::string ag_manifest, ag_source, ag_outputs, ag_weights;
  double ag_cond = kDefaultCondThreshold;
  agg_cmd->add_option("--manifest", ag_manifest, "JSON manifest listing model dirs")->required();
  agg_cmd->add_option("--source", ag_source, "Source inputs CSV")->required();
  agg_cmd->add_option("--outputs", ag_outputs, "Source outputs CSV")->required();
  agg_cmd->add_option("--weights", ag_weights, "Weights CSV")->required();
  agg_cmd->add_option("--cond-threshold", ag_cond, "Condition-number threshold");

  auto* metrics_cmd = app.add_subcommand("metrics", "MSE / Rel. Err. / PSNR between two prediction CSVs");
  std::string me_pred, me_truth;
  metrics_cmd->add_option("--pred", me_pred, "Predictions CSV")->required();
  metrics_cmd->add_option("--truth", me_truth, "Ground-truth CSV")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Lambda sweep plus aggregation (table per lambda + Agg.)");
  auto* mkl_cmd = app.add_subcommand("mkl", "Per-kernel aggregation plus final kernel aggregation");
  auto* rate_cmd = app.add_subcommand("ratecheck", "Empirical convergence-rate slope on synthetic data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  detail::set_thread_count(g.threads);

  if (shapes->parsed()) {
    ensure_out(g);
    const std::uint64_t seed = g.seed.value_or(0);
    const auto corpus = shape_mixture_corpus(shapes_count, shapes_size, seed,
                                             shapes_atoms, shapes_active);
    for (int i = 0; i < shapes_count; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "shape_%04d.pgm", i);
      write_pgm(corpus[static_cast<std::size_t>(i)],
                (fs::path(g.out_dir) / name).string());
    }
    std::cout << "wrote " << shapes_count << " images to " << g.out_dir << "\n";
    return 0;
  }

  if (synth->parsed()) {
    ensure_out(g);
    const std::uint64_t seed = g.seed.value_or(0);
    auto [prob, ds] = make_problem(seed, sy_n, sy_m, sy_d, sy_p, sy_shift, sy_noise);
    write_csv(ds.Xs, (fs::path(g.out_dir) / "Xs.csv").string());
    write_csv(ds.Y, (fs::path(g.out_dir) / "Y.csv").string());
    write_csv(ds.Xt, (fs::path(g.out_dir) / "Xt.csv").string());
    write_csv(*ds.beta, (fs::path(g.out_dir) / "beta.csv").string());
    json pj{{"seed", seed},        {"n", sy_n},
            {"m", sy_m},           {"d", sy_d},
            {"p", sy_p},           {"shift_strength", sy_shift},
            {"noise_sd", sy_noise}, {"ratio_bound", prob.ratio_bound()}};
    std::ofstream pjf(fs::path(g.out_dir) / "problem.json");
    pjf << pj.dump(2) << "\n";
    std::cout << "wrote dataset bundle to " << g.out_dir << "\n";
    return 0;
  }

  if (radon_cmd->parsed()) {
    ensure_out(g);
    const GrayImage img = read_pgm(radon_image);
    const Sinogram sino = radon(img, radon_n_ang, radon_n_det);
    const std::string out =
        (fs::path(g.out_dir) / (stem_of(radon_image) + "_sino.csv")).string();
    save_sinogram(sino, out);
    std::cout << out << "\n";
    return 0;
  }

  if (iradon_cmd->parsed()) {
    ensure_out(g);
    const Sinogram sino = load_sinogram(iradon_sino);
    const GrayImage img = iradon(sino, iradon_h, iradon_w);
    const std::string out =
        (fs::path(g.out_dir) / (stem_of(iradon_sino) + "_recon.pgm")).string();
    write_pgm(img, out);
    std::cout << out << "\n";
    return 0;
  }

  if (blur_cmd->parsed()) {
    ensure_out(g);
    Matrix kern;
    if (blur_kernel == "gaussian") kern = gaussian_blur_kernel();
    else if (blur_kernel == "motion") kern = motion_blur_kernel();
    else throw std::invalid_argument("blur: unknown kernel '" + blur_kernel + "'");
    const std::string ext = fs::path(blur_input).extension().string();
    if (ext == ".pgm") {
      GrayImage img = read_pgm(blur_input);
      img.pixels = convolve2d(img.pixels, kern);
      const std::string out =
          (fs::path(g.out_dir) / (stem_of(blur_input) + "_blur.pgm")).string();
      write_pgm(img.clamp(), out);
      std::cout << out << "\n";
    } else if (ext == ".csv") {
      const Matrix blurred = convolve2d(read_csv(blur_input), kern);
      const std::string out =
          (fs::path(g.out_dir) / (stem_of(blur_input) + "_blur.csv")).string();
      write_csv(blurred, out);
      if (fs::exists(blur_input + ".json"))
        fs::copy_file(blur_input + ".json", out + ".json",
                      fs::copy_options::overwrite_existing);
      std::cout << out << "\n";
    } else {
      throw std::invalid_argument("blur: input must be .pgm or .csv");
    }
    return 0;
  }

  if (kulsif_cmd->parsed()) {
    ensure_out(g);
    const KernelSpec spec = kernel_from_flags(ku_family, ku_gamma);
    const Matrix Xs = read_csv(ku_source);
    const Matrix Xt = read_csv(ku_target);
    double alpha = ku_alpha;
    if (!(alpha > 0.0)) {
      std::vector<double> grid = default_alpha_grid();
      if (!ku_alpha_grid.empty()) {
        grid.clear();
        std::stringstream ss(ku_alpha_grid);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      }
      alpha = select_alpha_quasi_opt(spec, Xs, Xt, grid);
    }
    const WeightEstimate w = kulsif_weights(spec, Xs, Xt, alpha, ku_bcap);
    write_csv(w.beta, (fs::path(g.out_dir) / "weights.csv").string());
    std::cout << "alpha," << alpha << "\n";
    return 0;
  }

  if (fit_cmd->parsed()) {
    ensure_out(g);
    ShiftDataset ds;
    ds.Xs = read_csv(fit_source);
    ds.Y = read_csv(fit_outputs);
    ds.Xt.resize(0, ds.Xs.cols());
    Vector beta;
    if (!fit_weights.empty()) {
      beta = read_csv_vector(fit_weights);
    } else if (!fit_target.empty()) {
      const Matrix Xt = read_csv(fit_target);
      const KernelSpec kspec = kernel_from_flags(fit_ku_family, fit_ku_gamma);
      const double alpha =
          select_alpha_quasi_opt(kspec, ds.Xs, Xt, default_alpha_grid());
      beta = kulsif_weights(kspec, ds.Xs, Xt, alpha).beta;
      std::cout << "alpha," << alpha << "\n";
    } else {
      beta = Vector::Ones(ds.Xs.rows());
    }
    const FittedModel model =
        fit(ds, kernel_from_flags(fit_kfamily, fit_gamma),
            filter_from_flags(fit_ffamily, fit_lambda, fit_m), beta);
    const std::string dir = (fs::path(g.out_dir) / "model").string();
    save_model(model, dir);
    std::cout << dir << "\n";
    return 0;
  }

  if (predict_cmd->parsed()) {
    ensure_out(g);
    const FittedModel model = load_model(pr_model);
    const Matrix preds = model.predict_batch(read_csv(pr_inputs));
    const std::string out = (fs::path(g.out_dir) / "predictions.csv").string();
    write_csv(preds, out);
    std::cout << out << "\n";
    return 0;
  }

  if (agg_cmd->parsed()) {
    ensure_out(g);
    std::ifstream mf(ag_manifest);
    if (!mf) throw std::invalid_argument("aggregate: cannot open manifest");
    const json manifest = json::parse(mf);
    std::vector<AnyModel> members;
    for (const auto& dir : manifest.at("models"))
      members.emplace_back(load_model(dir.get<std::string>()));
    if (members.empty())
      throw std::invalid_argument("aggregate: manifest lists no models");
    ShiftDataset ds;
    ds.Xs = read_csv(ag_source);
    ds.Y = read_csv(ag_outputs);
    ds.Xt.resize(0, ds.Xs.cols());
    const Vector beta = read_csv_vector(ag_weights);
    auto [G, gv] = build_system(members, ds, beta);
    const AggregationSolution sol = solve_aggregation(G, gv, ag_cond);
    json out{{"kept", sol.kept}, {"cond", sol.cond}};
    out["coeffs"] = std::vector<double>(sol.coeffs.data(),
                                        sol.coeffs.data() + sol.coeffs.size());
    const std::string path = (fs::path(g.out_dir) / "coeffs.json").string();
    std::ofstream outf(path);
    outf << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (metrics_cmd->parsed()) {
    const Matrix pred = read_csv(me_pred);
    const Matrix truth = read_csv(me_truth);
    const MetricReport r = metric_report(pred, truth);
    json j{{"mse", r.mse},
           {"rel_err", r.rel_err},
           {"psnr", r.psnr},
           {"n_items", r.n_items}};
    std::cout << j.dump(2) << "\n";
    std::vector<TableRow> rows{{"all", r}};
    std::cout << format_table(rows, "Set");
    return 0;
  }

  if (sweep_cmd->parsed() || mkl_cmd->parsed()) {
    if (g.config_path.empty())
      throw std::invalid_argument("sweep/mkl: --config is required");
    json j = load_config(g.config_path);
    ExperimentConfig cfg = experiment_config_from_json(j);
    if (g.seed) cfg.seed = *g.seed;
    if (g.out_dir != ".") cfg.output_dir = g.out_dir;
    if (sweep_cmd->parsed()) {
      print_result(run_lambda_sweep(cfg), "Lambda", g);
    } else {
      print_result(run_kernel_aggregation(cfg), "Kernel", g);
    }
    return 0;
  }

  if (rate_cmd->parsed()) {
    RateCheckConfig cfg;
    if (!g.config_path.empty())
      cfg = rate_check_config_from_json(load_config(g.config_path));
    if (g.seed) cfg.seed = *g.seed;
    const RateReport report = run_rate_check(cfg);
    json j{{"ns", report.ns},
           {"median_errors", report.median_errors},
           {"slopes", report.slopes},
           {"median_slope", report.median_slope},
           {"degenerate", report.degenerate}};
    std::cout << j.dump(2) << "\n";
    ensure_out(g);
    std::ofstream outf(fs::path(g.out_dir) / "rate.json");
    outf << j.dump(2) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
