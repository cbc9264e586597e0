// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "shiftkernel/csv.hpp"
#include "shiftkernel/estimator.hpp"
#include "shiftkernel/experiment.hpp"
#include "shiftkernel/imaging.hpp"
#include "shiftkernel/kernels.hpp"
#include "shiftkernel/spectral.hpp"

namespace shiftkernel {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Kernel/filter specs as JSON.

inline json to_json(const KernelSpec& spec) {
  return json{{"family", to_string(spec.family)}, {"gamma", spec.gamma}};
}

inline KernelSpec kernel_spec_from_json(const json& j) {
  KernelSpec spec;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "gaussian") spec.family = KernelFamily::Gaussian;
  else if (fam == "cauchy") spec.family = KernelFamily::Cauchy;
  else if (fam == "exponential") spec.family = KernelFamily::Exponential;
  else if (fam == "imq") spec.family = KernelFamily::IMQ;
  else throw std::invalid_argument("unknown kernel family '" + fam + "'");
  spec.gamma = j.at("gamma").get<double>();
  spec.validate();
  return spec;
}

inline json to_json(const FilterSpec& f) {
  json j{{"family", to_string(f.family)}, {"lambda", f.lambda}};
  if (f.family == FilterFamily::IteratedTikhonov) j["m"] = f.m;
  return j;
}

inline FilterSpec filter_spec_from_json(const json& j) {
  FilterSpec f;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "tikhonov") f.family = FilterFamily::Tikhonov;
  else if (fam == "iterated_tikhonov") f.family = FilterFamily::IteratedTikhonov;
  else if (fam == "cutoff") f.family = FilterFamily::SpectralCutoff;
  else throw std::invalid_argument("unknown filter family '" + fam + "'");
  if (j.contains("m")) f.m = j.at("m").get<int>();
  if (j.contains("lambda")) f.lambda = j.at("lambda").get<double>();
  f.validate();
  return f;
}

// ---------------------------------------------------------------------------
// Fitted-model directories: meta.json + C.csv + Xs.csv + beta.csv.

inline void save_model(const FittedModel& model, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json meta{{"kernel", to_json(model.kernel)},
            {"filter", to_json(model.filter)},
            {"n", model.train_inputs.rows()},
            {"d", model.train_inputs.cols()},
            {"p", model.coeff.rows()}};
  std::ofstream meta_out(fs::path(dir) / "meta.json");
  if (!meta_out) throw std::runtime_error("save_model: cannot write meta.json");
  meta_out << meta.dump(2) << '\n';
  write_csv(model.coeff, (fs::path(dir) / "C.csv").string());
  write_csv(model.train_inputs, (fs::path(dir) / "Xs.csv").string());
  write_csv(model.beta, (fs::path(dir) / "beta.csv").string());
}

inline FittedModel load_model(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta_in(fs::path(dir) / "meta.json");
  if (!meta_in)
    throw std::runtime_error("load_model: cannot open " + dir + "/meta.json");
  json meta = json::parse(meta_in);

  FittedModel model;
  model.kernel = kernel_spec_from_json(meta.at("kernel"));
  model.filter = filter_spec_from_json(meta.at("filter"));
  model.coeff = read_csv((fs::path(dir) / "C.csv").string());
  model.train_inputs = read_csv((fs::path(dir) / "Xs.csv").string());
  model.beta = read_csv_vector((fs::path(dir) / "beta.csv").string());

  const auto n = meta.at("n").get<Eigen::Index>();
  const auto d = meta.at("d").get<Eigen::Index>();
  const auto p = meta.at("p").get<Eigen::Index>();
  if (model.train_inputs.rows() != n || model.train_inputs.cols() != d ||
      model.coeff.rows() != p || model.coeff.cols() != n ||
      model.beta.size() != n)
    throw std::runtime_error("load_model: inconsistent shapes in " + dir);
  return model;
}

// ---------------------------------------------------------------------------
// Sinogram CSV (rows = detectors, columns = angles) plus a JSON sidecar.

inline void save_sinogram(const Sinogram& sino, const std::string& csv_path) {
  write_csv(sino.data, csv_path);
  json side{{"n_ang", sino.n_ang()}, {"n_det", sino.n_det()}};
  std::ofstream out(csv_path + ".json");
  if (!out)
    throw std::runtime_error("save_sinogram: cannot write sidecar for " +
                             csv_path);
  out << side.dump(2) << '\n';
}

inline Sinogram load_sinogram(const std::string& csv_path) {
  Sinogram sino;
  sino.data = read_csv(csv_path);
  std::ifstream side_in(csv_path + ".json");
  if (side_in) {
    json side = json::parse(side_in);
    if (side.at("n_det").get<Eigen::Index>() != sino.data.rows() ||
        side.at("n_ang").get<Eigen::Index>() != sino.data.cols())
      throw std::runtime_error("load_sinogram: sidecar disagrees with CSV " +
                               csv_path);
  }
  const Eigen::Index n_ang = sino.data.cols();
  sino.angles.resize(static_cast<std::size_t>(n_ang));
  for (Eigen::Index a = 0; a < n_ang; ++a)
    sino.angles[static_cast<std::size_t>(a)] =
        kPi * static_cast<double>(a) / static_cast<double>(n_ang);
  return sino;
}

// ---------------------------------------------------------------------------
// Experiment configuration files. Unknown fields are rejected so typos fail
// loudly before any compute starts.

namespace detail {

inline void check_known_fields(const json& j,
                               std::initializer_list<const char*> known,
                               const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("config: unknown field '" + item.key() +
                                  "' in " + where);
  }
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(const json& j) {
  detail::check_known_fields(
      j,
      {"mode", "blur", "corpus_dir", "n", "m", "image_size", "kernels",
       "lambda_grid", "filter", "kulsif", "exact_weights", "radon",
       "cond_threshold", "seed", "output_dir"},
      "experiment config");
  ExperimentConfig cfg;
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "blur_sinogram") cfg.mode = ExperimentMode::BlurSinogram;
    else if (mode == "blur_faces") cfg.mode = ExperimentMode::BlurFaces;
    else throw std::invalid_argument("config.mode: unknown mode '" + mode + "'");
  }
  if (j.contains("blur")) {
    const std::string blur = j.at("blur").get<std::string>();
    if (blur == "gaussian") cfg.blur = BlurType::Gaussian;
    else if (blur == "motion") cfg.blur = BlurType::Motion;
    else throw std::invalid_argument("config.blur: unknown blur '" + blur + "'");
  }
  if (j.contains("corpus_dir"))
    cfg.corpus_dir = j.at("corpus_dir").get<std::string>();
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("m")) cfg.m = j.at("m").get<int>();
  if (j.contains("image_size")) cfg.image_size = j.at("image_size").get<int>();
  if (j.contains("kernels")) {
    cfg.kernels.clear();
    for (const auto& kj : j.at("kernels"))
      cfg.kernels.push_back(kernel_spec_from_json(kj));
  }
  if (j.contains("lambda_grid"))
    cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  if (j.contains("filter")) {
    json fj = j.at("filter");
    if (!fj.contains("lambda")) fj["lambda"] = 1.0;  // grid supplies lambda
    cfg.filter = filter_spec_from_json(fj);
  }
  if (j.contains("kulsif")) {
    const json& kj = j.at("kulsif");
    detail::check_known_fields(kj, {"kernel", "alpha_grid", "b_cap"},
                               "config.kulsif");
    if (kj.contains("kernel"))
      cfg.kulsif.kernel = kernel_spec_from_json(kj.at("kernel"));
    if (kj.contains("alpha_grid"))
      cfg.kulsif.alpha_grid = kj.at("alpha_grid").get<std::vector<double>>();
    if (kj.contains("b_cap")) cfg.kulsif.b_cap = kj.at("b_cap").get<double>();
  }
  if (j.contains("exact_weights"))
    cfg.exact_weights_path = j.at("exact_weights").get<std::string>();
  if (j.contains("radon")) {
    const json& rj = j.at("radon");
    detail::check_known_fields(rj, {"n_ang", "n_det"}, "config.radon");
    if (rj.contains("n_ang")) cfg.n_ang = rj.at("n_ang").get<int>();
    if (rj.contains("n_det")) cfg.n_det = rj.at("n_det").get<int>();
  }
  if (j.contains("cond_threshold"))
    cfg.cond_threshold = j.at("cond_threshold").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output_dir"))
    cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.validate();
  return cfg;
}

inline RateCheckConfig rate_check_config_from_json(const json& j) {
  detail::check_known_fields(j,
                             {"ns", "seeds", "d", "p", "shift_strength",
                              "noise_sd", "n_mc", "kernel", "seed"},
                             "rate-check config");
  RateCheckConfig cfg;
  if (j.contains("ns")) cfg.ns = j.at("ns").get<std::vector<int>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<int>();
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("p")) cfg.p = j.at("p").get<int>();
  if (j.contains("shift_strength"))
    cfg.shift_strength = j.at("shift_strength").get<double>();
  if (j.contains("noise_sd")) cfg.noise_sd = j.at("noise_sd").get<double>();
  if (j.contains("n_mc")) cfg.n_mc = j.at("n_mc").get<int>();
  if (j.contains("kernel"))
    cfg.kernel = kernel_spec_from_json(j.at("kernel"));
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

}  // namespace shiftkernel
