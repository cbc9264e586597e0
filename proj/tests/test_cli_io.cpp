// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
//
// Serialization round trips plus end-to-end runs of the command-line tool
// (exit codes, file outputs, the documented subcommand surface).
#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "shiftkernel/io.hpp"
#include "shiftkernel/synthetic.hpp"
#include "test_util.hpp"

using namespace shiftkernel;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "shiftkernel_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHIFTKERNEL_CLI) + " " + args +
                          " >" + (work_dir() / "stdout.txt").string() +
                          " 2>" + (work_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string last_stdout() {
  std::ifstream in(work_dir() / "stdout.txt");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  testutil::Splitmix64 rng(101);
  const Matrix M = testutil::random_matrix(rng, 7, 5, -3.0, 3.0);
  const auto path = (work_dir() / "m.csv").string();
  write_csv(M, path);
  const Matrix back = read_csv(path);
  REQUIRE(back.rows() == 7);
  REQUIRE((back - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv errors are specific") {
  const auto dir = work_dir();
  {
    std::ofstream out(dir / "ragged.csv");
    out << "1,2\n3\n";
  }
  REQUIRE_THROWS_WITH(read_csv((dir / "ragged.csv").string()),
                      Catch::Matchers::ContainsSubstring("ragged"));
  {
    std::ofstream out(dir / "bad.csv");
    out << "1,zebra\n";
  }
  REQUIRE_THROWS_WITH(read_csv((dir / "bad.csv").string()),
                      Catch::Matchers::ContainsSubstring("zebra"));
  REQUIRE_THROWS_AS(read_csv((dir / "missing.csv").string()),
                    std::runtime_error);
}

TEST_CASE("kernel and filter specs survive the json round trip") {
  for (const auto family : {KernelFamily::Gaussian, KernelFamily::Cauchy,
                            KernelFamily::Exponential, KernelFamily::IMQ}) {
    const KernelSpec spec{family, 0.37};
    const KernelSpec back = kernel_spec_from_json(to_json(spec));
    REQUIRE(back.family == spec.family);
    REQUIRE(back.gamma == spec.gamma);
  }
  for (const auto family :
       {FilterFamily::Tikhonov, FilterFamily::IteratedTikhonov,
        FilterFamily::SpectralCutoff}) {
    const FilterSpec f{family, 0.01, 4};
    const FilterSpec back = filter_spec_from_json(to_json(f));
    REQUIRE(back.family == f.family);
    REQUIRE(back.lambda == f.lambda);
    if (family == FilterFamily::IteratedTikhonov) REQUIRE(back.m == 4);
  }
  REQUIRE_THROWS_AS(
      kernel_spec_from_json(json{{"family", "rbf"}, {"gamma", 1.0}}),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      filter_spec_from_json(json{{"family", "landweber"}, {"lambda", 0.1}}),
      std::invalid_argument);
}

TEST_CASE("model directories round trip") {
  auto [prob, ds] = make_problem(9, 20, 10, 2, 3, 0.5, 0.02);
  const FittedModel model =
      fit(ds, {KernelFamily::Cauchy, 2.0},
          {FilterFamily::IteratedTikhonov, 0.05, 2}, *ds.beta);
  const auto dir = (work_dir() / "model").string();
  save_model(model, dir);
  const FittedModel back = load_model(dir);
  REQUIRE(back.kernel.family == KernelFamily::Cauchy);
  REQUIRE(back.filter.family == FilterFamily::IteratedTikhonov);
  REQUIRE(back.filter.m == 2);
  testutil::Splitmix64 rng(102);
  for (int probe = 0; probe < 5; ++probe) {
    const Vector x = testutil::random_vector(rng, 2, 0.0, 1.0);
    REQUIRE((back.predict(x) - model.predict(x)).norm() == 0.0);
  }
}

TEST_CASE("sinogram csv keeps its sidecar honest") {
  GrayImage img = random_shapes_image(20, 20, 5);
  const Sinogram sino = radon(img, 10, 15);
  const auto path = (work_dir() / "sino.csv").string();
  save_sinogram(sino, path);
  const Sinogram back = load_sinogram(path);
  REQUIRE((back.data - sino.data).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.angles.size() == 10);

  {
    std::ofstream side(path + ".json");
    side << "{\"n_ang\": 11, \"n_det\": 15}\n";
  }
  REQUIRE_THROWS_WITH(load_sinogram(path),
                      Catch::Matchers::ContainsSubstring("sidecar"));
}

TEST_CASE("cli pipeline: shapes, radon, blur, iradon") {
  const auto dir = work_dir() / "pipeline";
  fs::create_directories(dir);
  REQUIRE(run_cli("shapes --count 3 --size 24 --seed 1 --out " +
                  dir.string()) == 0);
  REQUIRE(fs::exists(dir / "shape_0000.pgm"));

  REQUIRE(run_cli("radon --image " + (dir / "shape_0000.pgm").string() +
                  " --n-ang 10 --n-det 17 --out " + dir.string()) == 0);
  REQUIRE(fs::exists(dir / "shape_0000_sino.csv"));
  REQUIRE(fs::exists(dir / "shape_0000_sino.csv.json"));

  REQUIRE(run_cli("blur --input " + (dir / "shape_0000_sino.csv").string() +
                  " --kernel motion --out " + dir.string()) == 0);
  REQUIRE(fs::exists(dir / "shape_0000_sino_blur.csv"));

  REQUIRE(run_cli("iradon --sinogram " +
                  (dir / "shape_0000_sino.csv").string() +
                  " --height 24 --width 24 --out " + dir.string()) == 0);
  REQUIRE(fs::exists(dir / "shape_0000_sino_recon.pgm"));
}

TEST_CASE("cli pipeline: synth, kulsif, fit, predict, aggregate, metrics") {
  const auto dir = work_dir() / "fitflow";
  fs::create_directories(dir);
  REQUIRE(run_cli("synth --n 30 --m 30 --d 2 --p 2 --shift 0.5 "
                  "--noise-sd 0.02 --seed 3 --out " +
                  dir.string()) == 0);
  REQUIRE(fs::exists(dir / "Xs.csv"));
  REQUIRE(fs::exists(dir / "problem.json"));

  REQUIRE(run_cli("kulsif --source " + (dir / "Xs.csv").string() +
                  " --target " + (dir / "Xt.csv").string() +
                  " --kernel-gamma 0.5 --out " + dir.string()) == 0);
  REQUIRE(fs::exists(dir / "weights.csv"));
  REQUIRE(last_stdout().rfind("alpha,", 0) == 0);

  for (const std::string lambda : {"1e-2", "1e-3"}) {
    REQUIRE(run_cli("fit --source " + (dir / "Xs.csv").string() +
                    " --outputs " + (dir / "Y.csv").string() + " --weights " +
                    (dir / "beta.csv").string() +
                    " --kernel-gamma 1.0 --lambda " + lambda + " --out " +
                    (dir / ("m" + lambda)).string()) == 0);
    REQUIRE(fs::exists(dir / ("m" + lambda) / "model" / "meta.json"));
  }

  REQUIRE(run_cli("predict --model " + (dir / "m1e-2" / "model").string() +
                  " --inputs " + (dir / "Xt.csv").string() + " --out " +
                  dir.string()) == 0);
  REQUIRE(fs::exists(dir / "predictions.csv"));

  {
    json manifest{{"models",
                   {(dir / "m1e-2" / "model").string(),
                    (dir / "m1e-3" / "model").string()}}};
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2);
  }
  REQUIRE(run_cli("aggregate --manifest " + (dir / "manifest.json").string() +
                  " --source " + (dir / "Xs.csv").string() + " --outputs " +
                  (dir / "Y.csv").string() + " --weights " +
                  (dir / "beta.csv").string() + " --out " + dir.string()) ==
          0);
  REQUIRE(fs::exists(dir / "coeffs.json"));
  {
    std::ifstream in(dir / "coeffs.json");
    const json coeffs = json::parse(in);
    REQUIRE(coeffs.contains("kept"));
    REQUIRE(coeffs.contains("coeffs"));
    REQUIRE(coeffs.contains("cond"));
  }

  REQUIRE(run_cli("metrics --pred " + (dir / "predictions.csv").string() +
                  " --truth " + (dir / "predictions.csv").string()) == 2);

  REQUIRE(run_cli("metrics --pred " + (dir / "beta.csv").string() +
                  " --truth " + (dir / "Y.csv").string()) == 2);
}

TEST_CASE("cli sweep and ratecheck run from config files") {
  const auto dir = work_dir() / "sweep";
  fs::create_directories(dir);
  REQUIRE(run_cli("shapes --count 18 --size 24 --seed 2 --out " +
                  (dir / "corpus").string()) == 0);

  json cfg{{"mode", "blur_sinogram"},
           {"blur", "motion"},
           {"corpus_dir", (dir / "corpus").string()},
           {"n", 8},
           {"m", 8},
           {"image_size", 24},
           {"kernels", json::array({json{{"family", "gaussian"},
                                         {"gamma", 1e-5}}})},
           {"lambda_grid", json::array({1e-2, 1e-4})},
           {"kulsif",
            json{{"kernel", json{{"family", "gaussian"}, {"gamma", 1e-5}}},
                 {"alpha_grid", json::array({1.0, 0.25, 0.0625})}}},
           {"radon", json{{"n_ang", 12}, {"n_det", 17}}},
           {"seed", 4}};
  {
    std::ofstream out(dir / "cfg.json");
    out << cfg.dump(2);
  }
  REQUIRE(run_cli("sweep --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "out").string()) == 0);
  REQUIRE(fs::exists(dir / "out" / "table.txt"));
  REQUIRE(fs::exists(dir / "out" / "table.csv"));
  REQUIRE(fs::exists(dir / "out" / "result.json"));
  const std::string table = last_stdout();
  REQUIRE(table.find("Agg.") != std::string::npos);

  REQUIRE(run_cli("mkl --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "out_mkl").string()) == 0);
  REQUIRE(fs::exists(dir / "out_mkl" / "table.txt"));

  json rate{{"ns", json::array({20, 40, 80})},
            {"seeds", 2},
            {"n_mc", 100},
            {"noise_sd", 0.05}};
  {
    std::ofstream out(dir / "rate.json");
    out << rate.dump(2);
  }
  REQUIRE(run_cli("ratecheck --config " + (dir / "rate.json").string() +
                  " --out " + (dir / "rate_out").string()) == 0);
  REQUIRE(fs::exists(dir / "rate_out" / "rate.json"));
}

TEST_CASE("cli exit codes distinguish validation from runtime") {
  const auto dir = work_dir() / "codes";
  fs::create_directories(dir);

  // Unknown subcommand / flag: parse (validation) error.
  REQUIRE(run_cli("definitely-not-a-subcommand") == 2);

  // Config validation error.
  {
    json cfg{{"mode", "blur_sinogram"}, {"corpus_dir", dir.string()},
             {"kernels", json::array()}};
    std::ofstream out(dir / "bad.json");
    out << cfg.dump(2);
  }
  REQUIRE(run_cli("sweep --config " + (dir / "bad.json").string()) == 2);

  // Missing file at runtime.
  REQUIRE(run_cli("predict --model /nonexistent-model --inputs /none.csv") ==
          1);
}
