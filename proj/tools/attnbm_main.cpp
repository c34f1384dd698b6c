// Copyright 2026 The AttnBM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attnbm/config.hpp"
#include "attnbm/data.hpp"
#include "attnbm/efh.hpp"
#include "attnbm/energy.hpp"
#include "attnbm/errors.hpp"
#include "attnbm/gmm.hpp"
#include "attnbm/hopfield.hpp"
#include "attnbm/reconstruction.hpp"
#include "attnbm/serialize.hpp"
#include "attnbm/training.hpp"
#include "attnbm/verify.hpp"
#include "attnbm/vmf.hpp"

namespace {

using namespace attnbm;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<GrayImage> images_from_idx(const IdxTensor& tensor) {
  if (tensor.dims.size() != 3) {
    throw FormatError("expected an image-stack tensor", 0);
  }
  const int count = tensor.dims[0];
  const int h = tensor.dims[1];
  const int w = tensor.dims[2];
  std::vector<GrayImage> images(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GrayImage& img = images[static_cast<std::size_t>(i)];
    img.height = h;
    img.width = w;
    img.pixels.resize(static_cast<std::size_t>(h) * w);
    for (int j = 0; j < h * w; ++j) {
      img.pixels[static_cast<std::size_t>(j)] =
          tensor.bytes[static_cast<std::size_t>(i) * h * w + j] / 255.0;
    }
  }
  return images;
}

// Data sources: "synthetic" (procedural corpus), *.idx (image stack), or
// *.csv (one sample per row). Optional patching and ZCA whitening.
Matrix load_training_data(const Config& cfg) {
  const std::string source = cfg.require("data");
  Matrix samples;
  const int patch_size = cfg.get_int("patch_size", 0);
  auto patch_corpus = [&](const std::vector<GrayImage>& corpus) {
    if (patch_size < 1) {
      throw std::invalid_argument(
          "image corpora require patch_size (pixels per side)");
    }
    Rng rng(cfg.get_u64("patch_seed", 1));
    const Dataset ds =
        extract_patches(corpus, patch_size, cfg.get_int("stride", 1),
                        cfg.get_int("patch_count", 1000), rng);
    return ds.samples;
  };
  if (source == "synthetic") {
    const int size = cfg.get_int("synthetic_size", 28);
    const auto corpus =
        synthetic_gray_corpus(cfg.get_int("synthetic_count", 200), size, size,
                              cfg.get_u64("synthetic_seed", 7));
    samples = patch_corpus(corpus);
  } else if (ends_with(source, ".idx") || ends_with(source, "-ubyte")) {
    const IdxTensor tensor = load_idx(source);
    if (patch_size > 0) {
      samples = patch_corpus(images_from_idx(tensor));
    } else {
      samples = idx_images_to_matrix(tensor);
    }
  } else if (ends_with(source, ".csv")) {
    samples = load_csv_matrix(source);
  } else {
    throw std::invalid_argument("unrecognized data source: " + source);
  }
  if (cfg.get_bool("zca", false)) {
    const ZcaTransform t =
        fit_zca(samples, cfg.get_double("zca_epsilon", 1e-5));
    samples = apply_zca(t, samples);
  }
  return samples;
}

TrainConfig train_config_from(const Config& cfg) {
  TrainConfig tc;
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.batch_size = cfg.get_int("batch_size", tc.batch_size);
  tc.epochs = cfg.get_int("epochs", tc.epochs);
  tc.momentum = cfg.get_double("momentum", tc.momentum);
  tc.weight_decay = cfg.get_double("weight_decay", tc.weight_decay);
  tc.seed = cfg.get_u64("seed", tc.seed);
  tc.dsm_noise_std = cfg.get_double("noise_std", tc.dsm_noise_std);
  tc.beta = cfg.get_int("beta", tc.beta);
  tc.tuple_budget = cfg.get_i64("tuple_budget", tc.tuple_budget);
  return tc;
}

MemoryMatrix initial_memory(const Config& cfg, int dim) {
  Rng rng(cfg.get_u64("init_seed", cfg.get_u64("seed", 0) + 1));
  return init_memory(cfg.get_int("memories", 100), dim, rng,
                     cfg.get_double("init_std", 0.01));
}

ScalarPotential potential_from_name(const std::string& name, int power) {
  if (name == "identity") return ScalarPotential::identity();
  if (name == "square") return ScalarPotential::square();
  if (name == "power") return ScalarPotential::power_n(power);
  if (name == "softplus") return ScalarPotential::softplus();
  if (name == "abs") return ScalarPotential::abs();
  throw std::invalid_argument("unknown potential: " + name);
}

int run_train(const Config& cfg, Objective objective) {
  const Matrix data = load_training_data(cfg);
  const MemoryMatrix init = initial_memory(cfg, static_cast<int>(data.cols()));
  const TrainConfig tc = train_config_from(cfg);
  const TrainReport report = objective == Objective::ExactMle
                                 ? sgd_mle(data, init, tc)
                                 : train_dsm(data, init, tc);
  const AttnBmModel model = make_integer_beta_model(report.final_xi, tc.beta);
  if (cfg.has("model_out")) save_model(model, cfg.require("model_out"));
  if (cfg.has("report_out")) write_report_csv(report, cfg.require("report_out"));
  if (!report.objective.empty()) {
    std::printf("epochs=%zu final_objective=%.17g\n", report.objective.size(),
                report.objective.back());
  }
  return 0;
}

int run_train_cd(const Config& cfg) {
  const Matrix data = load_training_data(cfg);
  const MemoryMatrix init = initial_memory(cfg, static_cast<int>(data.cols()));
  const TrainConfig tc = train_config_from(cfg);
  LagrangianPair lag;
  lag.hidden = potential_from_name(cfg.get_string("hidden_potential", "square"),
                                   cfg.get_int("hidden_power", 2));
  lag.visible = potential_from_name(
      cfg.get_string("visible_potential", "square"), 2);
  GridOptions opts;
  opts.grid.lo = cfg.get_double("grid_lo", opts.grid.lo);
  opts.grid.hi = cfg.get_double("grid_hi", opts.grid.hi);
  opts.grid.points = cfg.get_int("grid_points", opts.grid.points);
  const double beta = cfg.get_double("beta", 1.0);
  const TrainReport report =
      cd_k(data, init, lag, beta, cfg.get_int("cd_k", 1), tc, opts);
  if (cfg.has("efh_out")) {
    save_efh(EfhSpec(report.final_xi, lag, beta), cfg.require("efh_out"));
  }
  if (cfg.has("report_out")) write_report_csv(report, cfg.require("report_out"));
  if (!report.objective.empty()) {
    std::printf("epochs=%zu final_objective=%.17g\n", report.objective.size(),
                report.objective.back());
  }
  return 0;
}

int run_reconstruct(const Config& cfg) {
  const AttnBmModel model = load_model(cfg.require("model_in"));
  const Matrix data = load_csv_matrix(cfg.require("data"));
  const double drop_prob = cfg.get_double("drop_prob", 0.8);
  Rng rng(cfg.get_u64("seed", 0));
  Matrix recon(data.rows(), data.cols());
  double total_recon = 0.0;
  double total_corrupt = 0.0;
  for (int i = 0; i < data.rows(); ++i) {
    const Vector truth = data.row(i).transpose();
    Corrupted c = corrupt(truth, drop_prob, rng);
    int observed = 0;
    for (bool b : c.mask) observed += b ? 1 : 0;
    while (observed == 0 || observed == static_cast<int>(c.mask.size())) {
      c = corrupt(truth, drop_prob, rng);
      observed = 0;
      for (bool b : c.mask) observed += b ? 1 : 0;
    }
    const PartialObservation obs = make_observation(truth, c.mask);
    const Vector full = reassemble(obs, impute_mean(model, obs));
    recon.row(i) = full.transpose();
    total_recon += mse(full, truth);
    total_corrupt += mse(c.values, truth);
  }
  if (cfg.has("recon_out")) write_csv_matrix(recon, cfg.require("recon_out"));
  std::printf("rows=%lld mse_reconstructed=%.17g mse_corrupted=%.17g\n",
              static_cast<long long>(data.rows()), total_recon / data.rows(),
              total_corrupt / data.rows());
  return 0;
}

int run_retrieve(const Config& cfg) {
  const AttnBmModel model = load_model(cfg.require("model_in"));
  const Matrix starts = load_csv_matrix(cfg.require("data"));
  const int max_iters = cfg.get_int("max_iters", 100);
  const double tol = cfg.get_double("tol", 1e-8);
  Matrix finals(starts.rows(), starts.cols());
  for (int i = 0; i < starts.rows(); ++i) {
    const RetrievalResult r =
        retrieve(starts.row(i).transpose(), model.xi, max_iters, tol);
    finals.row(i) = r.final_state.transpose();
    std::printf("row=%d iterations=%d final_energy=%.17g\n", i, r.iterations,
                r.energy_trace.back());
  }
  if (cfg.has("final_out")) write_csv_matrix(finals, cfg.require("final_out"));
  return 0;
}

int run_filters(const Config& cfg) {
  const AttnBmModel model = load_model(cfg.require("model_in"));
  const int height = cfg.get_int("height", 0);
  const int width = cfg.get_int("width", 0);
  export_filter_grid(model.xi, height, width, cfg.require("image_out"));
  std::printf("filters=%d tile=%dx%d\n", model.memories(), height, width);
  return 0;
}

int run_sweep(const Config& cfg) {
  const Matrix data = load_training_data(cfg);
  SweepConfig sc;
  sc.train = train_config_from(cfg);
  sc.drop_prob = cfg.get_double("drop_prob", sc.drop_prob);
  sc.eval_samples = cfg.get_int("eval_samples", sc.eval_samples);
  sc.memories = cfg.get_int("memories", sc.memories);
  sc.retrieve_iters = cfg.get_int("retrieve_iters", sc.retrieve_iters);
  sc.eval_seed = cfg.get_u64("eval_seed", sc.eval_seed);
  std::vector<int> sizes;
  {
    std::string list = cfg.require("sizes");
    std::size_t pos = 0;
    while (pos < list.size()) {
      const std::size_t comma = list.find(',', pos);
      const std::string tok = list.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      sizes.push_back(std::stoi(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  const std::vector<SweepRow> rows = mse_vs_samplesize_sweep(data, sizes, sc);
  if (cfg.has("sweep_out")) write_sweep_csv(rows, cfg.require("sweep_out"));
  for (const SweepRow& row : rows) {
    std::printf("P=%d mse_conditional=%.17g mse_hopfield=%.17g\n",
                row.sample_count, row.mse_conditional, row.mse_hopfield);
  }
  return 0;
}

int run_gmm_sample(const Config& cfg) {
  const AttnBmModel model = load_model(cfg.require("model_in"));
  const GaussianMixture gmm =
      to_gmm(model, cfg.get_i64("tuple_budget", kDefaultTupleBudget));
  Rng rng(cfg.get_u64("seed", 0));
  const Matrix samples = sample_mixture(gmm, cfg.get_int("count", 100), rng);
  if (cfg.has("samples_out")) {
    write_csv_matrix(samples, cfg.require("samples_out"));
  }
  std::printf("components=%d samples=%lld\n", gmm.components(),
              static_cast<long long>(samples.rows()));
  return 0;
}

int run_vmf_sample(const Config& cfg) {
  const AttnBmModel model = load_model(cfg.require("model_in"));
  const VmfParams params =
      vmf_from_memory(model.xi, cfg.get_double("beta", model.beta));
  Rng rng(cfg.get_u64("seed", 0));
  const Matrix samples = vmf_sample(params, cfg.get_int("count", 100), rng);
  if (cfg.has("samples_out")) {
    write_csv_matrix(samples, cfg.require("samples_out"));
  }
  std::printf("kappa=%.17g resultant=%.17g\n", params.concentration(),
              mean_resultant_length(samples));
  return 0;
}

int run_verify_cmd(const Config& cfg) {
  const auto results = run_verification(cfg.get_u64("seed", 20260821));
  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::printf("%s  %-55s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  std::printf("%zu checks, %s\n", results.size(),
              all_pass ? "all passed" : "FAILURES PRESENT");
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-weighted Boltzmann machine toolkit"};
  app.require_subcommand(1);

  struct SubSpec {
    std::string name;
    std::string help;
    int (*run)(const Config&);
  };
  const std::vector<SubSpec> subs = {
      {"reconstruct", "impute dropped coordinates via the conditional mean",
       run_reconstruct},
      {"retrieve", "iterate the attention update to a fixed point",
       run_retrieve},
      {"filters", "export memory rows as a PGM filter grid", run_filters},
      {"sweep-mse", "reconstruction error vs training-set size", run_sweep},
      {"gmm-sample", "draw samples from the mixture form", run_gmm_sample},
      {"vmf-sample", "draw unit-sphere samples from the directional model",
       run_vmf_sample},
      {"verify", "run the numerical cross-check suite", run_verify_cmd},
  };

  struct Parsed {
    std::string config_path;
    std::vector<std::string> overrides;
    int (*run)(const Config&) = nullptr;
    Objective objective = Objective::ExactMle;
    bool is_train = false;
    bool is_cd = false;
  } parsed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", parsed.config_path,
                    "key=value settings file");
    sub->add_option("--set", parsed.overrides,
                    "override a setting (key=value), repeatable");
  };

  for (const SubSpec& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    add_common(sub);
    sub->callback([&parsed, run = spec.run] { parsed.run = run; });
  }
  {
    CLI::App* sub = app.add_subcommand(
        "train-mle", "exact maximum-likelihood training");
    add_common(sub);
    sub->callback([&parsed] {
      parsed.is_train = true;
      parsed.objective = Objective::ExactMle;
    });
  }
  {
    CLI::App* sub = app.add_subcommand(
        "train-dsm", "denoising (softmax autoencoder) training");
    add_common(sub);
    sub->callback([&parsed] {
      parsed.is_train = true;
      parsed.objective = Objective::Dsm;
    });
  }
  {
    CLI::App* sub = app.add_subcommand(
        "train-cd", "contrastive-divergence training of the joint model");
    add_common(sub);
    sub->callback([&parsed] { parsed.is_cd = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    Config cfg;
    if (!parsed.config_path.empty()) {
      cfg = Config::from_file(parsed.config_path);
    }
    cfg.apply_overrides(parsed.overrides);
    if (parsed.is_train) return run_train(cfg, parsed.objective);
    if (parsed.is_cd) return run_train_cd(cfg);
    return parsed.run(cfg);
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << " (byte " << e.byte_offset()
              << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
