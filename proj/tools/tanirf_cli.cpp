// tanirf command line: synthetic fingerprint generation, exact Gram and
// random-feature computation, reconstruction-error sweeps, GP regression and
// Thompson-sampling benchmarks. Outputs are CSV (with a #config= header) or
// TRFF binary; every command is deterministic given --seed and its inputs.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "tanirf/common.hpp"
#include "tanirf/feature_map.hpp"
#include "tanirf/gp.hpp"
#include "tanirf/io.hpp"
#include "tanirf/kernels.hpp"
#include "tanirf/minmax_features.hpp"
#include "tanirf/prefactor.hpp"
#include "tanirf/rng.hpp"
#include "tanirf/sparse.hpp"
#include "tanirf/tdp_features.hpp"

using nlohmann::json;
using namespace tanirf;

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_input(const std::string& path, bool sqrt_counts) {
  Dataset d = load_fingerprints(path);
  if (sqrt_counts) d = sqrt_transform(d);
  return d;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

// Synthetic labels: a seeded random projection of the fingerprints plus a
// little observation noise. Smooth in the inputs, deterministic.
std::vector<double> projection_labels(const Dataset& d, std::uint64_t seed) {
  SeedStream direction(seed, 0x4C41424Cu);
  std::vector<double> w(d.dim);
  for (auto& v : w) v = direction.next_gaussian();
  std::vector<double> y(d.size());
  double scale = 1.0 / std::sqrt(static_cast<double>(d.dim));
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (const auto& e : d.vectors[i].entries) s += w[e.index] * std::sqrt(e.value);
    SeedStream noise(seed, 0x4E4F4953u + i);
    y[i] = s * scale + 0.05 * noise.next_gaussian();
  }
  return y;
}

Dataset take_subset(const Dataset& d, const std::vector<std::size_t>& picks) {
  Dataset out;
  out.dim = d.dim;
  for (auto i : picks) {
    out.ids.push_back(d.ids[i]);
    out.vectors.push_back(d.vectors[i]);
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SynthArgs {
  std::size_t n = 100;
  std::uint32_t dim = 1024;
  double density = 0.03;
  int max_count = 1;
  std::uint64_t seed = 0;
  std::string output;
  std::string labels;
};

int cmd_synth(const SynthArgs& a) {
  Dataset d = synth_dataset(a.n, a.dim, a.density, a.max_count, a.seed);
  save_fingerprints(d, a.output);
  if (!a.labels.empty()) write_labels(a.labels, d.ids, projection_labels(d, a.seed));
  json config{{"command", "synth"},   {"n", a.n},
              {"dim", a.dim},         {"density", a.density},
              {"max_count", a.max_count}, {"seed", a.seed},
              {"output", a.output}};
  std::cout << "#config=" << config.dump() << "\n";
  return 0;
}

struct GramArgs {
  std::string input;
  std::string kernel = "tmm";
  std::string output;
  bool check_psd = false;
  bool sqrt_counts = false;
};

int cmd_gram(const GramArgs& a) {
  Dataset d = load_input(a.input, a.sqrt_counts);
  GramMatrix g = gram(d, kernel_from_name(a.kernel));
  TrffMatrix m;
  m.rows = g.n;
  m.cols = g.n;
  m.is_gram = true;
  m.data = g.values;
  write_trff(a.output, m);
  json config{{"command", "gram"},  {"input", a.input},
              {"kernel", a.kernel}, {"output", a.output},
              {"sqrt_counts", a.sqrt_counts}, {"n", g.n}};
  std::cout << "#config=" << config.dump() << "\n";
  std::cout << "n=" << g.n << "\n";
  if (a.check_psd) std::cout << "min_eigenvalue=" << min_eigenvalue(g) << "\n";
  return 0;
}

struct FeaturesArgs {
  std::string input;
  std::string spec;
  std::string output;
  bool sqrt_counts = false;
  std::int64_t seed_override = -1;
};

int cmd_features(const FeaturesArgs& a) {
  Dataset d = load_input(a.input, a.sqrt_counts);
  json spec = json::parse(read_text_file(a.spec), nullptr, false);
  if (spec.is_discarded() || !spec.is_object())
    throw ParseError("'" + a.spec + "': invalid spec JSON");
  if (a.seed_override >= 0) spec["seed"] = static_cast<std::uint64_t>(a.seed_override);
  auto map = make_feature_map(spec.dump(), d.dim);
  TrffMatrix m = featurize(*map, d);
  write_trff(a.output, m);
  json config{{"command", "features"}, {"input", a.input},
              {"spec", spec},          {"output", a.output},
              {"sqrt_counts", a.sqrt_counts}, {"rows", m.rows}, {"cols", m.cols}};
  std::cout << "#config=" << config.dump() << "\n";
  return 0;
}

struct SweepArgs {
  std::string input;
  std::string family = "minmax";
  std::vector<std::size_t> m_list{256, 1024, 4096, 16384};
  int trials = 5;
  std::string output;
  std::uint64_t seed = 0;
  bool sqrt_counts = false;
  std::string xi = "rademacher";
  int tdp_terms = 4;
  double tdp_p = -1.0;
  std::string bias = "plain";
  int prefactor_r = 1;
};

// Mean squared entrywise deviation between the feature-product matrix and the
// exact kernel matrix.
double reconstruction_mse(const TrffMatrix& phi, const std::vector<double>& exact,
                          std::size_t n) {
  Eigen::Map<const Eigen::MatrixXd> feats(phi.data.data(),
                                          static_cast<Eigen::Index>(phi.rows),
                                          static_cast<Eigen::Index>(phi.cols));
  Eigen::MatrixXd approx = feats.transpose() * feats;
  Eigen::Map<const Eigen::MatrixXd> truth(exact.data(), static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n));
  return (approx - truth).array().square().mean();
}

int cmd_mse_sweep(const SweepArgs& a) {
  Dataset d = load_input(a.input, a.sqrt_counts);
  if (d.size() > 2000) throw std::invalid_argument("mse-sweep: dataset larger than 2000 points");

  std::vector<double> exact;
  double zeta = 0.0, scale = 1.0;
  if (a.family == "minmax") {
    exact = gram(d, Kernel::kMinMax).values;
  } else if (a.family == "tdp") {
    exact = gram(d, Kernel::kDotProduct).values;
    zeta = estimate_zeta(d);
    scale = max_sq_norm(d);
  } else if (a.family == "prefactor") {
    zeta = estimate_zeta(d);
    scale = max_sq_norm(d);
    std::vector<double> norms(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) norms[i] = d.vectors[i].sq_norm() / scale;
    exact.resize(d.size() * d.size());
    for (std::size_t j = 0; j < d.size(); ++j)
      for (std::size_t i = 0; i < d.size(); ++i)
        exact[j * d.size() + i] = std::pow(norms[i] + norms[j], -a.prefactor_r);
  } else {
    throw std::invalid_argument("mse-sweep: unknown family '" + a.family + "'");
  }

  auto out = open_output(a.output);
  json config{{"command", "mse-sweep"}, {"input", a.input},   {"family", a.family},
              {"m_list", a.m_list},     {"trials", a.trials}, {"seed", a.seed},
              {"sqrt_counts", a.sqrt_counts}};
  if (a.family == "minmax") config["xi"] = a.xi;
  if (a.family == "tdp") {
    config["R"] = a.tdp_terms;
    config["p"] = a.tdp_p;
    config["bias"] = a.bias;
  }
  if (a.family == "prefactor") config["r"] = a.prefactor_r;
  out << "#config=" << config.dump() << "\n";
  out << "family,M,trial,mse\n";

  for (std::size_t m : a.m_list) {
    for (int trial = 0; trial < a.trials; ++trial) {
      std::uint64_t trial_seed = SeedStream::derive(SeedStream::derive(a.seed, m),
                                                    static_cast<std::uint64_t>(trial));
      TrffMatrix phi;
      if (a.family == "minmax") {
        MinMaxFeatureMap map(d.dim, m, MinMaxFeatureMap::kDefaultBucketCount,
                             xi_dist_from_name(a.xi), trial_seed);
        phi.rows = m;
        phi.cols = d.size();
        phi.data.assign(m * d.size(), 0.0);
        parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i) {
            auto col = map(d.vectors[i]);
            std::copy(col.begin(), col.end(), phi.data.begin() + i * m);
          }
        });
      } else if (a.family == "tdp") {
        TdpFeatureSpec spec;
        spec.terms = a.tdp_terms;
        spec.num_features = m;
        spec.alloc_exponent = a.tdp_p;
        spec.zeta = zeta;
        spec.norm_scale = scale;
        spec.bias = bias_mode_from_name(a.bias);
        spec.seed = trial_seed;
        TdpFeatureMap map(d.dim, spec);
        phi.rows = map.output_dim();
        phi.cols = d.size();
        phi.data.assign(phi.rows * d.size(), 0.0);
        parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i) {
            auto col = map(d.vectors[i]);
            std::copy(col.begin(), col.end(), phi.data.begin() + i * phi.rows);
          }
        });
      } else {
        auto [s, c] = tuned_params(a.prefactor_r, zeta);
        PrefactorSpec spec;
        spec.r = a.prefactor_r;
        spec.s = s;
        spec.c = c;
        spec.num_features = m;
        spec.seed = trial_seed;
        PrefactorMap map(spec);
        phi.rows = m;
        phi.cols = d.size();
        phi.data.assign(m * d.size(), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
          auto col = map(d.vectors[i].sq_norm() / scale);
          std::copy(col.begin(), col.end(), phi.data.begin() + i * m);
        }
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12e", reconstruction_mse(phi, exact, d.size()));
      out << a.family << "," << m << "," << trial << "," << buf << "\n";
    }
  }
  return 0;
}

struct GpArgs {
  std::string train, train_labels, test, test_labels;
  std::string mode = "rf";
  std::string kernel = "tdp";
  std::string spec;
  std::size_t subset_size = 1000;
  std::size_t fit_size = 500;
  std::uint64_t seed = 0;
  bool sqrt_counts = false;
  std::string output;
  std::string save_model;
};

int cmd_gp(const GpArgs& a) {
  Dataset train = load_input(a.train, a.sqrt_counts);
  Dataset test = load_input(a.test, a.sqrt_counts);
  std::vector<double> y_train = read_labels(a.train_labels, train.ids);
  std::vector<double> y_test = read_labels(a.test_labels, test.ids);
  Kernel kernel = kernel_from_name(a.kernel);

  // The same subset-fitted hypers serve both approximation modes.
  auto fit_picks = sample_subset(train.size(), std::min(a.fit_size, train.size()),
                                 SeedStream::derive(a.seed, 0x46495453u));
  std::vector<double> y_fit;
  for (auto i : fit_picks) y_fit.push_back(y_train[i]);
  GpHypers hypers = fit_hypers(take_subset(train, fit_picks), y_fit, kernel);

  std::vector<double> mean, variance;
  json spec_echo;
  if (a.mode == "subset") {
    exact_subset_gp(train, y_train, std::min(a.subset_size, train.size()), kernel, hypers,
                    test, a.seed, mean, variance);
  } else if (a.mode == "rf") {
    if (a.spec.empty()) throw std::invalid_argument("gp: --spec is required in rf mode");
    json spec = json::parse(read_text_file(a.spec), nullptr, false);
    if (spec.is_discarded()) throw ParseError("'" + a.spec + "': invalid spec JSON");
    spec_echo = spec;
    auto map = make_feature_map(spec.dump(), train.dim);
    TrffMatrix phi_train = featurize(*map, train);
    TrffMatrix phi_test = featurize(*map, test);
    Eigen::Map<const Eigen::MatrixXd> ptr(phi_train.data.data(),
                                          static_cast<Eigen::Index>(phi_train.rows),
                                          static_cast<Eigen::Index>(phi_train.cols));
    Eigen::Map<const Eigen::MatrixXd> pte(phi_test.data.data(),
                                          static_cast<Eigen::Index>(phi_test.rows),
                                          static_cast<Eigen::Index>(phi_test.cols));
    GpPosterior post = rfgp_fit(ptr, y_train, hypers, map->spec_json());
    rfgp_predict(post, pte, mean, variance);
    if (!a.save_model.empty()) save_posterior(post, a.save_model);
  } else {
    throw std::invalid_argument("gp: unknown mode '" + a.mode + "' (expected subset|rf)");
  }

  double alp = avg_log_prob(y_test, mean, variance);
  double r2 = r2_score(y_test, mean);

  auto out = open_output(a.output);
  json config{{"command", "gp"},       {"train", a.train}, {"test", a.test},
              {"mode", a.mode},        {"kernel", a.kernel}, {"seed", a.seed},
              {"fit_size", a.fit_size}, {"sqrt_counts", a.sqrt_counts},
              {"hypers",
               {{"mean", hypers.mean},
                {"amplitude", hypers.amplitude},
                {"noise", hypers.noise}}}};
  if (a.mode == "subset") config["subset_size"] = a.subset_size;
  if (!spec_echo.is_null()) config["spec"] = spec_echo;
  out << "#config=" << config.dump() << "\n";
  out << "id,y,pred_mean,pred_var,log_prob\n";
  char buf[160];
  for (std::size_t i = 0; i < test.size(); ++i) {
    double r = y_test[i] - mean[i];
    double lp = -0.5 * (r * r / variance[i] + std::log(variance[i]) +
                        1.8378770664093454836);
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g", test.ids[i].c_str(),
                  y_test[i], mean[i], variance[i], lp);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "#summary avg_log_prob=%.10g r2=%.10g", alp, r2);
  out << buf << "\n";
  std::cout << buf << "\n";
  return 0;
}

struct ThompsonArgs {
  std::string pool, labels;
  std::string mode = "rf";
  std::size_t batch = 100;
  std::vector<std::size_t> sizes{500, 2000, 8000};
  std::uint64_t seed = 0;
  std::string kernel = "tmm";
  std::string spec;
  double mean = 0.0;
  double amplitude = 1.0;
  int warmup = 3;
  int reps = 5;
  bool sqrt_counts = false;
  std::string output;
};

int cmd_thompson(const ThompsonArgs& a) {
  Dataset pool = load_input(a.pool, a.sqrt_counts);
  std::vector<double> labels = read_labels(a.labels, pool.ids);
  GpHypers hypers{a.mean, a.amplitude, 1.0};  // prior sampling; noise unused

  json spec_echo;
  std::unique_ptr<FeatureMap> map;
  if (a.mode == "rf") {
    if (a.spec.empty()) throw std::invalid_argument("thompson: --spec is required in rf mode");
    json spec = json::parse(read_text_file(a.spec), nullptr, false);
    if (spec.is_discarded()) throw ParseError("'" + a.spec + "': invalid spec JSON");
    spec_echo = spec;
    map = make_feature_map(spec.dump(), pool.dim);
  } else if (a.mode != "exact") {
    throw std::invalid_argument("thompson: unknown mode '" + a.mode + "' (expected exact|rf)");
  }

  auto out = open_output(a.output);
  json config{{"command", "thompson"}, {"pool", a.pool},   {"mode", a.mode},
              {"batch", a.batch},      {"sizes", a.sizes}, {"seed", a.seed},
              {"warmup", a.warmup},    {"reps", a.reps},   {"mean", a.mean},
              {"amplitude", a.amplitude}, {"sqrt_counts", a.sqrt_counts}};
  if (a.mode == "exact") config["kernel"] = a.kernel;
  if (!spec_echo.is_null()) config["spec"] = spec_echo;
  out << "#config=" << config.dump() << "\n";
  out << "mode,n,wall_time_s,mean_selected_label\n";

  for (std::size_t n : a.sizes) {
    if (n > pool.size()) throw std::invalid_argument("thompson: size exceeds pool");
    if (a.batch > n) throw std::invalid_argument("thompson: batch exceeds pool size");
    auto picks = sample_subset(pool.size(), n, SeedStream::derive(a.seed, n));
    Dataset sub = take_subset(pool, picks);

    std::vector<std::size_t> selected;
    auto run_once = [&]() {
      if (a.mode == "rf") {
        TrffMatrix phi = featurize(*map, sub);
        Eigen::Map<const Eigen::MatrixXd> p(phi.data.data(),
                                            static_cast<Eigen::Index>(phi.rows),
                                            static_cast<Eigen::Index>(phi.cols));
        selected = thompson_select(p, hypers, a.batch, a.seed);
      } else {
        GramMatrix g = gram(sub, kernel_from_name(a.kernel));
        Eigen::MatrixXd scores = exact_prior_sample(g, hypers, a.batch, a.seed);
        selected = select_argmax_without_replacement(scores);
      }
    };

    for (int w = 0; w < a.warmup; ++w) run_once();
    std::vector<double> times;
    for (int rep = 0; rep < a.reps; ++rep) {
      auto start = std::chrono::steady_clock::now();
      run_once();
      std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      times.push_back(elapsed.count());
    }

    double label_sum = 0.0;
    for (auto i : selected) label_sum += labels[picks[i]];
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.6f,%.10g", a.mode.c_str(), n, median(times),
                  label_sum / static_cast<double>(selected.size()));
    out << buf << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tanimoto kernel random features toolkit"};
  app.require_subcommand(1);

  int threads = 0;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fingerprint file");
  synth_cmd->add_option("--n", synth.n, "number of vectors")->required();
  synth_cmd->add_option("--dim", synth.dim, "dimension")->required();
  synth_cmd->add_option("--density", synth.density, "per-coordinate occupancy probability");
  synth_cmd->add_option("--max-count", synth.max_count, "maximum integer count");
  synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--output", synth.output, "fingerprint file to write")->required();
  synth_cmd->add_option("--labels", synth.labels, "also write synthetic labels here");

  GramArgs gram_args;
  auto* gram_cmd = app.add_subcommand("gram", "exact kernel matrix in TRFF format");
  gram_cmd->add_option("--input", gram_args.input, "fingerprint file")->required();
  gram_cmd->add_option("--kernel", gram_args.kernel, "tmm|tdp");
  gram_cmd->add_option("--output", gram_args.output, "TRFF file to write")->required();
  gram_cmd->add_flag("--check-psd", gram_args.check_psd, "print the minimum eigenvalue");
  gram_cmd->add_flag("--sqrt-counts", gram_args.sqrt_counts, "sqrt-transform values at load");

  FeaturesArgs feat;
  auto* feat_cmd = app.add_subcommand("features", "random feature matrix in TRFF format");
  feat_cmd->add_option("--input", feat.input, "fingerprint file")->required();
  feat_cmd->add_option("--spec", feat.spec, "feature map spec JSON file")->required();
  feat_cmd->add_option("--output", feat.output, "TRFF file to write")->required();
  feat_cmd->add_flag("--sqrt-counts", feat.sqrt_counts, "sqrt-transform values at load");
  feat_cmd->add_option("--seed", feat.seed_override, "override the spec seed");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("mse-sweep", "reconstruction MSE vs feature count");
  sweep_cmd->add_option("--input", sweep.input, "fingerprint file")->required();
  sweep_cmd->add_option("--family", sweep.family, "minmax|tdp|prefactor");
  sweep_cmd->add_option("--m-list", sweep.m_list, "feature counts to sweep")->delimiter(',');
  sweep_cmd->add_option("--trials", sweep.trials, "trials per feature count");
  sweep_cmd->add_option("--output", sweep.output, "CSV file to write")->required();
  sweep_cmd->add_option("--seed", sweep.seed, "random seed");
  sweep_cmd->add_flag("--sqrt-counts", sweep.sqrt_counts, "sqrt-transform values at load");
  sweep_cmd->add_option("--xi", sweep.xi, "minmax: rademacher|gaussian");
  sweep_cmd->add_option("--R", sweep.tdp_terms, "tdp: series truncation");
  sweep_cmd->add_option("--p", sweep.tdp_p, "tdp: allocation exponent");
  sweep_cmd->add_option("--bias", sweep.bias, "tdp: plain|normalize|residual");
  sweep_cmd->add_option("--prefactor-r", sweep.prefactor_r, "prefactor: term index r");

  GpArgs gp_args;
  auto* gp_cmd = app.add_subcommand("gp", "GP regression with per-point predictions");
  gp_cmd->add_option("--train", gp_args.train, "training fingerprints")->required();
  gp_cmd->add_option("--train-labels", gp_args.train_labels, "training labels")->required();
  gp_cmd->add_option("--test", gp_args.test, "test fingerprints")->required();
  gp_cmd->add_option("--test-labels", gp_args.test_labels, "test labels")->required();
  gp_cmd->add_option("--mode", gp_args.mode, "subset|rf");
  gp_cmd->add_option("--kernel", gp_args.kernel, "exact kernel for fitting/subset mode");
  gp_cmd->add_option("--spec", gp_args.spec, "feature spec JSON (rf mode)");
  gp_cmd->add_option("--subset-size", gp_args.subset_size, "conditioning set size");
  gp_cmd->add_option("--fit-size", gp_args.fit_size, "hyperparameter fitting subset size");
  gp_cmd->add_option("--seed", gp_args.seed, "random seed");
  gp_cmd->add_flag("--sqrt-counts", gp_args.sqrt_counts, "sqrt-transform values at load");
  gp_cmd->add_option("--output", gp_args.output, "CSV file to write")->required();
  gp_cmd->add_option("--save-model", gp_args.save_model, "persist the posterior (rf mode)");

  ThompsonArgs th;
  auto* th_cmd = app.add_subcommand("thompson", "Thompson sampling benchmark");
  th_cmd->add_option("--pool", th.pool, "candidate pool fingerprints")->required();
  th_cmd->add_option("--labels", th.labels, "pool labels")->required();
  th_cmd->add_option("--mode", th.mode, "exact|rf");
  th_cmd->add_option("--batch", th.batch, "batch size");
  th_cmd->add_option("--sizes", th.sizes, "pool sizes to benchmark")->delimiter(',');
  th_cmd->add_option("--seed", th.seed, "random seed");
  th_cmd->add_option("--kernel", th.kernel, "exact mode kernel");
  th_cmd->add_option("--spec", th.spec, "feature spec JSON (rf mode)");
  th_cmd->add_option("--mean", th.mean, "prior mean");
  th_cmd->add_option("--amplitude", th.amplitude, "prior amplitude");
  th_cmd->add_option("--warmup", th.warmup, "warmup repetitions");
  th_cmd->add_option("--reps", th.reps, "timed repetitions");
  th_cmd->add_flag("--sqrt-counts", th.sqrt_counts, "sqrt-transform values at load");
  th_cmd->add_option("--output", th.output, "CSV file to write")->required();

  for (auto* cmd : {synth_cmd, gram_cmd, feat_cmd, sweep_cmd, gp_cmd, th_cmd})
    cmd->add_option("--threads", threads, "cap worker threads (never changes results)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (threads > 0) set_thread_limit(threads);

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*gram_cmd) return cmd_gram(gram_args);
    if (*feat_cmd) return cmd_features(feat);
    if (*sweep_cmd) return cmd_mse_sweep(sweep);
    if (*gp_cmd) return cmd_gp(gp_args);
    if (*th_cmd) return cmd_thompson(th);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
