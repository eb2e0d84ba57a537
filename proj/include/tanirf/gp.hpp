#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tanirf/io.hpp"
#include "tanirf/kernels.hpp"
#include "tanirf/sparse.hpp"

namespace tanirf {

// Constant-mean GP observation model: f ~ GP(mean, amplitude * k),
// y = f + N(0, noise).
struct GpHypers {
  double mean = 0.0;
  double amplitude = 1.0;  // a > 0
  double noise = 0.1;      // sigma^2 > 0
};

// Cholesky with escalating diagonal jitter: starts at 1e-10 * mean(diag),
// multiplies by 10 up to 1e-4 * mean(diag), then throws NumericError.
Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd a);

// Log marginal likelihood log N(y | mean*1, amplitude*K + noise*I).
double mll_exact(const GramMatrix& k, const std::vector<double>& y, const GpHypers& h);

struct MllGradient {
  double value = 0.0;
  double d_mean = 0.0;
  double d_log_amplitude = 0.0;
  double d_log_noise = 0.0;
};
MllGradient mll_exact_grad(const GramMatrix& k, const std::vector<double>& y, const GpHypers& h);

// Maximizes mll_exact by coordinate search in (mean, log amplitude,
// log noise): the mean coordinate is solved in closed form, the log-scale
// coordinates by bracketed golden-section refinement. Deterministic; the
// returned hypers never score below the default initialization
// (mean(y), var(y), 0.1*var(y)). Degenerate targets fall back to the
// defaults with noise floored at 1e-6*(1+|mean|).
GpHypers fit_hypers(const GramMatrix& k, const std::vector<double>& y);
GpHypers fit_hypers(const Dataset& subset, const std::vector<double>& y, Kernel kernel);

// Posterior state of the Bayesian linear model f(x) = mean + phi(x)'v,
// v ~ N(0, amplitude*I): a triangular factor of the M x M posterior
// precision (1/amplitude) I + (1/noise) Phi Phi' and the posterior mean
// weights. Nothing n x n is ever formed.
struct GpPosterior {
  GpHypers hypers;
  Eigen::MatrixXd chol_precision;  // lower-triangular L, L L' = precision
  Eigen::VectorXd weights;         // posterior mean of v
  std::string feature_spec_json;   // empty when the features came from elsewhere
};

// Fit from an M x n feature matrix. Cost O(n M^2 + M^3).
GpPosterior rfgp_fit(const Eigen::MatrixXd& phi, const std::vector<double>& y,
                     const GpHypers& h, std::string feature_spec_json = {});

// Marginal predictive mean and variance (includes the noise term) per column
// of phi_test.
void rfgp_predict(const GpPosterior& post, const Eigen::MatrixXd& phi_test,
                  std::vector<double>& mean, std::vector<double>& variance);

// Exact GP conditioning on explicit kernel blocks: k_train is the raw kernel
// matrix of the conditioning set, k_cross its kernel against the test points
// (train rows, test columns), k_test_diag the test self-kernel values. The
// hypers apply amplitude and noise on top.
void exact_gp_predict(const Eigen::MatrixXd& k_train, const Eigen::MatrixXd& k_cross,
                      const std::vector<double>& k_test_diag, const std::vector<double>& y,
                      const GpHypers& h, std::vector<double>& mean,
                      std::vector<double>& variance);

// Exact GP on a seeded random subset of the training data.
void exact_subset_gp(const Dataset& train, const std::vector<double>& y,
                     std::size_t subset_size, Kernel kernel, const GpHypers& h,
                     const Dataset& test, std::uint64_t seed, std::vector<double>& mean,
                     std::vector<double>& variance);

// Prior sample scores mean + sqrt(amplitude) * Phi' w with w ~ N(0, I), one
// column per draw. Cost O(draws * n * M).
Eigen::MatrixXd thompson_scores(const Eigen::MatrixXd& phi, const GpHypers& h,
                                std::size_t draws, std::uint64_t seed);

// Batch Thompson selection: one independent prior draw per batch slot, argmax
// without replacement across the batch. Rejects batch > pool size.
std::vector<std::size_t> thompson_select(const Eigen::MatrixXd& phi, const GpHypers& h,
                                         std::size_t batch, std::uint64_t seed);

// Exact prior sampling mean + sqrt(amplitude) L z with L the jittered
// Cholesky factor of K; one column per draw. Cost O(n^3).
Eigen::MatrixXd exact_prior_sample(const GramMatrix& k, const GpHypers& h, std::size_t draws,
                                   std::uint64_t seed);

// Argmax-without-replacement over score columns, one pick per column.
std::vector<std::size_t> select_argmax_without_replacement(const Eigen::MatrixXd& scores);

// Seeded size-k subset of [0, n) (partial Fisher-Yates order).
std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, std::uint64_t seed);

// Metrics used by the regression CLI: mean per-point Gaussian log density and
// the coefficient of determination.
double avg_log_prob(const std::vector<double>& y, const std::vector<double>& mean,
                    const std::vector<double>& variance);
double r2_score(const std::vector<double>& y, const std::vector<double>& mean);

// Model persistence: <base>.json holds hypers and the feature spec, the TRFF
// blob holds [chol_precision | weights] as an M x (M+1) matrix.
void save_posterior(const GpPosterior& post, const std::string& base_path);
GpPosterior load_posterior(const std::string& base_path);

}  // namespace tanirf
