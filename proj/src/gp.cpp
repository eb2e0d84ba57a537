#include "tanirf/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

#include "tanirf/common.hpp"
#include "tanirf/rng.hpp"

namespace tanirf {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Map<const Eigen::MatrixXd> as_matrix(const GramMatrix& g) {
  return Eigen::Map<const Eigen::MatrixXd>(g.values.data(), static_cast<Eigen::Index>(g.n),
                                           static_cast<Eigen::Index>(g.n));
}

void check_hypers(const GpHypers& h) {
  if (!(h.amplitude > 0.0) || !(h.noise > 0.0))
    throw std::invalid_argument("GpHypers: amplitude and noise must be > 0");
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  double scale = a.diagonal().mean();
  for (double jitter = 1e-10; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += jitter * scale;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericError("chol_with_jitter: factorization failed after jitter escalation");
}

double mll_exact(const GramMatrix& k, const std::vector<double>& y, const GpHypers& h) {
  check_hypers(h);
  if (k.n != y.size()) throw std::invalid_argument("mll_exact: size mismatch");
  const auto n = static_cast<Eigen::Index>(k.n);
  Eigen::MatrixXd c = h.amplitude * as_matrix(k);
  c.diagonal().array() += h.noise;
  auto llt = chol_with_jitter(std::move(c));
  Eigen::VectorXd r = as_vector(y).array() - h.mean;
  Eigen::VectorXd alpha = llt.solve(r);
  double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * r.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * kLog2Pi;
}

MllGradient mll_exact_grad(const GramMatrix& k, const std::vector<double>& y,
                           const GpHypers& h) {
  check_hypers(h);
  if (k.n != y.size()) throw std::invalid_argument("mll_exact_grad: size mismatch");
  const auto n = static_cast<Eigen::Index>(k.n);
  Eigen::MatrixXd km = as_matrix(k);
  Eigen::MatrixXd c = h.amplitude * km;
  c.diagonal().array() += h.noise;
  auto llt = chol_with_jitter(std::move(c));
  Eigen::VectorXd r = as_vector(y).array() - h.mean;
  Eigen::VectorXd alpha = llt.solve(r);
  Eigen::MatrixXd cinv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  MllGradient g;
  g.value = -0.5 * r.dot(alpha) - llt.matrixLLT().diagonal().array().log().sum() -
            0.5 * static_cast<double>(n) * kLog2Pi;
  g.d_mean = alpha.sum();
  double d_amp = 0.5 * (alpha.dot(km * alpha) - (cinv.array() * km.array()).sum());
  double d_noise = 0.5 * (alpha.squaredNorm() - cinv.trace());
  g.d_log_amplitude = h.amplitude * d_amp;
  g.d_log_noise = h.noise * d_noise;
  return g;
}

namespace {

// Golden-section refinement inside [lo, hi] for a unimodal-enough objective.
template <typename F>
double golden_max(const F& f, double lo, double hi, double tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  double mid = 0.5 * (a + b);
  return mid;
}

// Expands a bracket around x0 in the improving direction inside [lo, hi],
// then refines. Returns the best point found; never worse than x0.
template <typename F>
double line_maximize(const F& f, double x0, double f0, double lo, double hi) {
  const double step0 = 0.5;
  auto clamp = [&](double x) { return std::min(hi, std::max(lo, x)); };
  double xp = clamp(x0 + step0), xm = clamp(x0 - step0);
  double f_plus = f(xp);
  double f_minus = f(xm);
  if (f_plus <= f0 && f_minus <= f0) {
    double x = golden_max(f, xm, xp, 1e-6);
    return f(x) > f0 ? x : x0;
  }
  double dir = (f_plus > f_minus) ? 1.0 : -1.0;
  double prev = x0;
  double cur = dir > 0 ? xp : xm;
  double f_cur = std::max(f_plus, f_minus);
  double step = step0;
  while (step < 8.0 && cur > lo && cur < hi) {
    step *= 2.0;
    double nxt = clamp(cur + dir * step);
    double f_nxt = f(nxt);
    if (f_nxt <= f_cur) {
      double bracket_lo = std::min(prev, nxt), bracket_hi = std::max(prev, nxt);
      double x = golden_max(f, bracket_lo, bracket_hi, 1e-6);
      double fx = f(x);
      return fx >= f_cur ? x : cur;
    }
    prev = cur;
    cur = nxt;
    f_cur = f_nxt;
  }
  return cur;
}

}  // namespace

GpHypers fit_hypers(const GramMatrix& k, const std::vector<double>& y) {
  if (k.n != y.size() || y.empty()) throw std::invalid_argument("fit_hypers: size mismatch");
  const double n = static_cast<double>(y.size());
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;

  double floor = 1e-6 * (1.0 + std::fabs(mean));
  if (var < floor) {
    // Degenerate targets: nothing to fit.
    return GpHypers{mean, std::max(var, floor), floor};
  }

  GpHypers h{mean, var, 0.1 * var};
  Eigen::MatrixXd km = as_matrix(k);
  Eigen::VectorXd yv = as_vector(y);

  // Search windows around the data scale. The noise floor matches common GP
  // tooling; without it a flat amplitude/noise likelihood ridge can walk the
  // noise to numerically meaningless depths.
  const double log_amp_lo = std::log(var) - 9.0, log_amp_hi = std::log(var) + 9.0;
  const double log_noise_lo = std::log(1e-4 * var), log_noise_hi = std::log(1e2 * var);

  auto eval = [&](const GpHypers& hy) { return mll_exact(k, y, hy); };
  double best = eval(h);

  for (int sweep = 0; sweep < 25; ++sweep) {
    double before = best;

    // Closed-form mean given the current covariance.
    {
      Eigen::MatrixXd c = h.amplitude * km;
      c.diagonal().array() += h.noise;
      auto llt = chol_with_jitter(std::move(c));
      Eigen::VectorXd ones = Eigen::VectorXd::Ones(yv.size());
      Eigen::VectorXd ci_y = llt.solve(yv);
      Eigen::VectorXd ci_1 = llt.solve(ones);
      double mu = ones.dot(ci_y) / ones.dot(ci_1);
      GpHypers trial = h;
      trial.mean = mu;
      double score = eval(trial);
      if (score > best) {
        h = trial;
        best = score;
      }
    }

    // log amplitude
    {
      auto f = [&](double la) {
        GpHypers trial = h;
        trial.amplitude = std::exp(la);
        return eval(trial);
      };
      double la = line_maximize(f, std::log(h.amplitude), best, log_amp_lo, log_amp_hi);
      double score = f(la);
      if (score > best) {
        h.amplitude = std::exp(la);
        best = score;
      }
    }

    // log noise
    {
      auto f = [&](double ln) {
        GpHypers trial = h;
        trial.noise = std::exp(ln);
        return eval(trial);
      };
      double ln = line_maximize(f, std::log(h.noise), best, log_noise_lo, log_noise_hi);
      double score = f(ln);
      if (score > best) {
        h.noise = std::exp(ln);
        best = score;
      }
    }

    if (best - before < 1e-9) break;
  }
  return h;
}

GpHypers fit_hypers(const Dataset& subset, const std::vector<double>& y, Kernel kernel) {
  if (subset.size() > 2000)
    throw std::invalid_argument("fit_hypers: subset larger than 2000 points");
  return fit_hypers(gram(subset, kernel), y);
}

GpPosterior rfgp_fit(const Eigen::MatrixXd& phi, const std::vector<double>& y,
                     const GpHypers& h, std::string feature_spec_json) {
  check_hypers(h);
  if (phi.cols() != static_cast<Eigen::Index>(y.size()))
    throw std::invalid_argument("rfgp_fit: feature/label size mismatch");
  if (phi.size() == 0) throw std::invalid_argument("rfgp_fit: empty feature matrix");
  if (!phi.allFinite()) throw NumericError("rfgp_fit: non-finite features");

  const Eigen::Index m = phi.rows();
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(m, m);
  precision.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0 / h.noise);
  precision = precision.selfadjointView<Eigen::Lower>();
  precision.diagonal().array() += 1.0 / h.amplitude;

  auto llt = chol_with_jitter(std::move(precision));
  Eigen::VectorXd residual = as_vector(y).array() - h.mean;
  Eigen::VectorXd rhs = phi * residual / h.noise;

  GpPosterior post;
  post.hypers = h;
  post.chol_precision = llt.matrixL();
  post.weights = llt.solve(rhs);
  post.feature_spec_json = std::move(feature_spec_json);
  return post;
}

void rfgp_predict(const GpPosterior& post, const Eigen::MatrixXd& phi_test,
                  std::vector<double>& mean, std::vector<double>& variance) {
  if (phi_test.rows() != post.weights.size())
    throw std::invalid_argument("rfgp_predict: feature dimension mismatch");
  const Eigen::Index n = phi_test.cols();
  mean.resize(n);
  variance.resize(n);
  Eigen::VectorXd mu = (phi_test.transpose() * post.weights).array() + post.hypers.mean;
  Eigen::MatrixXd z =
      post.chol_precision.triangularView<Eigen::Lower>().solve(phi_test);
  for (Eigen::Index j = 0; j < n; ++j) {
    mean[j] = mu[j];
    variance[j] = z.col(j).squaredNorm() + post.hypers.noise;
  }
}

void exact_gp_predict(const Eigen::MatrixXd& k_train, const Eigen::MatrixXd& k_cross,
                      const std::vector<double>& k_test_diag, const std::vector<double>& y,
                      const GpHypers& h, std::vector<double>& mean,
                      std::vector<double>& variance) {
  check_hypers(h);
  const Eigen::Index n = k_train.rows();
  const Eigen::Index n_test = k_cross.cols();
  if (k_train.cols() != n || k_cross.rows() != n ||
      static_cast<Eigen::Index>(y.size()) != n ||
      static_cast<Eigen::Index>(k_test_diag.size()) != n_test)
    throw std::invalid_argument("exact_gp_predict: shape mismatch");

  Eigen::MatrixXd c = h.amplitude * k_train;
  c.diagonal().array() += h.noise;
  auto llt = chol_with_jitter(std::move(c));
  Eigen::VectorXd residual = as_vector(y).array() - h.mean;
  Eigen::VectorXd alpha = llt.solve(residual);

  Eigen::MatrixXd cross = h.amplitude * k_cross;
  Eigen::MatrixXd v = llt.matrixL().solve(cross);
  mean.resize(n_test);
  variance.resize(n_test);
  for (Eigen::Index j = 0; j < n_test; ++j) {
    mean[j] = h.mean + cross.col(j).dot(alpha);
    double latent = h.amplitude * k_test_diag[j] - v.col(j).squaredNorm();
    variance[j] = std::max(latent, 0.0) + h.noise;
  }
}

std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("sample_subset: k > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SeedStream stream(seed, stream_tag::kGpSubset);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(stream.next_u64() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

void exact_subset_gp(const Dataset& train, const std::vector<double>& y,
                     std::size_t subset_size, Kernel kernel, const GpHypers& h,
                     const Dataset& test, std::uint64_t seed, std::vector<double>& mean,
                     std::vector<double>& variance) {
  if (train.size() != y.size()) throw std::invalid_argument("exact_subset_gp: size mismatch");
  if (subset_size == 0 || subset_size > train.size())
    throw std::invalid_argument("exact_subset_gp: bad subset size");

  auto picks = sample_subset(train.size(), subset_size, seed);
  std::vector<SparseVec> sub_vecs;
  std::vector<double> sub_y;
  sub_vecs.reserve(picks.size());
  sub_y.reserve(picks.size());
  for (auto i : picks) {
    sub_vecs.push_back(train.vectors[i]);
    sub_y.push_back(y[i]);
  }

  const auto ns = static_cast<Eigen::Index>(sub_vecs.size());
  Eigen::MatrixXd k_train(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    k_train(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < ns; ++j) {
      double v = (kernel == Kernel::kMinMax) ? t_mm(sub_vecs[i], sub_vecs[j])
                                             : t_dp(sub_vecs[i], sub_vecs[j]);
      k_train(i, j) = v;
      k_train(j, i) = v;
    }
  }
  std::vector<double> cross = gram_cross(sub_vecs, test.vectors, kernel);
  Eigen::Map<const Eigen::MatrixXd> k_cross(cross.data(), ns,
                                            static_cast<Eigen::Index>(test.size()));
  std::vector<double> diag(test.size(), 1.0);
  exact_gp_predict(k_train, k_cross, diag, sub_y, h, mean, variance);
}

Eigen::MatrixXd thompson_scores(const Eigen::MatrixXd& phi, const GpHypers& h,
                                std::size_t draws, std::uint64_t seed) {
  check_hypers(h);
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  Eigen::MatrixXd scores(n, static_cast<Eigen::Index>(draws));
  double root_amp = std::sqrt(h.amplitude);
  std::uint64_t base = SeedStream::derive(seed, stream_tag::kThompson);
  parallel_for(draws, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd w(m);
    for (std::size_t b = begin; b < end; ++b) {
      SeedStream stream(base, b);
      for (Eigen::Index i = 0; i < m; ++i) w[i] = stream.next_gaussian();
      scores.col(static_cast<Eigen::Index>(b)) =
          (root_amp * (phi.transpose() * w)).array() + h.mean;
    }
  });
  return scores;
}

std::vector<std::size_t> select_argmax_without_replacement(const Eigen::MatrixXd& scores) {
  const Eigen::Index n = scores.rows();
  const Eigen::Index b = scores.cols();
  if (b > n) throw std::invalid_argument("thompson: batch larger than pool");
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(b));
  for (Eigen::Index col = 0; col < b; ++col) {
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || scores(i, col) > best_score) {
        best = i;
        best_score = scores(i, col);
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    out.push_back(static_cast<std::size_t>(best));
  }
  return out;
}

std::vector<std::size_t> thompson_select(const Eigen::MatrixXd& phi, const GpHypers& h,
                                         std::size_t batch, std::uint64_t seed) {
  if (batch > static_cast<std::size_t>(phi.cols()))
    throw std::invalid_argument("thompson_select: batch larger than pool");
  return select_argmax_without_replacement(thompson_scores(phi, h, batch, seed));
}

Eigen::MatrixXd exact_prior_sample(const GramMatrix& k, const GpHypers& h, std::size_t draws,
                                   std::uint64_t seed) {
  check_hypers(h);
  const auto n = static_cast<Eigen::Index>(k.n);
  auto llt = chol_with_jitter(as_matrix(k));
  const Eigen::MatrixXd& factor = llt.matrixLLT();
  double root_amp = std::sqrt(h.amplitude);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(draws));
  std::uint64_t base = SeedStream::derive(seed, stream_tag::kGpSample);
  parallel_for(draws, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd z(n);
    for (std::size_t b = begin; b < end; ++b) {
      SeedStream stream(base, b);
      for (Eigen::Index i = 0; i < n; ++i) z[i] = stream.next_gaussian();
      Eigen::VectorXd lz = factor.triangularView<Eigen::Lower>() * z;
      out.col(static_cast<Eigen::Index>(b)) = (root_amp * lz).array() + h.mean;
    }
  });
  return out;
}

double avg_log_prob(const std::vector<double>& y, const std::vector<double>& mean,
                    const std::vector<double>& variance) {
  if (y.size() != mean.size() || y.size() != variance.size() || y.empty())
    throw std::invalid_argument("avg_log_prob: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double r = y[i] - mean[i];
    sum += -0.5 * (r * r / variance[i] + std::log(variance[i]) + kLog2Pi);
  }
  return sum / static_cast<double>(y.size());
}

double r2_score(const std::vector<double>& y, const std::vector<double>& mean) {
  if (y.size() != mean.size() || y.empty())
    throw std::invalid_argument("r2_score: size mismatch");
  double avg = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - mean[i]) * (y[i] - mean[i]);
    ss_tot += (y[i] - avg) * (y[i] - avg);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

void save_posterior(const GpPosterior& post, const std::string& base_path) {
  const auto m = post.weights.size();
  TrffMatrix blob;
  blob.rows = static_cast<std::uint64_t>(m);
  blob.cols = static_cast<std::uint64_t>(m + 1);
  blob.data.resize(blob.rows * blob.cols);
  Eigen::Map<Eigen::MatrixXd>(blob.data.data(), m, m + 1)
      << post.chol_precision, post.weights;
  write_trff(base_path + ".trff", blob);

  nlohmann::json j;
  j["hypers"] = {{"mean", post.hypers.mean},
                 {"amplitude", post.hypers.amplitude},
                 {"noise", post.hypers.noise}};
  if (post.feature_spec_json.empty())
    j["feature_spec"] = nullptr;
  else
    j["feature_spec"] = nlohmann::json::parse(post.feature_spec_json);
  j["blob"] = base_path + ".trff";
  std::ofstream out(base_path + ".json");
  if (!out) throw ParseError("cannot open '" + base_path + ".json' for writing");
  out << j.dump(2) << "\n";
}

GpPosterior load_posterior(const std::string& base_path) {
  std::ifstream in(base_path + ".json");
  if (!in) throw ParseError("cannot open '" + base_path + ".json'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("'" + base_path + ".json': invalid JSON");

  GpPosterior post;
  post.hypers.mean = j.at("hypers").at("mean").get<double>();
  post.hypers.amplitude = j.at("hypers").at("amplitude").get<double>();
  post.hypers.noise = j.at("hypers").at("noise").get<double>();
  if (j.contains("feature_spec") && !j.at("feature_spec").is_null())
    post.feature_spec_json = j.at("feature_spec").dump();

  TrffMatrix blob = read_trff(j.at("blob").get<std::string>());
  if (blob.cols != blob.rows + 1) throw ParseError("posterior blob: expected M x (M+1) payload");
  const auto m = static_cast<Eigen::Index>(blob.rows);
  Eigen::Map<const Eigen::MatrixXd> data(blob.data.data(), m, m + 1);
  post.chol_precision = data.leftCols(m);
  post.weights = data.col(m);
  return post;
}

}  // namespace tanirf
