#include "tanirf/tdp_features.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "tanirf/common.hpp"

namespace tanirf {

std::vector<std::size_t> allocate_features(std::size_t total, int terms, double exponent) {
  if (terms < 1) throw std::invalid_argument("allocate_features: terms must be >= 1");
  if (total < static_cast<std::size_t>(terms))
    throw std::invalid_argument("allocate_features: total must be >= terms");

  std::vector<double> weights(terms);
  double weight_sum = 0.0;
  for (int r = 1; r <= terms; ++r) {
    weights[r - 1] = std::pow(static_cast<double>(r), exponent);
    weight_sum += weights[r - 1];
  }

  std::vector<std::size_t> out(terms);
  std::vector<double> remainders(terms);
  std::size_t assigned = 0;
  for (int t = 0; t < terms; ++t) {
    double quota = static_cast<double>(total) * weights[t] / weight_sum;
    out[t] = static_cast<std::size_t>(std::floor(quota));
    remainders[t] = quota - static_cast<double>(out[t]);
    assigned += out[t];
  }
  // Largest remainder first, ties to the smaller term index.
  std::vector<int> order(terms);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (int k = 0; assigned < total; ++k) {
    ++out[order[k % terms]];
    ++assigned;
  }
  // Every term needs at least one feature; take from the largest block.
  for (int t = 0; t < terms; ++t) {
    while (out[t] == 0) {
      int donor = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
      --out[donor];
      ++out[t];
    }
  }
  return out;
}

BiasMode bias_mode_from_name(const std::string& name) {
  if (name == "plain") return BiasMode::kPlain;
  if (name == "normalize") return BiasMode::kNormalize;
  if (name == "residual") return BiasMode::kResidual;
  throw std::invalid_argument("unknown bias mode '" + name + "'");
}

std::string bias_mode_name(BiasMode mode) {
  switch (mode) {
    case BiasMode::kPlain: return "plain";
    case BiasMode::kNormalize: return "normalize";
    default: return "residual";
  }
}

TdpFeatureSpec tdp_spec_for(const Dataset& d, TdpFeatureSpec base) {
  base.zeta = estimate_zeta(d);
  base.norm_scale = max_sq_norm(d);
  return base;
}

std::vector<double> normalize_correction(std::vector<double> features) {
  double sq = 0.0;
  for (double v : features) sq += v * v;
  if (!(sq > 0.0)) throw std::invalid_argument("normalize_correction: zero feature vector");
  double inv = 1.0 / std::sqrt(sq);
  for (double& v : features) v *= inv;
  return features;
}

TdpFeatureMap::TdpFeatureMap(std::uint32_t dim, const TdpFeatureSpec& spec)
    : dim_(dim), spec_(spec) {
  if (spec_.terms < 1) throw std::invalid_argument("TdpFeatureMap: R must be >= 1");
  if (!(spec_.zeta > 0.0) || spec_.zeta > 1.0)
    throw std::invalid_argument("TdpFeatureMap: zeta must be in (0,1]");
  if (!(spec_.norm_scale > 0.0))
    throw std::invalid_argument("TdpFeatureMap: norm_scale must be > 0");
  if (spec_.prefactor_dim == 0 || spec_.poly_dim == 0)
    throw std::invalid_argument("TdpFeatureMap: internal dims must be >= 1");

  allocation_ = allocate_features(spec_.num_features, spec_.terms, spec_.alloc_exponent);
  if (spec_.bias == BiasMode::kResidual) residual_dim_ = allocation_.back();

  std::uint64_t prefactor_base = SeedStream::derive(spec_.seed, stream_tag::kTdpPrefactor);
  std::uint64_t poly_base = SeedStream::derive(spec_.seed, stream_tag::kTdpPoly);
  std::uint64_t pair_base = SeedStream::derive(spec_.seed, stream_tag::kTdpPair);

  std::size_t total_terms = static_cast<std::size_t>(spec_.terms) +
                            (spec_.bias == BiasMode::kResidual ? 1 : 0);
  prefactor_maps_.reserve(total_terms);
  poly_sketches_.reserve(total_terms);
  pair_sketches_.reserve(total_terms);
  for (std::size_t t = 0; t < total_terms; ++t) {
    int r = static_cast<int>(t) + 1;
    auto [s, c] = tuned_params(r, spec_.zeta);
    PrefactorSpec pf;
    pf.r = r;
    pf.s = s;
    pf.c = c;
    pf.num_features = spec_.prefactor_dim;
    pf.seed = SeedStream::derive(prefactor_base, t);
    prefactor_maps_.emplace_back(pf);
    poly_sketches_.push_back(TensorSketch::poly(dim_, static_cast<std::size_t>(r),
                                                spec_.poly_dim,
                                                SeedStream::derive(poly_base, t)));
    std::size_t block = (t < allocation_.size()) ? allocation_[t] : residual_dim_;
    pair_sketches_.push_back(TensorSketch::pair(spec_.prefactor_dim, spec_.poly_dim, block,
                                                SeedStream::derive(pair_base, t)));
  }
  if (spec_.bias == BiasMode::kResidual) {
    residual_pair_ = std::make_unique<TensorSketch>(TensorSketch::pair(
        residual_dim_, spec_.num_features + 1, residual_dim_,
        SeedStream::derive(pair_base, total_terms)));
  }
}

std::size_t TdpFeatureMap::output_dim() const { return spec_.num_features + residual_dim_; }

std::vector<double> TdpFeatureMap::term_features(const SparseVec& x, std::size_t t) const {
  // Scale-invariant composition: x and its squared norm are both reduced by
  // the dataset scale before the tuned prefactor sees them.
  double inv_scale = 1.0 / spec_.norm_scale;
  std::vector<double> prefactor = prefactor_maps_[t](x.sq_norm() * inv_scale);

  SparseVec scaled = x;
  double inv_len = std::sqrt(inv_scale);
  for (auto& e : scaled.entries) e.value *= inv_len;
  std::vector<double> poly = poly_sketches_[t](scaled);

  return pair_sketches_[t](prefactor, poly);
}

std::vector<double> TdpFeatureMap::plain_features(const SparseVec& x) const {
  std::vector<double> out;
  out.reserve(spec_.num_features);
  for (std::size_t t = 0; t < static_cast<std::size_t>(spec_.terms); ++t) {
    std::vector<double> block = term_features(x, t);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<double> TdpFeatureMap::operator()(const SparseVec& x) const {
  if (x.dim != dim_) throw std::invalid_argument("TdpFeatureMap: dimension mismatch");
  if (x.is_zero()) throw std::invalid_argument("TdpFeatureMap: zero vector");

  double rel = x.sq_norm() / spec_.norm_scale;
  if (rel > 1.0 + 1e-9 || rel < spec_.zeta * (1.0 - 1e-9)) {
    if (out_of_band_.fetch_add(1) == 0)
      std::cerr << "tanirf: warning: input squared norm " << x.sq_norm()
                << " outside the tuned band [" << spec_.zeta * spec_.norm_scale << ", "
                << spec_.norm_scale << "]; prefactor accuracy degrades\n";
  }

  std::vector<double> features = plain_features(x);
  switch (spec_.bias) {
    case BiasMode::kPlain:
      return features;
    case BiasMode::kNormalize:
      return normalize_correction(std::move(features));
    case BiasMode::kResidual: {
      // Sketch of the truncation error t^{R+1} (1 + T_DP): term-(R+1)
      // features paired with (1, Phi(x)).
      std::vector<double> next_term = term_features(x, static_cast<std::size_t>(spec_.terms));
      std::vector<double> plus_one;
      plus_one.reserve(features.size() + 1);
      plus_one.push_back(1.0);
      plus_one.insert(plus_one.end(), features.begin(), features.end());
      std::vector<double> delta = (*residual_pair_)(next_term, plus_one);
      features.insert(features.end(), delta.begin(), delta.end());
      return features;
    }
  }
  throw std::logic_error("TdpFeatureMap: unreachable bias mode");
}

}  // namespace tanirf
