#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tanirf/polysketch.hpp"
#include "tanirf/prefactor.hpp"
#include "tanirf/sparse.hpp"

namespace tanirf {

// Largest-remainder split of `total` features over term indices 1..terms with
// weights r^exponent; every term gets at least one feature and the result is
// nonincreasing when exponent <= 0. Ties go to the smaller term index.
std::vector<std::size_t> allocate_features(std::size_t total, int terms, double exponent);

enum class BiasMode { kPlain, kNormalize, kResidual };

BiasMode bias_mode_from_name(const std::string& name);  // plain|normalize|residual
std::string bias_mode_name(BiasMode mode);

struct TdpFeatureSpec {
  int terms = 4;                      // R, power-series truncation
  std::size_t num_features = 0;       // M, summed over the term blocks
  double alloc_exponent = -1.0;       // p in weights r^p
  std::size_t prefactor_dim = 4096;   // m_r, internal only
  std::size_t poly_dim = 4096;        // m'_r, internal only
  double zeta = 1.0;                  // dataset min/max squared-norm ratio
  double norm_scale = 1.0;            // dataset max squared norm
  BiasMode bias = BiasMode::kPlain;
  std::uint64_t seed = 0;
};

// Fills zeta and norm_scale from the dataset the map will serve.
TdpFeatureSpec tdp_spec_for(const Dataset& d, TdpFeatureSpec base);

// Normalizes a feature vector to unit length so the self-similarity estimate
// is exactly 1; stays an oblivious map since only the point's own features
// are touched.
std::vector<double> normalize_correction(std::vector<double> features);

// Random features for T_DP assembled per power-series term: prefactor QMC
// features and degree-r polynomial features, combined with a pair sketch of
// their tensor product, blocks concatenated. Inputs are rescaled by
// norm_scale internally (the kernel is invariant to that scaling; the tuned
// prefactor parameters are not).
//
// Bias handling: kPlain estimates the series truncated at R terms (biased
// below T_DP by at most 2^-R on non-negative data); kNormalize rescales each
// output to unit norm; kResidual appends a sketch of the truncation error
// t^{R+1}(1 + T_DP), built from term-(R+1) features and (1, Phi(x)), adding
// m~_{R+1} = m~_R output dimensions.
class TdpFeatureMap {
 public:
  TdpFeatureMap(std::uint32_t dim, const TdpFeatureSpec& spec);

  std::vector<double> operator()(const SparseVec& x) const;

  std::size_t output_dim() const;                       // M, or M + residual block
  const std::vector<std::size_t>& allocation() const { return allocation_; }
  std::size_t residual_dim() const { return residual_dim_; }
  const TdpFeatureSpec& spec() const { return spec_; }

  // Points whose squared norm left the [zeta*norm_scale, norm_scale] band the
  // map was tuned for; the first occurrence also logs a warning to stderr.
  std::size_t out_of_band_count() const { return out_of_band_.load(); }

 private:
  std::vector<double> term_features(const SparseVec& x, std::size_t term_index) const;
  std::vector<double> plain_features(const SparseVec& x) const;

  std::uint32_t dim_;
  TdpFeatureSpec spec_;
  std::vector<std::size_t> allocation_;
  std::size_t residual_dim_ = 0;

  // Per-term components; index t covers term r = t+1, plus one extra set in
  // residual mode for r = R+1.
  std::vector<PrefactorMap> prefactor_maps_;
  std::vector<TensorSketch> poly_sketches_;
  std::vector<TensorSketch> pair_sketches_;
  std::unique_ptr<TensorSketch> residual_pair_;  // (m~_{R+1}) x (1+M) -> m~_{R+1}

  mutable std::atomic<std::size_t> out_of_band_{0};
};

}  // namespace tanirf
