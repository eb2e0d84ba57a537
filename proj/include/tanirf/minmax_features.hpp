#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanirf/cws.hpp"

namespace tanirf {

enum class XiDist { kRademacher, kGaussian };

XiDist xi_dist_from_name(const std::string& name);  // "rademacher"|"gaussian"
std::string xi_dist_name(XiDist d);

// Random features for the min-max kernel: feature m hashes the input with an
// independent CWS hash and uses the bucketed output to index a fixed random
// vector Xi^(m). Rademacher Xi is kept bit-packed (one bit per entry);
// Gaussian Xi is derived on demand from the feature's substream, so the map
// stays small at any M.
class MinMaxFeatureMap {
 public:
  static constexpr std::uint32_t kDefaultBucketCount = 4096;

  MinMaxFeatureMap(std::uint32_t dim, std::size_t num_features, std::uint32_t bucket_count,
                   XiDist xi, std::uint64_t seed);

  // Full feature vector, scaled by 1/sqrt(M) so dot products estimate T_MM.
  std::vector<double> operator()(const SparseVec& x) const;

  // Unscaled scalar feature m: Xi^(m)[bucket(h_m(x))]. The statistical tests
  // work with these directly.
  double scalar_feature(std::size_t m, const SparseVec& x) const;
  double xi_entry(std::size_t m, std::uint32_t bucket_index) const;
  CwsHash hash(std::size_t m) const;

  std::uint32_t dim() const { return dim_; }
  std::size_t num_features() const { return num_features_; }
  std::uint32_t bucket_count() const { return bucket_count_; }
  XiDist xi_dist() const { return xi_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint32_t dim_;
  std::size_t num_features_;
  std::uint32_t bucket_count_;
  XiDist xi_;
  std::uint64_t seed_;
  std::uint64_t cws_base_;
  std::uint64_t xi_base_;
  std::size_t words_per_feature_ = 0;
  std::vector<std::uint64_t> sign_bits_;  // rademacher only
};

}  // namespace tanirf
