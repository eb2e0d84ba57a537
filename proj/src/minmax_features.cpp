#include "tanirf/minmax_features.hpp"

#include <cmath>
#include <stdexcept>

#include "tanirf/common.hpp"

namespace tanirf {

XiDist xi_dist_from_name(const std::string& name) {
  if (name == "rademacher") return XiDist::kRademacher;
  if (name == "gaussian") return XiDist::kGaussian;
  throw std::invalid_argument("unknown xi distribution '" + name + "'");
}

std::string xi_dist_name(XiDist d) {
  return d == XiDist::kRademacher ? "rademacher" : "gaussian";
}

MinMaxFeatureMap::MinMaxFeatureMap(std::uint32_t dim, std::size_t num_features,
                                   std::uint32_t bucket_count, XiDist xi, std::uint64_t seed)
    : dim_(dim),
      num_features_(num_features),
      bucket_count_(bucket_count),
      xi_(xi),
      seed_(seed),
      cws_base_(SeedStream::derive(seed, stream_tag::kCws)),
      xi_base_(SeedStream::derive(seed, stream_tag::kXi)) {
  if (num_features_ == 0) throw std::invalid_argument("MinMaxFeatureMap: M must be >= 1");
  if (bucket_count_ < 2) throw std::invalid_argument("MinMaxFeatureMap: K must be >= 2");
  if (xi_ == XiDist::kRademacher) {
    words_per_feature_ = (bucket_count_ + 63) / 64;
    sign_bits_.resize(num_features_ * words_per_feature_);
    parallel_for(num_features_, [&](std::size_t begin, std::size_t end) {
      for (std::size_t m = begin; m < end; ++m) {
        SeedStream stream(xi_base_, m);
        for (std::size_t w = 0; w < words_per_feature_; ++w)
          sign_bits_[m * words_per_feature_ + w] = stream.next_u64();
      }
    });
  }
}

double MinMaxFeatureMap::xi_entry(std::size_t m, std::uint32_t bucket_index) const {
  if (xi_ == XiDist::kRademacher) {
    std::uint64_t word = sign_bits_[m * words_per_feature_ + (bucket_index >> 6)];
    return ((word >> (bucket_index & 63)) & 1) ? 1.0 : -1.0;
  }
  // One two-draw substream per (feature, bucket) entry.
  SeedStream stream(SeedStream::derive(xi_base_, m), bucket_index);
  return stream.next_gaussian();
}

CwsHash MinMaxFeatureMap::hash(std::size_t m) const {
  return CwsHash(dim_, SeedStream::derive(cws_base_, m));
}

double MinMaxFeatureMap::scalar_feature(std::size_t m, const SparseVec& x) const {
  CwsHash::Result h = hash(m)(x);
  return xi_entry(m, bucket(h.index, h.level, bucket_count_));
}

std::vector<double> MinMaxFeatureMap::operator()(const SparseVec& x) const {
  if (x.is_zero()) throw std::invalid_argument("MinMaxFeatureMap: zero vector");
  std::vector<double> out(num_features_);
  double scale = 1.0 / std::sqrt(static_cast<double>(num_features_));
  for (std::size_t m = 0; m < num_features_; ++m) out[m] = scalar_feature(m, x) * scale;
  return out;
}

}  // namespace tanirf
