#pragma once

#include <cstdint>
#include <vector>

#include "tanirf/rng.hpp"
#include "tanirf/sparse.hpp"

namespace tanirf {

// CountSketch with hash-derived tables: bucket and sign for any index come
// from mix64 arithmetic on the seed, nothing is stored.
class CountSketchSpec {
 public:
  CountSketchSpec(std::size_t input_dim, std::size_t output_dim, std::uint64_t seed);

  std::uint32_t bucket_of(std::uint64_t index) const {
    return static_cast<std::uint32_t>(mix64(bucket_seed_ ^ mix64(index)) % output_dim_);
  }
  double sign_of(std::uint64_t index) const {
    return (mix64(sign_seed_ ^ mix64(index)) & 1) ? 1.0 : -1.0;
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::uint64_t seed_;
  std::uint64_t bucket_seed_;
  std::uint64_t sign_seed_;
};

// out[bucket(i)] += sign(i) * x_i. Linear in x; E[cs(x).cs(y)] = x.y.
std::vector<double> count_sketch(const CountSketchSpec& spec, const SparseVec& x);
std::vector<double> count_sketch(const CountSketchSpec& spec, const std::vector<double>& x);

// Exact cyclic convolution. The direct O(m^2) path runs up to
// kDirectConvolutionLimit; larger sizes go through an exact FFT route
// (power-of-two cyclic, or zero-padded linear convolution folded back). Both
// paths agree to well below 1e-9.
inline constexpr std::size_t kDirectConvolutionLimit = 2048;
std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> circular_convolve_direct(const std::vector<double>& a,
                                             const std::vector<double>& b);
std::vector<double> circular_convolve_fft(const std::vector<double>& a,
                                          const std::vector<double>& b);

// TensorSketch over either the q-fold self tensor power (poly mode, random
// features for (x.y)^q) or one tensor product of two heterogeneous vectors
// (pair mode). Component CountSketches use distinct substreams and the
// products are combined by cyclic convolution.
class TensorSketch {
 public:
  enum class Mode { kPoly, kPair };

  static TensorSketch poly(std::size_t input_dim, std::size_t degree, std::size_t output_dim,
                           std::uint64_t seed);
  static TensorSketch pair(std::size_t dim_a, std::size_t dim_b, std::size_t output_dim,
                           std::uint64_t seed);

  // Poly mode. E[out(x).out(y)] = (x.y)^degree.
  std::vector<double> operator()(const SparseVec& x) const;
  std::vector<double> operator()(const std::vector<double>& x) const;

  // Pair mode. E[out(a1,b1).out(a2,b2)] = (a1.a2)(b1.b2); the tensor product
  // a (x) b is never materialized.
  std::vector<double> operator()(const std::vector<double>& a,
                                 const std::vector<double>& b) const;

  Mode mode() const { return mode_; }
  std::size_t degree() const { return components_.size(); }
  std::size_t output_dim() const { return output_dim_; }
  std::uint64_t seed() const { return seed_; }
  const CountSketchSpec& component(std::size_t i) const { return components_[i]; }

 private:
  TensorSketch(Mode mode, std::vector<CountSketchSpec> components, std::size_t output_dim,
               std::uint64_t seed);

  Mode mode_;
  std::vector<CountSketchSpec> components_;
  std::size_t output_dim_;
  std::uint64_t seed_;
};

}  // namespace tanirf
