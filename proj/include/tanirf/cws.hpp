#pragma once

#include <cstdint>

#include "tanirf/rng.hpp"
#include "tanirf/sparse.hpp"

namespace tanirf {

// Consistent weighted sampling hash over non-negative sparse vectors, in log
// space. Per-coordinate parameters r_i, c_i ~ Gamma(2,1) and beta_i ~ U(0,1)
// are derived on the fly from (seed, coordinate), so an instance is O(1)
// memory and fully determined by (dim, seed).
//
// For each stored coordinate with value v:
//   t_i = floor(ln(v)/r_i + beta_i)
//   y_i = r_i * (t_i - beta_i)          (the log of the discretized weight)
//   a_i = ln(c_i) - y_i - r_i
// and the hash is (argmin_i a_i, t at the argmin). Absent coordinates never
// participate, which realizes the ln(0) = -inf convention.
class CwsHash {
 public:
  CwsHash(std::uint32_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

  struct Result {
    std::uint32_t index = 0;  // i*
    std::int64_t level = 0;   // t at i*
    bool operator==(const Result&) const = default;
  };

  // Rejects zero vectors and dimension mismatches.
  Result operator()(const SparseVec& x) const;

  std::uint32_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  struct Params {
    double r, c, beta;
  };
  Params params(std::uint32_t coordinate) const;

 private:
  std::uint32_t dim_;
  std::uint64_t seed_;
};

// Reduces a hash output to [0, bucket_count) with a mix64 of the packed pair
// (i* in the high 32 bits, t* two's-complement in the low 32). Bit-exact;
// rejects levels outside signed 32-bit range.
std::uint32_t bucket(std::uint32_t i_star, std::int64_t t_star, std::uint32_t bucket_count);

}  // namespace tanirf
