#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tanirf {

// Sparse non-negative vector: strictly ascending indices, strictly positive
// values, nothing else stored. Keeping zeros out of the representation means
// "skip absent coordinates" is the only convention hash and kernel code need.
struct SparseVec {
  struct Entry {
    std::uint32_t index = 0;
    double value = 0.0;
    bool operator==(const Entry&) const = default;
  };

  std::uint32_t dim = 0;
  std::vector<Entry> entries;

  SparseVec() = default;
  // Validates the invariants; throws std::invalid_argument on violation.
  SparseVec(std::uint32_t dimension, std::vector<Entry> ents);

  static SparseVec from_dense(const std::vector<double>& dense);
  std::vector<double> to_dense() const;

  std::size_t nnz() const { return entries.size(); }
  bool is_zero() const { return entries.empty(); }
  double l1_norm() const;
  double sq_norm() const;

  bool operator==(const SparseVec&) const = default;
};

// Replaces each value by its square root; indices unchanged.
SparseVec sqrt_transform(const SparseVec& v);

// Ordered collection of sparse vectors with a shared dimension and unique ids.
struct Dataset {
  std::uint32_t dim = 0;
  std::vector<std::string> ids;
  std::vector<SparseVec> vectors;

  std::size_t size() const { return vectors.size(); }
  // Throws std::invalid_argument if sizes, dims or id uniqueness fail.
  void validate() const;
};

// Applies sqrt_transform to every vector.
Dataset sqrt_transform(const Dataset& d);

// Each coordinate is occupied independently with probability `density`, with
// an integer value uniform on [1, max_count]. One substream per vector, so
// the output is identical no matter how generation is scheduled.
Dataset synth_dataset(std::size_t n, std::uint32_t dim, double density, int max_count,
                      std::uint64_t seed);

}  // namespace tanirf
