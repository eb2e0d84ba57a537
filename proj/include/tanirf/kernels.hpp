#pragma once

#include <string>
#include <vector>

#include "tanirf/sparse.hpp"

namespace tanirf {

enum class Kernel { kMinMax, kDotProduct };

// Maps "tmm"/"tdp"; throws std::invalid_argument otherwise.
Kernel kernel_from_name(const std::string& name);
std::string kernel_name(Kernel k);

// Merge-walk primitives over sparse vectors.
double dot(const SparseVec& x, const SparseVec& y);
double l1_distance(const SparseVec& x, const SparseVec& y);

// Min-max (weighted Jaccard) similarity, evaluated through the L1 identity
//   (|x|_1 + |y|_1 - |x-y|_1) / (|x|_1 + |y|_1 + |x-y|_1)
// which needs one merge walk and no min/max temporaries. Returns 1 when both
// vectors are zero, 0 when exactly one is.
double t_mm(const SparseVec& x, const SparseVec& y);

// Dot-product Tanimoto similarity x.y / (|x|^2 + |y|^2 - x.y); 1 when both
// inputs are zero. Defined on vectors of arbitrary sign, hence the dense
// overload.
double t_dp(const SparseVec& x, const SparseVec& y);
double t_dp(const std::vector<double>& x, const std::vector<double>& y);

// Base ratio t = x.y / (|x|^2 + |y|^2); |t| <= 1/2 for all nonzero inputs.
double t_dp_base(const SparseVec& x, const SparseVec& y);
double t_dp_base(const std::vector<double>& x, const std::vector<double>& y);

// Truncated power series sum_{r=1}^{terms} t^r. Monotone nondecreasing in
// `terms` for non-negative inputs; within 2^-terms of t_dp. Rejects the
// both-zero case, where the series form is undefined.
double t_dp_series(const SparseVec& x, const SparseVec& y, int terms);
double t_dp_series(const std::vector<double>& x, const std::vector<double>& y, int terms);

// Distances: 1 - T_MM (Jaccard/Soergel) and sqrt(1 - T_DP).
double d_mm(const SparseVec& x, const SparseVec& y);
double d_dp(const SparseVec& x, const SparseVec& y);
double d_dp(const std::vector<double>& x, const std::vector<double>& y);

// Dense symmetric kernel matrix, column-major. Diagonals are exactly 1.
struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // n*n column-major

  double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
  double& at(std::size_t i, std::size_t j) { return values[j * n + i]; }
};

// Exact Gram matrix; assembly is parallel over row blocks and the result is
// independent of the thread count.
GramMatrix gram(const Dataset& d, Kernel k);

// Cross-kernel block K[i][j] = k(a_i, b_j), column-major with rows indexing a.
std::vector<double> gram_cross(const std::vector<SparseVec>& a, const std::vector<SparseVec>& b,
                               Kernel k);

// Smallest eigenvalue via a symmetric eigendecomposition (signed, so PSD
// checks can see how negative a matrix is).
double min_eigenvalue(const GramMatrix& g);

}  // namespace tanirf
