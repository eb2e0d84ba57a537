#include "tanirf/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "tanirf/common.hpp"

namespace tanirf {

Kernel kernel_from_name(const std::string& name) {
  if (name == "tmm") return Kernel::kMinMax;
  if (name == "tdp") return Kernel::kDotProduct;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected tmm|tdp)");
}

std::string kernel_name(Kernel k) { return k == Kernel::kMinMax ? "tmm" : "tdp"; }

namespace {

void check_dims(const SparseVec& x, const SparseVec& y) {
  if (x.dim != y.dim) throw std::invalid_argument("kernel: dimension mismatch");
}

void check_dims(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel: dimension mismatch");
}

double dense_dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double dense_sq(const std::vector<double>& x) { return dense_dot(x, x); }

double tdp_from_parts(double xy, double xx, double yy) {
  if (xx == 0.0 && yy == 0.0) return 1.0;
  return xy / (xx + yy - xy);
}

double series_from_t(double t, int terms) {
  if (terms < 1) throw std::invalid_argument("t_dp_series: terms must be >= 1");
  double sum = 0.0;
  double power = 1.0;
  for (int r = 1; r <= terms; ++r) {
    power *= t;
    sum += power;
  }
  return sum;
}

}  // namespace

double dot(const SparseVec& x, const SparseVec& y) {
  check_dims(x, y);
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.entries.size() && j < y.entries.size()) {
    std::uint32_t xi = x.entries[i].index, yj = y.entries[j].index;
    if (xi == yj) {
      s += x.entries[i].value * y.entries[j].value;
      ++i;
      ++j;
    } else if (xi < yj) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double l1_distance(const SparseVec& x, const SparseVec& y) {
  check_dims(x, y);
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.entries.size() && j < y.entries.size()) {
    std::uint32_t xi = x.entries[i].index, yj = y.entries[j].index;
    if (xi == yj) {
      s += std::fabs(x.entries[i].value - y.entries[j].value);
      ++i;
      ++j;
    } else if (xi < yj) {
      s += x.entries[i].value;
      ++i;
    } else {
      s += y.entries[j].value;
      ++j;
    }
  }
  for (; i < x.entries.size(); ++i) s += x.entries[i].value;
  for (; j < y.entries.size(); ++j) s += y.entries[j].value;
  return s;
}

double t_mm(const SparseVec& x, const SparseVec& y) {
  check_dims(x, y);
  if (x.is_zero() && y.is_zero()) return 1.0;  // limit of identical inputs
  double nx = x.l1_norm(), ny = y.l1_norm();
  double d = l1_distance(x, y);
  return (nx + ny - d) / (nx + ny + d);
}

double t_dp(const SparseVec& x, const SparseVec& y) {
  check_dims(x, y);
  return tdp_from_parts(dot(x, y), x.sq_norm(), y.sq_norm());
}

double t_dp(const std::vector<double>& x, const std::vector<double>& y) {
  check_dims(x, y);
  return tdp_from_parts(dense_dot(x, y), dense_sq(x), dense_sq(y));
}

double t_dp_base(const SparseVec& x, const SparseVec& y) {
  check_dims(x, y);
  double denom = x.sq_norm() + y.sq_norm();
  if (denom == 0.0) throw std::invalid_argument("t_dp_base: both inputs are zero");
  return dot(x, y) / denom;
}

double t_dp_base(const std::vector<double>& x, const std::vector<double>& y) {
  check_dims(x, y);
  double denom = dense_sq(x) + dense_sq(y);
  if (denom == 0.0) throw std::invalid_argument("t_dp_base: both inputs are zero");
  return dense_dot(x, y) / denom;
}

double t_dp_series(const SparseVec& x, const SparseVec& y, int terms) {
  return series_from_t(t_dp_base(x, y), terms);
}

double t_dp_series(const std::vector<double>& x, const std::vector<double>& y, int terms) {
  return series_from_t(t_dp_base(x, y), terms);
}

double d_mm(const SparseVec& x, const SparseVec& y) { return 1.0 - t_mm(x, y); }

namespace {
double sqrt_one_minus(double t) { return std::sqrt(std::max(0.0, 1.0 - t)); }
}  // namespace

double d_dp(const SparseVec& x, const SparseVec& y) { return sqrt_one_minus(t_dp(x, y)); }

double d_dp(const std::vector<double>& x, const std::vector<double>& y) {
  return sqrt_one_minus(t_dp(x, y));
}

GramMatrix gram(const Dataset& d, Kernel k) {
  const std::size_t n = d.size();
  if (n == 0) throw std::invalid_argument("gram: dataset is empty");
  GramMatrix g;
  g.n = n;
  g.values.assign(n * n, 0.0);

  // Cache norms; the per-pair work is then a single merge walk.
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i)
    norms[i] = (k == Kernel::kMinMax) ? d.vectors[i].l1_norm() : d.vectors[i].sq_norm();

  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      g.at(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double v;
        if (k == Kernel::kMinMax) {
          const SparseVec& x = d.vectors[i];
          const SparseVec& y = d.vectors[j];
          if (x.is_zero() && y.is_zero()) {
            v = 1.0;
          } else {
            double dist = l1_distance(x, y);
            v = (norms[i] + norms[j] - dist) / (norms[i] + norms[j] + dist);
          }
        } else {
          v = tdp_from_parts(dot(d.vectors[i], d.vectors[j]), norms[i], norms[j]);
        }
        g.at(i, j) = v;
        g.at(j, i) = v;
      }
    }
  });
  return g;
}

std::vector<double> gram_cross(const std::vector<SparseVec>& a, const std::vector<SparseVec>& b,
                               Kernel k) {
  std::vector<double> out(a.size() * b.size());
  parallel_for(b.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j)
      for (std::size_t i = 0; i < a.size(); ++i)
        out[j * a.size() + i] =
            (k == Kernel::kMinMax) ? t_mm(a[i], b[j]) : t_dp(a[i], b[j]);
  });
  return out;
}

double min_eigenvalue(const GramMatrix& g) {
  Eigen::Map<const Eigen::MatrixXd> m(g.values.data(), static_cast<Eigen::Index>(g.n),
                                      static_cast<Eigen::Index>(g.n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace tanirf
