#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tanirf/sparse.hpp"

namespace tanirf {

// Regularized lower incomplete gamma P(s, z): series expansion below the
// z = s+1 split, continued fraction above.
double regularized_gamma_p(double s, double z);

// Quantile of Gamma(shape s, rate c): the q with P(s, c*q) = u, solved by
// safeguarded Newton from a Wilson-Hilferty style start, relative tolerance
// 1e-12. Rejects u in {0, 1}.
double gamma_quantile(double s, double c, double u);

// Scalar random feature for the kernel (a + b)^-r, evaluated at squared norm
// `sqnorm` with mixing variable z ~ Gamma(s, c):
//   exp((1/2 - sqnorm) z) * z^((r-s)/2) * sqrt(c^-s e^((c-1)z) Gamma(s)/Gamma(r))
// computed in log space; throws NumericError when the log magnitude exceeds
// 700 (which signals s, c untuned for the data scale).
double scalar_prefactor_feature(double sqnorm, int r, double s, double c, double z);

// Parameter choice s = r*zeta, c = 2*zeta^2 for data whose squared norms span
// the ratio zeta.
std::pair<double, double> tuned_params(int r, double zeta);

// min ||x||^2 / max ||x||^2 over the dataset, clamped below at 1e-6.
// Rejects datasets containing a zero vector.
double estimate_zeta(const Dataset& d);

double max_sq_norm(const Dataset& d);

struct PrefactorSpec {
  int r = 1;                     // power-series term index
  double s = 1.0;                // gamma shape
  double c = 1.0;                // gamma rate
  std::size_t num_features = 0;  // M
  std::uint64_t seed = 0;
};

// Shifted-lattice quasi Monte Carlo features: u_i = frac(u + i/M) with one
// uniform shift u per map, gamma quantiles cached at construction. Dot
// products of mapped points estimate (a + b)^-r without bias over u.
class PrefactorMap {
 public:
  explicit PrefactorMap(const PrefactorSpec& spec);

  std::vector<double> operator()(double sqnorm) const;

  const PrefactorSpec& spec() const { return spec_; }
  double shift() const { return shift_; }

 private:
  PrefactorSpec spec_;
  double shift_;
  double half_log_const_;           // 0.5*(-s ln c + lgamma(s) - lgamma(r)) - 0.5 ln M
  std::vector<double> quantiles_;   // gamma_{s,c}(u_i)
};

}  // namespace tanirf
