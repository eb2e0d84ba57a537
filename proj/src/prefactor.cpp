#include "tanirf/prefactor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tanirf/common.hpp"
#include "tanirf/rng.hpp"

namespace tanirf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Lower-series form, valid and fast for z < s+1.
double gamma_p_series(double s, double z) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= z / (s + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-z + s * std::log(z) - std::lgamma(s));
}

// Modified Lentz continued fraction for Q(s, z), valid for z >= s+1.
double gamma_q_cf(double s, double z) {
  const double tiny = 1e-300;
  double b = z + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-z + s * std::log(z) - std::lgamma(s));
}

}  // namespace

double regularized_gamma_p(double s, double z) {
  if (!(s > 0.0)) throw std::invalid_argument("regularized_gamma_p: s must be > 0");
  if (z < 0.0) throw std::invalid_argument("regularized_gamma_p: z must be >= 0");
  if (z == 0.0) return 0.0;
  if (z < s + 1.0) return gamma_p_series(s, z);
  return 1.0 - gamma_q_cf(s, z);
}

namespace {

// Acklam's rational approximation of the standard normal quantile; only used
// to seed the Newton iteration.
double normal_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double gamma_pdf_unit_rate(double s, double z) {
  return std::exp(-z + (s - 1.0) * std::log(z) - std::lgamma(s));
}

}  // namespace

double gamma_quantile(double s, double c, double u) {
  if (!(s > 0.0) || !(c > 0.0)) throw std::invalid_argument("gamma_quantile: s, c must be > 0");
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("gamma_quantile: u must lie strictly inside (0,1)");

  // Solve P(s, z) = u for the unit-rate variable z, then q = z/c.
  double z;
  if (s > 1.0) {
    double g = normal_quantile_approx(u);
    double w = 1.0 - 1.0 / (9.0 * s) + g / (3.0 * std::sqrt(s));
    z = s * w * w * w;
    if (z <= 0.0) z = 1e-8;
  } else {
    double t = 1.0 - s * (0.253 + 0.12 * s);
    z = (u < t) ? std::pow(u / t, 1.0 / s) : 1.0 - std::log((1.0 - u) / (1.0 - t));
  }

  // Maintain a bracket [lo, hi] for bisection safeguarding.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    double f = regularized_gamma_p(s, z) - u;
    if (f > 0.0)
      hi = z;
    else
      lo = z;
    double pdf = gamma_pdf_unit_rate(s, z);
    double step = (pdf > 0.0) ? f / pdf : 0.0;
    double next = z - step;
    if (!(next > lo) || !(next < hi) || pdf == 0.0)
      next = std::isinf(hi) ? z * 2.0 : 0.5 * (lo + hi);
    if (std::fabs(next - z) <= 1e-13 * z) {
      z = next;
      break;
    }
    z = next;
  }
  return z / c;
}

double scalar_prefactor_feature(double sqnorm, int r, double s, double c, double z) {
  if (r < 1) throw std::invalid_argument("scalar_prefactor_feature: r must be >= 1");
  if (!(s > 0.0) || !(c > 0.0))
    throw std::invalid_argument("scalar_prefactor_feature: s, c must be > 0");
  if (sqnorm < 0.0) throw std::invalid_argument("scalar_prefactor_feature: sqnorm must be >= 0");
  if (!(z > 0.0)) throw std::invalid_argument("scalar_prefactor_feature: z must be > 0");
  double log_phi = (0.5 - sqnorm) * z + 0.5 * (r - s) * std::log(z) +
                   0.5 * (-s * std::log(c) + (c - 1.0) * z + std::lgamma(s) - std::lgamma(r));
  if (std::fabs(log_phi) > 700.0)
    throw NumericError("scalar_prefactor_feature: log magnitude exceeds 700; tune (s, c)");
  return std::exp(log_phi);
}

std::pair<double, double> tuned_params(int r, double zeta) {
  if (r < 1) throw std::invalid_argument("tuned_params: r must be >= 1");
  if (!(zeta > 0.0) || zeta > 1.0)
    throw std::invalid_argument("tuned_params: zeta must be in (0,1]");
  return {r * zeta, 2.0 * zeta * zeta};
}

double estimate_zeta(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("estimate_zeta: dataset is empty");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& v : d.vectors) {
    double s = v.sq_norm();
    if (s == 0.0) throw std::invalid_argument("estimate_zeta: zero vector in dataset");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return std::max(lo / hi, 1e-6);
}

double max_sq_norm(const Dataset& d) {
  double hi = 0.0;
  for (const auto& v : d.vectors) hi = std::max(hi, v.sq_norm());
  return hi;
}

PrefactorMap::PrefactorMap(const PrefactorSpec& spec) : spec_(spec) {
  if (spec_.num_features == 0) throw std::invalid_argument("PrefactorMap: M must be >= 1");
  if (spec_.r < 1) throw std::invalid_argument("PrefactorMap: r must be >= 1");
  if (!(spec_.s > 0.0) || !(spec_.c > 0.0))
    throw std::invalid_argument("PrefactorMap: s, c must be > 0");

  SeedStream stream(spec_.seed, stream_tag::kPrefactorShift);
  shift_ = stream.next_unit_open();

  const std::size_t m = spec_.num_features;
  half_log_const_ = 0.5 * (-spec_.s * std::log(spec_.c) + std::lgamma(spec_.s) -
                           std::lgamma(static_cast<double>(spec_.r))) -
                    0.5 * std::log(static_cast<double>(m));
  quantiles_.resize(m);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double u = shift_ + static_cast<double>(i + 1) / static_cast<double>(m);
      u -= std::floor(u);
      // The lattice point can round onto 0 or 1; nudge inside the open interval.
      u = std::min(std::max(u, 0x1.0p-53), 1.0 - 0x1.0p-53);
      quantiles_[i] = gamma_quantile(spec_.s, spec_.c, u);
    }
  });
}

std::vector<double> PrefactorMap::operator()(double sqnorm) const {
  if (sqnorm < 0.0) throw std::invalid_argument("PrefactorMap: sqnorm must be >= 0");
  std::vector<double> out(quantiles_.size());
  double half_rs = 0.5 * (spec_.r - spec_.s);
  for (std::size_t i = 0; i < quantiles_.size(); ++i) {
    double g = quantiles_[i];
    double log_phi = half_log_const_ - (sqnorm - 0.5 * spec_.c) * g + half_rs * std::log(g);
    if (std::fabs(log_phi) > 700.0)
      throw NumericError("PrefactorMap: log magnitude exceeds 700; tune (s, c)");
    out[i] = std::exp(log_phi);
  }
  return out;
}

}  // namespace tanirf
