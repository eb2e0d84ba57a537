#include "tanirf/cws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tanirf/common.hpp"

namespace tanirf {

namespace {

struct CoordinateDraw {
  double r, c, beta;
};

CoordinateDraw draw_params(std::uint64_t seed, std::uint32_t coordinate) {
  SeedStream stream(seed, coordinate);
  CoordinateDraw d;
  d.r = stream.next_gamma21();
  d.c = stream.next_gamma21();
  d.beta = stream.next_unit();
  return d;
}

}  // namespace

CwsHash::Params CwsHash::params(std::uint32_t coordinate) const {
  auto d = draw_params(seed_, coordinate);
  return {d.r, d.c, d.beta};
}

CwsHash::Result CwsHash::operator()(const SparseVec& x) const {
  if (x.dim != dim_) throw std::invalid_argument("CwsHash: dimension mismatch");
  if (x.is_zero()) throw std::invalid_argument("CwsHash: zero vector has no hash");

  Result best;
  double best_a = std::numeric_limits<double>::infinity();
  for (const auto& e : x.entries) {
    auto p = draw_params(seed_, e.index);
    double t = std::floor(std::log(e.value) / p.r + p.beta);
    double y = p.r * (t - p.beta);
    double a = std::log(p.c) - y - p.r;
    if (a < best_a) {
      best_a = a;
      best.index = e.index;
      best.level = static_cast<std::int64_t>(t);
    }
  }
  return best;
}

std::uint32_t bucket(std::uint32_t i_star, std::int64_t t_star, std::uint32_t bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("bucket: bucket_count must be >= 1");
  if (t_star < std::numeric_limits<std::int32_t>::min() ||
      t_star > std::numeric_limits<std::int32_t>::max())
    throw NumericError("bucket: hash level outside signed 32-bit range");
  std::uint64_t packed = (static_cast<std::uint64_t>(i_star) << 32) ^
                         static_cast<std::uint64_t>(static_cast<std::uint32_t>(
                             static_cast<std::int32_t>(t_star)));
  return static_cast<std::uint32_t>(mix64(packed) % bucket_count);
}

}  // namespace tanirf
