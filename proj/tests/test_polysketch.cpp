#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tanirf/feature_map.hpp"
#include "tanirf/polysketch.hpp"
#include "tanirf/rng.hpp"
#include "tanirf/sparse.hpp"

using namespace tanirf;

namespace {

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> random_dense(std::size_t dim, SeedStream& stream) {
  std::vector<double> v(dim);
  for (auto& x : v) x = stream.next_gaussian();
  return v;
}

struct Moments {
  double mean, sd_of_mean;
};

Moments mc_moments(const std::vector<double>& samples) {
  double sum = 0.0, sum_sq = 0.0;
  for (double s : samples) {
    sum += s;
    sum_sq += s * s;
  }
  double n = static_cast<double>(samples.size());
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  return {mean, std::sqrt(std::max(var, 0.0) / n)};
}

}  // namespace

TEST_CASE("count sketch structure") {
  CountSketchSpec spec(16, 8, 3);
  SparseVec one(16, {{5, 2.5}});
  auto out = count_sketch(spec, one);
  int nonzero = 0;
  for (double v : out)
    if (v != 0.0) {
      ++nonzero;
      CHECK(std::fabs(v) == 2.5);
    }
  CHECK(nonzero == 1);
  CHECK(out[spec.bucket_of(5)] == spec.sign_of(5) * 2.5);

  SeedStream stream(5, 0);
  auto x = random_dense(16, stream);
  auto y = random_dense(16, stream);
  std::vector<double> xy(16);
  for (int i = 0; i < 16; ++i) xy[i] = x[i] + y[i];
  auto cx = count_sketch(spec, x);
  auto cy = count_sketch(spec, y);
  auto cxy = count_sketch(spec, xy);
  for (int b = 0; b < 8; ++b) CHECK(cxy[b] == doctest::Approx(cx[b] + cy[b]).epsilon(1e-12));

  CHECK_THROWS_AS(count_sketch(spec, SparseVec(8, {{1, 1.0}})), std::invalid_argument);
}

TEST_CASE("count sketch preserves norms in expectation") {
  SeedStream stream(6, 0);
  auto x = random_dense(24, stream);
  double truth = dot_vec(x, x);
  std::vector<double> samples;
  for (int s = 0; s < 10000; ++s) {
    CountSketchSpec spec(24, 16, SeedStream::derive(700, static_cast<std::uint64_t>(s)));
    auto cs = count_sketch(spec, x);
    samples.push_back(dot_vec(cs, cs));
  }
  auto m = mc_moments(samples);
  CHECK(std::fabs(m.mean - truth) <= 3.0 * m.sd_of_mean);
}

TEST_CASE("circular convolution paths agree") {
  SeedStream stream(7, 0);
  for (std::size_t m : {4UL, 64UL, 1000UL, 2048UL, 2500UL, 4096UL}) {
    auto a = random_dense(m, stream);
    auto b = random_dense(m, stream);
    auto direct = circular_convolve_direct(a, b);
    auto fast = circular_convolve_fft(a, b);
    double scale = 0.0;
    for (double v : direct) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < m; ++i) CHECK(std::fabs(direct[i] - fast[i]) <= 1e-9 * scale);
  }
}

TEST_CASE("poly sketch unbiasedness on basis and orthogonal vectors") {
  SparseVec e1(8, {{0, 1.0}});
  SparseVec e2(8, {{1, 1.0}});
  for (std::size_t degree : {1UL, 2UL, 3UL}) {
    std::vector<double> self, ortho;
    for (int s = 0; s < 10000; ++s) {
      auto ts = TensorSketch::poly(8, degree, 16,
                                   SeedStream::derive(800 + degree, static_cast<std::uint64_t>(s)));
      auto f1 = ts(e1);
      auto f2 = ts(e2);
      self.push_back(dot_vec(f1, f1));
      ortho.push_back(dot_vec(f1, f2));
    }
    auto ms = mc_moments(self);
    CHECK(std::fabs(ms.mean - 1.0) <= 3.0 * ms.sd_of_mean);
    auto mo = mc_moments(ortho);
    CHECK(std::fabs(mo.mean) <= 3.0 * mo.sd_of_mean + 1e-12);
  }
}

TEST_CASE("poly sketch unbiasedness on general vectors") {
  SeedStream stream(8, 0);
  SparseVec x(10, {{0, 0.7}, {3, 1.2}, {7, 0.4}});
  SparseVec y(10, {{0, 0.5}, {2, 0.9}, {7, 1.1}});
  double base = 0.7 * 0.5 + 0.4 * 1.1;
  for (std::size_t degree : {2UL, 3UL}) {
    double truth = std::pow(base, static_cast<double>(degree));
    std::vector<double> samples;
    for (int s = 0; s < 20000; ++s) {
      auto ts = TensorSketch::poly(10, degree, 32,
                                   SeedStream::derive(810 + degree, static_cast<std::uint64_t>(s)));
      samples.push_back(dot_vec(ts(x), ts(y)));
    }
    auto m = mc_moments(samples);
    CHECK(std::fabs(m.mean - truth) <= 3.0 * m.sd_of_mean);
  }
}

TEST_CASE("poly sketch mean square error decays like one over the sketch size") {
  // Dense inputs: with very sparse vectors the error is driven by rare hash
  // collisions and the finite-trial MSE estimate is too heavy-tailed to
  // regress on.
  SeedStream stream(12, 0);
  std::vector<double> x = random_dense(64, stream);
  std::vector<double> y = random_dense(64, stream);
  const double truth = std::pow(dot_vec(x, y), 2.0);
  std::vector<std::size_t> sizes{256, 1024, 4096, 16384};
  std::vector<double> log_m, log_mse;
  for (std::size_t m : sizes) {
    double mse = 0.0;
    const int trials = 300;
    for (int s = 0; s < trials; ++s) {
      auto ts = TensorSketch::poly(64, 2, m,
                                   SeedStream::derive(820 + m, static_cast<std::uint64_t>(s)));
      double err = dot_vec(ts(x), ts(y)) - truth;
      mse += err * err;
    }
    log_m.push_back(std::log(static_cast<double>(m)));
    log_mse.push_back(std::log(mse / trials));
  }
  // Least-squares slope of log MSE against log M.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_m.size(); ++i) {
    mx += log_m[i];
    my += log_mse[i];
  }
  mx /= static_cast<double>(log_m.size());
  my /= static_cast<double>(log_m.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < log_m.size(); ++i) {
    num += (log_m[i] - mx) * (log_mse[i] - my);
    den += (log_m[i] - mx) * (log_m[i] - mx);
  }
  double slope = num / den;
  CHECK(slope >= -1.25);
  CHECK(slope <= -0.75);
}

TEST_CASE("pair sketch with a unit scalar is a rotated signed count sketch") {
  SeedStream stream(9, 0);
  auto a = random_dense(12, stream);
  auto ts = TensorSketch::pair(12, 1, 8, 99);
  auto out = ts(a, std::vector<double>{1.0});
  auto cs_a = count_sketch(ts.component(0), a);
  std::uint32_t shift = ts.component(1).bucket_of(0);
  double sign = ts.component(1).sign_of(0);
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(out[(k + shift) % 8] == doctest::Approx(sign * cs_a[k]).epsilon(1e-12));
}

TEST_CASE("pair sketch equals a count sketch of the explicit tensor product") {
  SeedStream stream(10, 0);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    std::size_t da = 6, db = 5, out_dim = 7;
    auto a = random_dense(da, stream);
    auto b = random_dense(db, stream);
    auto ts = TensorSketch::pair(da, db, out_dim, seed);
    auto fast = ts(a, b);

    // Combined hash over vec(a b^T), column-major: index j*da + i.
    std::vector<double> explicit_sketch(out_dim, 0.0);
    for (std::size_t j = 0; j < db; ++j)
      for (std::size_t i = 0; i < da; ++i) {
        std::uint32_t bkt = (ts.component(0).bucket_of(i) + ts.component(1).bucket_of(j)) %
                            static_cast<std::uint32_t>(out_dim);
        double sgn = ts.component(0).sign_of(i) * ts.component(1).sign_of(j);
        explicit_sketch[bkt] += sgn * a[i] * b[j];
      }
    for (std::size_t k = 0; k < out_dim; ++k)
      CHECK(fast[k] == doctest::Approx(explicit_sketch[k]).epsilon(1e-12));
  }
}

TEST_CASE("pair sketch unbiasedness") {
  SeedStream stream(11, 0);
  auto ax = random_dense(5, stream);
  auto ay = random_dense(5, stream);
  auto bx = random_dense(4, stream);
  auto by = random_dense(4, stream);
  double truth = dot_vec(ax, ay) * dot_vec(bx, by);
  std::vector<double> samples;
  for (int s = 0; s < 10000; ++s) {
    auto ts = TensorSketch::pair(5, 4, 16, SeedStream::derive(900, static_cast<std::uint64_t>(s)));
    samples.push_back(dot_vec(ts(ax, bx), ts(ay, by)));
  }
  auto m = mc_moments(samples);
  CHECK(std::fabs(m.mean - truth) <= 3.0 * m.sd_of_mean);
  // Output dimension is the configured one regardless of the input sizes.
  auto ts = TensorSketch::pair(5, 4, 11, 1);
  CHECK(ts(ax, bx).size() == 11);
}

TEST_CASE("sketches are deterministic in their seed") {
  SparseVec x(10, {{1, 1.5}, {6, 2.0}});
  auto t1 = TensorSketch::poly(10, 3, 64, 42);
  auto t2 = TensorSketch::poly(10, 3, 64, 42);
  CHECK(t1(x) == t2(x));
  auto t3 = TensorSketch::poly(10, 3, 64, 43);
  CHECK(t1(x) != t3(x));
}

TEST_CASE("tensor sketch specs round-trip through JSON") {
  auto pair = TensorSketch::pair(24, 7, 13, 99);
  auto back = make_tensor_sketch(tensor_sketch_spec_json(pair));
  SeedStream stream(14, 0);
  auto a = random_dense(24, stream);
  auto b = random_dense(7, stream);
  CHECK(pair(a, b) == back(a, b));

  auto poly = TensorSketch::poly(10, 3, 32, 5);
  auto poly_back = make_tensor_sketch(tensor_sketch_spec_json(poly));
  SparseVec x(10, {{2, 1.5}});
  CHECK(poly(x) == poly_back(x));
}
