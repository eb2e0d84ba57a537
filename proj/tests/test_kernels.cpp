#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "tanirf/common.hpp"
#include "tanirf/kernels.hpp"
#include "tanirf/rng.hpp"
#include "tanirf/sparse.hpp"

using namespace tanirf;

namespace {

SparseVec random_nonneg(std::uint32_t dim, SeedStream& stream, double density = 0.4) {
  SparseVec v;
  v.dim = dim;
  for (std::uint32_t i = 0; i < dim; ++i) {
    double occupied = stream.next_unit();
    double value = stream.next_unit_open() * 4.0;
    if (occupied < density) v.entries.push_back({i, value});
  }
  return v;
}

std::vector<double> random_signed(std::uint32_t dim, SeedStream& stream) {
  std::vector<double> v(dim);
  for (auto& x : v) x = stream.next_gaussian();
  return v;
}

// Direct min/max-sum evaluation, the independent oracle for the L1 identity.
double tmm_naive(const SparseVec& x, const SparseVec& y) {
  double min_sum = 0.0, max_sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.entries.size() && j < y.entries.size()) {
    if (x.entries[i].index == y.entries[j].index) {
      min_sum += std::min(x.entries[i].value, y.entries[j].value);
      max_sum += std::max(x.entries[i].value, y.entries[j].value);
      ++i;
      ++j;
    } else if (x.entries[i].index < y.entries[j].index) {
      max_sum += x.entries[i++].value;
    } else {
      max_sum += y.entries[j++].value;
    }
  }
  for (; i < x.entries.size(); ++i) max_sum += x.entries[i].value;
  for (; j < y.entries.size(); ++j) max_sum += y.entries[j].value;
  if (max_sum == 0.0) return 1.0;
  return min_sum / max_sum;
}

const SparseVec kZero4(4, {});

}  // namespace

TEST_CASE("t_mm basic values") {
  SparseVec x(2, {{0, 1.0}, {1, 2.0}});
  SparseVec y(2, {{0, 2.0}, {1, 1.0}});
  CHECK(t_mm(x, y) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t_mm(x, x) == 1.0);
  CHECK(t_mm(x, SparseVec(2, {})) == 0.0);
  CHECK(t_mm(SparseVec(2, {}), SparseVec(2, {})) == 1.0);
  CHECK_THROWS_AS(t_mm(x, kZero4), std::invalid_argument);
}

TEST_CASE("L1-identity path equals the naive min/max path") {
  SeedStream stream(11, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    SparseVec x = random_nonneg(24, stream);
    SparseVec y = random_nonneg(24, stream);
    CHECK(t_mm(x, y) == doctest::Approx(tmm_naive(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("t_dp basic values") {
  SparseVec x(2, {{0, 1.0}});
  SparseVec y(2, {{0, 1.0}, {1, 1.0}});
  CHECK(t_dp(x, y) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t_dp(x, x) == 1.0);
  CHECK(t_dp(SparseVec(2, {}), SparseVec(2, {})) == 1.0);
  CHECK(t_dp(std::vector<double>{1.0, -2.0}, std::vector<double>{1.0, -2.0}) == 1.0);
  CHECK_THROWS_AS(t_dp(x, kZero4), std::invalid_argument);
}

TEST_CASE("t_dp equals t_mm on binary vectors") {
  SeedStream stream(12, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    Dataset d = synth_dataset(2, 32, 0.3, 1, stream.next_u64());
    CHECK(t_dp(d.vectors[0], d.vectors[1]) ==
          doctest::Approx(t_mm(d.vectors[0], d.vectors[1])).epsilon(1e-12));
  }
}

TEST_CASE("power series truncation") {
  SparseVec x(2, {{0, 1.0}});
  SparseVec y(2, {{0, 1.0}, {1, 1.0}});
  // t = 1/3; one term is just t, the infinite sum is t/(1-t) = 1/2.
  CHECK(t_dp_series(x, y, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(t_dp_series(x, y, 60) == doctest::Approx(0.5).epsilon(1e-14));

  SeedStream stream(13, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    SparseVec a = random_nonneg(16, stream);
    SparseVec b = random_nonneg(16, stream);
    if (a.is_zero() && b.is_zero()) continue;
    double exact = t_dp(a, b);
    double prev = 0.0;
    for (int terms = 1; terms <= 8; ++terms) {
      double s = t_dp_series(a, b, terms);
      CHECK(std::fabs(s - exact) <= std::pow(2.0, -terms) + 1e-15);
      CHECK(s >= prev - 1e-15);  // monotone for non-negative inputs
      prev = s;
    }
  }
  CHECK_THROWS_AS(t_dp_series(SparseVec(2, {}), SparseVec(2, {}), 4), std::invalid_argument);
}

TEST_CASE("base ratio obeys the Cauchy-Schwarz half bound") {
  SeedStream stream(14, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    auto x = random_signed(8, stream);
    auto y = random_signed(8, stream);
    CHECK(std::fabs(t_dp_base(x, y)) <= 0.5 + 1e-12);
  }
}

TEST_CASE("the {1,2,4} triple separates the two distance constructions") {
  std::vector<double> a{1.0}, b{2.0}, c{4.0};
  // 1 - T_DP fails the triangle inequality on this triple...
  double naive_ab = 1.0 - t_dp(a, b);
  double naive_bc = 1.0 - t_dp(b, c);
  double naive_ac = 1.0 - t_dp(a, c);
  CHECK(naive_ab == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(naive_ac == doctest::Approx(9.0 / 13.0).epsilon(1e-15));
  CHECK(naive_ab + naive_bc < naive_ac);
  // ...while sqrt(1 - T_DP) satisfies it.
  CHECK(d_dp(a, b) + d_dp(b, c) >= d_dp(a, c));
  CHECK(d_dp(a, b) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
  CHECK(d_dp(a, c) == doctest::Approx(std::sqrt(9.0 / 13.0)).epsilon(1e-15));
  CHECK(d_dp(a, a) == 0.0);
}

TEST_CASE("metric axioms hold on random triples") {
  SeedStream stream(15, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    SparseVec x = random_nonneg(12, stream);
    SparseVec y = random_nonneg(12, stream);
    SparseVec z = random_nonneg(12, stream);
    CHECK(d_mm(x, y) == doctest::Approx(d_mm(y, x)).epsilon(1e-14));
    CHECK(d_mm(x, x) == 0.0);
    CHECK(d_mm(x, z) <= d_mm(x, y) + d_mm(y, z) + 1e-12);
    CHECK(d_dp(x, z) <= d_dp(x, y) + d_dp(y, z) + 1e-12);
  }
  for (int trial = 0; trial < 2000; ++trial) {
    auto x = random_signed(6, stream);
    auto y = random_signed(6, stream);
    auto z = random_signed(6, stream);
    CHECK(d_dp(x, z) <= d_dp(x, y) + d_dp(y, z) + 1e-12);
  }
}

TEST_CASE("gram matrices") {
  Dataset one;
  one.dim = 4;
  one.ids = {"a"};
  one.vectors = {SparseVec(4, {{1, 2.0}})};
  GramMatrix g1 = gram(one, Kernel::kMinMax);
  CHECK(g1.n == 1);
  CHECK(g1.at(0, 0) == 1.0);

  Dataset binary = synth_dataset(60, 64, 0.2, 1, 21);
  GramMatrix gm = gram(binary, Kernel::kMinMax);
  GramMatrix gd = gram(binary, Kernel::kDotProduct);
  for (std::size_t i = 0; i < gm.n; ++i)
    for (std::size_t j = 0; j < gm.n; ++j) {
      CHECK(gm.at(i, j) == doctest::Approx(gd.at(i, j)).epsilon(1e-12));
      CHECK(gm.at(i, j) == doctest::Approx(gm.at(j, i)).epsilon(1e-12));
      CHECK(gm.at(i, j) >= 0.0);
      CHECK(gm.at(i, j) <= 1.0);
    }

  Dataset counts = synth_dataset(120, 128, 0.1, 4, 22);
  CHECK(min_eigenvalue(gram(counts, Kernel::kMinMax)) >= -1e-8);
  CHECK(min_eigenvalue(gram(counts, Kernel::kDotProduct)) >= -1e-8);
}

TEST_CASE("gram is independent of the thread count") {
  Dataset d = synth_dataset(80, 64, 0.15, 3, 31);
  set_thread_limit(1);
  GramMatrix a = gram(d, Kernel::kDotProduct);
  set_thread_limit(4);
  GramMatrix b = gram(d, Kernel::kDotProduct);
  set_thread_limit(0);
  CHECK(a.values == b.values);
}

TEST_CASE("geometric scalar construction is diagonally dominant and invertible") {
  for (std::size_t n = 2; n <= 8; ++n) {
    Dataset d;
    d.dim = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      d.ids.push_back("p" + std::to_string(i));
      d.vectors.push_back(SparseVec(1, {{0, std::pow(2.0 * static_cast<double>(n),
                                                     static_cast<double>(i))}}));
    }
    for (Kernel k : {Kernel::kMinMax, Kernel::kDotProduct}) {
      GramMatrix g = gram(d, k);
      for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) off += std::fabs(g.at(i, j));
        CHECK(off < g.at(i, i));
      }
      Eigen::Map<const Eigen::MatrixXd> m(g.values.data(), static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n));
      CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(m).isInvertible());
    }
  }
}
