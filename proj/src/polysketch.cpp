#include "tanirf/polysketch.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace tanirf {

CountSketchSpec::CountSketchSpec(std::size_t input_dim, std::size_t output_dim,
                                 std::uint64_t seed)
    : input_dim_(input_dim),
      output_dim_(output_dim),
      seed_(seed),
      bucket_seed_(SeedStream::derive(seed, stream_tag::kSketchBucket)),
      sign_seed_(SeedStream::derive(seed, stream_tag::kSketchSign)) {
  if (input_dim_ == 0 || output_dim_ == 0)
    throw std::invalid_argument("CountSketchSpec: dims must be >= 1");
}

std::vector<double> count_sketch(const CountSketchSpec& spec, const SparseVec& x) {
  if (x.dim != spec.input_dim()) throw std::invalid_argument("count_sketch: dimension mismatch");
  std::vector<double> out(spec.output_dim(), 0.0);
  for (const auto& e : x.entries) out[spec.bucket_of(e.index)] += spec.sign_of(e.index) * e.value;
  return out;
}

std::vector<double> count_sketch(const CountSketchSpec& spec, const std::vector<double>& x) {
  if (x.size() != spec.input_dim())
    throw std::invalid_argument("count_sketch: dimension mismatch");
  std::vector<double> out(spec.output_dim(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) out[spec.bucket_of(i)] += spec.sign_of(i) * x[i];
  return out;
}

namespace {

using Complex = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 / static_cast<double>(len);
    Complex wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex u = a[i + k];
        Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& z : a) z /= static_cast<double>(n);
}

std::vector<Complex> to_complex(const std::vector<double>& v, std::size_t n) {
  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
  return out;
}

}  // namespace

std::vector<double> circular_convolve_direct(const std::vector<double>& a,
                                             const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_convolve: size mismatch");
  const std::size_t m = a.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (a[j] == 0.0) continue;
    double aj = a[j];
    std::size_t k = j;
    for (std::size_t i = 0; i < m; ++i) {
      out[k] += aj * b[i];
      if (++k == m) k = 0;
    }
  }
  return out;
}

std::vector<double> circular_convolve_fft(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_convolve: size mismatch");
  const std::size_t m = a.size();
  if (is_pow2(m)) {
    auto fa = to_complex(a, m);
    auto fb = to_complex(b, m);
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = fa[i].real();
    return out;
  }
  // Arbitrary m: zero-pad to a power of two, take the linear convolution and
  // fold it back modulo m.
  const std::size_t p = next_pow2(2 * m - 1);
  auto fa = to_complex(a, p);
  auto fb = to_complex(b, p);
  fft_pow2(fa, false);
  fft_pow2(fb, false);
  for (std::size_t i = 0; i < p; ++i) fa[i] *= fb[i];
  fft_pow2(fa, true);
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < 2 * m - 1; ++i) out[i % m] += fa[i].real();
  return out;
}

std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b) {
  if (a.size() <= kDirectConvolutionLimit) return circular_convolve_direct(a, b);
  return circular_convolve_fft(a, b);
}

TensorSketch::TensorSketch(Mode mode, std::vector<CountSketchSpec> components,
                           std::size_t output_dim, std::uint64_t seed)
    : mode_(mode), components_(std::move(components)), output_dim_(output_dim), seed_(seed) {}

TensorSketch TensorSketch::poly(std::size_t input_dim, std::size_t degree,
                                std::size_t output_dim, std::uint64_t seed) {
  if (degree < 1) throw std::invalid_argument("TensorSketch: degree must be >= 1");
  if (output_dim == 0) throw std::invalid_argument("TensorSketch: output_dim must be >= 1");
  std::uint64_t base = SeedStream::derive(seed, stream_tag::kSketchComponent);
  std::vector<CountSketchSpec> comps;
  comps.reserve(degree);
  for (std::size_t q = 0; q < degree; ++q)
    comps.emplace_back(input_dim, output_dim, SeedStream::derive(base, q));
  return TensorSketch(Mode::kPoly, std::move(comps), output_dim, seed);
}

TensorSketch TensorSketch::pair(std::size_t dim_a, std::size_t dim_b, std::size_t output_dim,
                                std::uint64_t seed) {
  if (output_dim == 0) throw std::invalid_argument("TensorSketch: output_dim must be >= 1");
  std::uint64_t base = SeedStream::derive(seed, stream_tag::kSketchComponent);
  std::vector<CountSketchSpec> comps;
  comps.emplace_back(dim_a, output_dim, SeedStream::derive(base, 0));
  comps.emplace_back(dim_b, output_dim, SeedStream::derive(base, 1));
  return TensorSketch(Mode::kPair, std::move(comps), output_dim, seed);
}

namespace {

template <typename Vec>
std::vector<double> poly_apply(const TensorSketch& ts, const Vec& x) {
  std::vector<double> acc = count_sketch(ts.component(0), x);
  for (std::size_t q = 1; q < ts.degree(); ++q)
    acc = circular_convolve(acc, count_sketch(ts.component(q), x));
  return acc;
}

}  // namespace

std::vector<double> TensorSketch::operator()(const SparseVec& x) const {
  if (mode_ != Mode::kPoly) throw std::invalid_argument("TensorSketch: not a poly-mode sketch");
  return poly_apply(*this, x);
}

std::vector<double> TensorSketch::operator()(const std::vector<double>& x) const {
  if (mode_ != Mode::kPoly) throw std::invalid_argument("TensorSketch: not a poly-mode sketch");
  return poly_apply(*this, x);
}

std::vector<double> TensorSketch::operator()(const std::vector<double>& a,
                                             const std::vector<double>& b) const {
  if (mode_ != Mode::kPair) throw std::invalid_argument("TensorSketch: not a pair-mode sketch");
  return circular_convolve(count_sketch(components_[0], a), count_sketch(components_[1], b));
}

}  // namespace tanirf
