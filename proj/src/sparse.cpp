#include "tanirf/sparse.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "tanirf/common.hpp"
#include "tanirf/rng.hpp"

namespace tanirf {

SparseVec::SparseVec(std::uint32_t dimension, std::vector<Entry> ents)
    : dim(dimension), entries(std::move(ents)) {
  if (dim == 0) throw std::invalid_argument("SparseVec: dim must be positive");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= dim) throw std::invalid_argument("SparseVec: index out of range");
    if (!(entries[i].value > 0.0)) throw std::invalid_argument("SparseVec: values must be > 0");
    if (i > 0 && entries[i].index <= entries[i - 1].index)
      throw std::invalid_argument("SparseVec: indices must be strictly ascending");
  }
}

SparseVec SparseVec::from_dense(const std::vector<double>& dense) {
  SparseVec v;
  v.dim = static_cast<std::uint32_t>(dense.size());
  if (v.dim == 0) throw std::invalid_argument("SparseVec: dim must be positive");
  for (std::uint32_t i = 0; i < v.dim; ++i) {
    if (dense[i] != 0.0) {
      if (dense[i] < 0.0) throw std::invalid_argument("SparseVec: values must be > 0");
      v.entries.push_back({i, dense[i]});
    }
  }
  return v;
}

std::vector<double> SparseVec::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& e : entries) out[e.index] = e.value;
  return out;
}

double SparseVec::l1_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value;
  return s;
}

double SparseVec::sq_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value * e.value;
  return s;
}

SparseVec sqrt_transform(const SparseVec& v) {
  SparseVec out = v;
  for (auto& e : out.entries) e.value = std::sqrt(e.value);
  return out;
}

void Dataset::validate() const {
  if (dim == 0) throw std::invalid_argument("Dataset: dim must be positive");
  if (ids.size() != vectors.size()) throw std::invalid_argument("Dataset: |ids| != |vectors|");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second) throw std::invalid_argument("Dataset: duplicate id '" + id + "'");
  for (const auto& v : vectors)
    if (v.dim != dim) throw std::invalid_argument("Dataset: vector dim mismatch");
}

Dataset sqrt_transform(const Dataset& d) {
  Dataset out = d;
  for (auto& v : out.vectors) v = sqrt_transform(v);
  return out;
}

Dataset synth_dataset(std::size_t n, std::uint32_t dim, double density, int max_count,
                      std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("synth_dataset: n must be >= 1");
  if (dim == 0) throw std::invalid_argument("synth_dataset: dim must be >= 1");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("synth_dataset: density must be in (0,1]");
  if (max_count < 1) throw std::invalid_argument("synth_dataset: max_count must be >= 1");

  Dataset d;
  d.dim = dim;
  d.ids.resize(n);
  d.vectors.resize(n);
  std::uint64_t base = SeedStream::derive(seed, stream_tag::kSynth);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SeedStream stream(base, static_cast<std::uint64_t>(i));
      SparseVec v;
      v.dim = dim;
      for (std::uint32_t j = 0; j < dim; ++j) {
        double occupied = stream.next_unit();
        double level = stream.next_unit();  // drawn unconditionally: keeps draws aligned
        if (occupied < density) {
          int count = 1 + static_cast<int>(level * max_count);
          if (count > max_count) count = max_count;
          v.entries.push_back({j, static_cast<double>(count)});
        }
      }
      d.ids[i] = "v" + std::to_string(i);
      d.vectors[i] = std::move(v);
    }
  });
  return d;
}

}  // namespace tanirf
