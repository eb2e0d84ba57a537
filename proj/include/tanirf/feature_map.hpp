#pragma once

#include <memory>
#include <string>

#include "tanirf/io.hpp"
#include "tanirf/polysketch.hpp"
#include "tanirf/sparse.hpp"

namespace tanirf {

// Uniform interface over the feature families so the CLI and the GP layer
// can treat a map as "something that turns a fingerprint into a column".
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual std::size_t output_dim() const = 0;
  virtual std::vector<double> map(const SparseVec& x) const = 0;
  virtual std::string spec_json() const = 0;  // round-trips through make_feature_map
};

// Builds a map from its JSON spec. Families:
//   {"family":"minmax", "M":.., "K":.., "xi":"rademacher"|"gaussian", "seed":..}
//   {"family":"prefactor", "r":.., "s":.., "c":.., "M":.., "seed":..}
//   {"family":"tensorsketch", "mode":"poly"|"pair", "degree":..,
//    "input_dims":[..], "output_dim":.., "seed":..}
//   {"family":"tdp", "R":.., "M":.., "p":.., "m_r":.., "m_poly":.., "zeta":..,
//    "bias":"plain"|"normalize"|"residual", "seed":.., "norm_scale":..}
// data_dim is the fingerprint dimension the map will be applied to (pair-mode
// tensorsketch specs describe vector pairs, not data points, and are
// rejected here). Throws ParseError on malformed specs.
std::unique_ptr<FeatureMap> make_feature_map(const std::string& spec_json,
                                             std::uint32_t data_dim);

// Maps every vector of the dataset; columns in dataset order. Parallel over
// points, output independent of the thread count.
TrffMatrix featurize(const FeatureMap& map, const Dataset& d);

// Standalone (de)serialization for tensorsketch specs, covering the pair
// mode that cannot act as a fingerprint map.
TensorSketch make_tensor_sketch(const std::string& spec_json);
std::string tensor_sketch_spec_json(const TensorSketch& sketch);

}  // namespace tanirf
