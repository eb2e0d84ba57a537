#include "tanirf/feature_map.hpp"

#include <json.hpp>
#include <stdexcept>

#include "tanirf/common.hpp"
#include "tanirf/minmax_features.hpp"
#include "tanirf/polysketch.hpp"
#include "tanirf/prefactor.hpp"
#include "tanirf/tdp_features.hpp"

namespace tanirf {

namespace {

using nlohmann::json;

json parse_spec(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("feature spec: invalid JSON object");
  return j;
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("feature spec: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("feature spec: bad value for '") + key + "'");
  }
}

class MinMaxAdapter final : public FeatureMap {
 public:
  MinMaxAdapter(MinMaxFeatureMap map) : map_(std::move(map)) {}
  std::size_t output_dim() const override { return map_.num_features(); }
  std::vector<double> map(const SparseVec& x) const override { return map_(x); }
  std::string spec_json() const override {
    json j{{"family", "minmax"},
           {"M", map_.num_features()},
           {"K", map_.bucket_count()},
           {"xi", xi_dist_name(map_.xi_dist())},
           {"seed", map_.seed()}};
    return j.dump();
  }

 private:
  MinMaxFeatureMap map_;
};

class PrefactorAdapter final : public FeatureMap {
 public:
  PrefactorAdapter(PrefactorMap map, double norm_scale)
      : map_(std::move(map)), norm_scale_(norm_scale) {}
  std::size_t output_dim() const override { return map_.spec().num_features; }
  std::vector<double> map(const SparseVec& x) const override {
    return map_(x.sq_norm() / norm_scale_);
  }
  std::string spec_json() const override {
    const auto& s = map_.spec();
    json j{{"family", "prefactor"}, {"r", s.r},          {"s", s.s},
           {"c", s.c},              {"M", s.num_features}, {"seed", s.seed}};
    if (norm_scale_ != 1.0) j["norm_scale"] = norm_scale_;
    return j.dump();
  }

 private:
  PrefactorMap map_;
  double norm_scale_;
};

class PolyAdapter final : public FeatureMap {
 public:
  PolyAdapter(TensorSketch sketch) : sketch_(std::move(sketch)) {}
  std::size_t output_dim() const override { return sketch_.output_dim(); }
  std::vector<double> map(const SparseVec& x) const override { return sketch_(x); }
  std::string spec_json() const override {
    json j{{"family", "tensorsketch"},
           {"mode", "poly"},
           {"degree", sketch_.degree()},
           {"input_dims", json::array({sketch_.component(0).input_dim()})},
           {"output_dim", sketch_.output_dim()},
           {"seed", sketch_.seed()}};
    return j.dump();
  }

 private:
  TensorSketch sketch_;
};

class TdpAdapter final : public FeatureMap {
 public:
  TdpAdapter(std::uint32_t dim, const TdpFeatureSpec& spec) : map_(dim, spec) {}
  std::size_t output_dim() const override { return map_.output_dim(); }
  std::vector<double> map(const SparseVec& x) const override { return map_(x); }
  std::string spec_json() const override {
    const auto& s = map_.spec();
    json j{{"family", "tdp"},   {"R", s.terms},        {"M", s.num_features},
           {"p", s.alloc_exponent}, {"m_r", s.prefactor_dim}, {"m_poly", s.poly_dim},
           {"zeta", s.zeta},    {"bias", bias_mode_name(s.bias)}, {"seed", s.seed},
           {"norm_scale", s.norm_scale}};
    return j.dump();
  }

 private:
  TdpFeatureMap map_;
};

}  // namespace

std::unique_ptr<FeatureMap> make_feature_map(const std::string& spec_text,
                                             std::uint32_t data_dim) {
  json j = parse_spec(spec_text);
  std::string family = require<std::string>(j, "family");
  try {
    if (family == "minmax") {
      std::uint32_t k = j.contains("K") ? require<std::uint32_t>(j, "K")
                                        : MinMaxFeatureMap::kDefaultBucketCount;
      return std::make_unique<MinMaxAdapter>(
          MinMaxFeatureMap(data_dim, require<std::size_t>(j, "M"), k,
                           xi_dist_from_name(require<std::string>(j, "xi")),
                           require<std::uint64_t>(j, "seed")));
    }
    if (family == "prefactor") {
      PrefactorSpec spec;
      spec.r = require<int>(j, "r");
      spec.s = require<double>(j, "s");
      spec.c = require<double>(j, "c");
      spec.num_features = require<std::size_t>(j, "M");
      spec.seed = require<std::uint64_t>(j, "seed");
      double norm_scale = j.value("norm_scale", 1.0);
      return std::make_unique<PrefactorAdapter>(PrefactorMap(spec), norm_scale);
    }
    if (family == "tensorsketch") {
      std::string mode = require<std::string>(j, "mode");
      if (mode == "pair")
        throw ParseError("feature spec: pair-mode tensorsketch maps vector pairs, not fingerprints");
      if (mode != "poly") throw ParseError("feature spec: unknown tensorsketch mode '" + mode + "'");
      auto dims = require<std::vector<std::size_t>>(j, "input_dims");
      if (dims.size() != 1 || dims[0] != data_dim)
        throw ParseError("feature spec: input_dims must be [data dimension]");
      return std::make_unique<PolyAdapter>(
          TensorSketch::poly(data_dim, require<std::size_t>(j, "degree"),
                             require<std::size_t>(j, "output_dim"),
                             require<std::uint64_t>(j, "seed")));
    }
    if (family == "tdp") {
      TdpFeatureSpec spec;
      spec.terms = require<int>(j, "R");
      spec.num_features = require<std::size_t>(j, "M");
      spec.alloc_exponent = j.value("p", -1.0);
      spec.prefactor_dim = j.value("m_r", std::size_t{4096});
      spec.poly_dim = j.value("m_poly", std::size_t{4096});
      spec.zeta = require<double>(j, "zeta");
      spec.bias = bias_mode_from_name(j.value("bias", std::string("plain")));
      spec.seed = require<std::uint64_t>(j, "seed");
      spec.norm_scale = j.value("norm_scale", 1.0);
      return std::make_unique<TdpAdapter>(data_dim, spec);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("feature spec: ") + e.what());
  }
  throw ParseError("feature spec: unknown family '" + family + "'");
}

TensorSketch make_tensor_sketch(const std::string& spec_text) {
  json j = parse_spec(spec_text);
  if (require<std::string>(j, "family") != "tensorsketch")
    throw ParseError("tensor sketch spec: wrong family");
  std::string mode = require<std::string>(j, "mode");
  auto dims = require<std::vector<std::size_t>>(j, "input_dims");
  auto output_dim = require<std::size_t>(j, "output_dim");
  auto seed = require<std::uint64_t>(j, "seed");
  try {
    if (mode == "poly") {
      if (dims.size() != 1) throw ParseError("tensor sketch spec: poly mode takes one input dim");
      return TensorSketch::poly(dims[0], require<std::size_t>(j, "degree"), output_dim, seed);
    }
    if (mode == "pair") {
      if (dims.size() != 2) throw ParseError("tensor sketch spec: pair mode takes two input dims");
      return TensorSketch::pair(dims[0], dims[1], output_dim, seed);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("tensor sketch spec: ") + e.what());
  }
  throw ParseError("tensor sketch spec: unknown mode '" + mode + "'");
}

std::string tensor_sketch_spec_json(const TensorSketch& sketch) {
  json dims = json::array();
  if (sketch.mode() == TensorSketch::Mode::kPoly) {
    dims.push_back(sketch.component(0).input_dim());
  } else {
    dims.push_back(sketch.component(0).input_dim());
    dims.push_back(sketch.component(1).input_dim());
  }
  json j{{"family", "tensorsketch"},
         {"mode", sketch.mode() == TensorSketch::Mode::kPoly ? "poly" : "pair"},
         {"degree", sketch.degree()},
         {"input_dims", dims},
         {"output_dim", sketch.output_dim()},
         {"seed", sketch.seed()}};
  return j.dump();
}

TrffMatrix featurize(const FeatureMap& map, const Dataset& d) {
  TrffMatrix out;
  out.rows = map.output_dim();
  out.cols = d.size();
  out.data.assign(out.rows * out.cols, 0.0);
  parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<double> column = map.map(d.vectors[i]);
      std::copy(column.begin(), column.end(), out.data.begin() + i * out.rows);
    }
  });
  return out;
}

}  // namespace tanirf
