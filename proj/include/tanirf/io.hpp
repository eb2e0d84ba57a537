#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanirf/sparse.hpp"

namespace tanirf {

// Fingerprint text format:
//   #dim=<d>
//   <id><TAB><idx>:<value>[ <idx>:<value>]...
// Lines beginning '#' after the first are comments, blank lines are skipped.
// Indices are ascending, values positive decimals. Parse failures raise
// ParseError with the line number.
Dataset load_fingerprints(const std::string& path);
void save_fingerprints(const Dataset& d, const std::string& path);

// TRFF binary matrix: magic "TRFF", u32 version (low bits = 1, bit 31 set for
// gram payloads), u64 n (columns, one per data point), u64 M (rows), then n*M
// little-endian doubles in column-major order.
struct TrffMatrix {
  std::uint64_t rows = 0;  // M
  std::uint64_t cols = 0;  // n
  bool is_gram = false;
  std::vector<double> data;  // column-major, rows*cols

  double at(std::uint64_t r, std::uint64_t c) const { return data[c * rows + r]; }
  double& at(std::uint64_t r, std::uint64_t c) { return data[c * rows + r]; }
};

void write_trff(const std::string& path, const TrffMatrix& m);
TrffMatrix read_trff(const std::string& path);

// Label file: one "<id><TAB><value>" per line, '#' comments allowed.
// read_labels returns values aligned with the dataset's id order and fails if
// any id is missing.
void write_labels(const std::string& path, const std::vector<std::string>& ids,
                  const std::vector<double>& values);
std::vector<double> read_labels(const std::string& path, const std::vector<std::string>& ids);

}  // namespace tanirf
