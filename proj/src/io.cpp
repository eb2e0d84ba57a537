#include "tanirf/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tanirf/common.hpp"

namespace tanirf {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset load_fingerprints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "empty file, expected '#dim=<d>'");
  ++lineno;
  if (line.rfind("#dim=", 0) != 0) parse_fail(path, lineno, "first line must be '#dim=<d>'");
  char* endp = nullptr;
  unsigned long long dim_val = std::strtoull(line.c_str() + 5, &endp, 10);
  if (endp == line.c_str() + 5 || *endp != '\0' || dim_val == 0 || dim_val > 0xFFFFFFFFull)
    parse_fail(path, lineno, "invalid dimension '" + line.substr(5) + "'");

  Dataset d;
  d.dim = static_cast<std::uint32_t>(dim_val);
  std::unordered_set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      parse_fail(path, lineno, "malformed line, expected '<id><TAB><idx>:<value>...'");
    std::string id = line.substr(0, tab);
    if (!seen_ids.insert(id).second) parse_fail(path, lineno, "duplicate id '" + id + "'");

    SparseVec v;
    v.dim = d.dim;
    const char* p = line.c_str() + tab + 1;
    bool first = true;
    std::uint32_t prev_index = 0;
    while (*p != '\0') {
      while (*p == ' ') ++p;
      if (*p == '\0') break;
      char* next = nullptr;
      errno = 0;
      unsigned long long idx = std::strtoull(p, &next, 10);
      if (next == p || *next != ':') parse_fail(path, lineno, "malformed entry near '" + std::string(p).substr(0, 16) + "'");
      if (idx >= d.dim) parse_fail(path, lineno, "index " + std::to_string(idx) + " >= dim " + std::to_string(d.dim));
      p = next + 1;
      double value = std::strtod(p, &next);
      if (next == p || (*next != ' ' && *next != '\0'))
        parse_fail(path, lineno, "malformed value near '" + std::string(p).substr(0, 16) + "'");
      if (!(value > 0.0)) parse_fail(path, lineno, "non-positive value at index " + std::to_string(idx));
      std::uint32_t index32 = static_cast<std::uint32_t>(idx);
      if (!first && index32 <= prev_index) parse_fail(path, lineno, "non-ascending indices");
      v.entries.push_back({index32, value});
      prev_index = index32;
      first = false;
      p = next;
    }
    d.ids.push_back(std::move(id));
    d.vectors.push_back(std::move(v));
  }
  return d;
}

void save_fingerprints(const Dataset& d, const std::string& path) {
  d.validate();
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "#dim=" << d.dim << "\n";
  char buf[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.ids[i] << '\t';
    const auto& entries = d.vectors[i].entries;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      // %.17g round-trips doubles exactly through strtod
      std::snprintf(buf, sizeof(buf), "%.17g", entries[k].value);
      out << (k ? " " : "") << entries[k].index << ':' << buf;
    }
    out << '\n';
  }
  if (!out) throw ParseError("write failed for '" + path + "'");
}

namespace {

constexpr std::uint32_t kTrffVersion = 1;
constexpr std::uint32_t kTrffGramFlag = 0x80000000u;

void put_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);  // little-endian host
  out.write(b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.write(b, 8);
}

std::uint32_t get_u32(std::ifstream& in) {
  char b[4];
  in.read(b, 4);
  std::uint32_t v;
  std::memcpy(&v, b, 4);
  return v;
}

std::uint64_t get_u64(std::ifstream& in) {
  char b[8];
  in.read(b, 8);
  std::uint64_t v;
  std::memcpy(&v, b, 8);
  return v;
}

}  // namespace

void write_trff(const std::string& path, const TrffMatrix& m) {
  if (m.data.size() != m.rows * m.cols) throw std::invalid_argument("TrffMatrix: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out.write("TRFF", 4);
  put_u32(out, kTrffVersion | (m.is_gram ? kTrffGramFlag : 0));
  put_u64(out, m.cols);  // n
  put_u64(out, m.rows);  // M
  out.write(reinterpret_cast<const char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!out) throw ParseError("write failed for '" + path + "'");
}

TrffMatrix read_trff(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TRFF", 4) != 0)
    throw ParseError("'" + path + "': bad magic, not a TRFF file");
  std::uint32_t version = get_u32(in);
  TrffMatrix m;
  m.is_gram = (version & kTrffGramFlag) != 0;
  if ((version & ~kTrffGramFlag) != kTrffVersion)
    throw ParseError("'" + path + "': unsupported TRFF version");
  m.cols = get_u64(in);
  m.rows = get_u64(in);
  if (m.is_gram && m.rows != m.cols) throw ParseError("'" + path + "': gram payload must be square");
  m.data.resize(m.rows * m.cols);
  in.read(reinterpret_cast<char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!in) throw ParseError("'" + path + "': truncated TRFF payload");
  return m;
}

void write_labels(const std::string& path, const std::vector<std::string>& ids,
                  const std::vector<double>& values) {
  if (ids.size() != values.size()) throw std::invalid_argument("write_labels: size mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  char buf[32];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << ids[i] << '\t' << buf << '\n';
  }
  if (!out) throw ParseError("write failed for '" + path + "'");
}

std::vector<double> read_labels(const std::string& path, const std::vector<std::string>& ids) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::unordered_map<std::string, double> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      parse_fail(path, lineno, "malformed label line, expected '<id><TAB><value>'");
    char* endp = nullptr;
    double v = std::strtod(line.c_str() + tab + 1, &endp);
    if (endp == line.c_str() + tab + 1 || *endp != '\0')
      parse_fail(path, lineno, "malformed label value");
    if (!table.emplace(line.substr(0, tab), v).second)
      parse_fail(path, lineno, "duplicate label id");
  }
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = table.find(id);
    if (it == table.end()) throw ParseError("'" + path + "': missing label for id '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace tanirf
