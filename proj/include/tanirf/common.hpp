#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace tanirf {

// Malformed input files (fingerprint text, TRFF blobs, spec JSON). The
// message carries the line number when one is known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: factorization breakdown after jitter escalation,
// log-space overflow in feature evaluation, out-of-range hash levels.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Process-wide cap on worker threads used by parallel_for. Defaults to the
// hardware concurrency; the CLI maps --threads onto it.
int thread_limit();
void set_thread_limit(int n);

// Runs body(begin, end) over a static partition of [0, n). Bodies must write
// disjoint output slots indexed by position only, so results never depend on
// the partition or the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tanirf
