#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cqzl {

using cxd = std::complex<double>;

// Error categories; the CLI maps them onto its exit-code contract.
enum class errc {
  invalid_input,  // bad arguments, malformed files, dimension mismatches
  numerical,      // a certificate or conditioning check failed
  construction,   // a randomized construction did not succeed
};

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  errc kind() const { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw error(errc::invalid_input, msg); }
[[noreturn]] inline void fail_numerical(const std::string& msg) { throw error(errc::numerical, msg); }
[[noreturn]] inline void fail_construction(const std::string& msg) { throw error(errc::construction, msg); }

inline void require(bool cond, errc kind, const std::string& msg) {
  if (!cond) throw error(kind, msg);
}

// Round to `digits` significant decimal digits. Reports serialize through
// this so that identical runs emit byte-identical output.
inline double round_sig(double x, int digits = 12) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

// Thread cap from CQZL_THREADS (0 or unset = hardware concurrency).
inline unsigned thread_budget() {
  if (const char* s = std::getenv("CQZL_THREADS")) {
    long v = std::strtol(s, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Index-parallel loop. Work items must not depend on scheduling; callers
// reduce over results in index order so output stays deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t workers = std::min<std::size_t>(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cqzl
