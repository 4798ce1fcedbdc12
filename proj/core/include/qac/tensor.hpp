#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qac {

#ifdef QAC_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

// Data or runtime failure; the CLI maps this to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix; a vector is a single-column tensor.
struct Tensor {
  int rows = 0;
  int cols = 1;
  std::vector<real> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * static_cast<size_t>(c), real(0)) {}

  static Tensor zeros(int r, int c = 1) { return Tensor(r, c); }

  static Tensor vec(std::initializer_list<real> xs) {
    Tensor t(static_cast<int>(xs.size()), 1);
    int i = 0;
    for (real x : xs) t.v[i++] = x;
    return t;
  }

  static Tensor from_rows(int r, int c, std::initializer_list<real> xs) {
    Tensor t(r, c);
    if (static_cast<int>(xs.size()) != r * c) throw Error("from_rows: size mismatch");
    int i = 0;
    for (real x : xs) t.v[i++] = x;
    return t;
  }

  int size() const { return rows * cols; }
  bool is_vector() const { return cols == 1; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  real& at(int r, int c = 0) { return v[static_cast<size_t>(r) * cols + c]; }
  real at(int r, int c = 0) const { return v[static_cast<size_t>(r) * cols + c]; }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool finite() const {
    for (real x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void fill(real x) { std::fill(v.begin(), v.end(), x); }

  real norm() const {
    real s = 0;
    for (real x : v) s += x * x;
    return std::sqrt(s);
  }
};

// Seeded generator with explicit distributions so that results are
// reproducible bit-for-bit regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    // xorshift* variant; period 2^64-1, plenty for desk-scale runs.
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw Error("uniform_int: n must be positive");
    return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
  }

  // Derive an independent stream, e.g. one per fold or per document.
  Rng split(uint64_t salt) {
    uint64_t s = state_ ^ (salt * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
    return Rng(s ? s : 1);
  }

 private:
  uint64_t state_;
};

inline void fill_uniform(Tensor& t, Rng& rng, double lo, double hi) {
  for (real& x : t.v) x = static_cast<real>(rng.uniform(lo, hi));
}

}  // namespace qac
