#ifndef MFLAB_NUMERIC_HPP
#define MFLAB_NUMERIC_HPP

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mflab {

// Exact arithmetic used everywhere a verdict depends on an equality test
// (lumpability, stationary vectors, cylinder masses). Doubles are reserved
// for spectral quantities, fits and Monte Carlo.
using Rational = mpq_class;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the candidate image adjacency admits a word no domain path
// realizes; carries the shortest such word (label form).
struct ImageNotSftError : Error {
  std::vector<std::string> witness;
  explicit ImageNotSftError(const std::string& what, std::vector<std::string> w)
      : Error(what), witness(std::move(w)) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

inline double to_double(const Rational& q) { return q.get_d(); }

// Accepts "3", "-3", "1/3", "0.25", "2.5e-3". Fractions and decimals are both
// stored exactly; the caller decides whether a decimal input downgrades the
// report to double provenance.
Rational parse_rational(const std::string& token);

// Canonical "n/d" (or "n" when integral) form used by reports and model files.
std::string format_rational(const Rational& q);

// Shortest round-trippable decimal form, "%.17g" fallback; reports must be
// reproducible byte for byte, so all double printing funnels through here.
std::string format_double(double x);

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T init = T())
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using BoolMatrix = Matrix<unsigned char>;

// Boolean matrix product (reachability semiring).
BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b);

bool all_positive(const BoolMatrix& m);

// Positive after deleting all-zero rows and columns; vacuously false for the
// zero matrix. This is the connectivity notion matching "any realized start
// joins any realized end".
bool positive_on_support(const BoolMatrix& m);

// Deterministic uniform double in [0,1) from raw 64-bit draws; avoids
// std::uniform_real_distribution, whose output is implementation-defined.
template <class Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Least-squares fit of log(values[i]) = log(C) + i*log(rate). Points with
// value <= 0 are skipped. r2 is the coefficient of determination.
struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
  std::size_t points_used = 0;
};
DecayFit fit_geometric_decay(const std::vector<double>& values);

}  // namespace mflab

#endif  // MFLAB_NUMERIC_HPP
