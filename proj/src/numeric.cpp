#include "mflab/numeric.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mflab {

namespace {

bool is_plain_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& token) {
  if (token.empty()) throw ParseError("empty numeric token");

  auto slash = token.find('/');
  if (slash != std::string::npos) {
    std::string num = token.substr(0, slash);
    std::string den = token.substr(slash + 1);
    if (!is_plain_integer(num) || !is_plain_integer(den))
      throw ParseError("malformed fraction '" + token + "'");
    mpz_class num_z(num, 10), den_z(den, 10);  // base fixed: "010" is ten, not octal
    if (den_z == 0) throw ParseError("zero denominator in '" + token + "'");
    Rational q{num_z, den_z};
    q.canonicalize();
    return q;
  }

  if (is_plain_integer(token)) return Rational(mpz_class(token, 10));

  // Decimal (possibly scientific) form, converted exactly digit by digit.
  std::string s = token;
  bool neg = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    neg = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  long exponent = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      exponent = std::strtol(s.c_str() + pos + 1, nullptr, 10);
      break;
    } else {
      throw ParseError("malformed number '" + token + "'");
    }
  }
  if (!seen_digit) throw ParseError("malformed number '" + token + "'");

  mpz_class num(digits.empty() ? std::string("0") : digits, 10);
  if (neg) num = -num;
  long shift = exponent - frac_digits;
  Rational q(num);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0)
    q *= Rational(pow10);
  else
    q /= Rational(pow10);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  if (a.cols() != b.rows()) throw Error("bool_product: dimension mismatch");
  BoolMatrix out(a.rows(), b.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (!a(i, k)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(k, j)) out(i, j) = 1;
    }
  return out;
}

bool all_positive(const BoolMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j)) return false;
  return true;
}

bool positive_on_support(const BoolMatrix& m) {
  std::vector<bool> row_live(m.rows(), false), col_live(m.cols(), false);
  bool any = false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j)) {
        row_live[i] = col_live[j] = true;
        any = true;
      }
  if (!any) return false;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!row_live[i]) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (col_live[j] && !m(i, j)) return false;
  }
  return true;
}

DecayFit fit_geometric_decay(const std::vector<double>& values) {
  DecayFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log(values[i]));
    }
  }
  fit.points_used = xs.size();
  if (xs.size() < 2) return fit;
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) return fit;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = intercept + slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.rate = std::exp(slope);
  fit.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace mflab
