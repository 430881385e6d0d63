// Copyright 2026 The stabkit Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STABKIT_RATIONAL_HPP_
#define STABKIT_RATIONAL_HPP_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stabkit {

// Exact coordinate / cost type. All geometry and optimization in the core
// runs on canonical GMP rationals.
using Coord = mpq_class;

// Base error for contract violations reported by the library.
class StabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "p", "p/q", or a decimal "a.b" (optionally signed) exactly.
inline Coord parse_coord(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = s.find_first_not_of(" \t");
  if (start == std::string::npos) throw StabError("empty rational literal");
  s = s.substr(start);

  auto is_digits = [](std::string_view v) {
    if (v.empty()) return false;
    for (char c : v) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };
  auto strip_sign = [](std::string_view v, bool& negative) {
    negative = false;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) {
      negative = v[0] == '-';
      v.remove_prefix(1);
    }
    return v;
  };

  Coord out;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    bool neg = false;
    std::string_view num = strip_sign(std::string_view(s).substr(0, slash), neg);
    std::string_view den = std::string_view(s).substr(slash + 1);
    if (!is_digits(num) || !is_digits(den)) {
      throw StabError("malformed rational literal '" + s + "'");
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw StabError("zero denominator in '" + s + "'");
    out = Coord(neg ? mpz_class(-n) : n, d);
    out.canonicalize();
    return out;
  }
  bool neg = false;
  std::string_view body = strip_sign(s, neg);
  std::string_view int_part = body;
  std::string_view frac_part;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    int_part = body.substr(0, dot);
    frac_part = body.substr(dot + 1);
    if (int_part.empty()) int_part = "0";
    if (!is_digits(frac_part)) {
      throw StabError("malformed decimal literal '" + s + "'");
    }
  }
  if (!is_digits(int_part)) {
    throw StabError("malformed number literal '" + s + "'");
  }
  mpz_class num(std::string(int_part) + std::string(frac_part), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
  out = Coord(neg ? mpz_class(-num) : num, den);
  out.canonicalize();
  return out;
}

// "p" when integral, "p/q" otherwise.
inline std::string format_coord(const Coord& value) { return value.get_str(); }

// Fixed-point decimal rendering for human-facing summaries.
inline std::string format_decimal(const Coord& value, int places = 6) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
  Coord scaled = value * Coord(scale);
  // round half away from zero
  mpz_class twice = 2 * abs(scaled.get_num());
  mpz_class d = scaled.get_den();
  mpz_class whole = twice / (2 * d);
  mpz_class r2 = twice - whole * 2 * d;
  if (r2 >= d) whole += 1;
  bool negative = sgn(scaled) < 0 && whole != 0;
  std::string digits = whole.get_str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return negative ? "-" + digits : digits;
}

inline double to_double(const Coord& value) { return value.get_d(); }

inline Coord floor_to_grid(const Coord& value, const Coord& step) {
  Coord q = value / step;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Coord(f) * step;
}

inline Coord ceil_to_grid(const Coord& value, const Coord& step) {
  Coord q = value / step;
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Coord(c) * step;
}

inline bool is_multiple_of(const Coord& value, const Coord& step) {
  Coord q = value / step;
  return q.get_den() == 1;
}

inline mpz_class floor_int(const Coord& value) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return f;
}

inline mpz_class ceil_int(const Coord& value) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return c;
}

// H_n = 1 + 1/2 + ... + 1/n, exactly. H_0 = 0.
inline Coord harmonic(std::size_t n) {
  Coord h = 0;
  for (std::size_t i = 1; i <= n; ++i) h += Coord(1, static_cast<unsigned long>(i));
  return h;
}

inline Coord rational_pow(const Coord& base, unsigned exponent) {
  Coord out = 1;
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

inline std::size_t hash_coord(const Coord& value) {
  std::size_t h = std::hash<std::string>{}(value.get_str(16));
  return h;
}

inline void hash_combine(std::size_t& seed, std::size_t value) {
  seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace stabkit

#endif  // STABKIT_RATIONAL_HPP_
