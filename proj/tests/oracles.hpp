#pragma once

// Independent reference implementations used only by tests.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/endpoints.hpp"

namespace oracle {

using carpetdim::CarpetIFS;
using carpetdim::FieldElement;
using carpetdim::Word;

// Bin masses by enumerating every word and intersecting its projected
// cylinder with every bin it can reach.
inline std::vector<FieldElement> brute_bins(const CarpetIFS& ifs, int depth, std::size_t bins) {
  const FieldElement width = ifs.beta().pow(static_cast<unsigned>(depth));
  FieldElement weight(1);
  for (int i = 0; i < depth; ++i) weight = weight * FieldElement(carpetdim::Rational(1, static_cast<long>(ifs.m())));
  const FieldElement r(carpetdim::Rational(1, static_cast<long>(bins)));
  std::vector<FieldElement> out(bins, FieldElement(0));
  carpetdim::for_each_word(ifs.m(), static_cast<std::size_t>(depth), [&](const Word& w) {
    FieldElement x(0), p(1);
    for (std::size_t j = 0; j < w.size(); ++j) {
      x = x + ifs.maps()[w[j]].tx * p;
      p = p * ifs.beta();
    }
    const FieldElement y = x + width;
    for (std::size_t j = 0; j < bins; ++j) {
      const FieldElement lo(carpetdim::Rational(static_cast<long>(j), static_cast<long>(bins)));
      const FieldElement hi = lo + r;
      const FieldElement a = x > lo ? x : lo;
      const FieldElement b = y < hi ? y : hi;
      if (b > a) out[j] = out[j] + weight * (b - a) / width;
    }
  });
  return out;
}

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

// Newton iteration for a real root of a monic integer polynomial.
inline Big newton_root(const std::vector<long>& minpoly, double start) {
  Big x = start;
  for (int it = 0; it < 60; ++it) {
    Big f = 0, df = 0;
    for (std::size_t i = minpoly.size(); i-- > 0;) {
      df = df * x + f;
      f = f * x + minpoly[i];
    }
    x -= f / df;
  }
  return x;
}

// Equivalence classes of the two-map family at length k from 200-bit endpoint
// values: sort and cut wherever consecutive endpoints differ by more than 2^-80.
// Returns classes as sorted lists of words (0-based letters).
inline std::vector<std::vector<Word>> float_classes_pu(const Big& beta, int k) {
  const Big t = 1 - beta;
  std::vector<std::pair<Big, Word>> pts;
  carpetdim::for_each_word(2, static_cast<std::size_t>(k), [&](const Word& w) {
    Big x = 0, p = 1;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] == 1) x += t * p;
      p *= beta;
    }
    pts.emplace_back(x, w);
  });
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const Big gap = boost::multiprecision::ldexp(Big(1), -80);
  std::vector<std::vector<Word>> classes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0 || pts[i].first - pts[i - 1].first > gap) classes.emplace_back();
    classes.back().push_back(pts[i].second);
  }
  for (auto& c : classes) std::sort(c.begin(), c.end());
  std::sort(classes.begin(), classes.end());
  return classes;
}

// Polynomials over F_p as coefficient vectors, lowest degree first.
using PolyP = std::vector<std::int64_t>;

inline void trim(PolyP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  std::int64_t r = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) r = r * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return r;
}

inline PolyP poly_mod(PolyP a, const PolyP& m, std::int64_t p) {
  trim(a);
  const std::int64_t lead_inv = inv_mod(m.back(), p);
  while (a.size() >= m.size()) {
    const std::int64_t c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = ((a[shift + i] - c * m[i]) % p + p) % p;
    trim(a);
  }
  return a;
}

inline PolyP poly_mulmod(const PolyP& a, const PolyP& b, const PolyP& m, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  PolyP c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return poly_mod(c, m, p);
}

inline PolyP poly_gcd(PolyP a, PolyP b, std::int64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    PolyP r = poly_mod(a, b, p);
    a = b;
    b = r;
  }
  return a;
}

inline PolyP poly_divexact(PolyP a, const PolyP& b, std::int64_t p) {
  trim(a);
  const std::int64_t lead_inv = inv_mod(b.back(), p);
  PolyP quot(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  while (a.size() >= b.size()) {
    const std::int64_t c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    quot[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
    trim(a);
  }
  return quot;
}

// Degrees of the irreducible factors of f mod p by distinct-degree
// factorization. Empty when f mod p loses degree or is not squarefree.
inline std::vector<std::size_t> factor_degrees_mod_p(const std::vector<long>& f_in, std::int64_t p) {
  PolyP f;
  for (long c : f_in) f.push_back(((c % p) + p) % p);
  trim(f);
  if (f.size() != f_in.size()) return {};
  PolyP df;
  for (std::size_t i = 1; i < f.size(); ++i) df.push_back(static_cast<std::int64_t>(i % p) * f[i] % p);
  trim(df);
  if (df.empty() || poly_gcd(f, df, p).size() > 1) return {};

  std::vector<std::size_t> degrees;
  PolyP xp{0, 1};
  for (std::size_t i = 1; 2 * i < f.size() + 1 && f.size() > 1; ++i) {
    PolyP base = poly_mod(xp, f, p), acc{1};
    std::int64_t e = p;
    while (e) {
      if (e & 1) acc = poly_mulmod(acc, base, f, p);
      base = poly_mulmod(base, base, f, p);
      e >>= 1;
    }
    xp = acc;
    PolyP diff = xp;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    trim(diff);
    const PolyP g = diff.empty() ? f : poly_gcd(f, diff, p);
    const std::size_t gd = g.size() - 1;
    for (std::size_t j = 0; j < gd / i; ++j) degrees.push_back(i);
    if (gd > 0) {
      f = poly_divexact(f, g, p);
      xp = poly_mod(xp, f, p);
    }
  }
  if (f.size() > 1) degrees.push_back(f.size() - 1);
  return degrees;
}

// Proves irreducibility over Q of a monic integer polynomial: a rational factor
// of degree e forces e to be a sum of factor degrees modulo every good prime,
// so an empty intersection of the subset-sum sets over several primes rules
// out every proper factor. False means "not proven".
inline bool irreducible_over_q(const std::vector<long>& f) {
  const std::size_t d = f.size() - 1;
  std::vector<bool> possible(d + 1, true);
  for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                         101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193}) {
    const auto degrees = factor_degrees_mod_p(f, p);
    if (degrees.empty()) continue;
    std::vector<bool> sums(d + 1, false);
    sums[0] = true;
    for (std::size_t g : degrees)
      for (std::size_t e = d; e >= g; --e)
        if (sums[e - g]) sums[e] = true;
    bool any = false;
    for (std::size_t e = 1; e < d; ++e) {
      possible[e] = possible[e] && sums[e];
      any = any || possible[e];
    }
    if (!any) return true;
  }
  return false;
}

}  // namespace oracle
