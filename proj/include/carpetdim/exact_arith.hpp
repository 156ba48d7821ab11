#pragma once

// Exact arithmetic in Q and in real algebraic number fields Q(theta).
//
// A NumberField is described by a monic integer minimal polynomial together
// with a rational interval isolating the intended real root theta. Elements
// are stored in the power basis 1, theta, ..., theta^(d-1) with rational
// coordinates, always reduced modulo the minimal polynomial, so that two
// elements are equal iff their coordinate vectors are equal.

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace carpetdim::arith {

using Integer = mpz_class;
using Rational = mpq_class;

struct RationalInterval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool excludes_zero() const { return sgn(lo) > 0 || sgn(hi) < 0; }
};

// Dense polynomial with rational coefficients, lowest degree first.
// Only what root isolation and field inversion need.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& leading() const { return coeffs_.back(); }

  Rational eval(const Rational& x) const;
  int sign_at(const Rational& x) const { return sgn(eval(x)); }
  Polynomial derivative() const;

  friend Polynomial operator-(const Polynomial& p);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  // Quotient and remainder; b must be nonzero.
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Sturm chain of a squarefree polynomial; counts distinct real roots in (a, b].
class SturmChain {
 public:
  explicit SturmChain(const Polynomial& p);
  int sign_changes(const Rational& x) const;
  int roots_in(const Rational& a, const Rational& b) const { return sign_changes(a) - sign_changes(b); }

 private:
  std::vector<Polynomial> chain_;
};

// All real roots of a squarefree polynomial, each isolated in a closed
// interval with rational endpoints that are not roots. Sorted ascending.
std::vector<RationalInterval> isolate_real_roots(const Polynomial& p);

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

class NumberField {
 public:
  // The field Q (degree 1, generator 0). Shared singleton.
  static FieldPtr rationals();

  // minpoly holds c0..cd with cd == 1 (monic, integer). The isolating
  // interval must contain exactly one real root; checked with a Sturm chain.
  // Degree-1 polynomials yield rationals(). Irreducibility is not verified.
  static FieldPtr create(std::vector<Integer> minpoly, RationalInterval isolation);
  // Picks the real root of minpoly closest to approx_root.
  static FieldPtr from_root_near(std::vector<Integer> minpoly, double approx_root);

  int degree() const { return static_cast<int>(minpoly_.size()) - 1; }
  bool is_rational() const { return degree() == 1; }
  const std::vector<Integer>& minpoly() const { return minpoly_; }
  // Isolating interval after construction-time refinement (width <= 2^-kCachedBits).
  const RationalInterval& isolation() const { return isolation_; }
  // Fresh isolating interval of width <= 2^-bits; does not mutate the field.
  RationalInterval refined(unsigned bits) const;
  double generator_approx() const { return theta_double_; }
  // Absolute bound on |theta - generator_approx()|.
  double generator_error() const { return theta_error_; }

  // Same minimal polynomial and same real root.
  bool same_as(const NumberField& other) const;
  std::string describe() const;

  static constexpr unsigned kCachedBits = 160;

 private:
  NumberField(std::vector<Integer> minpoly, RationalInterval isolation);

  std::vector<Integer> minpoly_;
  RationalInterval isolation_;
  double theta_double_ = 0.0;
  double theta_error_ = 0.0;
};

class FieldElement {
 public:
  // Zero of Q.
  FieldElement();
  // Coordinates may be longer than the degree; they are reduced.
  FieldElement(FieldPtr field, std::vector<Rational> coeffs);
  FieldElement(const Rational& q);  // NOLINT(google-explicit-constructor): rationals embed in every field
  explicit FieldElement(long n) : FieldElement(Rational(n)) {}

  static FieldElement generator(FieldPtr field);
  static FieldElement rational(const Rational& q, FieldPtr field);

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const;
  // True when only the constant coordinate is nonzero.
  bool is_rational() const;
  Rational rational_value() const;  // requires is_rational()

  // Exact sign of the real value.
  int sign() const;
  Integer floor() const;
  Integer ceil() const;

  FieldElement inverse() const;
  FieldElement pow(unsigned exponent) const;
  FieldElement promote_to(const FieldPtr& field) const;

  // Rational interval of width <= 2^-bits containing the value.
  RationalInterval embed_exact(unsigned bits) const;
  // Double interval (outward rounded) containing the value; its width is
  // at most 2^-bits when bits <= 50, otherwise limited by double spacing.
  std::pair<double, double> embed(unsigned bits) const;
  double to_double() const;
  // Horner evaluation in doubles; err receives a rigorous bound on the error.
  double double_eval(double& err) const;

  std::size_t hash() const;
  std::string to_string() const;

  FieldElement& operator+=(const FieldElement& rhs);
  FieldElement& operator-=(const FieldElement& rhs);
  FieldElement& operator*=(const FieldElement& rhs);
  FieldElement& operator/=(const FieldElement& rhs);
  // Scaling by a rational avoids the generic product.
  FieldElement& operator*=(const Rational& rhs);

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }
  friend FieldElement operator*(FieldElement a, const Rational& b) { return a *= b; }
  friend FieldElement operator-(FieldElement a);

  friend bool operator==(const FieldElement& a, const FieldElement& b);
  friend FieldElement reduce(const FieldPtr& field, std::vector<Rational> poly);
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }
  friend bool operator<(const FieldElement& a, const FieldElement& b) { return (a - b).sign() < 0; }
  friend bool operator<=(const FieldElement& a, const FieldElement& b) { return (a - b).sign() <= 0; }
  friend bool operator>(const FieldElement& a, const FieldElement& b) { return (a - b).sign() > 0; }
  friend bool operator>=(const FieldElement& a, const FieldElement& b) { return (a - b).sign() >= 0; }

 private:
  // Brings both operands into one field, promoting rationals; throws FieldMismatch.
  void unify(FieldElement& other);
  RationalInterval eval_on(const RationalInterval& theta) const;
  // Sign from a double evaluation with a rigorous error bound; 2 when undecided.
  int fast_sign() const;

  FieldPtr field_;
  std::vector<Rational> coeffs_;
};

// Canonical form of a polynomial in theta: repeated substitution of
// theta^d = -(c_{d-1} theta^{d-1} + ... + c_0).
FieldElement reduce(const FieldPtr& field, std::vector<Rational> poly);

struct FieldElementHash {
  std::size_t operator()(const FieldElement& x) const { return x.hash(); }
};

std::size_t hash_rational(const Rational& q);

// Exact rational equal to a finite double.
Rational rational_from_double(double x);

}  // namespace carpetdim::arith
