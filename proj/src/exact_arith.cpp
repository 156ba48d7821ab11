#include "carpetdim/exact_arith.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string_view>

#include "carpetdim/errors.hpp"

namespace carpetdim::arith {

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

Rational Polynomial::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> out(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out[i - 1] = coeffs_[i] * static_cast<long>(i);
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& p) {
  std::vector<Rational> out(p.coeffs_);
  for (auto& c : out) c = -c;
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] -= b.coeffs_[i];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
  std::vector<Rational> rem = a.coeffs_;
  const int db = b.degree();
  if (a.degree() < db) return {Polynomial{}, a};
  std::vector<Rational> quot(a.degree() - db + 1);
  for (int k = a.degree(); k >= db; --k) {
    if (sgn(rem[k]) == 0) continue;
    Rational f = rem[k] / b.leading();
    quot[k - db] = f;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.coeffs_[j];
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

// ---------------------------------------------------------------- Sturm

SturmChain::SturmChain(const Polynomial& p) {
  chain_.push_back(p);
  chain_.push_back(p.derivative());
  while (!chain_.back().is_zero() && chain_.back().degree() > 0) {
    auto [q, r] = Polynomial::divmod(chain_[chain_.size() - 2], chain_.back());
    if (r.is_zero()) break;
    chain_.push_back(-r);
  }
  if (chain_.back().is_zero()) chain_.pop_back();
}

int SturmChain::sign_changes(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& p : chain_) {
    int s = p.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

namespace {

Rational cauchy_bound(const Polynomial& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) {
    Rational a = abs(p.coeffs()[i] / p.leading());
    if (a > m) m = a;
  }
  return m + 1;
}

void isolate_into(const Polynomial& p, const SturmChain& sturm, Rational lo, Rational hi, int count,
                  std::vector<RationalInterval>& out, int depth) {
  if (count == 0) return;
  if (count == 1) {
    out.push_back({lo, hi});
    return;
  }
  if (depth > 4000) fail(ErrorKind::PrecisionUnreachable, "root isolation did not separate roots");
  Rational mid = (lo + hi) / 2;
  // Nudge the split point off a root so that endpoints are never roots.
  Rational nudge = (hi - lo) / 7;
  while (p.sign_at(mid) == 0) {
    mid += nudge;
    nudge /= 3;
  }
  int left = sturm.roots_in(lo, mid);
  isolate_into(p, sturm, lo, mid, left, out, depth + 1);
  isolate_into(p, sturm, mid, hi, count - left, out, depth + 1);
}

Polynomial to_polynomial(const std::vector<Integer>& coeffs) {
  std::vector<Rational> c;
  c.reserve(coeffs.size());
  for (const auto& z : coeffs) c.emplace_back(z);
  return Polynomial(std::move(c));
}

// Bisection on a simple root whose interval endpoints have opposite signs.
RationalInterval bisect(const Polynomial& p, RationalInterval iv, unsigned bits) {
  Rational target = 1;
  mpq_div_2exp(target.get_mpq_t(), target.get_mpq_t(), bits);
  int slo = p.sign_at(iv.lo);
  while (iv.width() > target) {
    Rational mid = (iv.lo + iv.hi) / 2;
    int sm = p.sign_at(mid);
    if (sm == 0) return {mid, mid};
    if (sm == slo) {
      iv.lo = mid;
    } else {
      iv.hi = mid;
    }
  }
  return iv;
}

}  // namespace

std::vector<RationalInterval> isolate_real_roots(const Polynomial& p) {
  if (p.degree() < 1) return {};
  SturmChain sturm(p);
  Rational bound = cauchy_bound(p);
  Rational lo = -bound;
  Rational hi = bound;
  std::vector<RationalInterval> out;
  isolate_into(p, sturm, lo, hi, sturm.roots_in(lo, hi), out, 0);
  return out;
}

// ---------------------------------------------------------------- NumberField

FieldPtr NumberField::rationals() {
  static const FieldPtr q(new NumberField({Integer(0), Integer(1)}, {Rational(0), Rational(0)}));
  return q;
}

NumberField::NumberField(std::vector<Integer> minpoly, RationalInterval isolation)
    : minpoly_(std::move(minpoly)), isolation_(std::move(isolation)) {
  Rational mid = (isolation_.lo + isolation_.hi) / 2;
  theta_double_ = mid.get_d();
  Rational d1 = abs(Rational(theta_double_) - isolation_.lo);
  Rational d2 = abs(Rational(theta_double_) - isolation_.hi);
  theta_error_ = std::nextafter(std::max(d1, d2).get_d(), std::numeric_limits<double>::infinity());
}

FieldPtr NumberField::create(std::vector<Integer> minpoly, RationalInterval isolation) {
  if (minpoly.size() < 2) fail(ErrorKind::PreconditionViolation, "minimal polynomial must have degree >= 1");
  if (minpoly.back() != 1) fail(ErrorKind::PreconditionViolation, "minimal polynomial must be monic");
  if (minpoly.size() == 2) return rationals();
  if (isolation.lo > isolation.hi) std::swap(isolation.lo, isolation.hi);
  Polynomial p = to_polynomial(minpoly);
  if (p.sign_at(isolation.lo) == 0 || p.sign_at(isolation.hi) == 0)
    fail(ErrorKind::PreconditionViolation, "isolating interval endpoint is a root (reducible minimal polynomial?)");
  SturmChain sturm(p);
  if (sturm.roots_in(isolation.lo, isolation.hi) != 1)
    fail(ErrorKind::PreconditionViolation, "isolating interval does not contain exactly one real root");
  if (p.sign_at(isolation.lo) == p.sign_at(isolation.hi))
    fail(ErrorKind::PreconditionViolation, "minimal polynomial is not squarefree at the chosen root");
  RationalInterval refined = bisect(p, isolation, kCachedBits);
  if (refined.lo == refined.hi)
    fail(ErrorKind::PreconditionViolation, "generator is rational; minimal polynomial is reducible");
  return FieldPtr(new NumberField(std::move(minpoly), std::move(refined)));
}

FieldPtr NumberField::from_root_near(std::vector<Integer> minpoly, double approx_root) {
  if (minpoly.size() < 2 || minpoly.back() != 1)
    fail(ErrorKind::PreconditionViolation, "minimal polynomial must be monic of degree >= 1");
  if (minpoly.size() == 2) return rationals();
  auto roots = isolate_real_roots(to_polynomial(minpoly));
  if (roots.empty()) fail(ErrorKind::PreconditionViolation, "minimal polynomial has no real root");
  Polynomial p = to_polynomial(minpoly);
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    RationalInterval iv = bisect(p, roots[i], 60);
    double d = std::abs(Rational((iv.lo + iv.hi) / 2).get_d() - approx_root);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return create(std::move(minpoly), roots[best]);
}

RationalInterval NumberField::refined(unsigned bits) const {
  if (is_rational()) return isolation_;
  if (bits <= kCachedBits) return isolation_;
  return bisect(to_polynomial(minpoly_), isolation_, bits);
}

bool NumberField::same_as(const NumberField& other) const {
  if (this == &other) return true;
  if (minpoly_ != other.minpoly_) return false;
  if (is_rational()) return true;
  // Each interval isolates exactly one root of the same polynomial.
  return !(isolation_.hi < other.isolation_.lo || other.isolation_.hi < isolation_.lo);
}

std::string NumberField::describe() const {
  std::ostringstream os;
  os << "Q(t), t^" << degree();
  for (int i = degree() - 1; i >= 0; --i) {
    if (sgn(minpoly_[i]) == 0) continue;
    os << (sgn(minpoly_[i]) > 0 ? " + " : " - ") << abs(minpoly_[i]);
    if (i > 0) os << "*t" << (i > 1 ? "^" + std::to_string(i) : "");
  }
  os << " = 0, t ~ " << theta_double_;
  return os.str();
}

// ---------------------------------------------------------------- FieldElement

FieldElement reduce(const FieldPtr& field, std::vector<Rational> poly) {
  const int d = field->degree();
  const auto& mp = field->minpoly();
  for (int k = static_cast<int>(poly.size()) - 1; k >= d; --k) {
    if (sgn(poly[k]) == 0) continue;
    // theta^k = theta^(k-d) * theta^d = -theta^(k-d) * sum c_i theta^i
    const Rational f = poly[k];
    poly[k] = 0;
    for (int i = 0; i < d; ++i) {
      if (sgn(mp[i]) != 0) poly[k - d + i] -= f * mp[i];
    }
  }
  poly.resize(d);
  for (auto& c : poly) c.canonicalize();
  FieldElement out;
  out.field_ = field;
  out.coeffs_ = std::move(poly);
  return out;
}

FieldElement::FieldElement() : field_(NumberField::rationals()), coeffs_(1) {}

FieldElement::FieldElement(const Rational& q) : field_(NumberField::rationals()), coeffs_{q} {
  coeffs_[0].canonicalize();
}

FieldElement::FieldElement(FieldPtr field, std::vector<Rational> coeffs) {
  *this = reduce(field, std::move(coeffs));
}

FieldElement FieldElement::generator(FieldPtr field) {
  if (field->is_rational()) return FieldElement(Rational(-field->minpoly()[0]));
  std::vector<Rational> c(field->degree());
  c[1] = 1;
  return FieldElement(std::move(field), std::move(c));
}

FieldElement FieldElement::rational(const Rational& q, FieldPtr field) {
  std::vector<Rational> c(field->degree());
  c[0] = q;
  return FieldElement(std::move(field), std::move(c));
}

bool FieldElement::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

bool FieldElement::is_rational() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

Rational FieldElement::rational_value() const {
  if (!is_rational()) fail(ErrorKind::PreconditionViolation, "element is irrational");
  return coeffs_[0];
}

FieldElement FieldElement::promote_to(const FieldPtr& field) const {
  if (field_->same_as(*field)) return *this;
  if (!field_->is_rational())
    fail(ErrorKind::FieldMismatch, "cannot move " + field_->describe() + " into " + field->describe());
  return rational(coeffs_[0], field);
}

void FieldElement::unify(FieldElement& other) {
  if (field_ == other.field_) return;
  if (field_->same_as(*other.field_)) {
    other.field_ = field_;
    return;
  }
  if (field_->is_rational()) {
    *this = rational(coeffs_[0], other.field_);
  } else if (other.field_->is_rational()) {
    other = rational(other.coeffs_[0], field_);
  } else {
    fail(ErrorKind::FieldMismatch, field_->describe() + " vs " + other.field_->describe());
  }
}

FieldElement& FieldElement::operator+=(const FieldElement& rhs) {
  if (field_ == rhs.field_) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
  }
  FieldElement r = rhs;
  unify(r);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += r.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& rhs) {
  if (field_ == rhs.field_) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
  }
  FieldElement r = rhs;
  unify(r);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= r.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator*=(const Rational& rhs) {
  for (auto& c : coeffs_) c *= rhs;
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& rhs) {
  FieldElement r = rhs;
  unify(r);
  if (r.is_rational()) return *this *= r.coeffs_[0];
  if (is_rational()) {
    Rational q = coeffs_[0];
    *this = r;
    return *this *= q;
  }
  const std::size_t d = coeffs_.size();
  std::vector<Rational> prod(2 * d - 1);
  for (std::size_t i = 0; i < d; ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (sgn(r.coeffs_[j]) != 0) prod[i + j] += coeffs_[i] * r.coeffs_[j];
    }
  }
  *this = reduce(field_, std::move(prod));
  return *this;
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) fail(ErrorKind::DivisionByZero, "inverse of zero");
  if (is_rational()) return rational(1 / coeffs_[0], field_);
  // Extended Euclid on (x, minpoly) over Q: s*x + t*m = g, g constant.
  Polynomial a(coeffs_);
  std::vector<Rational> mc;
  for (const auto& z : field_->minpoly()) mc.emplace_back(z);
  Polynomial b(std::move(mc));
  Polynomial s0({Rational(1)}), s1;
  Polynomial r0 = a, r1 = b;
  while (!r1.is_zero()) {
    auto [q, r] = Polynomial::divmod(r0, r1);
    Polynomial s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.degree() != 0) fail(ErrorKind::PreconditionViolation, "element shares a factor with the minimal polynomial");
  std::vector<Rational> inv = s0.coeffs();
  for (auto& c : inv) c /= r0.coeffs()[0];
  return reduce(field_, std::move(inv));
}

FieldElement& FieldElement::operator/=(const FieldElement& rhs) { return *this *= rhs.inverse(); }

FieldElement operator-(FieldElement a) {
  for (auto& c : a.coeffs_) c = -c;
  return a;
}

FieldElement FieldElement::pow(unsigned exponent) const {
  FieldElement result = rational(1, field_);
  FieldElement base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

bool operator==(const FieldElement& a, const FieldElement& b) {
  if (a.field_ == b.field_ || a.field_->same_as(*b.field_)) return a.coeffs_ == b.coeffs_;
  if (a.field_->is_rational()) return b.is_rational() && b.coeffs_[0] == a.coeffs_[0];
  if (b.field_->is_rational()) return a.is_rational() && a.coeffs_[0] == b.coeffs_[0];
  fail(ErrorKind::FieldMismatch, "comparison across fields");
}

RationalInterval FieldElement::eval_on(const RationalInterval& theta) const {
  RationalInterval acc{coeffs_.back(), coeffs_.back()};
  for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) {
    Rational p1 = acc.lo * theta.lo, p2 = acc.lo * theta.hi, p3 = acc.hi * theta.lo, p4 = acc.hi * theta.hi;
    Rational lo = std::min({p1, p2, p3, p4});
    Rational hi = std::max({p1, p2, p3, p4});
    acc.lo = lo + coeffs_[i];
    acc.hi = hi + coeffs_[i];
  }
  return acc;
}

double FieldElement::double_eval(double& err) const {
  constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
  const double theta = field_->generator_approx();
  const double etheta = field_->generator_error();
  const double at = std::abs(theta) + etheta;
  double value = 0.0;
  double magnitude = 0.0;  // bound on sum |c_i| |theta|^i
  double deriv = 0.0;      // bound on sum |c_i| i |theta|^(i-1)
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) {
    double c = coeffs_[i].get_d();
    if (!std::isfinite(c) || std::abs(c) > 1e250) {
      err = std::numeric_limits<double>::infinity();
      return 0.0;
    }
    deriv = deriv * at + magnitude;
    magnitude = magnitude * at + std::abs(c);
    value = value * theta + c;
  }
  const double n = static_cast<double>(coeffs_.size());
  err = magnitude * (4 * n + 4) * kUnit + deriv * etheta;
  err = err * 2 + std::numeric_limits<double>::denorm_min();
  return value;
}

int FieldElement::fast_sign() const {
  double err = 0.0;
  double value = double_eval(err);
  if (value > err) return 1;
  if (value < -err) return -1;
  return 2;
}

int FieldElement::sign() const {
  if (is_rational()) return sgn(coeffs_[0]);
  int fs = fast_sign();
  if (fs != 2) return fs;
  if (is_zero()) return 0;
  RationalInterval v = eval_on(field_->isolation());
  unsigned bits = NumberField::kCachedBits;
  while (!v.excludes_zero()) {
    bits *= 2;
    if (bits > (1u << 16)) fail(ErrorKind::PrecisionUnreachable, "sign not resolved");
    v = eval_on(field_->refined(bits));
  }
  return sgn(v.lo) > 0 ? 1 : -1;
}

Integer FieldElement::floor() const {
  if (is_rational()) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), coeffs_[0].get_num_mpz_t(), coeffs_[0].get_den_mpz_t());
    return out;
  }
  double approx = to_double();
  Integer j(std::floor(approx));
  FieldElement shifted = *this;
  shifted.coeffs_[0] -= j;
  while (shifted.sign() < 0) {
    j -= 1;
    shifted.coeffs_[0] += 1;
  }
  for (;;) {
    shifted.coeffs_[0] -= 1;
    if (shifted.sign() < 0) break;
    j += 1;
  }
  return j;
}

Integer FieldElement::ceil() const {
  Integer f = (-*this).floor();
  return -f;
}

RationalInterval FieldElement::embed_exact(unsigned bits) const {
  if (is_rational()) return {coeffs_[0], coeffs_[0]};
  Rational target = 1;
  mpq_div_2exp(target.get_mpq_t(), target.get_mpq_t(), bits);
  unsigned theta_bits = NumberField::kCachedBits;
  RationalInterval v = eval_on(field_->isolation());
  while (v.width() > target) {
    theta_bits *= 2;
    if (theta_bits > (1u << 16)) fail(ErrorKind::PrecisionUnreachable, "embedding precision not reached");
    v = eval_on(field_->refined(theta_bits));
  }
  return v;
}

std::pair<double, double> FieldElement::embed(unsigned bits) const {
  RationalInterval v = embed_exact(bits + 2);
  double lo = v.lo.get_d();
  double hi = v.hi.get_d();
  // get_d truncates toward zero; step outward unless the conversion was exact.
  if (Rational(lo) > v.lo) lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
  if (Rational(hi) < v.hi) hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  return {lo, hi};
}

double FieldElement::to_double() const {
  if (is_rational()) return coeffs_[0].get_d();
  double err = 0.0;
  double value = double_eval(err);
  if (err <= std::abs(value) * 0x1p-48) return value;
  RationalInterval v = eval_on(field_->isolation());
  return Rational((v.lo + v.hi) / 2).get_d();
}

std::size_t hash_rational(const Rational& q) {
  auto limb_hash = [](mpz_srcptr z) {
    std::string_view bytes(reinterpret_cast<const char*>(z->_mp_d),
                           static_cast<std::size_t>(std::abs(z->_mp_size)) * sizeof(mp_limb_t));
    return std::hash<std::string_view>{}(bytes) ^ static_cast<std::size_t>(z->_mp_size);
  };
  std::size_t h = limb_hash(q.get_num_mpz_t());
  return h * 1000003u ^ limb_hash(q.get_den_mpz_t());
}

std::size_t FieldElement::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& c : coeffs_) h = (h ^ hash_rational(c)) * 0x100000001b3ull;
  return h;
}

std::string FieldElement::to_string() const {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    if (any) os << " + ";
    os << coeffs_[i];
    if (i > 0) os << "*t" << (i > 1 ? "^" + std::to_string(i) : "");
    any = true;
  }
  if (!any) os << "0";
  return os.str();
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::ParameterOutOfRange, "non-finite value");
  Rational q(x);  // mpq_set_d is exact
  return q;
}

}  // namespace carpetdim::arith
