#include <cmath>
#include <random>

#include "carpetdim/errors.hpp"
#include "carpetdim/exact_arith.hpp"
#include "doctest.h"

using namespace carpetdim;
using namespace carpetdim::arith;

namespace {

FieldPtr golden() { return NumberField::from_root_near({Integer(-1), Integer(1), Integer(1)}, 0.618); }
FieldPtr sqrt2() { return NumberField::from_root_near({Integer(-2), Integer(0), Integer(1)}, 1.414); }

FieldElement poly_in(const FieldPtr& f, std::vector<long> c) {
  std::vector<Rational> q;
  for (long v : c) q.emplace_back(v);
  return reduce(f, std::move(q));
}

FieldElement random_element(const FieldPtr& f, std::mt19937_64& rng, int degree, int span) {
  std::uniform_int_distribution<int> coef(-span, span);
  std::vector<Rational> c(degree + 1);
  for (auto& x : c) x = coef(rng);
  return reduce(f, std::move(c));
}

}  // namespace

TEST_CASE("reduce substitutes the minimal polynomial") {
  auto f = golden();
  auto t = FieldElement::generator(f);
  auto sq = t * t;
  REQUIRE(sq.coeffs().size() == 2);
  CHECK(sq.coeffs()[0] == 1);
  CHECK(sq.coeffs()[1] == -1);

  CHECK(t + FieldElement(0) == t);
  FieldElement q = FieldElement(Rational(2, 3)) * FieldElement(Rational(3, 4));
  CHECK(q == FieldElement(Rational(1, 2)));
  CHECK(q.field()->is_rational());

  // cubic: t^3 = 1 - t - t^2 for x^3 + x^2 + x - 1
  auto trib = NumberField::from_root_near({Integer(-1), Integer(1), Integer(1), Integer(1)}, 0.54);
  auto u = FieldElement::generator(trib);
  auto cube = u.pow(3);
  CHECK(cube == FieldElement(1) - u - u * u);
}

TEST_CASE("is_zero is exact") {
  auto f = golden();
  auto t = FieldElement::generator(f);
  CHECK((t * t + t - FieldElement(1)).is_zero());
  CHECK_FALSE((t * 2 - FieldElement(1)).is_zero());
  CHECK((FieldElement(Rational(1, 3)) - FieldElement(Rational(1, 3))).is_zero());
}

TEST_CASE("embed brackets the real value") {
  auto t = FieldElement::generator(golden());
  auto [lo, hi] = t.embed(30);
  CHECK(lo <= 0.6180339887498949);
  CHECK(hi >= 0.6180339887498948);
  CHECK(hi - lo <= std::ldexp(1.0, -30));

  auto [hlo, hhi] = FieldElement(Rational(1, 2)).embed(30);
  CHECK(hlo == 0.5);
  CHECK(hhi == 0.5);

  // 2^(-1/2) lives in Q(theta), theta^2 = 2, as theta / 2.
  auto beta = FieldElement::generator(sqrt2()) * Rational(1, 2);
  auto [blo, bhi] = beta.embed(40);
  CHECK(blo <= 0.70710678118654757);
  CHECK(bhi >= 0.70710678118654746);
  CHECK(bhi - blo < 1e-11);

  auto iv = beta.embed_exact(200);
  CHECK(iv.width() <= Rational(1) / Rational(Integer(1) << 200));
}

TEST_CASE("root selection and validation") {
  auto neg = NumberField::from_root_near({Integer(-2), Integer(0), Integer(1)}, -1.4);
  CHECK(neg->generator_approx() == doctest::Approx(-std::sqrt(2.0)));
  CHECK_FALSE(neg->same_as(*sqrt2()));
  CHECK(sqrt2()->same_as(*sqrt2()));
  CHECK_THROWS_AS(NumberField::create({Integer(-2), Integer(0), Integer(1)}, {Rational(-2), Rational(2)}), Error);
  CHECK_THROWS_AS(NumberField::create({Integer(-2), Integer(0), Integer(2)}, {Rational(1), Rational(2)}), Error);

  auto a = FieldElement::generator(golden());
  auto b = FieldElement::generator(sqrt2());
  try {
    (void)(a + b);
    FAIL("expected FieldMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FieldMismatch);
  }
}

TEST_CASE("inverse, floor and ceil") {
  auto f = golden();
  auto t = FieldElement::generator(f);
  CHECK(t.inverse() == t + FieldElement(1));  // t(t+1) = 1
  auto x = poly_in(f, {3, -7});
  CHECK((x * x.inverse()) == FieldElement(1));
  CHECK_THROWS_AS(FieldElement(0).inverse(), Error);

  auto phi24 = t.inverse().pow(24);  // Lucas L_24 - phi^-24 = 103682 - 9.6e-6
  CHECK(phi24.floor() == 103681);
  CHECK(phi24.ceil() == 103682);
  CHECK((-t).floor() == -1);
  CHECK(FieldElement(Rational(-3, 2)).floor() == -2);
  CHECK(FieldElement(Rational(4)).floor() == 4);
  CHECK(FieldElement(Rational(4)).ceil() == 4);
  CHECK(t.sign() == 1);
  CHECK((t - FieldElement(Rational(618034, 1000000))).sign() == -1);
}

TEST_CASE("ring laws hold exactly on random triples") {
  std::mt19937_64 rng(7);
  for (auto f : {golden(), sqrt2(), NumberField::from_root_near({Integer(1), Integer(-1), Integer(-1), Integer(-1), Integer(1)}, 0.58)}) {
    for (int i = 0; i < 400; ++i) {
      auto a = random_element(f, rng, 4, 3), b = random_element(f, rng, 4, 3), c = random_element(f, rng, 4, 3);
      REQUIRE((a + b) + c == a + (b + c));
      REQUIRE((a * b) * c == a * (b * c));
      REQUIRE(a * b == b * a);
      REQUIRE(a * (b + c) == a * b + a * c);
    }
  }
}

TEST_CASE("is_zero agrees with high precision embedding") {
  std::mt19937_64 rng(11);
  auto f = golden();
  auto s = sqrt2();
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& field = (i % 2 == 0) ? f : s;
    auto x = random_element(field, rng, 3, 2);
    if (i % 3 == 0) {
      // Unreduced product of the minimal polynomial with a random cofactor.
      std::uniform_int_distribution<int> coef(-2, 2);
      std::vector<Rational> cof(3), raw(field->minpoly().size() + 2);
      for (auto& c : cof) c = coef(rng);
      for (std::size_t a = 0; a < field->minpoly().size(); ++a)
        for (std::size_t b = 0; b < cof.size(); ++b) raw[a + b] += Rational(field->minpoly()[a]) * cof[b];
      x = reduce(field, raw);
    }
    auto iv = x.embed_exact(80);
    Rational eps = Rational(1) / Rational(Integer(1) << 40);
    bool tiny = abs(iv.lo) < eps && abs(iv.hi) < eps;
    REQUIRE(x.is_zero() == tiny);
    zeros += x.is_zero();
  }
  CHECK(zeros > 1000);
}

TEST_CASE("embedding respects order") {
  std::mt19937_64 rng(3);
  auto f = sqrt2();
  for (int i = 0; i < 2000; ++i) {
    auto x = random_element(f, rng, 1, 5), y = random_element(f, rng, 1, 5);
    auto dx = x.embed(40), dy = y.embed(40);
    if ((x - y).is_zero()) continue;
    if (dx.second < dy.first) REQUIRE((x - y).sign() < 0);
    if (dy.second < dx.first) REQUIRE((x - y).sign() > 0);
  }
}
