#include <functional>
#include <random>

#include "carpetdim/carpet.hpp"
#include "carpetdim/endpoints.hpp"
#include "carpetdim/errors.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/scalar_json.hpp"
#include "doctest.h"

using namespace carpetdim;

namespace {

FieldElement q(long a, long b) { return FieldElement(Rational(a, b)); }

CarpetSpec two_maps(FieldElement alpha, FieldElement beta, Translation a, Translation b) {
  return {std::move(alpha), std::move(beta), {std::move(a), std::move(b)}};
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvariantViolation;
}

bool rect_contains(const CylinderRect& outer, const CylinderRect& inner) {
  return outer.x0 <= inner.x0 && inner.x0 + inner.width <= outer.x0 + outer.width && outer.y0 <= inner.y0 &&
         inner.y0 + inner.height <= outer.y0 + outer.height;
}

bool open_disjoint(const CylinderRect& a, const CylinderRect& b) {
  return a.x0 + a.width <= b.x0 || b.x0 + b.width <= a.x0 || a.y0 + a.height <= b.y0 || b.y0 + b.height <= a.y0;
}

}  // namespace

TEST_CASE("validate accepts disjoint columns and rows") {
  auto ifs = validate_carpet(two_maps(q(1, 3), q(1, 2), {q(0, 1), q(0, 1)}, {q(1, 2), q(2, 3)}));
  CHECK(ifs.m() == 2);
  CHECK_FALSE(ifs.degenerate());
}

TEST_CASE("validate rejects broken standing assumptions") {
  CHECK(kind_of([] { validate_carpet(two_maps(q(1, 2), q(1, 3), {q(0, 1), q(0, 1)}, {q(2, 3), q(1, 2)})); }) ==
        ErrorKind::OrderViolation);
  CHECK(kind_of([] { validate_carpet(two_maps(q(1, 3), q(1, 2), {q(0, 1), q(0, 1)}, {q(0, 1), q(0, 1)})); }) ==
        ErrorKind::RectangleOverlap);
  CHECK(kind_of([] { validate_carpet(two_maps(q(1, 3), q(1, 1), {q(0, 1), q(0, 1)}, {q(0, 1), q(2, 3)})); }) ==
        ErrorKind::NotContractive);
  CHECK(kind_of([] { validate_carpet(two_maps(q(1, 3), q(1, 2), {q(0, 1), q(0, 1)}, {q(3, 4), q(2, 3)})); }) ==
        ErrorKind::TranslationOutOfBox);
  CHECK(kind_of([] { validate_carpet(CarpetSpec{q(1, 3), q(1, 2), {}}); }) == ErrorKind::ParameterOutOfRange);
}

TEST_CASE("overlap message names the pair") {
  try {
    validate_carpet(two_maps(q(1, 3), q(1, 2), {q(0, 1), q(0, 1)}, {q(0, 1), q(0, 1)}));
    FAIL("expected RectangleOverlap");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
  }
}

TEST_CASE("two-map family constructor") {
  auto golden = make_preset("pu-golden");
  CHECK(is_pu_shape(golden.ifs));
  CHECK(golden.ifs.beta().to_double() == doctest::Approx(0.6180339887).epsilon(1e-9));

  auto garsia = make_preset("pu-garsia-sqrt2");
  CHECK(garsia.ifs.alpha() == q(1, 3));
  CHECK(garsia.ifs.beta() * garsia.ifs.beta() == q(1, 2));

  CHECK(kind_of([] { pu_carpet(q(3, 5), q(7, 10)); }) == ErrorKind::ParameterOutOfRange);
  CHECK(kind_of([] { pu_carpet(q(1, 2), q(1, 2)); }) == ErrorKind::ParameterOutOfRange);
}

TEST_CASE("compose_cylinder on the two-map family") {
  const auto ifs = make_preset("pu-golden").ifs;
  const auto& a = ifs.alpha();
  const auto& b = ifs.beta();
  const FieldElement one(1);

  auto r1 = compose_cylinder(ifs, Word::from_one_based({1}));
  CHECK(r1.x0.is_zero());
  CHECK(r1.y0.is_zero());
  CHECK(r1.width == b);
  CHECK(r1.height == a);

  auto r2 = compose_cylinder(ifs, Word::from_one_based({2}));
  CHECK(r2.x0 == one - b);
  CHECK(r2.y0 == one - a);

  auto r12 = compose_cylinder(ifs, Word::from_one_based({1, 2}));
  CHECK(r12.x0 == b * (one - b));
  CHECK(r12.y0 == a * (one - a));
  CHECK(r12.width == b * b);
}

TEST_CASE("left_endpoint coincidence in the golden field") {
  const auto ifs = make_preset("pu-golden").ifs;
  const FieldElement one_minus_beta = FieldElement(1) - ifs.beta();
  CHECK(left_endpoint(ifs, Word::from_one_based({2, 1, 1})) == one_minus_beta);
  CHECK(left_endpoint(ifs, Word::from_one_based({1, 2, 2})) == one_minus_beta);
  CHECK(left_endpoint(ifs, Word::from_one_based({1, 1, 1, 1, 1})).is_zero());
  CHECK(left_endpoint(ifs, Word::from_one_based({2, 1})) != left_endpoint(ifs, Word::from_one_based({1, 2})));
}

TEST_CASE("word checks") {
  const auto ifs = make_preset("pu-golden").ifs;
  CHECK(kind_of([&] { check_word(ifs, Word{0, 2}); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { check_word(ifs, Word{}); }) == ErrorKind::IndexOutOfRange);
  CHECK(Word::from_one_based({2, 1, 1}).to_string() == "(2,1,1)");
  CHECK(Word{1, 0}.power(2) == Word{1, 0, 1, 0});
}

TEST_CASE("cylinders nest") {
  std::mt19937_64 rng(7);
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    std::uniform_int_distribution<std::uint32_t> letter(0, static_cast<std::uint32_t>(ifs.m() - 1));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint32_t> w;
      for (int i = 0; i < 8; ++i) w.push_back(letter(rng));
      CylinderRect prev = compose_cylinder(ifs, Word{w[0]});
      for (std::size_t len = 2; len <= w.size(); ++len) {
        CylinderRect cur = compose_cylinder(ifs, Word(std::vector<std::uint32_t>(w.begin(), w.begin() + len)));
        REQUIRE(rect_contains(prev, cur));
        prev = cur;
      }
    }
  }
}

TEST_CASE("cylinders of equal length have disjoint interiors") {
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    for (int k = 1; k <= 4; ++k) {
      std::vector<CylinderRect> rects;
      for_each_word(ifs.m(), static_cast<std::size_t>(k), [&](const Word& w) { rects.push_back(compose_cylinder(ifs, w)); });
      for (std::size_t i = 0; i < rects.size(); ++i)
        for (std::size_t j = i + 1; j < rects.size(); ++j) REQUIRE(open_disjoint(rects[i], rects[j]));
    }
  }
}

TEST_CASE("carpet JSON round trip") {
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    const Json j = carpet_to_json(ifs);
    const auto back = validate_carpet(carpet_from_json(Json::parse(j.dump())));
    CHECK(back.alpha() == ifs.alpha());
    CHECK(back.beta() == ifs.beta());
    REQUIRE(back.m() == ifs.m());
    for (std::size_t i = 0; i < ifs.m(); ++i) {
      CHECK(back.maps()[i].tx == ifs.maps()[i].tx);
      CHECK(back.maps()[i].ty == ifs.maps()[i].ty);
    }
  }
}

TEST_CASE("scalar text forms") {
  CHECK(scalar_from_text("3/7") == q(3, 7));
  CHECK(scalar_from_text("0.55") == q(11, 20));
  CHECK(scalar_from_text("2^-6") == q(1, 64));
  CHECK(scalar_from_text("1e-2") == q(1, 100));
  const auto r = scalar_from_text("2^(-1/2)");
  CHECK(r * r == q(1, 2));
  CHECK(r.to_double() == doctest::Approx(0.70710678118));
  const auto c = scalar_from_text("2^(-1/3)");
  CHECK(c * c * c == q(1, 2));
  CHECK(scalar_from_text(R"({"rat": [1, 3]})") == q(1, 3));
  CHECK(kind_of([] { scalar_from_text("abc"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scalar_from_text(""); }) == ErrorKind::ConfigParse);
}

TEST_CASE("field scalar JSON selects the root by the scalar value") {
  const Json j = Json::parse(R"({"field": {"minpoly": [-1, 1, 1], "coeffs": [[0, 1], [1, 1]], "approx": 0.618}})");
  const auto x = scalar_from_json(j);
  CHECK(x.to_double() == doctest::Approx(0.6180339887));
  const auto back = scalar_from_json(scalar_to_json(x));
  CHECK(back == x);
}
