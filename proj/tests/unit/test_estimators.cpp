#include <cmath>
#include <functional>

#include "carpetdim/errors.hpp"
#include "carpetdim/estimators.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/scalar_json.hpp"
#include "doctest.h"

using namespace carpetdim;

namespace {

FieldElement q(long a, long b) { return FieldElement(Rational(a, b)); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvariantViolation;
}

FieldElement pow3(int n) {
  long d = 1;
  for (int i = 0; i < n; ++i) d *= 3;
  return q(1, d);
}

}  // namespace

TEST_CASE("projection box counts") {
  CHECK(box_count_projection(make_preset("pu-golden").ifs, q(1, 256)).count == 256);
  CHECK(box_count_projection(make_preset("bm-two-column").ifs, q(1, 32)).count == 32);
  const auto cantor = make_preset("cantor-third").ifs;
  for (int n = 1; n <= 8; ++n) CHECK(box_count_projection(cantor, pow3(n)).count == (std::uint64_t{1} << n));
}

TEST_CASE("projected union") {
  const auto cantor = make_preset("cantor-third").ifs;
  const auto u = projected_union(cantor, 3);
  CHECK(u.size() == 8);
  CHECK(u.front().first.is_zero());
  CHECK(u.back().second == FieldElement(1));
  const auto golden = projected_union(make_preset("pu-golden").ifs, 6);
  REQUIRE(golden.size() == 1);
  CHECK(golden[0].second == FieldElement(1));
}

TEST_CASE("box count arguments") {
  const auto ifs = make_preset("pu-golden").ifs;
  CHECK(kind_of([&] { box_count_attractor(ifs, q(0, 1)); }) == ErrorKind::ParameterOutOfRange);
  CHECK(kind_of([&] { box_count_attractor(ifs, q(1, 1)); }) == ErrorKind::ParameterOutOfRange);
  BoxBudget tight;
  tight.max_rects = 100;
  CHECK(kind_of([&] { box_count_attractor(ifs, q(1, 4096), tight); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("halving the scale multiplies counts by at most four") {
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    std::uint64_t prev = 0;
    for (int j = 3; j <= 9; ++j) {
      const auto c = box_count_attractor(ifs, q(1, 1L << j)).count;
      if (prev) {
        CHECK(c >= prev);
        CHECK(c <= 4 * prev);
      }
      prev = c;
    }
  }
}

TEST_CASE("fit of exact power laws") {
  BoxCountSeries s;
  s.target = BoxTarget::Projection;
  for (int j = 2; j <= 10; ++j) s.entries.push_back({q(1, 1L << j), std::ldexp(1.0, -j), std::uint64_t{1} << j, j});
  CHECK(fit_box_dimension(s).slope == doctest::Approx(1.0));

  const auto cantor = make_preset("cantor-third").ifs;
  std::vector<FieldElement> scales;
  for (int n = 2; n <= 9; ++n) scales.push_back(pow3(n));
  const auto series = box_count_series(cantor, BoxTarget::Projection, scales);
  CHECK(std::abs(fit_box_dimension(series).slope - std::log(2.0) / std::log(3.0)) <= 0.01);
}

TEST_CASE("fit needs enough scales") {
  BoxCountSeries s;
  for (int j = 2; j <= 4; ++j) s.entries.push_back({q(1, 1L << j), std::ldexp(1.0, -j), std::uint64_t{1} << j, j});
  CHECK(kind_of([&] { fit_box_dimension(s); }) == ErrorKind::InsufficientScales);
  s.entries.push_back({q(1, 32), 1.0 / 32, 32, 5});
  // four scales but a ratio of only 8
  CHECK(kind_of([&] { fit_box_dimension(s); }) == ErrorKind::InsufficientScales);
}

TEST_CASE("two-column carpet box dimension") {
  const auto ifs = make_preset("bm-two-column").ifs;
  const auto series = box_count_series(ifs, BoxTarget::Attractor, dyadic_scales(5, 12));
  CHECK(std::abs(fit_box_dimension(series).slope - 1.0) <= 0.05);
}

TEST_CASE("coupling depth brackets the tube width") {
  for (const auto& name : {"pu-golden", "pu-garsia-sqrt2", "cantor-third", "bm-two-column"}) {
    const auto ifs = make_preset(name).ifs;
    const double a = ifs.alpha_d(), b = ifs.beta_d();
    for (int k = 1; k <= 20; ++k) {
      const int n = coupling_depth(ifs, k);
      const double t = std::pow(a / b, k);
      CHECK(std::pow(b, n + 1) < t * (1 + 1e-12));
      CHECK(t <= std::pow(b, n) * (1 + 1e-12));
    }
  }
}

TEST_CASE("default k list covers distinct depths") {
  const auto ifs = make_preset("pu-golden").ifs;
  const auto ks = default_assouad_ks(ifs);
  REQUIRE(ks.size() >= 3);
  int prev = -1;
  for (int k : ks) {
    const int n = coupling_depth(ifs, k);
    CHECK(n > prev);
    prev = n;
  }
}

TEST_CASE("two-scale estimate on the two-column carpet") {
  const auto ifs = make_preset("bm-two-column").ifs;
  const auto est = estimate_assouad_two_scale(ifs, default_assouad_ks(ifs));
  CHECK(std::abs(est.fit.slope - 1.0) <= 0.1);
  for (const auto& w : est.samples) CHECK(w.exponent <= 2.05);
}

TEST_CASE("two-scale window exponents stay below 2") {
  const auto ifs = make_preset("pu-garsia-sqrt2").ifs;
  const auto est = estimate_assouad_two_scale(ifs, default_assouad_ks(ifs));
  REQUIRE_FALSE(est.samples.empty());
  for (const auto& w : est.samples) CHECK(w.exponent <= 2.05);
  CHECK(est.guided_hit_rate >= 0.0);
  CHECK(est.guided_hit_rate <= 1.0);
  CHECK(std::abs(est.fit.slope - 1.3155) <= 0.1);
}

TEST_CASE("two-scale estimator is seeded") {
  const auto ifs = make_preset("pu-golden").ifs;
  const std::vector<int> ks{3, 5, 7, 9};
  AssouadOptions o;
  o.seed = 42;
  const auto a = estimate_assouad_two_scale(ifs, ks, o);
  const auto b = estimate_assouad_two_scale(ifs, ks, o);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].count == b.samples[i].count);
    CHECK(a.samples[i].offset == b.samples[i].offset);
  }
}

TEST_CASE("two-scale argument checks") {
  const auto ifs = make_preset("pu-golden").ifs;
  CHECK(kind_of([&] { estimate_assouad_two_scale(ifs, {}); }) == ErrorKind::ParameterOutOfRange);
  CHECK(kind_of([&] { estimate_assouad_two_scale(ifs, {0}); }) == ErrorKind::ParameterOutOfRange);
  const int k = default_assouad_ks(ifs).front();
  CHECK(kind_of([&] { estimate_assouad_two_scale(ifs, {k}); }) == ErrorKind::DegenerateFit);
}
