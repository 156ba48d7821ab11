#include <algorithm>
#include <cmath>
#include <functional>

#include "carpetdim/errors.hpp"
#include "carpetdim/measure.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/scalar_json.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace carpetdim;

namespace {

FieldElement q(long a, long b) { return FieldElement(Rational(a, b)); }

CarpetIFS two_columns(FieldElement alpha, FieldElement beta, FieldElement t) {
  return validate_carpet({alpha, beta, {{q(0, 1), q(0, 1)}, {t, FieldElement(1) - alpha}}});
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

}  // namespace

TEST_CASE("lebesgue binning is uniform") {
  const auto ifs = make_preset("lebesgue-half").ifs;
  const auto bm = bin_projected_measure(ifs, 10, 1024);
  REQUIRE(bm.exact);
  for (const auto& x : bm.masses) REQUIRE(x == q(1, 1024));
  CHECK(moment_sum(bm, 2) == doctest::Approx(1.0 / 1024));
  CHECK(moment_sum(bm, 1) == doctest::Approx(1.0));
}

TEST_CASE("cantor binning puts 2^-n on surviving cylinders") {
  const auto ifs = make_preset("cantor-third").ifs;
  for (int n = 1; n <= 6; ++n) {
    std::size_t bins = 1;
    for (int i = 0; i < n; ++i) bins *= 3;
    const auto bm = bin_projected_measure(ifs, n, bins);
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < bins; ++j) {
      if (bm.masses[j].is_zero()) continue;
      ++nonzero;
      CHECK(bm.masses[j] == q(1, 1L << n));
      // surviving cells have no digit 1 in base 3
      std::size_t x = j;
      for (int d = 0; d < n; ++d, x /= 3) CHECK(x % 3 != 1);
    }
    CHECK(nonzero == (std::size_t{1} << n));
    CHECK(moment_sum(bm, 3) == doctest::Approx(std::pow(2.0, n * (1 - 3.0))));
  }
}

TEST_CASE("golden coincidence doubles a bin") {
  const auto ifs = make_preset("pu-golden").ifs;
  const FieldElement w = ifs.beta().pow(3);
  const auto bm = bin_projected_measure(ifs, 3, w);
  // 1 - beta = 2 beta^3 + beta^4 is not on the grid; find its bin
  const FieldElement x = FieldElement(1) - ifs.beta();
  const auto j = static_cast<std::size_t>((x / w).floor().get_si());
  REQUIRE(j < bm.bins());
  // both words (2,1,1) and (1,2,2) start there; each cylinder has width w, so
  // together they sit in bins j and j + 1
  REQUIRE(j + 1 < bm.bins());
  CHECK(bm.masses[j] + bm.masses[j + 1] >= q(2, 8));
}

TEST_CASE("bin masses match the brute-force oracle") {
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    for (int depth : {1, 3, 6}) {
      for (std::size_t bins : {7, 16, 50}) {
        const auto bm = bin_projected_measure(ifs, depth, bins);
        const auto ref = oracle::brute_bins(ifs, depth, bins);
        REQUIRE(bm.masses.size() == ref.size());
        for (std::size_t j = 0; j < bins; ++j) REQUIRE(bm.masses[j] == ref[j]);
      }
    }
  }
}

TEST_CASE("total mass is exactly one") {
  for (const auto& name : preset_names()) {
    const auto ifs = make_preset(name).ifs;
    for (int depth : {0, 2, 5, 9})
      for (std::size_t bins : {1, 13, 256}) CHECK(bin_projected_measure(ifs, depth, bins).total() == FieldElement(1));
  }
}

TEST_CASE("refining the grid splits masses consistently") {
  for (const auto& name : {"pu-golden", "pu-garsia-sqrt2", "cantor-third"}) {
    const auto ifs = make_preset(name).ifs;
    const auto coarse = bin_projected_measure(ifs, 7, 40);
    const auto fine = bin_projected_measure(ifs, 7, 80);
    for (std::size_t j = 0; j < 40; ++j) REQUIRE(fine.masses[2 * j] + fine.masses[2 * j + 1] == coarse.masses[j]);
  }
}

TEST_CASE("masses are multiples of m^-n when cylinders align") {
  const auto ifs = two_columns(q(1, 3), q(1, 2), q(1, 2));
  const auto bm = bin_projected_measure(ifs, 6, 64);
  for (const auto& x : bm.masses) {
    const Rational r = (x * Rational(64)).rational_value();
    CHECK(r.get_den() == 1);
  }
}

TEST_CASE("measure errors") {
  const auto ifs = make_preset("pu-golden").ifs;
  CHECK(kind_of([&] { bin_projected_measure(ifs, 3, 0); }) == ErrorKind::ZeroBins);
  const auto bm = bin_projected_measure(ifs, 3, 8);
  CHECK(kind_of([&] { moment_sum(bm, 0); }) == ErrorKind::NonpositiveQ);
  CHECK(kind_of([&] { moment_sum(bm, -1); }) == ErrorKind::NonpositiveQ);
  MeasureBudget tight;
  tight.max_words = 1000;
  CHECK(kind_of([&] { bin_projected_measure(ifs, 20, 8, tight); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("quantized engine tracks the exact engine") {
  const auto ifs = make_preset("pu-golden").ifs;
  const std::vector<int> depths{8, 10, 12};
  const auto exact = projected_measure_series(ifs, depths, MeasureEngine::Exact);
  const auto quant = projected_measure_series(ifs, depths, MeasureEngine::Quantized);
  CHECK(quant.engine == MeasureEngine::Quantized);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    double me = 0, mq = 0, total = 0;
    for (double x : exact.masses[i]) me = std::max(me, x);
    for (double x : quant.masses[i]) {
      mq = std::max(mq, x);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mq == doctest::Approx(me).epsilon(0.25));
  }
}

TEST_CASE("spectrum of equal-ratio OSC measures") {
  const auto half = make_preset("lebesgue-half").ifs;
  const std::vector<double> qs{1, 2, 4, 8};
  const auto est = estimate_tau(half, qs, {8, 10, 12, 14});
  for (const auto& t : est.samples) CHECK(std::abs(t.tau - (t.q - 1)) <= 0.05);

  const auto cantor = make_preset("cantor-third").ifs;
  const double d = std::log(2.0) / std::log(3.0);
  const auto ec = estimate_tau(cantor, {1, 2, 4, 8, 16, 24, 32}, {5, 6, 7, 8, 9});
  for (const auto& t : ec.samples) CHECK(std::abs(t.tau - (t.q - 1) * d) <= 0.05);
  const auto s = estimate_s_from_tau(ec, 16, 32);
  CHECK(s.slope == doctest::Approx(d).epsilon(0.02));
}

TEST_CASE("tau at q = 1 vanishes") {
  const auto ifs = make_preset("pu-golden").ifs;
  const auto est = estimate_tau(ifs, {1}, {8, 10, 12});
  CHECK(std::abs(est.samples[0].tau) <= 0.02);
}

TEST_CASE("s from tau needs a tail") {
  const auto ifs = make_preset("lebesgue-half").ifs;
  const auto est = estimate_tau(ifs, {1, 2, 4}, {6, 7, 8});
  CHECK(kind_of([&] { estimate_s_from_tau(est); }) == ErrorKind::InsufficientTail);
}

TEST_CASE("min-bin estimator on exact cases") {
  const auto half = make_preset("lebesgue-half").ifs;
  const auto mb = estimate_s_min_bin(half, {6, 8, 10});
  for (const auto& p : mb.series) CHECK(p.min_bin_dim == doctest::Approx(1.0));
  const auto cantor = make_preset("cantor-third").ifs;
  const auto mc = estimate_s_min_bin(cantor, {4, 6, 8});
  for (const auto& p : mc.series) CHECK(p.min_bin_dim == doctest::Approx(std::log(2.0) / std::log(3.0)));
}

TEST_CASE("convolution lower bound") {
  const auto garsia = make_preset("pu-garsia-sqrt2").ifs;
  CHECK(convolution_exponent(garsia.beta()) == 2);
  CHECK(convolution_lower_bound(garsia.beta()) == 1.0);
  CHECK(convolution_exponent(q(3, 5)) == 2);
  CHECK(convolution_lower_bound(q(3, 5)) == doctest::Approx(0.6784).epsilon(1e-4));
  CHECK(convolution_exponent(q(9, 10)) == 7);
  CHECK(convolution_lower_bound(q(9, 10)) == doctest::Approx(0.9398).epsilon(1e-4));
  CHECK(kind_of([] { convolution_lower_bound(q(1, 2)); }) == ErrorKind::ParameterOutOfRange);
  CHECK(kind_of([] { convolution_lower_bound(q(1, 1)); }) == ErrorKind::ParameterOutOfRange);
  for (int i = 1; i < 50; ++i) CHECK(convolution_lower_bound(q(50 + i, 100)) > 0.5);
}

TEST_CASE("default schedules") {
  const auto d = default_depths(0.618);
  REQUIRE(d.size() >= 3);
  CHECK(std::pow(0.618, d.back()) < 1e-5);
  CHECK(std::is_sorted(d.begin(), d.end()));
  const auto tail = default_tail_qs();
  CHECK(tail.front() == 16);
  CHECK(tail.back() == 48);
}
