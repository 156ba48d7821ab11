#include "carpetdim/scalar_json.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "carpetdim/errors.hpp"

namespace carpetdim {

namespace {

Integer integer_from_json(const Json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
    return Integer(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      fail(ErrorKind::ConfigParse, "not an integer: " + j.get<std::string>());
    }
  }
  fail(ErrorKind::ConfigParse, "expected an integer, got " + j.dump());
}

Json integer_to_json(const Integer& z) {
  if (z.fits_slong_p()) return Json(static_cast<std::int64_t>(z.get_si()));
  return Json(z.get_str());
}

Rational rational_from_pair(const Json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::ConfigParse, "rational must be [num, den]: " + j.dump());
  Integer num = integer_from_json(j[0]);
  Integer den = integer_from_json(j[1]);
  if (den == 0) fail(ErrorKind::ConfigParse, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Json rational_to_pair(const Rational& q) {
  return Json::array({integer_to_json(q.get_num()), integer_to_json(q.get_den())});
}

}  // namespace

FieldElement scalar_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::ConfigParse, "scalar must be an object: " + j.dump());
  if (j.contains("rat")) return FieldElement(rational_from_pair(j.at("rat")));
  if (!j.contains("field")) fail(ErrorKind::ConfigParse, "scalar needs \"rat\" or \"field\": " + j.dump());

  const Json& f = j.at("field");
  if (!f.contains("minpoly") || !f.contains("coeffs") || !f.contains("approx"))
    fail(ErrorKind::ConfigParse, "field scalar needs minpoly, coeffs and approx");
  std::vector<Integer> minpoly;
  for (const auto& c : f.at("minpoly")) minpoly.push_back(integer_from_json(c));
  if (minpoly.size() < 2 || minpoly.back() != 1)
    fail(ErrorKind::ConfigParse, "minpoly must be monic of degree >= 1");
  std::vector<Rational> coeffs;
  for (const auto& c : f.at("coeffs")) coeffs.push_back(rational_from_pair(c));
  if (coeffs.empty() || coeffs.size() > minpoly.size() - 1)
    fail(ErrorKind::ConfigParse, "coeffs length must be between 1 and the degree");
  if (!f.at("approx").is_number()) fail(ErrorKind::ConfigParse, "approx must be a number");
  const double approx = f.at("approx").get<double>();

  if (minpoly.size() == 2) {
    // Degree 1: the scalar is just its constant coordinate.
    return FieldElement(coeffs[0]);
  }
  std::vector<Rational> pc(minpoly.begin(), minpoly.end());
  auto roots = arith::isolate_real_roots(arith::Polynomial(pc));
  if (roots.empty()) fail(ErrorKind::ConfigParse, "minpoly has no real root");
  FieldElement best;
  double best_dist = std::numeric_limits<double>::infinity();
  try {
    for (const auto& iv : roots) {
      auto field = arith::NumberField::create(minpoly, iv);
      FieldElement x(field, coeffs);
      double d = std::abs(x.to_double() - approx);
      if (d < best_dist) {
        best_dist = d;
        best = x;
      }
    }
  } catch (const Error& e) {
    fail(ErrorKind::ConfigParse, e.what());
  }
  return best;
}

Json scalar_to_json(const FieldElement& x) {
  if (x.field()->is_rational() || x.is_rational()) return Json{{"rat", rational_to_pair(x.coeffs()[0])}};
  Json minpoly = Json::array();
  for (const auto& c : x.field()->minpoly()) minpoly.push_back(integer_to_json(c));
  Json coeffs = Json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(rational_to_pair(c));
  return Json{{"field", {{"minpoly", minpoly}, {"coeffs", coeffs}, {"approx", x.to_double()}}}};
}

CarpetSpec carpet_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("beta") || !j.contains("maps"))
    fail(ErrorKind::ConfigParse, "carpet needs alpha, beta and maps");
  CarpetSpec spec;
  spec.alpha = scalar_from_json(j.at("alpha"));
  spec.beta = scalar_from_json(j.at("beta"));
  if (!j.at("maps").is_array()) fail(ErrorKind::ConfigParse, "maps must be an array");
  for (const auto& m : j.at("maps")) {
    if (!m.contains("tx") || !m.contains("ty")) fail(ErrorKind::ConfigParse, "each map needs tx and ty");
    spec.maps.push_back({scalar_from_json(m.at("tx")), scalar_from_json(m.at("ty"))});
  }
  return spec;
}

Json carpet_to_json(const CarpetIFS& ifs) {
  Json maps = Json::array();
  for (const auto& t : ifs.maps()) maps.push_back({{"tx", scalar_to_json(t.tx)}, {"ty", scalar_to_json(t.ty)}});
  return Json{{"alpha", scalar_to_json(ifs.alpha())}, {"beta", scalar_to_json(ifs.beta())}, {"maps", maps}};
}

namespace {

Integer parse_integer(const std::string& t, const std::string& whole) {
  Integer v;
  if (t.empty() || v.set_str(t, 10) != 0) fail(ErrorKind::ConfigParse, "not a scalar: " + whole);
  return v;
}

Rational parse_decimal(const std::string& t, const std::string& whole) {
  std::string mant = t;
  long exp10 = 0;
  if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stol(parse_integer(mant.substr(e + 1), whole).get_str());
    mant = mant.substr(0, e);
  }
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant == "-" || mant == "+" || mant.empty()) fail(ErrorKind::ConfigParse, "not a scalar: " + whole);
  Rational q(parse_integer(mant[0] == '+' ? mant.substr(1) : mant, whole));
  Integer p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0) q *= Rational(p10);
  else q /= Rational(p10);
  q.canonicalize();
  return q;
}

}  // namespace

FieldElement scalar_from_text(const std::string& raw) {
  std::string t;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) fail(ErrorKind::ConfigParse, "empty scalar");
  if (t.front() == '{') {
    try {
      return scalar_from_json(Json::parse(t));
    } catch (const Json::exception& e) {
      fail(ErrorKind::ConfigParse, std::string("bad scalar JSON: ") + e.what());
    }
  }
  if (auto caret = t.find('^'); caret != std::string::npos) {
    const Integer base = parse_integer(t.substr(0, caret), raw);
    std::string e = t.substr(caret + 1);
    if (base <= 0) fail(ErrorKind::ConfigParse, "power base must be positive: " + raw);
    if (e.size() > 2 && e.front() == '(' && e.back() == ')') {
      // (-1/n): root of x^n - base, value base^(-1/n) = theta^(n-1) / base.
      e = e.substr(1, e.size() - 2);
      const auto slash = e.find('/');
      if (slash == std::string::npos || e.substr(0, slash) != "-1")
        fail(ErrorKind::ConfigParse, "only exponents (-1/n) are supported: " + raw);
      const long n = std::stol(parse_integer(e.substr(slash + 1), raw).get_str());
      if (n < 1 || n > 64) fail(ErrorKind::ConfigParse, "root index out of range: " + raw);
      if (n == 1) return FieldElement(Rational(Integer(1), base));
      std::vector<Integer> minpoly(static_cast<std::size_t>(n) + 1, Integer(0));
      minpoly[0] = -base;
      minpoly[n] = 1;
      const double root = std::pow(base.get_d(), 1.0 / static_cast<double>(n));
      auto field = arith::NumberField::from_root_near(minpoly, root);
      if (field->is_rational()) fail(ErrorKind::ConfigParse, "x^n - base must be irreducible: " + raw);
      FieldElement theta = FieldElement::generator(field);
      return theta.pow(static_cast<unsigned>(n - 1)) * Rational(Integer(1), base);
    }
    const long k = std::stol(parse_integer(e, raw).get_str());
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(std::labs(k)));
    return FieldElement(k >= 0 ? Rational(p) : Rational(Integer(1), p));
  }
  if (auto slash = t.find('/'); slash != std::string::npos) {
    const Integer num = parse_integer(t.substr(0, slash), raw), den = parse_integer(t.substr(slash + 1), raw);
    if (den == 0) fail(ErrorKind::ConfigParse, "zero denominator: " + raw);
    Rational q(num, den);
    q.canonicalize();
    return FieldElement(q);
  }
  return FieldElement(parse_decimal(t, raw));
}

}  // namespace carpetdim
