#include "carpetdim/presets.hpp"

#include "carpetdim/errors.hpp"
#include "carpetdim/theorem.hpp"

namespace carpetdim {

std::string to_string(BetaClass c) {
  switch (c) {
    case BetaClass::Garsia: return "Garsia";
    case BetaClass::Pisot: return "Pisot";
    case BetaClass::Salem: return "Salem";
    case BetaClass::Generic: return "generic";
    case BetaClass::Rational: return "rational";
  }
  return "generic";
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"pu-golden",     "pu-tribonacci", "pu-garsia-sqrt2", "pu-salem-4",
                                              "cantor-third",  "bm-two-column", "lebesgue-half"};
  return names;
}

FieldElement multinacci_beta(int k) { return hu_s_multinacci(k).beta; }

namespace {

FieldElement q(long n, long d) { return FieldElement(Rational(n, d)); }

Preset pu_multinacci(const std::string& name, int k) {
  HuResult hu = hu_s_multinacci(k);
  Preset p{name, pu_carpet(q(1, 2), hu.beta), BetaClass::Pisot, hu.s, "Hu-formula", {}};
  p.notes.push_back("1/beta is a Pisot number; s from the multinacci local dimension formula");
  return p;
}

// For k = 3 the closed formula exceeds the certified ceiling (log 2 - H)/(-log beta)
// obtained from exact equivalence classes, so s is estimated instead.
Preset pu_tribonacci(const std::string& name) {
  HuResult hu = hu_s_multinacci(3);
  Preset p{name, pu_carpet(q(1, 2), hu.beta), BetaClass::Pisot, std::nullopt, "", {}};
  p.notes.push_back("1/beta is a Pisot number");
  p.notes.push_back("the multinacci formula gives s = " + std::to_string(hu.s) +
                    ", above the certified ceiling (log 2 - H)/(-log beta); s is estimated from the L^q spectrum");
  return p;
}

Preset build(const std::string& name) {
  if (name == "pu-golden") return pu_multinacci(name, 2);
  if (name == "pu-tribonacci") return pu_tribonacci(name);
  if (name == "pu-garsia-sqrt2") {
    auto field = arith::NumberField::from_root_near({Integer(-2), Integer(0), Integer(1)}, 1.4142);
    FieldElement beta = FieldElement::generator(field) * Rational(1, 2);
    Preset p{name, pu_carpet(q(1, 3), beta), BetaClass::Garsia, 1.0, "convolution-bound", {}};
    p.notes.push_back("1/beta = sqrt 2 is a Garsia number: the projected measure is absolutely continuous with "
                      "bounded density, so s = 1");
    p.notes.push_back("beta^2 = 1/2 exactly, so the convolution lower bound already equals 1");
    return p;
  }
  if (name == "pu-salem-4") {
    auto field =
        arith::NumberField::from_root_near({Integer(1), Integer(-1), Integer(-1), Integer(-1), Integer(1)}, 0.5807);
    Preset p{name, pu_carpet(q(1, 2), FieldElement::generator(field)), BetaClass::Salem, std::nullopt, "", {}};
    p.notes.push_back("1/beta is the Salem number of x^4 - x^3 - x^2 - x + 1; s < 1 is known but its value is not");
    p.notes.push_back("finite window sampling may undershoot the Assouad dimension for Salem parameters");
    return p;
  }
  if (name == "cantor-third") {
    Preset p{name, validate_carpet({q(1, 4), q(1, 3), {{q(0, 1), q(0, 1)}, {q(2, 3), q(3, 4)}}}), BetaClass::Rational,
             std::nullopt, "", {}};
    p.notes.push_back("projection is the middle-third Cantor set");
    return p;
  }
  if (name == "bm-two-column") {
    Preset p{name, validate_carpet({q(1, 4), q(1, 2), {{q(0, 1), q(0, 1)}, {q(1, 2), q(3, 4)}}}), BetaClass::Rational,
             std::nullopt, "", {}};
    p.notes.push_back("two columns of width 1/2 tile the projection");
    return p;
  }
  if (name == "lebesgue-half") {
    return {name, validate_carpet({q(1, 3), q(1, 2), {{q(0, 1), q(0, 1)}, {q(1, 2), q(2, 3)}}}), BetaClass::Rational,
            std::nullopt, "", {"projected measure is Lebesgue measure on [0,1]"}};
  }
  fail(ErrorKind::ConfigParse, "unknown preset: " + name);
}

}  // namespace

Preset make_preset(const std::string& name) { return build(name); }

}  // namespace carpetdim
