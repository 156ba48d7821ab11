#include "carpetdim/carpet.hpp"

#include <sstream>

#include "carpetdim/errors.hpp"

namespace carpetdim {

Word Word::from_one_based(const std::vector<std::uint32_t>& letters) {
  std::vector<std::uint32_t> out;
  out.reserve(letters.size());
  for (auto l : letters) {
    if (l == 0) fail(ErrorKind::IndexOutOfRange, "letters are 1-based");
    out.push_back(l - 1);
  }
  return Word(std::move(out));
}

Word Word::concat(const Word& other) const {
  std::vector<std::uint32_t> out = letters_;
  out.insert(out.end(), other.letters_.begin(), other.letters_.end());
  return Word(std::move(out));
}

Word Word::power(unsigned n) const {
  std::vector<std::uint32_t> out;
  out.reserve(letters_.size() * n);
  for (unsigned i = 0; i < n; ++i) out.insert(out.end(), letters_.begin(), letters_.end());
  return Word(std::move(out));
}

std::string Word::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < letters_.size(); ++i) os << (i ? "," : "") << letters_[i] + 1;
  os << ')';
  return os.str();
}

namespace {

FieldPtr common_field(const CarpetSpec& raw) {
  FieldPtr field = arith::NumberField::rationals();
  auto visit = [&](const FieldElement& x) {
    if (x.field()->is_rational()) return;
    if (field->is_rational()) {
      field = x.field();
    } else if (!field->same_as(*x.field())) {
      fail(ErrorKind::FieldMismatch, "carpet scalars live in different number fields");
    }
  };
  visit(raw.alpha);
  visit(raw.beta);
  for (const auto& t : raw.maps) {
    visit(t.tx);
    visit(t.ty);
  }
  return field;
}

bool in_unit_open(const FieldElement& x) { return x.sign() > 0 && (x - FieldElement(1)).sign() < 0; }

// Open intervals (a, a+w) and (b, b+w) intersect.
bool open_overlap(const FieldElement& a, const FieldElement& b, const FieldElement& w) {
  FieldElement d = a - b;
  if (d.sign() < 0) d = -d;
  return (d - w).sign() < 0;
}

}  // namespace

CarpetIFS validate_carpet(const CarpetSpec& raw) {
  if (raw.maps.empty()) fail(ErrorKind::ParameterOutOfRange, "carpet needs at least one map");
  FieldPtr field = common_field(raw);

  CarpetIFS ifs;
  ifs.field_ = field;
  ifs.alpha_ = raw.alpha.promote_to(field);
  ifs.beta_ = raw.beta.promote_to(field);
  if (!in_unit_open(ifs.alpha_)) fail(ErrorKind::NotContractive, "alpha must lie in (0,1)");
  if (!in_unit_open(ifs.beta_)) fail(ErrorKind::NotContractive, "beta must lie in (0,1)");
  if ((ifs.alpha_ - ifs.beta_).sign() >= 0) fail(ErrorKind::OrderViolation, "alpha must be smaller than beta");

  const FieldElement one(1);
  const FieldElement x_max = one - ifs.beta_;
  const FieldElement y_max = one - ifs.alpha_;
  for (std::size_t i = 0; i < raw.maps.size(); ++i) {
    Translation t{raw.maps[i].tx.promote_to(field), raw.maps[i].ty.promote_to(field)};
    if (t.tx.sign() < 0 || (t.tx - x_max).sign() > 0 || t.ty.sign() < 0 || (t.ty - y_max).sign() > 0)
      fail(ErrorKind::TranslationOutOfBox, "map " + std::to_string(i + 1) + " leaves the unit square");
    ifs.maps_.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < ifs.maps_.size(); ++i) {
    for (std::size_t j = i + 1; j < ifs.maps_.size(); ++j) {
      const auto& a = ifs.maps_[i];
      const auto& b = ifs.maps_[j];
      if (open_overlap(a.tx, b.tx, ifs.beta_) && open_overlap(a.ty, b.ty, ifs.alpha_))
        fail(ErrorKind::RectangleOverlap,
             "rectangles (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") overlap");
    }
  }

  ifs.alpha_d_ = ifs.alpha_.to_double();
  ifs.beta_d_ = ifs.beta_.to_double();
  for (const auto& t : ifs.maps_) {
    ifs.tx_d_.push_back(t.tx.to_double());
    ifs.ty_d_.push_back(t.ty.to_double());
  }
  return ifs;
}

CarpetIFS pu_carpet(const FieldElement& alpha, const FieldElement& beta) {
  const FieldElement half(Rational(1, 2));
  if (alpha.sign() <= 0 || (alpha - half).sign() > 0 || (beta - half).sign() <= 0 ||
      (beta - FieldElement(1)).sign() >= 0)
    fail(ErrorKind::ParameterOutOfRange, "PU carpets need 0 < alpha <= 1/2 < beta < 1");
  const FieldElement one(1);
  return validate_carpet({alpha, beta, {{FieldElement(0), FieldElement(0)}, {one - beta, one - alpha}}});
}

bool is_pu_shape(const CarpetIFS& ifs) {
  if (ifs.m() != 2) return false;
  const FieldElement one(1);
  const FieldElement half(Rational(1, 2));
  const auto& a = ifs.maps()[0];
  const auto& b = ifs.maps()[1];
  return a.tx.is_zero() && a.ty.is_zero() && b.tx == one - ifs.beta() && b.ty == one - ifs.alpha() &&
         (ifs.alpha() - half).sign() <= 0 && (ifs.beta() - half).sign() > 0;
}

void check_word(const CarpetIFS& ifs, const Word& w) {
  if (w.empty()) fail(ErrorKind::IndexOutOfRange, "empty word");
  for (auto l : w.letters())
    if (l >= ifs.m()) fail(ErrorKind::IndexOutOfRange, "letter " + std::to_string(l + 1) + " exceeds m");
}

CylinderRect compose_cylinder(const CarpetIFS& ifs, const Word& w) {
  check_word(ifs, w);
  FieldElement x0(0), y0(0);
  FieldElement bp = FieldElement::rational(1, ifs.field());
  FieldElement ap = FieldElement::rational(1, ifs.field());
  for (auto l : w.letters()) {
    x0 += ifs.maps()[l].tx * bp;
    y0 += ifs.maps()[l].ty * ap;
    bp *= ifs.beta();
    ap *= ifs.alpha();
  }
  return {x0, y0, bp, ap};
}

FieldElement left_endpoint(const CarpetIFS& ifs, const Word& w) {
  check_word(ifs, w);
  // Horner from the innermost map outwards: x <- t_i + beta x.
  FieldElement x(0);
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) x = ifs.maps()[*it].tx + ifs.beta() * x;
  return x;
}

}  // namespace carpetdim
