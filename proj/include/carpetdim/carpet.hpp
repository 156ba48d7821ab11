#pragma once

// Carpet IFS class: maps S_i(x, y) = (beta x, alpha y) + (tx_i, ty_i) on the
// unit square with common ratios alpha < beta, plus word/cylinder algebra.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "carpetdim/exact_arith.hpp"

namespace carpetdim {

using arith::FieldElement;
using arith::FieldElementHash;
using arith::FieldPtr;
using arith::Integer;
using arith::Rational;

struct Translation {
  FieldElement tx;
  FieldElement ty;
};

// Unvalidated description, as read from JSON or built by hand.
struct CarpetSpec {
  FieldElement alpha;
  FieldElement beta;
  std::vector<Translation> maps;
};

// Finite word over the map alphabet, 0-based letters; the leftmost letter is
// the outermost map, S_w = S_{w_1} o ... o S_{w_k}.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint32_t> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<std::uint32_t> letters) : letters_(letters) {}
  // 1-based letters, as written in documentation and CLI output.
  static Word from_one_based(const std::vector<std::uint32_t>& letters);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::uint32_t operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<std::uint32_t>& letters() const { return letters_; }

  Word concat(const Word& other) const;
  Word power(unsigned n) const;
  std::string to_string() const;  // 1-based, e.g. "(2,1,1)"

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<std::uint32_t> letters_;
};

struct CylinderRect {
  FieldElement x0;
  FieldElement y0;
  FieldElement width;   // beta^k
  FieldElement height;  // alpha^k
};

class CarpetIFS {
 public:
  const FieldElement& alpha() const { return alpha_; }
  const FieldElement& beta() const { return beta_; }
  const std::vector<Translation>& maps() const { return maps_; }
  std::size_t m() const { return maps_.size(); }
  const FieldPtr& field() const { return field_; }
  bool degenerate() const { return maps_.size() == 1; }

  // Double approximations (for estimators and formula evaluation).
  double alpha_d() const { return alpha_d_; }
  double beta_d() const { return beta_d_; }
  double tx_d(std::size_t i) const { return tx_d_[i]; }
  double ty_d(std::size_t i) const { return ty_d_[i]; }

  CarpetSpec spec() const { return {alpha_, beta_, maps_}; }

 private:
  friend CarpetIFS validate_carpet(const CarpetSpec& raw);
  CarpetIFS() = default;

  FieldElement alpha_;
  FieldElement beta_;
  std::vector<Translation> maps_;
  FieldPtr field_;
  double alpha_d_ = 0, beta_d_ = 0;
  std::vector<double> tx_d_, ty_d_;
};

// Checks the standing assumptions exactly: 0 < alpha < beta < 1, every
// translation inside [0, 1-beta] x [0, 1-alpha], open rectangles pairwise
// disjoint. Throws NotContractive, OrderViolation, TranslationOutOfBox,
// RectangleOverlap (1-based pair in the message) or ParameterOutOfRange (m = 0).
CarpetIFS validate_carpet(const CarpetSpec& raw);

// Two-map system with translations (0, 0) and (1-beta, 1-alpha).
// Requires 0 < alpha <= 1/2 < beta < 1.
CarpetIFS pu_carpet(const FieldElement& alpha, const FieldElement& beta);

// True when the carpet has the PU shape (m = 2, maps as in pu_carpet).
bool is_pu_shape(const CarpetIFS& ifs);

CylinderRect compose_cylinder(const CarpetIFS& ifs, const Word& w);
FieldElement left_endpoint(const CarpetIFS& ifs, const Word& w);

// Checks that w is nonempty and every letter is < m; throws IndexOutOfRange.
void check_word(const CarpetIFS& ifs, const Word& w);

}  // namespace carpetdim
