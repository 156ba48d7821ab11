#pragma once

// Shipped carpets and the multinacci helper.

#include <optional>
#include <string>
#include <vector>

#include "carpetdim/carpet.hpp"

namespace carpetdim {

enum class BetaClass { Garsia, Pisot, Salem, Generic, Rational };

std::string to_string(BetaClass c);

struct Preset {
  std::string name;
  CarpetIFS ifs;
  BetaClass beta_class;
  // Known value of s and where it comes from ("Hu-formula", "user"); empty when unknown.
  std::optional<double> s_known;
  std::string s_source;
  std::vector<std::string> notes;
};

const std::vector<std::string>& preset_names();
// Throws ConfigParse for unknown names.
Preset make_preset(const std::string& name);

// beta_k: the root in (1/2, 1) of x^k + ... + x - 1, as the generator of its field.
FieldElement multinacci_beta(int k);

}  // namespace carpetdim
