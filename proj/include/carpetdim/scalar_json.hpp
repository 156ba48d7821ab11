#pragma once

// JSON forms of exact scalars and carpet descriptions.
//
//   Scalar := {"rat": [num, den]}
//           | {"field": {"minpoly": [c0, ..., cd], "coeffs": [[num, den], ...], "approx": float}}
//
// minpoly is monic with integer coefficients; coeffs are power-basis
// coordinates of the scalar; approx is the approximate value of the scalar and
// selects which real root of minpoly is the generator. Integers outside the
// int64 range are written as decimal strings and accepted in either form.
//
//   Carpet := {"alpha": Scalar, "beta": Scalar, "maps": [{"tx": Scalar, "ty": Scalar}, ...]}

#include <string>

#include "json.hpp"

#include "carpetdim/carpet.hpp"

namespace carpetdim {

using Json = nlohmann::json;

FieldElement scalar_from_json(const Json& j);
Json scalar_to_json(const FieldElement& x);

// Short text forms used on the command line: "3/7", "0.55", "2^-6",
// "2^(-1/3)" (the real root 2^(-1/n), as an element of Q(2^(1/n))), or a
// Scalar JSON object. Errors: ConfigParse.
FieldElement scalar_from_text(const std::string& text);

CarpetSpec carpet_from_json(const Json& j);
Json carpet_to_json(const CarpetIFS& ifs);

}  // namespace carpetdim
