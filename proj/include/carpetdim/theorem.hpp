#pragma once

// Closed-form bounds and formulas for the Assouad dimension of carpets,
// case classification and the assembled dimension report.

#include <optional>
#include <string>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/scalar_json.hpp"

namespace carpetdim {

struct AssouadBounds {
  double lower = 0.0;
  double upper = 0.0;
  double box_term = 0.0;      // bd_piF + log(m beta^s) / (-log alpha)
  double overlap_term = 0.0;  // ad_piF + H / (-log alpha)
};

// lower = max(box_term, overlap_term), upper = ad_piF + log(m beta^s)/(-log alpha).
// Errors: PreconditionViolation naming the failing inequality.
AssouadBounds assouad_bounds(int m, double alpha, double beta, double s, double H, double bd_piF, double ad_piF);

// (log m - H) / (-log beta).
double symbolic_min_dim(int m, double beta, double H);

// Two-map family with translations (0,0) and (1-beta, 1-alpha).
double pu_box_dimension(double alpha, double beta);              // 1 + log(2 beta)/(-log alpha)
double pu_assouad_dimension(double alpha, double beta, double s);  // 1 + log(2 beta^s)/(-log alpha)

struct HuResult {
  FieldElement beta;
  double s = 0.0;
};
// beta_k root of x^k + ... + x = 1 and s = log(phi)/(k log beta_k) - log 2/log beta_k.
// Errors: ParameterOutOfRange unless 2 <= k <= 12.
HuResult hu_s_multinacci(int k);
double hu_formula(double beta_k, int k);

// (2 - ad_F_upper) log 2 / (-log beta). Errors: ParameterOutOfRange.
double alpha_half_inversion(double ad_F_upper, double beta);

struct CaseClassification {
  int case_id = 0;  // 1, 2, 3 or 0 for none
  std::vector<int> valid_cases;
  std::vector<std::string> evidence;
  std::string beta_class;  // preset metadata when known
};

struct CorollaryEvidence {
  std::optional<double> s;
  std::optional<double> H_lower;
  std::optional<bool> wsp;  // user assertion
  double tolerance = 0.02;
};

// pi F = [0,1] when the first-level projected intervals cover [0,1] (then
// [0,1] is invariant, hence the projected attractor).
bool projection_is_unit_interval(const CarpetIFS& ifs);
// First-level projected intervals have pairwise disjoint interiors.
bool projection_osc(const CarpetIFS& ifs);

// Errors: ConflictingEvidence when the WSP flag is false but OSC is certified.
CaseClassification classify_corollary(const CarpetIFS& ifs, const CorollaryEvidence& ev);

struct SValue {
  double value = 0.0;
  std::string source;  // tau-fit | min-bin | convolution-bound | user | Hu-formula
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
};

struct DimensionReport {
  int m = 0;
  FieldElement alpha;
  FieldElement beta;
  double alpha_d = 0.0;
  double beta_d = 0.0;
  SValue s;
  double H_lower = 0.0;
  int H_kmax = 0;
  double symbolic_min_dim = 0.0;
  double bd_piF = 1.0;
  std::string bd_piF_source;
  double ad_piF = 1.0;
  std::string ad_piF_source;
  AssouadBounds bounds;
  CaseClassification classification;
  std::optional<double> bd_F;
  std::optional<double> ad_F;
  std::optional<double> hd_F_lower;
  bool degenerate = false;
  std::vector<std::string> notes;
  Json empirical = Json::object();
};

// Two-map family report. s must carry a value and a source.
// Errors: ParameterOutOfRange, MissingS.
DimensionReport pu_report(const FieldElement& alpha, const FieldElement& beta, const std::optional<SValue>& s,
                          std::optional<double> dim_nu_beta = std::nullopt);

Json report_to_json(const DimensionReport& r);

}  // namespace carpetdim
