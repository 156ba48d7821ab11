#pragma once

// Dimension report for an arbitrary carpet: gathers H, the projection
// dimensions, an s value inside its certified bracket, and the resulting
// bounds and exact values.

#include <optional>
#include <string>
#include <vector>

#include "carpetdim/measure.hpp"
#include "carpetdim/overlap.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/theorem.hpp"

namespace carpetdim {

struct ReportOptions {
  std::optional<double> s;          // user value
  std::optional<bool> wsp;          // user assertion about the projected system
  std::optional<double> ad_piF;     // user value, used when no certificate decides it
  std::optional<double> dim_nu_beta;
  int h_kmax = 12;
  bool estimate_s = true;           // run the spectrum and min-bin estimators
  MeasureBudget budget;
  OverlapBudget overlap_budget;
  // Preset metadata.
  std::optional<double> known_s;
  std::string known_s_source;
  std::string beta_class;
  std::vector<std::string> notes;
};

// Certified bracket for s: lower end from the convolution bound (two-map
// family), upper end min(1, bd_piF, (log m - H)/(-log beta)).
struct SBracket {
  double lo = 0.0;
  double hi = 1.0;
  std::string lo_source;
  std::string hi_source;
};
SBracket s_bracket(const CarpetIFS& ifs, double H_lower, double bd_piF);

// Errors: MissingS (no s available), PreconditionViolation (user s outside
// the certified bracket), ConflictingEvidence, InvariantViolation.
DimensionReport build_report(const CarpetIFS& ifs, const ReportOptions& options = {});

ReportOptions preset_report_options(const Preset& p);

}  // namespace carpetdim
