#pragma once

// Box counting for F and its projection, and the two-scale Assouad estimator
// built on tube windows R = alpha^k, r = alpha^(n(k)+k).
//
// F is approximated at scale r by depth-n cylinder rectangles with
// alpha^n <= r, each refined horizontally by the depth-l projected union with
// beta^(n+l) <= r (approximate squares). For carpets whose projection is
// [0,1] the refinement is trivial.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/fit.hpp"

namespace carpetdim {

struct BoxBudget {
  std::uint64_t max_rects = std::uint64_t{1} << 24;     // rectangles times refinement intervals
  std::size_t max_intervals = std::size_t{1} << 22;     // projected union size
};

enum class BoxTarget { Attractor, Projection };
std::string to_string(BoxTarget t);

// Closed intervals of the depth-n projected union, sorted and merged
// (touching intervals are joined). Exact. Errors: BudgetExceeded.
std::vector<std::pair<FieldElement, FieldElement>> projected_union(const CarpetIFS& ifs, int depth,
                                                                   std::size_t max_intervals = std::size_t{1} << 22);

struct BoxCount {
  std::uint64_t count = 0;
  int depth = 0;       // cylinder depth used
  int refinement = 0;  // depth of the horizontal refinement (attractor only)
};

// Cells [j r, (j+1) r) meeting the interior of the approximating set; the
// last cell is clipped at 1. Errors: ParameterOutOfRange unless 0 < r < 1,
// BudgetExceeded.
BoxCount box_count_projection(const CarpetIFS& ifs, const FieldElement& r, const BoxBudget& budget = {});
BoxCount box_count_attractor(const CarpetIFS& ifs, const FieldElement& r, const BoxBudget& budget = {});

struct BoxCountEntry {
  FieldElement r;
  double r_d = 0.0;
  std::uint64_t count = 0;
  int depth = 0;
};

struct BoxCountSeries {
  BoxTarget target = BoxTarget::Attractor;
  std::vector<BoxCountEntry> entries;
};

BoxCountSeries box_count_series(const CarpetIFS& ifs, BoxTarget target, const std::vector<FieldElement>& scales,
                                const BoxBudget& budget = {});

// Slope of log N_r against log(1/r). Needs at least 4 scales with
// r_max / r_min >= 100. Errors: InsufficientScales.
SlopeFit fit_box_dimension(const BoxCountSeries& series);

// 2^-lo, ..., 2^-hi.
std::vector<FieldElement> dyadic_scales(int lo, int hi);

// n(k): beta^(n+1) < (alpha/beta)^k <= beta^n, decided exactly.
int coupling_depth(const CarpetIFS& ifs, int k);

struct AssouadOptions {
  std::uint64_t seed = 1;
  int tiles_per_k = 12;    // sampled tube offsets j (alpha/beta)^k
  int anchors_per_k = 2;   // random anchor cylinders besides 1...1
  std::uint64_t max_rects = std::uint64_t{1} << 22;  // per window
};

struct AssouadWindowSample {
  int k = 0;
  int n = 0;
  Word anchor;          // localizing level-k cylinder
  double offset = 0.0;  // tube offset u in [0, 1 - (alpha/beta)^k], relative to the anchor
  bool guided = false;  // measure-guided tube
  double R = 0.0;
  double r = 0.0;
  std::uint64_t count = 0;
  double exponent = 0.0;  // log count / log(R / r)
};

struct AssouadRow {
  int k = 0;
  double R = 0.0;
  double r = 0.0;
  int n_k = 0;
  std::uint64_t max_count = 0;
  double max_window_exponent = 0.0;
  bool guided_is_max = false;
};

struct AssouadEstimate {
  std::vector<AssouadWindowSample> samples;
  std::vector<AssouadRow> rows;
  SlopeFit fit;  // log max count against log(R / r)
  double guided_hit_rate = 0.0;
  std::vector<std::string> notes;
};

// ks with n(k) running over 4 .. n_hi, smallest k for each n, where
// alpha^-n_hi stays below 2^24.
std::vector<int> default_assouad_ks(const CarpetIFS& ifs);

// Errors: ParameterOutOfRange (empty k list, n(k) = 0), BudgetExceeded,
// DegenerateFit (fewer than 3 distinct n(k)).
AssouadEstimate estimate_assouad_two_scale(const CarpetIFS& ifs, const std::vector<int>& ks,
                                           const AssouadOptions& options = {});

}  // namespace carpetdim
