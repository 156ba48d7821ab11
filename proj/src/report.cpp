#include "carpetdim/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carpetdim/errors.hpp"
#include "carpetdim/estimators.hpp"

namespace carpetdim {

namespace {

constexpr double kSlack = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Box dimension of the projection from counts at scales beta^j.
double fitted_projection_dimension(const CarpetIFS& ifs) {
  std::vector<FieldElement> scales;
  FieldElement r = ifs.beta();
  for (int j = 1; r.to_double() > 1e-5 && j <= 40; ++j) {
    if (j >= 3) scales.push_back(r);
    r *= ifs.beta();
  }
  return fit_box_dimension(box_count_series(ifs, BoxTarget::Projection, scales)).slope;
}

}  // namespace

SBracket s_bracket(const CarpetIFS& ifs, double H_lower, double bd_piF) {
  SBracket b;
  b.lo = 0.0;
  b.lo_source = "trivial";
  if (is_pu_shape(ifs)) {
    b.lo = convolution_lower_bound(ifs.beta());
    b.lo_source = "convolution-bound";
  }
  b.hi = 1.0;
  b.hi_source = "trivial";
  if (bd_piF < b.hi) {
    b.hi = bd_piF;
    b.hi_source = "bd_piF";
  }
  const double smd = symbolic_min_dim(static_cast<int>(ifs.m()), ifs.beta_d(), H_lower);
  if (smd < b.hi) {
    b.hi = smd;
    b.hi_source = "symbolic-min-dim";
  }
  return b;
}

ReportOptions preset_report_options(const Preset& p) {
  ReportOptions o;
  o.known_s = p.s_known;
  o.known_s_source = p.s_source;
  o.beta_class = to_string(p.beta_class);
  o.notes = p.notes;
  return o;
}

DimensionReport build_report(const CarpetIFS& ifs, const ReportOptions& opt) {
  DimensionReport r;
  r.m = static_cast<int>(ifs.m());
  r.alpha = ifs.alpha();
  r.beta = ifs.beta();
  r.alpha_d = ifs.alpha_d();
  r.beta_d = ifs.beta_d();
  r.notes = opt.notes;
  r.classification.beta_class = opt.beta_class;
  const double la = -std::log(r.alpha_d), lb = -std::log(r.beta_d);
  const double log_m = std::log(static_cast<double>(r.m));

  if (ifs.degenerate()) {
    // One map: F and pi F are single points.
    r.degenerate = true;
    r.s = {0.0, "degenerate", 0.0, 0.0};
    r.bd_piF = r.ad_piF = 0.0;
    r.bd_piF_source = r.ad_piF_source = "exact: single point";
    r.bounds = assouad_bounds(1, r.alpha_d, r.beta_d, 0.0, 0.0, 0.0, 0.0);
    r.bd_F = r.ad_F = 0.0;
    r.notes.push_back("m = 1: the attractor is a point; s is set to 0 by convention");
    return r;
  }

  // H from exact classes, with k_max reduced so that m^k stays in budget.
  int kmax = opt.h_kmax;
  while (kmax > 1 && std::pow(static_cast<double>(r.m), kmax) > static_cast<double>(opt.overlap_budget.max_words))
    --kmax;
  HEstimate h = h_lower_bound(ifs, kmax, opt.overlap_budget);
  r.H_lower = h.H_lower;
  r.H_kmax = kmax;
  r.symbolic_min_dim = h.symbolic_min_dim;

  // Projection dimensions.
  const bool unit = projection_is_unit_interval(ifs);
  const bool osc = projection_osc(ifs);
  if (opt.wsp.has_value() && !*opt.wsp && osc)
    fail(ErrorKind::ConflictingEvidence, "WSP flagged false but the projected open set condition holds");
  if (unit) {
    r.bd_piF = 1.0;
    r.bd_piF_source = "exact: piF = [0,1]";
  } else if (osc) {
    r.bd_piF = std::min(1.0, log_m / lb);
    r.bd_piF_source = "exact: similarity dimension under the open set condition";
  } else {
    r.bd_piF = std::min(1.0, fitted_projection_dimension(ifs));
    r.bd_piF_source = "box-count fit";
  }
  std::optional<double> ad_piF;
  if (unit) {
    ad_piF = 1.0;
    r.ad_piF_source = "exact: piF = [0,1]";
  } else if (osc || opt.wsp.value_or(false)) {
    ad_piF = r.bd_piF;
    r.ad_piF_source = osc ? "equal to bd_piF: open set condition" : "equal to bd_piF: weak separation (user)";
  } else if (opt.wsp.has_value()) {
    ad_piF = 1.0;
    r.ad_piF_source = "1: weak separation fails (user)";
  } else if (opt.ad_piF) {
    if (*opt.ad_piF < r.bd_piF - kSlack || *opt.ad_piF > 1 + kSlack)
      fail(ErrorKind::PreconditionViolation, "user ad_piF must lie in [bd_piF, 1]");
    ad_piF = *opt.ad_piF;
    r.ad_piF_source = "user";
  }

  // s: certified bracket, then the best available value inside it.
  SBracket br = s_bracket(ifs, r.H_lower, r.bd_piF);
  if (br.lo > br.hi + kSlack)
    fail(ErrorKind::InvariantViolation, "s bracket is empty: " + fmt(br.lo) + " > " + fmt(br.hi));
  r.s.bracket_lo = br.lo;
  r.s.bracket_hi = br.hi;
  Json emp = Json::object();
  std::optional<double> s_tau, s_min;
  if (opt.estimate_s) {
    try {
      const auto depths = default_depths(r.beta_d);
      MeasureSeries series = projected_measure_series(ifs, depths, MeasureEngine::Auto, opt.budget);
      LqSpectrumEstimate spec = estimate_tau(series, default_tail_qs());
      SlopeFit ft = estimate_s_from_tau(spec);
      MinBinEstimate mb = estimate_s_min_bin(series);
      s_tau = ft.slope;
      s_min = mb.fit.slope;
      emp["engine"] = to_string(series.engine);
      emp["depths"] = series.depths;
      emp["s_tau"] = ft.slope;
      emp["s_tau_residual"] = ft.residual;
      emp["s_minbin"] = mb.fit.slope;
      emp["s_minbin_last_depth"] = mb.last_depth_value;
    } catch (const Error& e) {
      emp["error"] = e.what();
    }
  }
  r.empirical = emp;

  auto inside = [&](double v) { return v >= br.lo - kSlack && v <= br.hi + kSlack; };
  if (opt.s) {
    if (!inside(*opt.s))
      fail(ErrorKind::PreconditionViolation, "user s = " + fmt(*opt.s) + " lies outside the certified bracket [" +
                                                 fmt(br.lo) + ", " + fmt(br.hi) + "]");
    r.s.value = *opt.s;
    r.s.source = "user";
  } else if (opt.known_s && inside(*opt.known_s)) {
    r.s.value = *opt.known_s;
    r.s.source = opt.known_s_source;
  } else if (br.hi - br.lo <= kSlack) {
    r.s.value = br.lo;
    r.s.source = br.lo_source;
  } else if (s_tau) {
    r.s.value = std::clamp(*s_tau, br.lo, br.hi);
    r.s.source = "tau-fit";
    if (std::abs(r.s.value - *s_tau) > 1e-9) r.notes.push_back("tau-fit estimate " + fmt(*s_tau) + " clamped into the certified bracket");
  } else if (s_min) {
    r.s.value = std::clamp(*s_min, br.lo, br.hi);
    r.s.source = "min-bin";
  } else {
    fail(ErrorKind::MissingS, "no value of s is available; supply one");
  }
  if (opt.known_s && !inside(*opt.known_s))
    r.notes.push_back("known value s = " + fmt(*opt.known_s) + " (" + opt.known_s_source +
                      ") lies outside the certified bracket and was not used");
  r.s.value = std::clamp(r.s.value, std::max(0.0, br.lo), std::min(1.0, br.hi));

  // Bounds. Without a value of ad_piF the lower bound uses bd_piF and the upper 1.
  if (ad_piF) {
    r.ad_piF = *ad_piF;
    r.bounds = assouad_bounds(r.m, r.alpha_d, r.beta_d, r.s.value, r.H_lower, r.bd_piF, r.ad_piF);
  } else {
    r.ad_piF = 1.0;
    r.ad_piF_source = "unknown: lower bound uses bd_piF, upper bound uses 1";
    AssouadBounds lo = assouad_bounds(r.m, r.alpha_d, r.beta_d, r.s.value, r.H_lower, r.bd_piF, r.bd_piF);
    AssouadBounds hi = assouad_bounds(r.m, r.alpha_d, r.beta_d, r.s.value, r.H_lower, r.bd_piF, 1.0);
    r.bounds = lo;
    r.bounds.upper = hi.upper;
    r.notes.push_back("ad_piF is not decided by a certificate; supply --wsp or --ad-pif to tighten the bounds");
  }

  r.classification = classify_corollary(ifs, {r.s.value, r.H_lower, opt.wsp, 0.02});
  r.classification.beta_class = opt.beta_class;
  const int c = r.classification.case_id;
  r.bd_F = r.bd_piF + (log_m - r.bd_piF * lb) / la;
  if (c != 0) {
    r.ad_F = r.bounds.upper;
    if (c == 3 && std::abs(r.bounds.upper - r.bounds.lower) > kSlack)
      r.notes.push_back("case 3 holds within tolerance; ad_F is the upper bound, which exceeds the lower by " +
                        fmt(r.bounds.upper - r.bounds.lower));
    else if (std::abs(r.bounds.upper - r.bounds.lower) > 1e-9)
      fail(ErrorKind::InvariantViolation, "corollary case " + std::to_string(c) + " but the bounds do not collapse");
  }
  if (opt.dim_nu_beta && is_pu_shape(ifs)) r.hd_F_lower = *opt.dim_nu_beta + std::log(2 * r.beta_d) / la;

  if (is_pu_shape(ifs) && r.ad_F) {
    const bool s_is_one = r.s.value == 1.0;
    if (s_is_one != (std::abs(*r.ad_F - *r.bd_F) <= kSlack))
      fail(ErrorKind::InvariantViolation, "bd_F = ad_F must hold exactly when s = 1");
  }
  for (double v : {r.bounds.lower, r.bounds.upper, *r.bd_F})
    if (v < -kSlack || v > 2 + kSlack) fail(ErrorKind::InvariantViolation, "dimension outside [0, 2]");
  return r;
}

}  // namespace carpetdim
