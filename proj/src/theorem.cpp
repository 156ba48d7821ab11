#include "carpetdim/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carpetdim/errors.hpp"
#include "carpetdim/overlap.hpp"

namespace carpetdim {

namespace {

constexpr double kSlack = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

AssouadBounds assouad_bounds(int m, double alpha, double beta, double s, double H, double bd_piF, double ad_piF) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::PreconditionViolation, what);
  };
  require(m >= 1, "m >= 1");
  require(alpha > 0 && alpha < beta && beta < 1, "0 < alpha < beta < 1");
  require(s >= -kSlack, "s >= 0");
  require(s <= std::min(bd_piF, 1.0) + kSlack, "s <= min(bd_piF, 1)");
  require(H >= -kSlack && H <= std::log(static_cast<double>(m)) + kSlack, "0 <= H <= log m");
  require(bd_piF <= ad_piF + kSlack, "bd_piF <= ad_piF");
  require(ad_piF <= 1 + kSlack, "ad_piF <= 1");

  const double la = -std::log(alpha);
  const double gain = (std::log(static_cast<double>(m)) + s * std::log(beta)) / la;
  AssouadBounds b;
  b.box_term = bd_piF + gain;
  b.overlap_term = ad_piF + H / la;
  b.lower = std::max(b.box_term, b.overlap_term);
  b.upper = ad_piF + gain;
  require(b.lower <= b.upper + kSlack, "s <= (log m - H)/(-log beta) (lower bound exceeds upper bound)");
  return b;
}

double symbolic_min_dim(int m, double beta, double H) { return (std::log(static_cast<double>(m)) - H) / -std::log(beta); }

double pu_box_dimension(double alpha, double beta) { return 1 + std::log(2 * beta) / -std::log(alpha); }

double pu_assouad_dimension(double alpha, double beta, double s) {
  return 1 + (std::log(2.0) + s * std::log(beta)) / -std::log(alpha);
}

double hu_formula(double beta_k, int k) {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  return std::log(phi) / (k * std::log(beta_k)) - std::log(2.0) / std::log(beta_k);
}

HuResult hu_s_multinacci(int k) {
  if (k < 2 || k > 12) fail(ErrorKind::ParameterOutOfRange, "multinacci index must be in [2, 12]");
  // x + ... + x^k - 1 is increasing on (0, 1); bisect for a starting point.
  auto f = [k](double x) {
    double s = 0, p = 1;
    for (int i = 0; i < k; ++i) {
      p *= x;
      s += p;
    }
    return s - 1;
  };
  double lo = 0.5, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    double mid = (lo + hi) / 2;
    (f(mid) > 0 ? hi : lo) = mid;
  }
  std::vector<Integer> minpoly(k + 1, Integer(1));
  minpoly[0] = -1;
  auto field = arith::NumberField::from_root_near(minpoly, (lo + hi) / 2);
  HuResult r;
  r.beta = field->degree() == 1 ? FieldElement(Rational(1, 2)) : FieldElement::generator(field);
  r.s = hu_formula(r.beta.to_double(), k);
  return r;
}

double alpha_half_inversion(double ad_F_upper, double beta) {
  if (!(ad_F_upper >= 1 && ad_F_upper <= 2)) fail(ErrorKind::ParameterOutOfRange, "ad_F_upper must lie in [1, 2]");
  if (!(beta > 0 && beta < 1)) fail(ErrorKind::ParameterOutOfRange, "beta must lie in (0, 1)");
  return (2 - ad_F_upper) * std::log(2.0) / -std::log(beta);
}

namespace {

// First-level projected intervals sorted by left endpoint (exact order).
std::vector<FieldElement> sorted_translations(const CarpetIFS& ifs) {
  std::vector<FieldElement> t;
  for (const auto& map : ifs.maps()) t.push_back(map.tx);
  std::sort(t.begin(), t.end(), [](const FieldElement& a, const FieldElement& b) { return a < b; });
  return t;
}

}  // namespace

bool projection_is_unit_interval(const CarpetIFS& ifs) {
  auto t = sorted_translations(ifs);
  if (!t.front().is_zero()) return false;
  FieldElement reach = t.front() + ifs.beta();
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] > reach) return false;
    FieldElement end = t[i] + ifs.beta();
    if (end > reach) reach = end;
  }
  return reach == FieldElement(1) || reach > FieldElement(1);
}

bool projection_osc(const CarpetIFS& ifs) {
  auto t = sorted_translations(ifs);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] < t[i - 1] + ifs.beta()) return false;
  return true;
}

CaseClassification classify_corollary(const CarpetIFS& ifs, const CorollaryEvidence& ev) {
  CaseClassification c;
  const bool unit = projection_is_unit_interval(ifs);
  const bool osc = projection_osc(ifs);
  if (ev.wsp.has_value() && !*ev.wsp && osc)
    fail(ErrorKind::ConflictingEvidence, "WSP flagged false but the projected open set condition holds");
  if (unit) {
    c.valid_cases.push_back(1);
    c.evidence.push_back("case 1: first-level projected intervals cover [0,1], so piF = [0,1] and bd piF = 1");
  }
  if (osc) {
    c.valid_cases.push_back(2);
    c.evidence.push_back("case 2: projected open set condition certified (first-level intervals have disjoint interiors)");
  } else if (ev.wsp.value_or(false)) {
    c.valid_cases.push_back(2);
    c.evidence.push_back("case 2: weak separation asserted by the user");
  }
  if (ev.s && ev.H_lower) {
    double smd = symbolic_min_dim(static_cast<int>(ifs.m()), ifs.beta_d(), *ev.H_lower);
    if (std::abs(*ev.s - smd) <= ev.tolerance) {
      c.valid_cases.push_back(3);
      c.evidence.push_back("case 3: |s - (log m - H_lower)/(-log beta)| = " + fmt(std::abs(*ev.s - smd)) +
                           " <= " + fmt(ev.tolerance));
    }
  }
  c.case_id = c.valid_cases.empty() ? 0 : c.valid_cases.front();
  return c;
}

DimensionReport pu_report(const FieldElement& alpha, const FieldElement& beta, const std::optional<SValue>& s,
                          std::optional<double> dim_nu_beta) {
  CarpetIFS ifs = pu_carpet(alpha, beta);
  if (!s) fail(ErrorKind::MissingS, "the two-map report needs a value of s");
  if (!(s->value >= 0 && s->value <= 1)) fail(ErrorKind::ParameterOutOfRange, "s must lie in [0, 1]");

  DimensionReport r;
  r.m = 2;
  r.alpha = ifs.alpha();
  r.beta = ifs.beta();
  r.alpha_d = ifs.alpha_d();
  r.beta_d = ifs.beta_d();
  r.s = *s;
  HEstimate h = h_lower_bound(ifs, 12);
  r.H_lower = h.H_lower;
  r.H_kmax = 12;
  r.symbolic_min_dim = h.symbolic_min_dim;
  r.bd_piF = 1.0;
  r.bd_piF_source = "exact: piF = [0,1]";
  r.ad_piF = 1.0;
  r.ad_piF_source = "exact: piF = [0,1]";
  r.bounds = assouad_bounds(2, r.alpha_d, r.beta_d, s->value, r.H_lower, 1.0, 1.0);
  r.classification = classify_corollary(ifs, {s->value, r.H_lower, std::nullopt, 0.02});
  r.bd_F = pu_box_dimension(r.alpha_d, r.beta_d);
  r.ad_F = pu_assouad_dimension(r.alpha_d, r.beta_d, s->value);
  if (dim_nu_beta) r.hd_F_lower = *dim_nu_beta + std::log(2 * r.beta_d) / -std::log(r.alpha_d);

  if (std::abs(r.bounds.lower - r.bounds.upper) > 1e-12 || std::abs(*r.ad_F - r.bounds.upper) > 1e-12)
    fail(ErrorKind::InvariantViolation, "case-1 bounds do not collapse");
  const bool s_is_one = s->value == 1.0;
  if (s_is_one != (std::abs(*r.ad_F - *r.bd_F) <= 1e-12))
    fail(ErrorKind::InvariantViolation, "bd_F = ad_F must hold exactly when s = 1");
  if (!s_is_one && !(*r.bd_F < *r.ad_F)) fail(ErrorKind::InvariantViolation, "bd_F < ad_F expected for s < 1");
  return r;
}

namespace {

Json exact_and_approx(const FieldElement& x) { return Json{{"exact", scalar_to_json(x)}, {"approx", x.to_double()}}; }

}  // namespace

Json report_to_json(const DimensionReport& r) {
  Json j;
  j["inputs"] = {{"m", r.m}, {"alpha", exact_and_approx(r.alpha)}, {"beta", exact_and_approx(r.beta)}};
  j["s"] = {{"value", r.s.value}, {"source", r.s.source}, {"bracket", {r.s.bracket_lo, r.s.bracket_hi}}};
  j["H_lower"] = r.H_lower;
  j["H_kmax"] = r.H_kmax;
  j["symbolic_min_dim"] = r.symbolic_min_dim;
  j["bd_piF"] = {{"value", r.bd_piF}, {"source", r.bd_piF_source}};
  j["ad_piF"] = {{"value", r.ad_piF}, {"source", r.ad_piF_source}};
  j["bounds"] = {{"lower", r.bounds.lower},
                 {"upper", r.bounds.upper},
                 {"box_term", r.bounds.box_term},
                 {"overlap_term", r.bounds.overlap_term}};
  j["case"] = r.classification.case_id == 0 ? Json("none") : Json(r.classification.case_id);
  j["case_evidence"] = r.classification.evidence;
  j["valid_cases"] = r.classification.valid_cases;
  if (!r.classification.beta_class.empty()) j["beta_class"] = r.classification.beta_class;
  j["bd_F"] = r.bd_F ? Json(*r.bd_F) : Json(nullptr);
  j["ad_F"] = r.ad_F ? Json(*r.ad_F) : Json(nullptr);
  if (r.hd_F_lower) j["hd_F_lower"] = *r.hd_F_lower;
  j["degenerate"] = r.degenerate;
  j["notes"] = r.notes;
  j["empirical"] = r.empirical;
  return j;
}

}  // namespace carpetdim
