#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "carpetdim/errors.hpp"
#include "carpetdim/estimators.hpp"
#include "carpetdim/measure.hpp"
#include "carpetdim/overlap.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/report.hpp"
#include "carpetdim/run.hpp"
#include "carpetdim/scalar_json.hpp"
#include "carpetdim/theorem.hpp"

namespace py = pybind11;
using namespace carpetdim;

namespace {

CarpetIFS load_carpet(const std::string& preset_or_json) {
  if (!preset_or_json.empty() && preset_or_json.front() == '{')
    return validate_carpet(carpet_from_json(Json::parse(preset_or_json)));
  return make_preset(preset_or_json).ifs;
}

std::string report_json(const std::string& carpet, std::optional<double> s, std::optional<bool> wsp,
                        std::optional<double> ad_pif, bool estimate_s) {
  ReportOptions opts;
  if (carpet.empty() || carpet.front() != '{') opts = preset_report_options(make_preset(carpet));
  opts.s = s;
  opts.wsp = wsp;
  opts.ad_piF = ad_pif;
  opts.estimate_s = estimate_s;
  py::gil_scoped_release release;
  return report_to_json(build_report(load_carpet(carpet), opts)).dump();
}

py::dict classes(const std::string& carpet, int k) {
  const auto t = equivalence_classes(load_carpet(carpet), k);
  py::list members;
  for (const auto& c : t.members) {
    py::list cls;
    for (const auto& w : c) cls.append(w.to_string());
    members.append(cls);
  }
  py::dict d;
  d["k"] = t.k;
  d["words"] = t.words;
  d["sizes"] = t.sizes;
  d["max_class_size"] = t.max_class_size;
  d["members"] = members;
  return d;
}

py::dict h_bound(const std::string& carpet, int k_max) {
  const auto h = h_lower_bound(load_carpet(carpet), k_max);
  py::dict d;
  d["H_k"] = h.H_k;
  d["max_class_size"] = h.max_class_size;
  d["best_k"] = h.best_k;
  d["H_lower"] = h.H_lower;
  d["symbolic_min_dim"] = h.symbolic_min_dim;
  return d;
}

std::vector<double> bins(const std::string& carpet, int depth, std::size_t count) {
  return bin_projected_measure(load_carpet(carpet), depth, count).masses_d;
}

std::uint64_t box_count(const std::string& carpet, const std::string& r, const std::string& target) {
  const auto ifs = load_carpet(carpet);
  const auto scale = scalar_from_text(r);
  if (target == "f") return box_count_attractor(ifs, scale).count;
  if (target == "pif") return box_count_projection(ifs, scale).count;
  fail(ErrorKind::ConfigParse, "target must be f or pif");
}

py::dict assouad(const std::string& carpet, std::vector<int> ks, std::uint64_t seed) {
  const auto ifs = load_carpet(carpet);
  if (ks.empty()) ks = default_assouad_ks(ifs);
  AssouadOptions o;
  o.seed = seed;
  AssouadEstimate e;
  {
    py::gil_scoped_release release;
    e = estimate_assouad_two_scale(ifs, ks, o);
  }
  py::list rows;
  for (const auto& r : e.rows) {
    py::dict row;
    row["k"] = r.k;
    row["n_k"] = r.n_k;
    row["R"] = r.R;
    row["r"] = r.r;
    row["max_count"] = r.max_count;
    row["max_window_exponent"] = r.max_window_exponent;
    rows.append(row);
  }
  py::dict d;
  d["exponent"] = e.fit.slope;
  d["residual"] = e.fit.residual;
  d["rows"] = rows;
  d["notes"] = e.notes;
  return d;
}

py::dict bounds(int m, double alpha, double beta, double s, double H, double bd_pif, double ad_pif) {
  const auto b = assouad_bounds(m, alpha, beta, s, H, bd_pif, ad_pif);
  py::dict d;
  d["lower"] = b.lower;
  d["upper"] = b.upper;
  d["box_term"] = b.box_term;
  d["overlap_term"] = b.overlap_term;
  return d;
}

py::tuple run_tasks(const std::string& json_config) {
  const Json j = Json::parse(json_config);
  RunConfig c;
  if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
  if (j.contains("carpet")) c.carpet = j["carpet"].is_string() ? j["carpet"].get<std::string>() : j["carpet"].dump();
  if (j.contains("alpha")) c.alpha = j["alpha"].get<std::string>();
  c.tasks = j.value("tasks", std::vector<std::string>{});
  c.out_dir = j.value("out_dir", c.out_dir);
  c.seed = j.value("seed", c.seed);
  c.kmax = j.value("kmax", c.kmax);
  c.depth = j.value("depth", c.depth);
  c.bins = j.value("bins", c.bins);
  c.depths = j.value("depths", c.depths);
  c.qs = j.value("qs", c.qs);
  c.scales = j.value("scales", c.scales);
  c.ks = j.value("ks", c.ks);
  c.betas = j.value("betas", c.betas);
  c.engine = j.value("engine", c.engine);
  c.box_target = j.value("target", c.box_target);
  c.s_method = j.value("method", c.s_method);
  if (j.contains("s")) c.s = j["s"].get<double>();
  if (j.contains("wsp")) c.wsp = j["wsp"].get<bool>();
  if (j.contains("ad_pif")) c.ad_pif = j["ad_pif"].get<double>();
  std::ostringstream summary;
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run(c, summary);
  }
  return py::make_tuple(r.exit_code, r.complete, r.files, r.error, summary.str());
}

}  // namespace

PYBIND11_MODULE(_carpetdim, m) {
  m.doc() = "Dimension bounds and estimators for self-affine carpets";

  // Messages start with the error kind, e.g. "OrderViolation: ...".
  py::register_exception<Error>(m, "CarpetdimError");

  m.def("preset_names", &preset_names);
  m.def("carpet_json", [](const std::string& c) { return carpet_to_json(load_carpet(c)).dump(); }, py::arg("carpet"));
  m.def("equivalence_classes", &classes, py::arg("carpet"), py::arg("k"));
  m.def("h_lower_bound", &h_bound, py::arg("carpet"), py::arg("k_max"));
  m.def("bin_projected_measure", &bins, py::arg("carpet"), py::arg("depth"), py::arg("bins"));
  m.def("convolution_lower_bound", [](const std::string& beta) { return convolution_lower_bound(scalar_from_text(beta)); },
        py::arg("beta"));
  m.def("box_count", &box_count, py::arg("carpet"), py::arg("r"), py::arg("target") = "f");
  m.def("assouad_two_scale", &assouad, py::arg("carpet"), py::arg("ks") = std::vector<int>{}, py::arg("seed") = 1);
  m.def("assouad_bounds", &bounds, py::arg("m"), py::arg("alpha"), py::arg("beta"), py::arg("s"), py::arg("H"),
        py::arg("bd_pif"), py::arg("ad_pif"));
  m.def("hu_s_multinacci", [](int k) {
    const auto h = hu_s_multinacci(k);
    return py::make_tuple(h.beta.to_double(), h.s);
  }, py::arg("k"));
  m.def("report_json", &report_json, py::arg("carpet"), py::arg("s") = py::none(), py::arg("wsp") = py::none(),
        py::arg("ad_pif") = py::none(), py::arg("estimate_s") = true);
  m.def("run_json", &run_tasks, py::arg("config"));
}
