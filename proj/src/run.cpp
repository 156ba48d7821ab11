#include "carpetdim/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "carpetdim/errors.hpp"
#include "carpetdim/io.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/report.hpp"
#include "carpetdim/scalar_json.hpp"

namespace carpetdim {

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"validate", "classes", "h",      "measure", "tau",
                                              "s",        "boxdim",  "assouad", "report",  "sweep"};
  return names;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::PrecisionUnreachable:
      return 3;
    case ErrorKind::InvariantViolation:
      return 4;
    default:
      return 2;
  }
}

namespace {

Json config_to_json(const RunConfig& c) {
  Json j;
  j["preset"] = c.preset ? Json(*c.preset) : Json(nullptr);
  j["carpet"] = c.carpet ? Json(*c.carpet) : Json(nullptr);
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
  j["tasks"] = c.tasks;
  j["seed"] = c.seed;
  j["budgets"] = {{"max_words", c.max_words},
                  {"max_bins", c.max_bins},
                  {"max_points", c.max_points},
                  {"max_depth", c.max_depth}};
  j["kmax"] = c.kmax;
  j["depth"] = c.depth;
  j["bins"] = c.bins;
  j["qs"] = c.qs;
  j["depths"] = c.depths;
  j["s_method"] = c.s_method;
  j["engine"] = c.engine;
  j["box_target"] = c.box_target;
  j["scales"] = c.scales;
  j["ks"] = c.ks;
  j["betas"] = c.betas;
  j["s"] = c.s ? Json(*c.s) : Json(nullptr);
  j["wsp"] = c.wsp ? Json(*c.wsp) : Json(nullptr);
  j["ad_pif"] = c.ad_pif ? Json(*c.ad_pif) : Json(nullptr);
  j["dim_nu_beta"] = c.dim_nu_beta ? Json(*c.dim_nu_beta) : Json(nullptr);
  return j;
}

struct SummaryRow {
  std::string task, key, value;
};

class Runner {
 public:
  explicit Runner(const RunConfig& c) : cfg_(c), dir_(c.out_dir) {
    budget_.max_words = c.max_words;
    budget_.max_bins = c.max_bins;
    budget_.max_points = c.max_points;
    overlap_.max_words = std::min<std::uint64_t>(c.max_words, std::uint64_t{1} << 24);
    overlap_.max_points = c.max_points;
  }

  std::vector<std::string> ordered_tasks() const {
    if (cfg_.tasks.empty()) fail(ErrorKind::ConfigParse, "no tasks requested");
    for (const auto& t : cfg_.tasks)
      if (std::find(task_names().begin(), task_names().end(), t) == task_names().end())
        fail(ErrorKind::ConfigParse, "unknown task: " + t);
    std::vector<std::string> out;
    for (const auto& t : task_names())
      if (std::find(cfg_.tasks.begin(), cfg_.tasks.end(), t) != cfg_.tasks.end()) out.push_back(t);
    return out;
  }

  void load_carpet(bool required) {
    if (cfg_.preset && cfg_.carpet) fail(ErrorKind::ConfigParse, "give either a preset or a carpet, not both");
    if (cfg_.preset) {
      preset_ = make_preset(*cfg_.preset);
      ifs_ = preset_->ifs;
    } else if (cfg_.carpet) {
      std::string text = *cfg_.carpet;
      if (text.find('{') == std::string::npos) {
        std::ifstream in(text);
        if (!in) fail(ErrorKind::ConfigParse, "cannot read carpet file " + text);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
      }
      Json j;
      try {
        j = Json::parse(text);
      } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigParse, std::string("carpet JSON: ") + e.what());
      }
      ifs_ = validate_carpet(carpet_from_json(j));
    } else if (required) {
      fail(ErrorKind::ConfigParse, "no carpet given (use --preset or --carpet)");
    }
    if (ifs_ && cfg_.alpha) {
      if (!is_pu_shape(*ifs_)) fail(ErrorKind::ConfigParse, "--alpha applies only to two-map (0,0),(1-beta,1-alpha) carpets");
      ifs_ = pu_carpet(scalar_from_text(*cfg_.alpha), ifs_->beta());
    }
  }

  void execute(const std::string& task) {
    if (task == "validate") validate();
    else if (task == "classes") classes();
    else if (task == "h") h();
    else if (task == "measure") measure();
    else if (task == "tau") tau();
    else if (task == "s") s();
    else if (task == "boxdim") boxdim();
    else if (task == "assouad") assouad();
    else if (task == "report") report();
    else if (task == "sweep") sweep();
  }

  void write_manifest(bool complete, const std::string& failed_task, const std::string& error) {
    Json m;
    m["complete"] = complete;
    m["config"] = config_to_json(cfg_);
    Json files = Json::array();
    for (const auto& f : files_) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    m["files"] = files;
    if (!complete) {
      m["failed_task"] = failed_task;
      m["error"] = error;
    }
    write_file_atomic((dir_ / "manifest.json").string(), m.dump(2) + "\n");
  }

  void print_summary(std::ostream& os) const {
    std::size_t w0 = 4, w1 = 8;
    for (const auto& r : rows_) {
      w0 = std::max(w0, r.task.size());
      w1 = std::max(w1, r.key.size());
    }
    os << std::left << std::setw(static_cast<int>(w0) + 2) << "task" << std::setw(static_cast<int>(w1) + 2)
       << "quantity"
       << "value\n";
    for (const auto& r : rows_)
      os << std::left << std::setw(static_cast<int>(w0) + 2) << r.task << std::setw(static_cast<int>(w1) + 2) << r.key
         << r.value << "\n";
  }

  std::vector<std::string> file_names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.path);
    return out;
  }

 private:
  struct FileEntry {
    std::string path, sha256;
    std::size_t bytes;
  };

  const CarpetIFS& ifs() const {
    if (!ifs_) fail(ErrorKind::ConfigParse, "this task needs a carpet");
    return *ifs_;
  }

  void emit(const std::string& name, const std::string& content) {
    write_file_atomic((dir_ / name).string(), content);
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  void row(const std::string& task, const std::string& key, const std::string& value) {
    rows_.push_back({task, key, value});
  }
  void row(const std::string& task, const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(6) << value;
    row(task, key, os.str());
  }

  void check_depth(int d) const {
    if (d < 0) fail(ErrorKind::ConfigParse, "depths must be nonnegative");
    if (d > cfg_.max_depth)
      fail(ErrorKind::BudgetExceeded, "depth " + std::to_string(d) + " exceeds max depth " + std::to_string(cfg_.max_depth));
  }

  MeasureEngine engine() const { return measure_engine_from_string(cfg_.engine); }

  const MeasureSeries& series() {
    if (!series_) {
      std::vector<int> depths = cfg_.depths.empty() ? default_depths(ifs().beta_d()) : cfg_.depths;
      for (int d : depths) check_depth(d);
      series_ = projected_measure_series(ifs(), depths, engine(), budget_);
    }
    return *series_;
  }

  const LqSpectrumEstimate& spectrum() {
    if (!spectrum_) {
      std::vector<double> qs = cfg_.qs;
      if (qs.empty()) {
        qs = {1, 2, 4, 8};
        for (double q : default_tail_qs()) qs.push_back(q);
      }
      spectrum_ = estimate_tau(series(), qs);
    }
    return *spectrum_;
  }

  void validate() {
    const auto& f = ifs();
    Json j;
    j["carpet"] = carpet_to_json(f);
    j["m"] = f.m();
    j["alpha"] = f.alpha_d();
    j["beta"] = f.beta_d();
    j["two_map_family"] = is_pu_shape(f);
    j["projection_unit_interval"] = projection_is_unit_interval(f);
    j["projection_osc"] = projection_osc(f);
    j["degenerate"] = f.degenerate();
    if (preset_) {
      j["preset"] = preset_->name;
      j["beta_class"] = to_string(preset_->beta_class);
      j["notes"] = preset_->notes;
    }
    emit("validate.json", j.dump(2) + "\n");
    row("validate", "m", std::to_string(f.m()));
    row("validate", "alpha", f.alpha_d());
    row("validate", "beta", f.beta_d());
    if (f.degenerate()) row("validate", "degenerate", "yes (m = 1)");
  }

  void classes() {
    const auto t = equivalence_classes(ifs(), cfg_.kmax, overlap_);
    Json j;
    j["k"] = t.k;
    j["words"] = t.words;
    j["class_count"] = t.class_count();
    j["max_class_size"] = t.max_class_size;
    Json nontrivial = Json::array();
    for (std::size_t c = 0; c < t.members.size(); ++c) {
      if (t.members[c].size() < 2) continue;
      Json words = Json::array();
      for (const auto& w : t.members[c]) words.push_back(w.to_string());
      nontrivial.push_back(words);
    }
    j["nontrivial_classes"] = nontrivial;
    j["members_listed"] = !t.members.empty();
    emit("classes.json", j.dump(2) + "\n");
    row("classes", "k", std::to_string(t.k));
    row("classes", "class_count", std::to_string(t.class_count()));
    row("classes", "max_class_size", std::to_string(t.max_class_size));
  }

  void h() {
    const auto est = h_lower_bound(ifs(), cfg_.kmax, overlap_);
    Csv csv({"k", "max_class_size", "H_k", "H_lower", "symbolic_min_dim"});
    double running = 0.0;
    const double log_m = std::log(static_cast<double>(ifs().m()));
    for (std::size_t i = 0; i < est.H_k.size(); ++i) {
      running = std::max(running, est.H_k[i]);
      csv.cell(static_cast<long long>(i + 1))
          .cell(static_cast<unsigned long long>(est.max_class_size[i]))
          .cell(est.H_k[i])
          .cell(running)
          .cell((log_m - running) / -std::log(ifs().beta_d()));
      csv.end_row();
    }
    emit("h.csv", csv.text());
    row("h", "H_lower", est.H_lower);
    row("h", "best_k", std::to_string(est.best_k));
    row("h", "symbolic_min_dim", est.symbolic_min_dim);
  }

  void measure() {
    check_depth(cfg_.depth);
    const auto bm = bin_projected_measure(ifs(), cfg_.depth, cfg_.bins, budget_);
    Csv csv({"bin", "left", "mass"});
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < bm.bins(); ++j) {
      csv.cell(static_cast<unsigned long long>(j))
          .cell(static_cast<double>(j) / static_cast<double>(bm.bins()))
          .cell(bm.masses_d[j]);
      csv.end_row();
      nonzero += bm.masses_d[j] > 0;
    }
    emit("measure.csv", csv.text());
    const std::string bin_path = (dir_ / "measure.cdbm").string();
    write_binned_measure(bm, bin_path + ".tmp");
    std::ostringstream raw;
    {
      std::ifstream in(bin_path + ".tmp", std::ios::binary);
      raw << in.rdbuf();
    }
    std::filesystem::rename(bin_path + ".tmp", bin_path);
    files_.push_back({"measure.cdbm", sha256_hex(raw.str()), raw.str().size()});
    row("measure", "depth", std::to_string(bm.depth));
    row("measure", "nonzero_bins", std::to_string(nonzero));
    row("measure", "total_mass", bm.total().to_string());
  }

  void tau() {
    const auto& spec = spectrum();
    Csv csv({"q", "tau_hat", "residual"});
    for (const auto& t : spec.samples) {
      csv.cell(t.q).cell(t.tau).cell(t.residual);
      csv.end_row();
    }
    emit("tau.csv", csv.text());
    row("tau", "method", spec.method);
    for (const auto& t : spec.samples)
      if (t.q == 2) row("tau", "tau_hat(2)", t.tau);
  }

  void s() {
    const std::string& m = cfg_.s_method;
    if (m != "tau" && m != "minbin" && m != "both") fail(ErrorKind::ConfigParse, "--method must be tau, minbin or both");
    Csv csv({"method", "s", "intercept", "residual", "points"});
    if (m == "tau" || m == "both") {
      const SlopeFit f = estimate_s_from_tau(spectrum());
      csv.cell("tau").cell(f.slope).cell(f.intercept).cell(f.residual).cell(static_cast<unsigned long long>(f.points));
      csv.end_row();
      row("s", "s_tau", f.slope);
    }
    if (m == "minbin" || m == "both") {
      const MinBinEstimate mb = estimate_s_min_bin(series());
      csv.cell("minbin")
          .cell(mb.fit.slope)
          .cell(mb.fit.intercept)
          .cell(mb.fit.residual)
          .cell(static_cast<unsigned long long>(mb.fit.points));
      csv.end_row();
      Csv mcsv({"depth", "bin_width", "min_bin_dim"});
      for (const auto& p : mb.series) {
        mcsv.cell(p.depth).cell(p.bin_width).cell(p.min_bin_dim);
        mcsv.end_row();
      }
      emit("minbin.csv", mcsv.text());
      row("s", "s_minbin", mb.fit.slope);
    }
    emit("s.csv", csv.text());
    if (is_pu_shape(ifs())) row("s", "convolution_bound", convolution_lower_bound(ifs().beta()));
  }

  void boxdim() {
    BoxTarget target;
    if (cfg_.box_target == "f") target = BoxTarget::Attractor;
    else if (cfg_.box_target == "pif") target = BoxTarget::Projection;
    else fail(ErrorKind::ConfigParse, "--target must be f or pif");
    std::vector<FieldElement> scales;
    if (cfg_.scales.empty()) scales = dyadic_scales(6, 14);
    for (const auto& t : cfg_.scales) scales.push_back(scalar_from_text(t));
    BoxBudget bb;
    bb.max_rects = cfg_.max_words;
    const auto series = box_count_series(ifs(), target, scales, bb);
    Csv csv({"r", "N_r"});
    Json entries = Json::array();
    for (const auto& e : series.entries) {
      csv.cell(e.r_d).cell(static_cast<unsigned long long>(e.count));
      csv.end_row();
      entries.push_back({{"r", scalar_to_json(e.r)}, {"r_approx", e.r_d}, {"count", e.count}, {"depth", e.depth}});
    }
    const std::string tag = cfg_.box_target;
    emit("boxdim_" + tag + ".csv", csv.text());
    const SlopeFit fit = fit_box_dimension(series);
    Json j;
    j["target"] = to_string(target);
    j["entries"] = entries;
    j["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"residual", fit.residual}};
    emit("boxdim_" + tag + ".json", j.dump(2) + "\n");
    row("boxdim", "dimension_" + tag, fit.slope);
  }

  void assouad() {
    const std::vector<int> ks = cfg_.ks.empty() ? default_assouad_ks(ifs()) : cfg_.ks;
    AssouadOptions opt;
    opt.seed = cfg_.seed;
    const auto est = estimate_assouad_two_scale(ifs(), ks, opt);
    Csv csv({"k", "R", "r", "n_k", "max_window_exponent"});
    for (const auto& r : est.rows) {
      csv.cell(r.k).cell(r.R).cell(r.r).cell(r.n_k).cell(r.max_window_exponent);
      csv.end_row();
    }
    emit("assouad.csv", csv.text());
    Csv wcsv({"k", "n", "anchor", "offset", "guided", "count", "exponent"});
    for (const auto& s : est.samples) {
      wcsv.cell(s.k).cell(s.n).cell(s.anchor.to_string()).cell(s.offset).cell(s.guided ? "1" : "0");
      wcsv.cell(static_cast<unsigned long long>(s.count)).cell(s.exponent);
      wcsv.end_row();
    }
    emit("assouad_windows.csv", wcsv.text());
    Json j;
    j["fit"] = {{"slope", est.fit.slope},
                {"intercept", est.fit.intercept},
                {"r2", est.fit.r2},
                {"residual", est.fit.residual}};
    j["guided_hit_rate"] = est.guided_hit_rate;
    j["notes"] = est.notes;
    emit("assouad.json", j.dump(2) + "\n");
    row("assouad", "two_scale_exponent", est.fit.slope);
    row("assouad", "guided_hit_rate", est.guided_hit_rate);
  }

  void report() {
    ReportOptions opt = preset_ ? preset_report_options(*preset_) : ReportOptions{};
    opt.s = cfg_.s;
    opt.wsp = cfg_.wsp;
    opt.ad_piF = cfg_.ad_pif;
    opt.dim_nu_beta = cfg_.dim_nu_beta;
    opt.h_kmax = cfg_.kmax;
    opt.budget = budget_;
    opt.overlap_budget = overlap_;
    const DimensionReport r = build_report(ifs(), opt);
    const Json j = report_to_json(r);
    emit("report.json", j.dump(2) + "\n");
    row("report", "s", std::to_string(r.s.value).substr(0, 8) + " (" + r.s.source + ")");
    row("report", "lower", r.bounds.lower);
    row("report", "upper", r.bounds.upper);
    row("report", "case", j["case"].dump());
    if (r.bd_F) row("report", "bd_F", *r.bd_F);
    if (r.ad_F) row("report", "ad_F", *r.ad_F);
  }

  void sweep() {
    std::vector<std::string> betas;
    for (const auto& b : cfg_.betas)
      if (b.find_first_not_of(" \t") != std::string::npos) betas.push_back(b);
    if (betas.empty()) fail(ErrorKind::ConfigParse, "sweep needs a nonempty --betas grid");
    const FieldElement alpha = scalar_from_text(cfg_.alpha.value_or("1/2"));
    Csv csv({"beta", "convolution_bound", "s_upper", "s_tau", "bd_F", "ad_F_lo", "ad_F_hi"});
    for (const auto& text : betas) {
      const FieldElement beta = scalar_from_text(text);
      const CarpetIFS f = pu_carpet(alpha, beta);
      const double lo = convolution_lower_bound(beta);
      const int kmax = std::min(cfg_.kmax, 12);
      const HEstimate h = h_lower_bound(f, kmax, overlap_);
      const SBracket br = s_bracket(f, h.H_lower, 1.0);
      const auto depths = default_depths(f.beta_d());
      for (int d : depths) check_depth(d);
      const auto ser = projected_measure_series(f, depths, engine(), budget_);
      const double s_tau = estimate_s_from_tau(estimate_tau(ser, default_tail_qs())).slope;
      const double a = f.alpha_d(), b = f.beta_d();
      csv.cell(b).cell(lo).cell(br.hi).cell(s_tau).cell(pu_box_dimension(a, b));
      csv.cell(pu_assouad_dimension(a, b, br.hi)).cell(pu_assouad_dimension(a, b, lo));
      csv.end_row();
    }
    emit("sweep.csv", csv.text());
    row("sweep", "rows", std::to_string(betas.size()));
  }

  const RunConfig& cfg_;
  std::filesystem::path dir_;
  MeasureBudget budget_;
  OverlapBudget overlap_;
  std::optional<Preset> preset_;
  std::optional<CarpetIFS> ifs_;
  std::optional<MeasureSeries> series_;
  std::optional<LqSpectrumEstimate> spectrum_;
  std::vector<FileEntry> files_;
  std::vector<SummaryRow> rows_;
};

}  // namespace

RunResult run(const RunConfig& config, std::ostream& summary) {
  RunResult result;
  Runner runner(config);
  std::vector<std::string> tasks;
  try {
    tasks = runner.ordered_tasks();
    const bool sweep_only = tasks.size() == 1 && tasks.front() == "sweep";
    runner.load_carpet(!sweep_only);
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.kind());
    result.complete = false;
    result.error = e.what();
    return result;
  }
  std::string failed;
  try {
    for (const auto& t : tasks) {
      failed = t;
      runner.execute(t);
    }
    failed.clear();
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.kind());
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 4;
    result.error = std::string("internal error: ") + e.what();
  }
  result.complete = result.exit_code == 0;
  try {
    runner.write_manifest(result.complete, failed, result.error);
  } catch (const Error& e) {
    if (result.exit_code == 0) {
      result.exit_code = exit_code_for(e.kind());
      result.error = e.what();
      result.complete = false;
    }
  }
  result.files = runner.file_names();
  result.files.push_back("manifest.json");
  runner.print_summary(summary);
  return result;
}

}  // namespace carpetdim
