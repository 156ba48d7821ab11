// carpetdim: dimension bounds and estimators for self-affine carpets.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "carpetdim/presets.hpp"
#include "carpetdim/run.hpp"

int main(int argc, char** argv) {
  using carpetdim::RunConfig;
  RunConfig cfg;
  CLI::App app{"Assouad and box dimensions of self-affine carpets"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string preset, carpet, alpha, wsp;
  double s = -1, ad_pif = -1, dim_nu_beta = -1;
  app.add_option("--preset", preset, "shipped carpet")->check(CLI::IsMember(carpetdim::preset_names()));
  app.add_option("--carpet", carpet, "carpet JSON, inline or a file path");
  app.add_option("--alpha", alpha, "replace alpha of a two-map carpet (also the sweep alpha)");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--seed", cfg.seed, "seed for window sampling");
  app.add_option("--max-words", cfg.max_words, "budget on m^depth");
  app.add_option("--max-bins", cfg.max_bins, "budget on bins per grid");
  app.add_option("--max-points", cfg.max_points, "budget on distinct endpoints per layer");
  app.add_option("--max-depth", cfg.max_depth, "largest allowed depth");
  app.add_option("--engine", cfg.engine, "measure engine")->check(CLI::IsMember({"auto", "exact", "quantized"}));
  app.add_option("--wsp", wsp, "assert the weak separation property of the projection")
      ->check(CLI::IsMember({"true", "false"}));
  app.add_option("--ad-pif", ad_pif, "Assouad dimension of the projection, when known");
  app.add_option("--dim-nu-beta", dim_nu_beta, "dimension of the projected measure, for the Hausdorff lower bound");
  app.add_option("--s", s, "value of s to use in the report");

  auto* validate = app.add_subcommand("validate", "check the carpet and describe it");
  auto* classes = app.add_subcommand("classes", "equivalence classes of words of length K");
  auto* h = app.add_subcommand("h", "overlap exponent lower bounds H_k");
  for (auto* sub : {classes, h}) sub->add_option("--kmax", cfg.kmax, "word length")->check(CLI::Range(1, 40));
  auto* measure = app.add_subcommand("measure", "exact projected measure on a grid");
  measure->add_option("--depth", cfg.depth, "cylinder depth");
  measure->add_option("--bins", cfg.bins, "number of bins")->check(CLI::PositiveNumber);
  auto* tau = app.add_subcommand("tau", "L^q spectrum estimate");
  tau->add_option("--qs", cfg.qs, "q values")->delimiter(',');
  auto* s_cmd = app.add_subcommand("s", "estimate s");
  s_cmd->add_option("--method", cfg.s_method, "estimator")->check(CLI::IsMember({"tau", "minbin", "both"}));
  for (auto* sub : {tau, s_cmd}) sub->add_option("--depths", cfg.depths, "depth schedule")->delimiter(',');
  auto* boxdim = app.add_subcommand("boxdim", "box counting");
  boxdim->add_option("--target", cfg.box_target, "f or pif")->check(CLI::IsMember({"f", "pif"}));
  boxdim->add_option("--scales", cfg.scales, "scales such as 2^-6 or 1/100")->delimiter(',');
  auto* assouad = app.add_subcommand("assouad", "two-scale Assouad estimate");
  assouad->add_option("--ks", cfg.ks, "localization levels k")->delimiter(',');
  auto* report = app.add_subcommand("report", "dimension report");
  auto* sweep = app.add_subcommand("sweep", "sweep beta for the two-map family");
  sweep->add_option("--betas", cfg.betas, "beta grid, e.g. 0.51,0.55,2^(-1/2)")->delimiter(',');

  auto* run = app.add_subcommand("run", "several tasks in one run");
  std::vector<std::string> tasks;
  run->add_option("--task", tasks, "tasks")->delimiter(',')->required();
  run->add_option("--kmax", cfg.kmax)->check(CLI::Range(1, 40));
  run->add_option("--depth", cfg.depth);
  run->add_option("--bins", cfg.bins)->check(CLI::PositiveNumber);
  run->add_option("--qs", cfg.qs)->delimiter(',');
  run->add_option("--depths", cfg.depths)->delimiter(',');
  run->add_option("--method", cfg.s_method)->check(CLI::IsMember({"tau", "minbin", "both"}));
  run->add_option("--target", cfg.box_target)->check(CLI::IsMember({"f", "pif"}));
  run->add_option("--scales", cfg.scales)->delimiter(',');
  run->add_option("--ks", cfg.ks)->delimiter(',');
  run->add_option("--betas", cfg.betas)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    cfg.tasks = tasks;
  } else {
    for (auto* sub : {validate, classes, h, measure, tau, s_cmd, boxdim, assouad, report, sweep})
      if (sub->parsed()) cfg.tasks = {sub->get_name()};
  }
  if (!preset.empty()) cfg.preset = preset;
  if (!carpet.empty()) cfg.carpet = carpet;
  if (!alpha.empty()) cfg.alpha = alpha;
  if (!wsp.empty()) cfg.wsp = wsp == "true";
  if (s >= 0) cfg.s = s;
  if (ad_pif >= 0) cfg.ad_pif = ad_pif;
  if (dim_nu_beta >= 0) cfg.dim_nu_beta = dim_nu_beta;

  const auto result = carpetdim::run(cfg, std::cout);
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.error << "\n";
    if (result.exit_code == 3) std::cerr << "partial outputs kept; manifest marks the run incomplete\n";
  }
  return result.exit_code;
}
