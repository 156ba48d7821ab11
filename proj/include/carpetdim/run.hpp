#pragma once

// Batch runs: load a carpet, execute tasks in dependency order, write CSV and
// JSON artifacts plus a manifest, and summarize.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "carpetdim/errors.hpp"
#include "carpetdim/estimators.hpp"
#include "carpetdim/measure.hpp"
#include "carpetdim/overlap.hpp"

namespace carpetdim {

struct RunConfig {
  // Carpet source: a preset name, or inline JSON / a file path.
  std::optional<std::string> preset;
  std::optional<std::string> carpet;
  std::optional<std::string> alpha;  // replaces alpha of a two-map carpet; also the sweep alpha

  std::vector<std::string> tasks;
  std::string out_dir = "carpetdim-out";
  std::uint64_t seed = 1;

  // Budgets.
  std::uint64_t max_words = std::uint64_t{1} << 28;
  std::size_t max_bins = std::size_t{1} << 24;
  std::size_t max_points = std::size_t{1} << 21;
  int max_depth = 1000;

  // Schedules and task parameters.
  int kmax = 12;
  int depth = 10;
  std::size_t bins = 1024;
  std::vector<double> qs;     // empty: 1, 2, 4, 8 and the tail grid
  std::vector<int> depths;    // empty: default_depths(beta)
  std::string s_method = "both";
  std::string engine = "auto";
  std::string box_target = "f";
  std::vector<std::string> scales;  // empty: 2^-6 .. 2^-14
  std::vector<int> ks;              // empty: default_assouad_ks
  std::vector<std::string> betas;

  // Evidence supplied by the user.
  std::optional<double> s;
  std::optional<bool> wsp;
  std::optional<double> ad_pif;
  std::optional<double> dim_nu_beta;
};

const std::vector<std::string>& task_names();

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 input, 3 budget, 4 invariant
  bool complete = true;
  std::vector<std::string> files;  // relative to out_dir
  std::string error;
};

// Never throws library errors; they become exit codes and manifest entries.
RunResult run(const RunConfig& config, std::ostream& summary);

int exit_code_for(ErrorKind kind);

}  // namespace carpetdim
