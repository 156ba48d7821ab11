#pragma once

// Projected Bernoulli measure on interval grids, grid moment sums, the L^q
// spectrum and two estimators of the asymptote slope s.

#include <cstdint>
#include <string>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/endpoints.hpp"
#include "carpetdim/fit.hpp"

namespace carpetdim {

struct MeasureBudget {
  std::uint64_t max_words = std::uint64_t{1} << 28;   // m^depth
  std::size_t max_points = std::size_t{1} << 21;      // distinct endpoints per layer
  std::size_t max_bins = std::size_t{1} << 24;
  std::size_t max_grid_cells = std::size_t{1} << 22;  // quantized engine
};

enum class MeasureEngine { Exact, Quantized, Auto };
std::string to_string(MeasureEngine e);
MeasureEngine measure_engine_from_string(const std::string& s);

// Bin j covers [j r, (j+1) r); the last bin is closed at 1.
struct BinnedMeasure {
  int depth = 0;
  FieldElement bin_width;
  double bin_width_d = 0.0;
  bool exact = false;
  std::vector<FieldElement> masses;  // empty unless exact
  std::vector<double> masses_d;

  std::size_t bins() const { return masses_d.size(); }
  FieldElement total() const;  // requires exact
};

// Every depth-n word puts mass m^-n on [x0, x0 + beta^n], split across bins in
// proportion to overlap length. Exact throughout.
// Errors: ZeroBins, BudgetExceeded.
BinnedMeasure bin_projected_measure(const CarpetIFS& ifs, int depth, std::size_t bins,
                                    const MeasureBudget& budget = {});
BinnedMeasure bin_projected_measure(const CarpetIFS& ifs, int depth, const FieldElement& bin_width,
                                    const MeasureBudget& budget = {});
// Binning of an already enumerated layer.
BinnedMeasure bin_layer(const CarpetIFS& ifs, const EndpointLayer& layer, const FieldElement& bin_width,
                        const MeasureBudget& budget = {});

// Sum over nonzero bins of mass^q. Errors: NonpositiveQ.
double moment_sum(const BinnedMeasure& bm, double q);
// log of the moment sum, computed without underflow.
double log_moment_sum(const std::vector<double>& masses, double q);

// Depths n_hi/2 .. n_hi with beta^n_hi just below 1e-5, thinned to at most 13.
std::vector<int> default_depths(double beta);
std::vector<double> default_tail_qs();  // 16, 20, ..., 48

// Nonzero bin masses (as doubles) at width beta^n for each scheduled depth.
struct MeasureSeries {
  std::vector<int> depths;
  std::vector<double> widths;
  std::vector<std::vector<double>> masses;
  MeasureEngine engine = MeasureEngine::Exact;
};

// Auto runs the exact engine and falls back to the quantized one when a
// budget or the integer representation gives out.
MeasureSeries projected_measure_series(const CarpetIFS& ifs, const std::vector<int>& depths,
                                       MeasureEngine engine = MeasureEngine::Auto,
                                       const MeasureBudget& budget = {});

// Projected measure with endpoints snapped to a grid of spacing eps; masses in
// doubles. Drift from snapping is at most eps / (2 (1 - beta)).
class QuantizedMeasure {
 public:
  QuantizedMeasure(const CarpetIFS& ifs, double eps);
  int depth() const { return depth_; }
  void advance_to(int depth);
  // Masses of the bins [j w, (j+1) w), last bin closed at 1, for cylinders of
  // the current depth split proportionally.
  std::vector<double> bin(double width) const;

 private:
  const CarpetIFS* ifs_;
  double eps_;
  std::vector<double> cur_, next_;
  std::size_t lo_ = 0, hi_ = 0;
  int depth_ = 0;
};

// Quantized engine: endpoints snapped to a grid of spacing eps = min width / 8
// (coarsened to respect max_grid_cells); masses in doubles.
MeasureSeries quantized_measure_series(const CarpetIFS& ifs, const std::vector<int>& depths,
                                       const MeasureBudget& budget = {});

struct TauSample {
  double q = 0.0;
  double tau = 0.0;
  double residual = 0.0;
};

struct LqSpectrumEstimate {
  std::vector<TauSample> samples;
  double r_min = 0.0;
  double r_max = 0.0;
  std::string method;  // "grid-moment/exact" or "grid-moment/quantized"
};

LqSpectrumEstimate estimate_tau(const MeasureSeries& series, const std::vector<double>& qs);
LqSpectrumEstimate estimate_tau(const CarpetIFS& ifs, const std::vector<double>& qs, const std::vector<int>& depths,
                                MeasureEngine engine = MeasureEngine::Auto, const MeasureBudget& budget = {});

// Fits tau(q) = s q - c over q in [q_lo, q_hi]; intercept holds -c.
// Errors: InsufficientTail (fewer than 3 samples in the window).
SlopeFit estimate_s_from_tau(const LqSpectrumEstimate& spec, double q_lo = 16, double q_hi = 48);

struct MinBinPoint {
  int depth = 0;
  double bin_width = 0.0;
  double min_bin_dim = 0.0;  // log(max mass) / log(width)
};

struct MinBinEstimate {
  std::vector<MinBinPoint> series;
  SlopeFit fit;  // log(max mass) against log(width); slope estimates s
  double last_depth_value = 0.0;
};

MinBinEstimate estimate_s_min_bin(const MeasureSeries& series);
MinBinEstimate estimate_s_min_bin(const CarpetIFS& ifs, const std::vector<int>& depths,
                                  MeasureEngine engine = MeasureEngine::Auto, const MeasureBudget& budget = {});

// log 2 / (-n log beta) with beta^n <= 1/2 < beta^(n-1); n found exactly.
// Errors: ParameterOutOfRange unless 1/2 < beta < 1.
double convolution_lower_bound(const FieldElement& beta);
int convolution_exponent(const FieldElement& beta);

// Binary cache of exact masses: header then length-prefixed decimal rationals.
void write_binned_measure(const BinnedMeasure& bm, const std::string& path);

}  // namespace carpetdim
