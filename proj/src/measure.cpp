#include "carpetdim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "carpetdim/errors.hpp"
#include "carpetdim/parallel.hpp"

namespace carpetdim {

std::string to_string(MeasureEngine e) {
  switch (e) {
    case MeasureEngine::Exact: return "exact";
    case MeasureEngine::Quantized: return "quantized";
    case MeasureEngine::Auto: return "auto";
  }
  return "auto";
}

MeasureEngine measure_engine_from_string(const std::string& s) {
  if (s == "exact") return MeasureEngine::Exact;
  if (s == "quantized") return MeasureEngine::Quantized;
  if (s == "auto") return MeasureEngine::Auto;
  fail(ErrorKind::ConfigParse, "unknown measure engine: " + s);
}

FieldElement BinnedMeasure::total() const {
  if (!exact) fail(ErrorKind::PreconditionViolation, "total() needs exact masses");
  FieldElement t(0);
  for (const auto& x : masses) t += x;
  return t;
}

namespace {

using i128 = __int128;
struct Overflow {};

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr std::size_t kPlaceChunk = 4096;

Integer integer_from_i128(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer r(static_cast<unsigned long>(u >> 64));
  r <<= 64;
  r += Integer(static_cast<unsigned long>(u & 0xffffffffffffffffull));
  if (neg) r = -r;
  return r;
}

Integer power(std::size_t base, int e) {
  Integer r = 1;
  for (int k = 0; k < e; ++k) r *= static_cast<unsigned long>(base);
  return r;
}

void check_words(const CarpetIFS& ifs, int depth, const MeasureBudget& budget) {
  if (depth < 0) fail(ErrorKind::ParameterOutOfRange, "depth must be nonnegative");
  if (power(ifs.m(), depth) > Integer(static_cast<unsigned long>(budget.max_words)))
    fail(ErrorKind::BudgetExceeded, "m^" + std::to_string(depth) + " exceeds the word budget " +
                                        std::to_string(budget.max_words));
}

// floor(v / r), decided in doubles when the error bound allows, exactly otherwise.
struct FloorDiv {
  FieldElement r;
  double r_d;

  std::int64_t operator()(double v, double err, const std::function<FieldElement()>& exact) const {
    double y = v / r_d;
    double ey = err / r_d + std::abs(y) * 0x1p-45 + 1e-300;
    double f = std::floor(y);
    if (y - f > ey && f + 1 - y > ey && std::abs(y) < 0x1p52) return static_cast<std::int64_t>(f);
    return (exact() / r).floor().get_si();
  }
};

struct Placement {
  std::int64_t j0 = 0;  // bin holding the left endpoint
  std::int64_t j1 = 0;  // bin holding the right endpoint; may equal the bin count (zero overlap)
};

}  // namespace

// Bin j receives (R_j r + W_j w + Xs_j) / (w m^n), where R_j and W_j are
// integers and Xs_j is a signed sum of count * endpoint:
//   left bin j0:   c((j0+1) r - x)
//   inner bins:    c r
//   right bin j1:  c(x + w - j1 r)
//   single bin:    c w
BinnedMeasure bin_layer(const CarpetIFS& ifs, const EndpointLayer& layer, const FieldElement& r,
                        const MeasureBudget& budget) {
  if (r.sign() <= 0) fail(ErrorKind::ZeroBins, "bin width must be positive");
  const FieldElement one(1);
  Integer bins_z = (one / r).ceil();
  if (bins_z <= 0) fail(ErrorKind::ZeroBins, "no bins");
  if (bins_z > Integer(static_cast<unsigned long>(budget.max_bins)))
    fail(ErrorKind::BudgetExceeded, "bin count " + bins_z.get_str() + " exceeds the bin budget");
  const std::size_t bins = bins_z.get_ui();
  const auto nb = static_cast<std::int64_t>(bins);
  const FieldElement w = ifs.beta().pow(layer.depth());
  const double w_d = w.to_double();
  const FloorDiv div{r, r.to_double()};

  std::vector<Placement> placement(layer.size());
  parallel_for((layer.size() + kPlaceChunk - 1) / kPlaceChunk, [&](std::size_t ch) {
    const std::size_t end = std::min(layer.size(), (ch + 1) * kPlaceChunk);
    for (std::size_t i = ch * kPlaceChunk; i < end; ++i) {
      double err = 0;
      double x = layer.approx(i, err);
      placement[i].j0 = div(x, err, [&] { return layer.point(i); });
      double right = x + w_d;
      double right_err = err + std::abs(right) * 4 * kUnit + w_d * 0x1p-46;
      placement[i].j1 = div(right, right_err, [&] { return layer.point(i) + w; });
    }
  });

  std::vector<std::int64_t> R(bins, 0), W(bins, 0), inner(bins + 1, 0);
  for (std::size_t i = 0; i < layer.size(); ++i) {
    const auto c = static_cast<std::int64_t>(layer.count(i));
    const auto [j0, j1] = placement[i];
    if (j0 < 0 || j0 >= nb || j1 < j0 || j1 > nb) fail(ErrorKind::InvariantViolation, "cylinder leaves [0,1]");
    if (j1 == j0) {
      W[j0] += c;
      continue;
    }
    R[j0] += c * (j0 + 1);
    inner[j0 + 1] += c;
    inner[j1] -= c;
    if (j1 < nb) {
      W[j1] += c;
      R[j1] -= c * j1;
    }
  }
  std::int64_t running = 0;
  for (std::size_t j = 0; j < bins; ++j) {
    running += inner[j];
    R[j] += running;
  }

  // Endpoint sums: integer coordinates when available, field elements otherwise.
  std::vector<FieldElement> Xs(bins, FieldElement::rational(0, ifs.field()));
  bool have_sums = false;
  if (layer.integer_backed()) {
    const int d = layer.dim();
    std::vector<i128> acc(bins * d, 0);
    std::vector<char> touched(bins, 0);
    try {
      auto add = [&](std::size_t j, const std::int64_t* X, i128 c) {
        touched[j] = 1;
        for (int k = 0; k < d; ++k) {
          i128 t;
          if (__builtin_mul_overflow(c, static_cast<i128>(X[k]), &t)) throw Overflow{};
          if (__builtin_add_overflow(acc[j * d + k], t, &acc[j * d + k])) throw Overflow{};
        }
      };
      for (std::size_t i = 0; i < layer.size(); ++i) {
        const auto [j0, j1] = placement[i];
        if (j1 == j0) continue;
        const auto c = static_cast<i128>(layer.count(i));
        add(j0, layer.coords(i), -c);
        if (j1 < nb) add(j1, layer.coords(i), c);
      }
      const FieldPtr& field = layer.field();
      for (std::size_t j = 0; j < bins; ++j) {
        if (!touched[j]) continue;
        std::vector<Rational> coeffs(d);
        for (int k = 0; k < d; ++k) {
          coeffs[k] = Rational(integer_from_i128(acc[j * d + k]), layer.scale());
          coeffs[k].canonicalize();
        }
        Xs[j] = d == 1 ? FieldElement(coeffs[0]) : FieldElement(field, std::move(coeffs));
      }
      have_sums = true;
    } catch (const Overflow&) {
      std::fill(Xs.begin(), Xs.end(), FieldElement::rational(0, ifs.field()));
    }
  }
  if (!have_sums) {
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const auto [j0, j1] = placement[i];
      if (j1 == j0) continue;
      FieldElement cx = layer.point(i) * Rational(Integer(static_cast<unsigned long>(layer.count(i))));
      Xs[j0] -= cx;
      if (j1 < nb) Xs[j1] += cx;
    }
  }

  BinnedMeasure bm;
  bm.depth = layer.depth();
  bm.bin_width = r;
  bm.bin_width_d = r.to_double();
  bm.exact = true;
  bm.masses.assign(bins, FieldElement::rational(0, ifs.field()));
  bm.masses_d.assign(bins, 0.0);
  FieldElement inv = w.inverse() * Rational(Integer(1), power(ifs.m(), layer.depth()));
  for (std::size_t j = 0; j < bins; ++j) {
    if (R[j] == 0 && W[j] == 0 && Xs[j].is_zero()) continue;
    FieldElement acc = Xs[j];
    if (R[j] != 0) acc += r * Rational(Integer(static_cast<long>(R[j])));
    if (W[j] != 0) acc += w * Rational(Integer(static_cast<long>(W[j])));
    acc *= inv;
    bm.masses_d[j] = acc.to_double();
    bm.masses[j] = std::move(acc);
  }
  return bm;
}

BinnedMeasure bin_projected_measure(const CarpetIFS& ifs, int depth, const FieldElement& bin_width,
                                    const MeasureBudget& budget) {
  check_words(ifs, depth, budget);
  if (bin_width.sign() <= 0) fail(ErrorKind::ZeroBins, "bin width must be positive");
  EndpointEnumerator en(ifs, budget.max_points);
  for (int k = 0; k < depth; ++k) en.advance();
  return bin_layer(ifs, en.layer(), bin_width, budget);
}

BinnedMeasure bin_projected_measure(const CarpetIFS& ifs, int depth, std::size_t bins, const MeasureBudget& budget) {
  if (bins == 0) fail(ErrorKind::ZeroBins, "bin count must be at least 1");
  return bin_projected_measure(ifs, depth, FieldElement(Rational(1, static_cast<unsigned long>(bins))), budget);
}

double log_moment_sum(const std::vector<double>& masses, double q) {
  if (!(q > 0)) fail(ErrorKind::NonpositiveQ, "q must be positive");
  double top = 0;
  for (double x : masses) top = std::max(top, x);
  if (top <= 0) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(top);
  double s = 0;
  for (double x : masses)
    if (x > 0) s += std::exp(q * (std::log(x) - lt));
  return q * lt + std::log(s);
}

double moment_sum(const BinnedMeasure& bm, double q) { return std::exp(log_moment_sum(bm.masses_d, q)); }

std::vector<int> default_depths(double beta) {
  const int hi = std::max(3, static_cast<int>(std::ceil(std::log(1e-5) / std::log(beta))));
  const int lo = std::max(1, (hi + 1) / 2);
  std::vector<int> out;
  const int span = hi - lo;
  const int count = std::min(13, span + 1);
  for (int i = 0; i < count; ++i) {
    int n = count == 1 ? hi : lo + static_cast<int>(std::lround(static_cast<double>(span) * i / (count - 1)));
    if (out.empty() || n != out.back()) out.push_back(n);
  }
  return out;
}

std::vector<double> default_tail_qs() {
  std::vector<double> qs;
  for (int q = 16; q <= 48; q += 4) qs.push_back(q);
  return qs;
}

namespace {

std::vector<double> nonzero(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v)
    if (x > 0) out.push_back(x);
  return out;
}

void check_depths(const std::vector<int>& depths) {
  if (depths.empty()) fail(ErrorKind::ConfigParse, "empty depth schedule");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 0) fail(ErrorKind::ConfigParse, "negative depth");
    if (i > 0 && depths[i] <= depths[i - 1]) fail(ErrorKind::ConfigParse, "depths must increase");
  }
}

MeasureSeries exact_series(const CarpetIFS& ifs, const std::vector<int>& depths, const MeasureBudget& budget,
                           bool allow_field_mode) {
  check_words(ifs, depths.back(), budget);
  MeasureSeries s;
  s.engine = MeasureEngine::Exact;
  EndpointEnumerator en(ifs, budget.max_points, allow_field_mode);
  for (int n : depths) {
    while (en.layer().depth() < n) en.advance();
    FieldElement r = ifs.beta().pow(n);
    BinnedMeasure bm = bin_layer(ifs, en.layer(), r, budget);
    s.depths.push_back(n);
    s.widths.push_back(bm.bin_width_d);
    s.masses.push_back(nonzero(bm.masses_d));
  }
  return s;
}

}  // namespace

QuantizedMeasure::QuantizedMeasure(const CarpetIFS& ifs, double eps) : ifs_(&ifs), eps_(eps) {
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / eps)) + 1;
  cur_.assign(cells, 0.0);
  next_.assign(cells, 0.0);
  cur_[0] = 1.0;
}

void QuantizedMeasure::advance_to(int depth) {
  const double beta = ifs_->beta_d();
  const double m = static_cast<double>(ifs_->m());
  const auto last = static_cast<std::int64_t>(cur_.size()) - 1;
  while (depth_ < depth) {
    std::size_t nlo = cur_.size(), nhi = 0;
    for (std::size_t i = 0; i < ifs_->m(); ++i) {
      const double off = ifs_->tx_d(i) / eps_;
      for (std::size_t k = lo_; k <= hi_; ++k) {
        if (cur_[k] == 0) continue;
        auto j = std::clamp<std::int64_t>(std::llround(off + beta * static_cast<double>(k)), 0, last);
        next_[j] += cur_[k] / m;
        nlo = std::min<std::size_t>(nlo, j);
        nhi = std::max<std::size_t>(nhi, j);
      }
    }
    std::fill(cur_.begin() + lo_, cur_.begin() + hi_ + 1, 0.0);
    std::swap(cur_, next_);
    lo_ = nlo;
    hi_ = nhi;
    ++depth_;
  }
}

std::vector<double> QuantizedMeasure::bin(double width) const {
  const double w = std::pow(ifs_->beta_d(), depth_);
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / width - 1e-9)));
  const auto last = static_cast<std::int64_t>(bins) - 1;
  std::vector<double> mass(bins, 0.0);
  for (std::size_t k = lo_; k <= hi_; ++k) {
    if (cur_[k] == 0) continue;
    // Cylinder [x, x + w] against bins of the given width.
    const double x = static_cast<double>(k) * eps_;
    double a = x;
    const double b = std::min(1.0, x + w);
    auto j = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(a / width)), 0, last);
    if (b <= a) {
      mass[j] += cur_[k];
      continue;
    }
    const double len = b - a;
    while (a < b) {
      const double edge = j == last ? b : std::min(b, static_cast<double>(j + 1) * width);
      mass[j] += cur_[k] * (edge - a) / len;
      a = edge;
      if (j < last) ++j;
    }
  }
  return mass;
}

MeasureSeries quantized_measure_series(const CarpetIFS& ifs, const std::vector<int>& depths,
                                       const MeasureBudget& budget) {
  check_depths(depths);
  const double r_min = std::pow(ifs.beta_d(), depths.back());
  double eps = r_min / 8;
  if (1.0 / eps > static_cast<double>(budget.max_grid_cells)) eps = 1.0 / static_cast<double>(budget.max_grid_cells);
  QuantizedMeasure qm(ifs, eps);
  MeasureSeries s;
  s.engine = MeasureEngine::Quantized;
  for (int n : depths) {
    qm.advance_to(n);
    const double r = std::pow(ifs.beta_d(), n);
    if (std::ceil(1.0 / r) > static_cast<double>(budget.max_bins))
      fail(ErrorKind::BudgetExceeded, "bin count exceeds the bin budget");
    s.depths.push_back(n);
    s.widths.push_back(r);
    s.masses.push_back(nonzero(qm.bin(r)));
  }
  return s;
}

MeasureSeries projected_measure_series(const CarpetIFS& ifs, const std::vector<int>& depths, MeasureEngine engine,
                                       const MeasureBudget& budget) {
  check_depths(depths);
  if (engine == MeasureEngine::Quantized) return quantized_measure_series(ifs, depths, budget);
  if (engine == MeasureEngine::Exact) return exact_series(ifs, depths, budget, true);
  try {
    return exact_series(ifs, depths, budget, false);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  return quantized_measure_series(ifs, depths, budget);
}

LqSpectrumEstimate estimate_tau(const MeasureSeries& series, const std::vector<double>& qs) {
  if (series.depths.size() < 3) fail(ErrorKind::DegenerateFit, "tau needs at least 3 depths");
  if (qs.empty()) fail(ErrorKind::ConfigParse, "empty q list");
  LqSpectrumEstimate est;
  est.method = "grid-moment/" + to_string(series.engine);
  est.r_min = *std::min_element(series.widths.begin(), series.widths.end());
  est.r_max = *std::max_element(series.widths.begin(), series.widths.end());
  std::vector<double> x;
  for (double r : series.widths) x.push_back(std::log(r));
  for (double q : qs) {
    if (!(q > 0)) fail(ErrorKind::NonpositiveQ, "q must be positive");
    std::vector<double> y;
    for (const auto& masses : series.masses) y.push_back(log_moment_sum(masses, q));
    SlopeFit f = fit_line(x, y);
    est.samples.push_back({q, f.slope, f.residual});
  }
  return est;
}

LqSpectrumEstimate estimate_tau(const CarpetIFS& ifs, const std::vector<double>& qs, const std::vector<int>& depths,
                                MeasureEngine engine, const MeasureBudget& budget) {
  if (depths.size() < 3) fail(ErrorKind::DegenerateFit, "tau needs at least 3 depths");
  return estimate_tau(projected_measure_series(ifs, depths, engine, budget), qs);
}

SlopeFit estimate_s_from_tau(const LqSpectrumEstimate& spec, double q_lo, double q_hi) {
  std::vector<double> x, y;
  for (const auto& s : spec.samples) {
    if (s.q >= q_lo && s.q <= q_hi) {
      x.push_back(s.q);
      y.push_back(s.tau);
    }
  }
  if (x.size() < 3)
    fail(ErrorKind::InsufficientTail, "need 3 tau samples with q in [" + std::to_string(q_lo) + ", " +
                                          std::to_string(q_hi) + "]");
  return fit_line(x, y);
}

MinBinEstimate estimate_s_min_bin(const MeasureSeries& series) {
  if (series.depths.size() < 3) fail(ErrorKind::DegenerateFit, "min-bin needs at least 3 depths");
  MinBinEstimate est;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.depths.size(); ++i) {
    const auto& masses = series.masses[i];
    double top = masses.empty() ? 0.0 : *std::max_element(masses.begin(), masses.end());
    double lr = std::log(series.widths[i]);
    est.series.push_back({series.depths[i], series.widths[i], std::log(top) / lr});
    x.push_back(lr);
    y.push_back(std::log(top));
  }
  est.fit = fit_line(x, y);
  est.last_depth_value = est.series.back().min_bin_dim;
  return est;
}

MinBinEstimate estimate_s_min_bin(const CarpetIFS& ifs, const std::vector<int>& depths, MeasureEngine engine,
                                  const MeasureBudget& budget) {
  if (depths.size() < 3) fail(ErrorKind::DegenerateFit, "min-bin needs at least 3 depths");
  return estimate_s_min_bin(projected_measure_series(ifs, depths, engine, budget));
}

int convolution_exponent(const FieldElement& beta) {
  const FieldElement half(Rational(1, 2));
  if ((beta - half).sign() <= 0 || (beta - FieldElement(1)).sign() >= 0)
    fail(ErrorKind::ParameterOutOfRange, "convolution bound needs 1/2 < beta < 1");
  int n = 1;
  FieldElement p = beta;
  while ((p - half).sign() > 0) {
    p *= beta;
    ++n;
  }
  return n;
}

double convolution_lower_bound(const FieldElement& beta) {
  const int n = convolution_exponent(beta);
  // beta^n = 1/2 exactly gives the bound 1 with no rounding.
  if ((beta.pow(n) - FieldElement(Rational(1, 2))).is_zero()) return 1.0;
  return std::log(2.0) / (-n * std::log(beta.to_double()));
}

void write_binned_measure(const BinnedMeasure& bm, const std::string& path) {
  if (!bm.exact) fail(ErrorKind::PreconditionViolation, "only exact measures can be dumped");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::ConfigParse, "cannot write " + path);
  auto put_u64 = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  auto put_str = [&](const std::string& s) {
    put_u64(s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  };
  out.write("CDBM0001", 8);
  put_u64(static_cast<std::uint64_t>(bm.depth));
  put_u64(bm.masses.size());
  const int d = bm.masses.empty() ? 1 : bm.masses.front().field()->degree();
  put_u64(static_cast<std::uint64_t>(d));
  put_str(bm.bin_width.to_string());
  for (const auto& x : bm.masses) {
    for (int k = 0; k < d; ++k) {
      Rational c = k < static_cast<int>(x.coeffs().size()) ? x.coeffs()[k] : Rational(0);
      put_str(c.get_str());
    }
  }
}

}  // namespace carpetdim
