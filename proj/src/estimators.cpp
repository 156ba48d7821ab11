#include "carpetdim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "carpetdim/errors.hpp"
#include "carpetdim/measure.hpp"
#include "carpetdim/parallel.hpp"

namespace carpetdim {

std::string to_string(BoxTarget t) { return t == BoxTarget::Attractor ? "attractor" : "projection"; }

namespace {

using Interval = std::pair<FieldElement, FieldElement>;

// floor(x) with a double fast path; falls back to the exact floor near integers.
std::int64_t floor_i(const FieldElement& x) {
  double err = 0;
  const double v = x.double_eval(err);
  const double a = std::floor(v - err), b = std::floor(v + err);
  if (a == b && std::isfinite(a)) return static_cast<std::int64_t>(a);
  return x.floor().get_si();
}

// Cell range [floor(a/r), ceil(b/r) - 1] of cells whose interiors meet (a, b),
// clamped to [0, cells - 1]; empty when a >= b.
bool cell_range(const FieldElement& a_scaled, const FieldElement& b_scaled, std::int64_t cells, std::int64_t& lo,
                std::int64_t& hi) {
  lo = floor_i(a_scaled);
  hi = -floor_i(-b_scaled) - 1;
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, cells - 1);
  return lo <= hi;
}

struct RowRun {
  std::int64_t row, lo, hi;
  friend bool operator<(const RowRun& a, const RowRun& b) {
    return std::tie(a.row, a.lo, a.hi) < std::tie(b.row, b.lo, b.hi);
  }
};

// Number of distinct cells covered by the runs.
std::uint64_t count_cells(std::vector<RowRun>& runs) {
  std::sort(runs.begin(), runs.end());
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < runs.size()) {
    const std::int64_t row = runs[i].row;
    std::int64_t lo = runs[i].lo, hi = runs[i].hi;
    for (++i; i < runs.size() && runs[i].row == row; ++i) {
      if (runs[i].lo > hi + 1) {
        total += static_cast<std::uint64_t>(hi - lo + 1);
        lo = runs[i].lo;
        hi = runs[i].hi;
      } else {
        hi = std::max(hi, runs[i].hi);
      }
    }
    total += static_cast<std::uint64_t>(hi - lo + 1);
  }
  return total;
}

void check_scale(const FieldElement& r) {
  if (!(r.sign() > 0 && r < FieldElement(1))) fail(ErrorKind::ParameterOutOfRange, "scale r must lie in (0, 1)");
}

// Smallest n >= 0 with ratio^n <= r.
int depth_for(const FieldElement& ratio, const FieldElement& r) {
  int n = 0;
  FieldElement p(1);
  while (p > r) {
    p *= ratio;
    ++n;
  }
  return n;
}

std::int64_t cells_for(const FieldElement& inv_r) { return -floor_i(-inv_r); }

}  // namespace

std::vector<Interval> projected_union(const CarpetIFS& ifs, int depth, std::size_t max_intervals) {
  std::vector<Interval> cur{{FieldElement(0), FieldElement(1)}};
  for (int level = 0; level < depth; ++level) {
    std::vector<Interval> next;
    next.reserve(cur.size() * ifs.m());
    for (const auto& map : ifs.maps())
      for (const auto& [a, b] : cur) next.emplace_back(map.tx + ifs.beta() * a, map.tx + ifs.beta() * b);
    std::sort(next.begin(), next.end(), [](const Interval& x, const Interval& y) { return x.first < y.first; });
    cur.clear();
    for (auto& iv : next) {
      if (!cur.empty() && iv.first <= cur.back().second) {
        if (iv.second > cur.back().second) cur.back().second = iv.second;
      } else {
        cur.push_back(std::move(iv));
      }
    }
    if (cur.size() > max_intervals) fail(ErrorKind::BudgetExceeded, "projected union exceeds the interval budget");
  }
  return cur;
}

BoxCount box_count_projection(const CarpetIFS& ifs, const FieldElement& r, const BoxBudget& budget) {
  check_scale(r);
  BoxCount out;
  out.depth = depth_for(ifs.beta(), r);
  const FieldElement inv_r = r.inverse();
  const std::int64_t cells = cells_for(inv_r);
  std::vector<RowRun> runs;
  for (const auto& [a, b] : projected_union(ifs, out.depth, budget.max_intervals)) {
    std::int64_t lo, hi;
    if (cell_range(a * inv_r, b * inv_r, cells, lo, hi)) runs.push_back({0, lo, hi});
  }
  out.count = count_cells(runs);
  return out;
}

BoxCount box_count_attractor(const CarpetIFS& ifs, const FieldElement& r, const BoxBudget& budget) {
  check_scale(r);
  BoxCount out;
  const int n = depth_for(ifs.alpha(), r);
  out.depth = n;
  // Horizontal refinement: beta^(n+l) <= r.
  const FieldElement beta_n = ifs.beta().pow(static_cast<unsigned>(n));
  out.refinement = depth_for(ifs.beta(), r / beta_n);
  const auto refine = projected_union(ifs, out.refinement, budget.max_intervals);

  const std::size_t m = ifs.m();
  const double words = std::pow(static_cast<double>(m), n);
  if (words * static_cast<double>(refine.size()) > static_cast<double>(budget.max_rects))
    fail(ErrorKind::BudgetExceeded, "cylinder rectangles exceed the rectangle budget");

  const FieldElement inv_r = r.inverse();
  const std::int64_t cells = cells_for(inv_r);
  // Scaled quantities: everything below is measured in units of r.
  std::vector<std::vector<FieldElement>> step_x(n), step_y(n);
  {
    FieldElement bp(1), ap(1);
    for (int j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        step_x[j].push_back(ifs.maps()[i].tx * bp * inv_r);
        step_y[j].push_back(ifs.maps()[i].ty * ap * inv_r);
      }
      bp *= ifs.beta();
      ap *= ifs.alpha();
    }
  }
  const FieldElement height = ifs.alpha().pow(static_cast<unsigned>(n)) * inv_r;
  std::vector<Interval> refine_scaled;
  for (const auto& [a, b] : refine) refine_scaled.emplace_back(beta_n * a * inv_r, beta_n * b * inv_r);

  // Split the word tree at a prefix depth and enumerate subtrees in parallel.
  int prefix = 0;
  std::size_t tasks = 1;
  while (prefix < n && tasks < 256) {
    tasks *= m;
    ++prefix;
  }
  std::vector<std::vector<RowRun>> parts(tasks);
  parallel_for(tasks, [&](std::size_t t) {
    FieldElement x(0), y(0);
    std::size_t code = t;
    for (int j = prefix - 1; j >= 0; --j) {
      const std::size_t letter = code % m;
      code /= m;
      x += step_x[j][letter];
      y += step_y[j][letter];
    }
    auto& runs = parts[t];
    std::vector<FieldElement> xs{x}, ys{y};
    std::vector<std::size_t> next{0};
    // Iterative DFS over letters at levels prefix .. n-1.
    const int span = n - prefix;
    auto emit = [&](const FieldElement& x0, const FieldElement& y0) {
      std::int64_t rlo, rhi;
      if (!cell_range(y0, y0 + height, cells, rlo, rhi)) return;
      for (const auto& [a, b] : refine_scaled) {
        std::int64_t lo, hi;
        if (!cell_range(x0 + a, x0 + b, cells, lo, hi)) continue;
        for (std::int64_t row = rlo; row <= rhi; ++row) runs.push_back({row, lo, hi});
      }
    };
    if (span == 0) {
      emit(x, y);
      return;
    }
    while (!next.empty()) {
      const std::size_t level = next.size() - 1;
      if (next.back() == m) {
        next.pop_back();
        xs.pop_back();
        ys.pop_back();
        if (!next.empty()) ++next.back();
        continue;
      }
      const std::size_t letter = next.back();
      FieldElement cx = xs.back() + step_x[prefix + level][letter];
      FieldElement cy = ys.back() + step_y[prefix + level][letter];
      if (static_cast<int>(level) + 1 == span) {
        emit(cx, cy);
        ++next.back();
      } else {
        xs.push_back(std::move(cx));
        ys.push_back(std::move(cy));
        next.push_back(0);
      }
    }
  });
  std::vector<RowRun> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  out.count = count_cells(all);
  return out;
}

BoxCountSeries box_count_series(const CarpetIFS& ifs, BoxTarget target, const std::vector<FieldElement>& scales,
                                const BoxBudget& budget) {
  BoxCountSeries s;
  s.target = target;
  for (const auto& r : scales) {
    BoxCount c = target == BoxTarget::Attractor ? box_count_attractor(ifs, r, budget)
                                                : box_count_projection(ifs, r, budget);
    s.entries.push_back({r, r.to_double(), c.count, c.depth});
  }
  return s;
}

SlopeFit fit_box_dimension(const BoxCountSeries& series) {
  std::vector<double> x, y;
  double r_min = 1, r_max = 0;
  for (const auto& e : series.entries) {
    if (e.count == 0) continue;
    x.push_back(-std::log(e.r_d));
    y.push_back(std::log(static_cast<double>(e.count)));
    r_min = std::min(r_min, e.r_d);
    r_max = std::max(r_max, e.r_d);
  }
  if (x.size() < 4 || r_max / r_min < 100)
    fail(ErrorKind::InsufficientScales, "box dimension fit needs at least 4 scales spanning 2 decades");
  return fit_line(x, y, 4);
}

std::vector<FieldElement> dyadic_scales(int lo, int hi) {
  std::vector<FieldElement> out;
  for (int e = lo; e <= hi; ++e) {
    Rational r(1);
    r /= Rational(Integer(1) << e);
    out.emplace_back(r);
  }
  return out;
}

int coupling_depth(const CarpetIFS& ifs, int k) {
  if (k < 1) fail(ErrorKind::ParameterOutOfRange, "k must be positive");
  // (alpha/beta)^k <= beta^n  <=>  alpha^k <= beta^(n+k).
  const FieldElement ak = ifs.alpha().pow(static_cast<unsigned>(k));
  const double guess = k * std::log(ifs.alpha_d() / ifs.beta_d()) / std::log(ifs.beta_d());
  int n = std::max(0, static_cast<int>(std::floor(guess)) - 1);
  FieldElement bp = ifs.beta().pow(static_cast<unsigned>(n + k));
  if (!(ak <= bp)) {
    while (!(ak <= bp) && n > 0) {
      --n;
      bp = ifs.beta().pow(static_cast<unsigned>(n + k));
    }
    return n;
  }
  for (;;) {
    FieldElement nb = bp * ifs.beta();
    if (!(ak <= nb)) return n;
    bp = std::move(nb);
    ++n;
  }
}

std::vector<int> default_assouad_ks(const CarpetIFS& ifs) {
  const int n_hi = std::max(8, static_cast<int>(std::floor(24 * std::log(2.0) / -std::log(ifs.alpha_d()))));
  std::vector<int> ks;
  int want = 4;
  for (int k = 1; want <= n_hi && k < 10000; ++k) {
    // Double estimate first; exact check only when it might match.
    const double guess = k * std::log(ifs.alpha_d() / ifs.beta_d()) / std::log(ifs.beta_d());
    if (guess + 1 < want) continue;
    const int n = coupling_depth(ifs, k);
    if (n >= want) {
      ks.push_back(k);
      want = n + 1;
    }
  }
  return ks;
}

namespace {

// Window [X, X+R] x [Y, Y+R] in window coordinates: xi = (x - X)/beta^k,
// eta = (y - Y)/alpha^k, so the window is [0, rho] x [0, 1].
struct Neighbor {
  double dx = 0, dy = 0;
};

std::vector<Neighbor> find_neighbors(const CarpetIFS& ifs, int k, const FieldElement& X, const FieldElement& Y,
                                     const FieldElement& R) {
  const std::size_t m = ifs.m();
  std::vector<FieldElement> bp{FieldElement(1)}, ap{FieldElement(1)};
  for (int j = 0; j < k; ++j) {
    bp.push_back(bp.back() * ifs.beta());
    ap.push_back(ap.back() * ifs.alpha());
  }
  const FieldElement inv_bk = bp[k].inverse(), inv_ak = ap[k].inverse();
  const FieldElement XR = X + R, YR = Y + R;
  std::vector<Neighbor> out;
  struct Node {
    FieldElement x, y;
    int level;
  };
  std::vector<Node> stack{{FieldElement(0), FieldElement(0), 0}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.level == k) {
      out.push_back({((node.x - X) * inv_bk).to_double(), ((node.y - Y) * inv_ak).to_double()});
      continue;
    }
    const int j = node.level;
    for (std::size_t i = m; i-- > 0;) {
      FieldElement cx = node.x + ifs.maps()[i].tx * bp[j];
      FieldElement cy = node.y + ifs.maps()[i].ty * ap[j];
      // Open rectangle against the open window.
      if (!(cy < YR) || !(cy + ap[j + 1] > Y)) continue;
      if (!(cx < XR) || !(cx + bp[j + 1] > X)) continue;
      stack.push_back({std::move(cx), std::move(cy), j + 1});
    }
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return std::tie(a.dx, a.dy) < std::tie(b.dx, b.dy);
  });
  return out;
}

struct WindowGeometry {
  int n = 0;
  long double rho = 0;
  long double cw = 0, ch = 0;  // cell width and height in window coordinates
  std::int64_t cols = 0, rows = 0;
  std::vector<long double> bpow, apow;  // beta^j, alpha^j for j <= n
  std::vector<std::pair<long double, long double>> refine;  // projected union at depth l, F coordinates
};

std::vector<std::pair<long double, long double>> union_ld(const CarpetIFS& ifs, int depth, std::size_t cap) {
  std::vector<std::pair<long double, long double>> cur{{0.0L, 1.0L}};
  const long double b = ifs.beta_d();
  for (int level = 0; level < depth; ++level) {
    std::vector<std::pair<long double, long double>> next;
    for (std::size_t i = 0; i < ifs.m(); ++i)
      for (const auto& [a, c] : cur) next.emplace_back(ifs.tx_d(i) + b * a, ifs.tx_d(i) + b * c);
    std::sort(next.begin(), next.end());
    cur.clear();
    for (const auto& iv : next) {
      if (!cur.empty() && iv.first <= cur.back().second)
        cur.back().second = std::max(cur.back().second, iv.second);
      else
        cur.push_back(iv);
    }
    if (cur.size() > cap) fail(ErrorKind::BudgetExceeded, "projected union exceeds the interval budget");
  }
  return cur;
}

std::uint64_t count_window(const CarpetIFS& ifs, const WindowGeometry& g, const std::vector<Neighbor>& nbrs,
                           std::uint64_t max_rects) {
  const std::size_t m = ifs.m();
  const int n = g.n;
  std::vector<RowRun> runs;
  std::uint64_t leaves = 0;
  auto clamp_cells = [](long double lo_c, long double hi_c, std::int64_t cells, std::int64_t& lo, std::int64_t& hi) {
    lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(lo_c)));
    hi = std::min<std::int64_t>(cells - 1, static_cast<std::int64_t>(std::ceil(hi_c)) - 1);
    return lo <= hi;
  };
  for (const auto& nb : nbrs) {
    struct Node {
      long double x, y;
      int level;
    };
    std::vector<Node> stack{{static_cast<long double>(nb.dx), static_cast<long double>(nb.dy), 0}};
    while (!stack.empty()) {
      Node node = stack.back();
      stack.pop_back();
      const int j = node.level;
      if (j == n) {
        if (++leaves > max_rects) fail(ErrorKind::BudgetExceeded, "window rectangles exceed the budget");
        std::int64_t rlo, rhi;
        if (!clamp_cells(node.y / g.ch, (node.y + g.apow[n]) / g.ch, g.rows, rlo, rhi)) continue;
        // Refinement intervals meeting (0, rho) horizontally.
        const long double w = g.bpow[n];
        auto it = std::lower_bound(g.refine.begin(), g.refine.end(), -node.x / w,
                                   [](const auto& iv, long double v) { return iv.second <= v; });
        for (; it != g.refine.end(); ++it) {
          const long double a = node.x + w * it->first, b = node.x + w * it->second;
          if (a >= g.rho) break;
          std::int64_t lo, hi;
          if (b <= a || !clamp_cells(a / g.cw, b / g.cw, g.cols, lo, hi)) continue;
          for (std::int64_t row = rlo; row <= rhi; ++row) runs.push_back({row, lo, hi});
        }
        continue;
      }
      for (std::size_t i = m; i-- > 0;) {
        const long double cx = node.x + ifs.tx_d(i) * g.bpow[j];
        const long double cy = node.y + ifs.ty_d(i) * g.apow[j];
        if (cy >= 1 || cy + g.apow[j + 1] <= 0) continue;
        if (cx >= g.rho || cx + g.bpow[j + 1] <= 0) continue;
        stack.push_back({cx, cy, j + 1});
      }
    }
  }
  return count_cells(runs);
}

Word uniform_word(std::size_t m, int k, std::mt19937_64& rng) {
  std::vector<std::uint32_t> letters(k);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(m - 1));
  for (auto& l : letters) l = pick(rng);
  return Word(std::move(letters));
}

}  // namespace

AssouadEstimate estimate_assouad_two_scale(const CarpetIFS& ifs, const std::vector<int>& ks_in,
                                           const AssouadOptions& options) {
  if (ks_in.empty()) fail(ErrorKind::ParameterOutOfRange, "k list is empty");
  std::vector<int> ks = ks_in;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const double alpha = ifs.alpha_d(), beta = ifs.beta_d();
  std::vector<int> ns;
  for (int k : ks) {
    const int n = coupling_depth(ifs, k);
    if (n < 1) fail(ErrorKind::ParameterOutOfRange, "n(k) = 0 for k = " + std::to_string(k));
    ns.push_back(n);
  }

  // Quantized projected measure for locating the heaviest tube at each scale.
  const double rho_min = std::pow(alpha / beta, ks.back());
  double eps = rho_min / 8;
  eps = std::max(eps, 1.0 / static_cast<double>(std::size_t{1} << 22));
  QuantizedMeasure qm(ifs, eps);

  AssouadEstimate est;
  int guided_hits = 0;
  for (std::size_t idx = 0; idx < ks.size(); ++idx) {
    const int k = ks[idx], n = ns[idx];
    const double rho = std::pow(alpha / beta, k);

    WindowGeometry g;
    g.n = n;
    g.rho = rho;
    for (int j = 0; j <= n; ++j) {
      g.bpow.push_back(std::pow(static_cast<long double>(beta), j));
      g.apow.push_back(std::pow(static_cast<long double>(alpha), j));
    }
    g.ch = g.apow[n];
    g.cw = g.rho * g.apow[n];
    g.rows = static_cast<std::int64_t>(std::llround(1 / g.apow[n]));
    g.cols = g.rows;
    // beta^(n+l) <= cell width.
    int l = 0;
    while (g.bpow[n] * std::pow(static_cast<long double>(beta), l) > g.cw * (1 + 1e-12L)) ++l;
    g.refine = union_ld(ifs, l, std::size_t{1} << 22);

    // Offsets: measure-guided tube, its half shifts, and a seeded tile sample.
    int qdepth = qm.depth();
    while (std::pow(beta, qdepth) > rho / 4) ++qdepth;
    qm.advance_to(qdepth);
    const auto masses = qm.bin(rho);
    const auto jstar = static_cast<std::size_t>(std::max_element(masses.begin(), masses.end()) - masses.begin());
    const double umax = std::max(0.0, 1 - rho);
    struct Offset {
      double u;
      bool guided;
    };
    std::vector<Offset> offsets;
    for (double shift : {0.0, -0.5, 0.5})
      offsets.push_back({std::clamp((static_cast<double>(jstar) + shift) * rho, 0.0, umax), true});
    std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
    const auto tiles = static_cast<std::uint64_t>(std::floor(umax / rho)) + 1;
    if (tiles <= static_cast<std::uint64_t>(options.tiles_per_k)) {
      for (std::uint64_t t = 0; t < tiles; ++t) offsets.push_back({std::min(umax, static_cast<double>(t) * rho), false});
    } else {
      std::uniform_int_distribution<std::uint64_t> pick(0, tiles - 1);
      for (int t = 0; t < options.tiles_per_k; ++t)
        offsets.push_back({std::min(umax, static_cast<double>(pick(rng)) * rho), false});
    }
    std::vector<Word> anchors{Word(std::vector<std::uint32_t>(k, 0))};
    for (int a = 0; a < options.anchors_per_k; ++a) anchors.push_back(uniform_word(ifs.m(), k, rng));

    std::vector<AssouadWindowSample> samples;
    for (const auto& w : anchors)
      for (const auto& off : offsets) {
        AssouadWindowSample s;
        s.k = k;
        s.n = n;
        s.anchor = w;
        s.offset = off.u;
        s.guided = off.guided;
        s.R = std::pow(alpha, k);
        s.r = std::pow(alpha, n + k);
        samples.push_back(std::move(s));
      }

    const FieldElement R = ifs.alpha().pow(static_cast<unsigned>(k));
    const FieldElement bk = ifs.beta().pow(static_cast<unsigned>(k));
    const double log_ratio = n * -std::log(alpha);
    parallel_for(samples.size(), [&](std::size_t i) {
      auto& s = samples[i];
      const CylinderRect rect = compose_cylinder(ifs, s.anchor);
      const FieldElement X = rect.x0 + bk * Rational(s.offset);
      const FieldElement Y = rect.y0;
      const auto nbrs = find_neighbors(ifs, k, X, Y, R);
      s.count = count_window(ifs, g, nbrs, options.max_rects);
      s.exponent = s.count > 0 ? std::log(static_cast<double>(s.count)) / log_ratio : 0.0;
    });

    AssouadRow row;
    row.k = k;
    row.n_k = n;
    row.R = std::pow(alpha, k);
    row.r = std::pow(alpha, n + k);
    std::uint64_t guided_max = 0;
    for (const auto& s : samples) {
      row.max_count = std::max(row.max_count, s.count);
      if (s.guided) guided_max = std::max(guided_max, s.count);
    }
    row.max_window_exponent = row.max_count > 0 ? std::log(static_cast<double>(row.max_count)) / log_ratio : 0.0;
    row.guided_is_max = guided_max == row.max_count;
    guided_hits += row.guided_is_max;
    est.rows.push_back(row);
    for (auto& s : samples) est.samples.push_back(std::move(s));
  }
  est.guided_hit_rate = static_cast<double>(guided_hits) / static_cast<double>(ks.size());

  std::vector<double> x, y;
  for (const auto& row : est.rows) {
    if (row.max_count == 0) continue;
    x.push_back(row.n_k * -std::log(alpha));
    y.push_back(std::log(static_cast<double>(row.max_count)));
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) fail(ErrorKind::DegenerateFit, "two-scale fit needs at least 3 distinct n(k)");
  est.fit = fit_line(x, y);
  est.notes.push_back("finite window sampling can only undershoot the Assouad dimension; the bias is largest when "
                      "extremal tubes are rare (Salem-type beta)");
  est.notes.push_back("measure-guided window attained the per-k maximum for " + std::to_string(guided_hits) + " of " +
                      std::to_string(ks.size()) + " scales");
  return est;
}

}  // namespace carpetdim
