#include "carpetdim/endpoints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "carpetdim/errors.hpp"
#include "carpetdim/parallel.hpp"

namespace carpetdim {

struct IntegerModel {
  int d = 1;
  std::int64_t L = 1;
  std::vector<std::int64_t> minpoly;         // c0..c_{d-1} of the monic minimal polynomial
  std::vector<std::int64_t> b;               // L * beta
  std::vector<std::vector<std::int64_t>> c;  // L * t_x,i
  double theta = 0.0;
  double theta_err = 0.0;
  FieldPtr field;
};

namespace {

using i128 = __int128;

struct Overflow {};

constexpr std::size_t kChunk = 1u << 14;

bool fits64(const Integer& z) { return z.fits_slong_p(); }

std::vector<Rational> padded(const FieldElement& x, int d) {
  std::vector<Rational> c = x.coeffs();
  c.resize(d);
  return c;
}

std::shared_ptr<const IntegerModel> build_model(const CarpetIFS& ifs) {
  auto model = std::make_shared<IntegerModel>();
  const FieldPtr& field = ifs.field();
  model->field = field;
  model->d = field->degree();
  const int d = model->d;
  for (int i = 0; i < d; ++i) {
    if (!fits64(field->minpoly()[i])) return nullptr;
    model->minpoly.push_back(field->minpoly()[i].get_si());
  }
  std::vector<std::vector<Rational>> values{padded(ifs.beta(), d)};
  for (const auto& t : ifs.maps()) values.push_back(padded(t.tx.promote_to(field), d));
  Integer L = 1;
  for (const auto& v : values)
    for (const auto& q : v) L = lcm(L, Integer(q.get_den()));
  if (L > Integer(1) << 31) return nullptr;
  model->L = L.get_si();
  auto scaled = [&](const std::vector<Rational>& v, std::vector<std::int64_t>& out) {
    for (const auto& q : v) {
      Rational s = q * Rational(L);
      if (s.get_den() != 1 || !fits64(s.get_num())) return false;
      out.push_back(s.get_num().get_si());
    }
    return true;
  };
  if (!scaled(values[0], model->b)) return nullptr;
  for (std::size_t i = 1; i < values.size(); ++i) {
    model->c.emplace_back();
    if (!scaled(values[i], model->c.back())) return nullptr;
  }
  model->theta = field->is_rational() ? 0.0 : field->generator_approx();
  model->theta_err = field->is_rational() ? 0.0 : field->generator_error();
  return model;
}

inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}

inline std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) throw Overflow{};
  return static_cast<std::int64_t>(v);
}

inline std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ull;
  h ^= h >> 33;
  return h;
}

// Open addressing map from coordinate vectors to counts, keeping insertion order.
class CoordTable {
 public:
  explicit CoordTable(int d) : d_(d) { rehash(64); }

  void add(const std::int64_t* key, std::uint64_t count) {
    std::uint64_t h = hash(key);
    std::size_t slot = h & mask_;
    for (;;) {
      std::uint32_t e = slots_[slot];
      if (e == 0) break;
      if (std::equal(key, key + d_, coords_.data() + static_cast<std::size_t>(e - 1) * d_)) {
        counts_[e - 1] += count;
        return;
      }
      slot = (slot + 1) & mask_;
    }
    coords_.insert(coords_.end(), key, key + d_);
    counts_.push_back(count);
    slots_[slot] = static_cast<std::uint32_t>(counts_.size());
    if (counts_.size() * 2 > slots_.size()) rehash(slots_.size() * 2);
  }

  std::size_t size() const { return counts_.size(); }
  std::vector<std::int64_t>& coords() { return coords_; }
  std::vector<std::uint64_t>& counts() { return counts_; }

 private:
  std::uint64_t hash(const std::int64_t* key) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < d_; ++i) h = mix(h ^ static_cast<std::uint64_t>(key[i]));
    return h;
  }

  void rehash(std::size_t capacity) {
    slots_.assign(capacity, 0);
    mask_ = capacity - 1;
    for (std::size_t e = 0; e < counts_.size(); ++e) {
      std::size_t slot = hash(coords_.data() + e * d_) & mask_;
      while (slots_[slot] != 0) slot = (slot + 1) & mask_;
      slots_[slot] = static_cast<std::uint32_t>(e + 1);
    }
  }

  int d_;
  std::size_t mask_ = 0;
  std::vector<std::uint32_t> slots_;
  std::vector<std::int64_t> coords_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

std::uint64_t EndpointLayer::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

int EndpointLayer::dim() const { return model_ ? model_->d : 0; }

const FieldPtr& EndpointLayer::field() const {
  return model_ ? model_->field : field_points_.front().field();
}

FieldElement EndpointLayer::point(std::size_t i) const {
  if (!field_points_.empty()) return field_points_[i];
  const int d = model_->d;
  std::vector<Rational> c(d);
  for (int j = 0; j < d; ++j) c[j] = Rational(Integer(static_cast<long>(coords_[i * d + j])), scale_);
  for (auto& q : c) q.canonicalize();
  if (d == 1) return FieldElement(c[0]);
  return FieldElement(model_->field, std::move(c));
}

double EndpointLayer::approx(std::size_t i, double& err) const {
  if (!field_points_.empty()) return field_points_[i].double_eval(err);
  constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
  const int d = model_->d;
  const double theta = model_->theta;
  const double at = std::abs(theta) + model_->theta_err;
  double value = 0, magnitude = 0, deriv = 0;
  for (int j = d - 1; j >= 0; --j) {
    double c = static_cast<double>(coords_[i * d + j]);
    deriv = deriv * at + magnitude;
    magnitude = magnitude * at + std::abs(c);
    value = value * theta + c;
  }
  double e = magnitude * (4 * d + 6) * kUnit + deriv * model_->theta_err;
  value *= inv_scale_;
  err = 2 * (e * inv_scale_ + std::abs(value) * 4 * kUnit) + std::numeric_limits<double>::denorm_min();
  return value;
}

EndpointEnumerator::EndpointEnumerator(const CarpetIFS& ifs, std::size_t max_points, bool allow_field_mode)
    : ifs_(&ifs), max_points_(max_points), allow_field_mode_(allow_field_mode), model_(build_model(ifs)) {
  if (!model_ && !allow_field_mode_) fail(ErrorKind::BudgetExceeded, "endpoints have no small integer representation");
  layer_.depth_ = 0;
  layer_.counts_ = {1};
  if (model_) {
    layer_.model_ = model_;
    layer_.coords_.assign(model_->d, 0);
    layer_.scale_ = 1;
    layer_.inv_scale_ = 1.0;
  } else {
    layer_.field_points_ = {FieldElement::rational(0, ifs.field())};
  }
}

void EndpointEnumerator::advance() {
  // Counts are exact in uint64 while m^(n+1) < 2^64.
  const double words = std::pow(static_cast<double>(ifs_->m()), layer_.depth_ + 1);
  if (words >= 0x1p63) fail(ErrorKind::BudgetExceeded, "word count exceeds 2^63");
  if (layer_.field_points_.empty()) {
    try {
      advance_integer();
      return;
    } catch (const Overflow&) {
      if (!allow_field_mode_) fail(ErrorKind::BudgetExceeded, "endpoint coordinates overflow 64 bits");
      to_field_mode();
    }
  }
  advance_field();
}

void EndpointEnumerator::advance_integer() {
  const IntegerModel& M = *model_;
  const int d = M.d;
  const std::size_t m = M.c.size();
  const std::size_t n_points = layer_.size();
  i128 scale = 1;
  for (int j = 0; j < layer_.depth_; ++j) scale = checked_mul(scale, M.L);
  narrow(scale);

  const std::size_t chunks = (n_points + kChunk - 1) / kChunk;
  std::vector<CoordTable> partial(chunks, CoordTable(d));
  std::vector<char> overflowed(chunks, 0);
  parallel_for(chunks, [&](std::size_t ch) {
    std::vector<i128> prod(2 * d);
    std::vector<std::int64_t> key(d);
    CoordTable& table = partial[ch];
    const std::size_t end = std::min(n_points, (ch + 1) * kChunk);
    try {
      for (std::size_t p = ch * kChunk; p < end; ++p) {
        const std::int64_t* X = layer_.coords_.data() + p * d;
        std::fill(prod.begin(), prod.end(), 0);
        for (int a = 0; a < d; ++a) {
          if (M.b[a] == 0) continue;
          for (int c = 0; c < d; ++c) prod[a + c] = checked_add(prod[a + c], checked_mul(M.b[a], X[c]));
        }
        for (int k = 2 * d - 2; k >= d; --k) {
          i128 q = prod[k];
          if (q == 0) continue;
          prod[k] = 0;
          for (int i = 0; i < d; ++i) prod[k - d + i] = checked_add(prod[k - d + i], -checked_mul(q, M.minpoly[i]));
        }
        for (std::size_t i = 0; i < m; ++i) {
          for (int j = 0; j < d; ++j) key[j] = narrow(checked_add(prod[j], checked_mul(scale, M.c[i][j])));
          table.add(key.data(), layer_.counts_[p]);
        }
      }
    } catch (const Overflow&) {
      overflowed[ch] = 1;
    }
  });
  if (std::find(overflowed.begin(), overflowed.end(), 1) != overflowed.end()) throw Overflow{};

  CoordTable merged(d);
  for (auto& t : partial) {
    auto& coords = t.coords();
    auto& counts = t.counts();
    for (std::size_t e = 0; e < counts.size(); ++e) {
      merged.add(coords.data() + e * d, counts[e]);
      if (merged.size() > max_points_)
        fail(ErrorKind::BudgetExceeded, "more than " + std::to_string(max_points_) + " distinct endpoints at depth " +
                                            std::to_string(layer_.depth_ + 1));
    }
    t = CoordTable(d);
  }
  layer_.depth_ += 1;
  layer_.coords_ = std::move(merged.coords());
  layer_.counts_ = std::move(merged.counts());
  layer_.scale_ *= Integer(static_cast<long>(M.L));
  layer_.inv_scale_ = 1.0 / layer_.scale_.get_d();
}

void EndpointEnumerator::to_field_mode() {
  std::vector<FieldElement> pts;
  pts.reserve(layer_.size());
  for (std::size_t i = 0; i < layer_.size(); ++i) pts.push_back(layer_.point(i));
  layer_.field_points_ = std::move(pts);
  layer_.coords_.clear();
  layer_.model_.reset();
}

void EndpointEnumerator::advance_field() {
  const auto& maps = ifs_->maps();
  std::unordered_map<FieldElement, std::size_t, FieldElementHash> index;
  std::vector<FieldElement> next;
  std::vector<std::uint64_t> counts;
  for (std::size_t p = 0; p < layer_.size(); ++p) {
    FieldElement bx = ifs_->beta() * layer_.field_points_[p];
    for (const auto& t : maps) {
      FieldElement x = t.tx + bx;
      auto [it, inserted] = index.try_emplace(x, next.size());
      if (inserted) {
        next.push_back(std::move(x));
        counts.push_back(layer_.counts_[p]);
        if (next.size() > max_points_)
          fail(ErrorKind::BudgetExceeded, "more than " + std::to_string(max_points_) + " distinct endpoints");
      } else {
        counts[it->second] += layer_.counts_[p];
      }
    }
  }
  layer_.depth_ += 1;
  layer_.field_points_ = std::move(next);
  layer_.counts_ = std::move(counts);
}

}  // namespace carpetdim
