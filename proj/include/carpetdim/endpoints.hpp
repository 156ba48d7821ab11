#pragma once

// Distinct left endpoints of the depth-n projected cylinders with their
// multiplicities, built level by level through x' = t_i + beta x.
//
// When beta and every t_x have small denominators, endpoints are kept as
// integer vectors X = L^n x over the power basis (L the common denominator),
// which makes hashing and the recursion cheap. On int64 overflow the layer is
// converted to FieldElement storage and the recursion continues exactly.

#include <cstdint>
#include <memory>
#include <vector>

#include "carpetdim/carpet.hpp"

namespace carpetdim {

struct IntegerModel;

class EndpointLayer {
 public:
  int depth() const { return depth_; }
  std::size_t size() const { return counts_.size(); }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t max_count() const;

  FieldElement point(std::size_t i) const;
  // Double value of point i; err receives a rigorous bound on |value - point(i)|.
  double approx(std::size_t i, double& err) const;
  bool integer_backed() const { return field_points_.empty() && !counts_.empty(); }
  // Integer mode only: point(i) = (sum_k coords(i)[k] theta^k) / scale().
  int dim() const;
  const std::int64_t* coords(std::size_t i) const { return coords_.data() + i * dim(); }
  const Integer& scale() const { return scale_; }
  const FieldPtr& field() const;

 private:
  friend class EndpointEnumerator;

  int depth_ = 0;
  std::vector<std::uint64_t> counts_;
  // Integer mode.
  std::shared_ptr<const IntegerModel> model_;
  std::vector<std::int64_t> coords_;  // size() * d entries
  Integer scale_;                     // L^depth
  double inv_scale_ = 1.0;
  // Field mode.
  std::vector<FieldElement> field_points_;
};

class EndpointEnumerator {
 public:
  // Starts at depth 0 with the single endpoint 0. max_points caps the number
  // of distinct endpoints of any layer; advance() throws BudgetExceeded past it.
  // With allow_field_mode false, integer overflow throws BudgetExceeded instead
  // of switching to FieldElement storage.
  EndpointEnumerator(const CarpetIFS& ifs, std::size_t max_points, bool allow_field_mode = true);

  const EndpointLayer& layer() const { return layer_; }
  void advance();

 private:
  void advance_integer();
  void advance_field();
  void to_field_mode();

  const CarpetIFS* ifs_;
  std::size_t max_points_;
  bool allow_field_mode_;
  std::shared_ptr<const IntegerModel> model_;
  EndpointLayer layer_;
};

// Invokes fn(word) for every word of length k in lexicographic order.
template <class Fn>
void for_each_word(std::size_t m, std::size_t k, Fn&& fn) {
  std::vector<std::uint32_t> letters(k, 0);
  for (;;) {
    fn(Word(letters));
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++letters[pos] < m) break;
      letters[pos] = 0;
      if (pos == 0) return;
    }
    if (k == 0) return;
  }
}

}  // namespace carpetdim
