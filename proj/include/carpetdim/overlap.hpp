#pragma once

// Words i ~ j when their projected cylinders coincide, i.e. equal lengths and
// equal exact left endpoints. Class sizes give lower bounds on the overlap
// exponent H = sup log|[i]| / |i|.

#include <cstdint>
#include <vector>

#include "carpetdim/carpet.hpp"

namespace carpetdim {

struct OverlapBudget {
  std::uint64_t max_words = std::uint64_t{1} << 24;  // m^k
  std::size_t max_points = std::size_t{1} << 22;
};

struct EquivalenceClassTable {
  int k = 0;
  std::uint64_t words = 0;
  std::vector<std::uint64_t> sizes;  // one entry per class
  std::uint64_t max_class_size = 0;
  std::size_t class_count() const { return sizes.size(); }
  // Members (lexicographic within each class, classes ordered by first member);
  // filled only for k < 12.
  std::vector<std::vector<Word>> members;
};

// Errors: BudgetExceeded.
EquivalenceClassTable equivalence_classes(const CarpetIFS& ifs, int k, const OverlapBudget& budget = {});

struct HEstimate {
  std::vector<double> H_k;                 // index 0 holds k = 1
  std::vector<std::uint64_t> max_class_size;
  int best_k = 1;
  double H_lower = 0.0;
  double symbolic_min_dim = 0.0;           // (log m - H_lower) / (-log beta)
};

HEstimate h_lower_bound(const CarpetIFS& ifs, int k_max, const OverlapBudget& budget = {});

// True when all classes of every length <= k are singletons.
bool is_free_up_to(const CarpetIFS& ifs, int k, const OverlapBudget& budget = {});

}  // namespace carpetdim
