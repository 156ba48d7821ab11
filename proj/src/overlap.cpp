#include "carpetdim/overlap.hpp"

#include <cmath>
#include <unordered_map>

#include "carpetdim/endpoints.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

namespace {

constexpr int kMembersBelow = 12;

void check_budget(const CarpetIFS& ifs, int k, const OverlapBudget& budget) {
  if (k < 1) fail(ErrorKind::ParameterOutOfRange, "word length must be at least 1");
  if (std::pow(static_cast<double>(ifs.m()), k) > static_cast<double>(budget.max_words))
    fail(ErrorKind::BudgetExceeded, "m^" + std::to_string(k) + " exceeds the word budget " +
                                        std::to_string(budget.max_words));
}

}  // namespace

EquivalenceClassTable equivalence_classes(const CarpetIFS& ifs, int k, const OverlapBudget& budget) {
  check_budget(ifs, k, budget);
  EquivalenceClassTable t;
  t.k = k;
  t.words = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(ifs.m()), k)));

  if (k < kMembersBelow) {
    std::unordered_map<FieldElement, std::size_t, FieldElementHash> index;
    for_each_word(ifs.m(), static_cast<std::size_t>(k), [&](const Word& w) {
      auto [it, inserted] = index.try_emplace(left_endpoint(ifs, w), t.members.size());
      if (inserted) t.members.emplace_back();
      t.members[it->second].push_back(w);
    });
    for (const auto& c : t.members) t.sizes.push_back(c.size());
  } else {
    EndpointEnumerator en(ifs, budget.max_points);
    for (int j = 0; j < k; ++j) en.advance();
    t.sizes = en.layer().counts();
  }
  for (auto s : t.sizes) t.max_class_size = std::max(t.max_class_size, s);
  return t;
}

HEstimate h_lower_bound(const CarpetIFS& ifs, int k_max, const OverlapBudget& budget) {
  check_budget(ifs, k_max, budget);
  HEstimate h;
  EndpointEnumerator en(ifs, budget.max_points);
  for (int k = 1; k <= k_max; ++k) {
    en.advance();
    const std::uint64_t top = en.layer().max_count();
    const double hk = std::log(static_cast<double>(top)) / k;
    h.max_class_size.push_back(top);
    h.H_k.push_back(hk);
    if (hk > h.H_lower) {
      h.H_lower = hk;
      h.best_k = k;
    }
  }
  h.symbolic_min_dim = (std::log(static_cast<double>(ifs.m())) - h.H_lower) / -std::log(ifs.beta_d());
  return h;
}

bool is_free_up_to(const CarpetIFS& ifs, int k, const OverlapBudget& budget) {
  HEstimate h = h_lower_bound(ifs, k, budget);
  for (auto s : h.max_class_size)
    if (s > 1) return false;
  return true;
}

}  // namespace carpetdim
