#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "lanmsff/core.hpp"

namespace lanmsff::train {

struct FoldPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;

  const std::vector<std::size_t>& validation(std::size_t fold) const { return folds.at(fold); }

  std::vector<std::size_t> training(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < folds.size(); ++f)
      if (f != fold) out.insert(out.end(), folds[f].begin(), folds[f].end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Shuffled partition of 0..n-1 into k folds whose sizes differ by at most one.
inline FoldPlan kfold_split(std::size_t n, std::size_t k = 5, std::uint64_t seed = 0) {
  require(k >= 2, ErrorKind::InvalidArgument, "k-fold needs k >= 2, got ", k);
  require(n >= k, ErrorKind::InvalidArgument, "k-fold needs at least k samples (n=", n, ", k=", k, ")");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  FoldPlan plan{k, seed, {}};
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = n / k + (f < n % k ? 1 : 0);
    plan.folds.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                            idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(plan.folds.back().begin(), plan.folds.back().end());
    pos += len;
  }
  return plan;
}

/// Group-disjoint variant: every sample sharing a group key (e.g. an actor)
/// lands in the same fold. Groups are shuffled, then assigned largest
/// first to the currently smallest fold.
inline FoldPlan kfold_split_grouped(const std::vector<std::string>& groups, std::size_t k = 5,
                                    std::uint64_t seed = 0) {
  require(k >= 2, ErrorKind::InvalidArgument, "k-fold needs k >= 2, got ", k);
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  require(members.size() >= k, ErrorKind::InvalidArgument, "grouped k-fold needs at least k groups (", members.size(),
          " groups, k=", k, ")");
  std::vector<const std::vector<std::size_t>*> order;
  for (const auto& [_, v] : members) order.push_back(&v);
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->size() > b->size(); });
  FoldPlan plan{k, seed, std::vector<std::vector<std::size_t>>(k)};
  for (const auto* g : order) {
    auto& target = *std::min_element(plan.folds.begin(), plan.folds.end(),
                                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    target.insert(target.end(), g->begin(), g->end());
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

}  // namespace lanmsff::train
