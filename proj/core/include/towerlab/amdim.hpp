#pragma once

#include "towerlab/cantor.hpp"
#include "towerlab/group.hpp"
#include "towerlab/towers.hpp"

#include <map>
#include <optional>
#include <vector>

namespace towerlab {

using SparseMeasure = std::map<GroupElement, Rational>;

// Cell -> finitely supported probability vector on G.
struct SimplexMap {
  SystemPtr system;
  Resolution resolution;
  int support_bound = 1;  // d + 1
  std::vector<SparseMeasure> values;
  Rational min_normalizer;  // min over cells of H
};

// phi(x)(t) = sum_i (k_i(t)/n) 1[x in tV_i] / H(x), with k_i(t) the layer of t
// in S_i for F and n. Requires the collection to be F^n-Lebesgue.
SimplexMap build_simplex_map(const TowerCollection& ts, const FiniteGroupSet& f, int n,
                             std::optional<int> d = std::nullopt);

// max over cells x and s in F of || phi(sx) - s phi(x) ||_1.
Rational equivariance_defect(const SimplexMap& phi, const FiniteGroupSet& f);

}  // namespace towerlab
