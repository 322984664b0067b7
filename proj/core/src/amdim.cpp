#include "towerlab/amdim.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>

namespace towerlab {

SimplexMap build_simplex_map(const TowerCollection& ts, const FiniteGroupSet& f, int n,
                             std::optional<int> d) {
  if (!ts.system) throw InvalidInput("tower collection without a system");
  const Group& g = ts.system->group();
  if (n < 2) throw InvalidInput("n must be at least 2");
  if (!f.contains(g.identity()) || !is_symmetric(g, f)) {
    throw InvalidInput("F must be symmetric and contain the identity");
  }
  const FiniteGroupSet fn = power_set(g, f, n);
  const LebesgueReport leb = is_e_lebesgue(ts, fn);
  if (!leb.holds) {
    throw InvarianceViolation("collection is not F^n-Lebesgue; uncovered cell " +
                              ts.system->describe_cell(*leb.uncovered, leb.resolution));
  }
  const ChromaticResult chi = chromatic_number(ts);
  const int bound = d ? *d + 1 : chi.number;
  if (d && chi.number > bound) {
    throw InvalidInput("chromatic number " + std::to_string(chi.number) + " exceeds d+1 = " +
                       std::to_string(bound));
  }

  SimplexMap phi;
  phi.system = ts.system;
  phi.resolution = leb.resolution;
  phi.support_bound = bound;
  const std::uint64_t cells = ts.system->checked_num_cells(phi.resolution);
  std::vector<SparseMeasure> raw(cells);
  for (const auto& tower : ts.towers) {
    const auto layers = folner_layering(g, tower.shape, f, n);
    for (int k = 1; k <= n; ++k) {
      for (const auto& t : layers[static_cast<std::size_t>(k)]) {
        for (CellId c : level(tower, t).refine(phi.resolution).cells())
          raw[c][t] += make_rational(k, n);
      }
    }
  }
  phi.values.resize(cells);
  for (CellId c = 0; c < cells; ++c) {
    Rational h = 0;
    for (const auto& [_, v] : raw[c]) h += v;
    if (h < 1) throw InternalError("normalizer below 1 at " + ts.system->describe_cell(c, phi.resolution));
    if (c == 0 || h < phi.min_normalizer) phi.min_normalizer = h;
    for (auto& [t, v] : raw[c]) phi.values[c].emplace(t, v / h);
    if (static_cast<int>(phi.values[c].size()) > bound) {
      throw InternalError("support exceeds the chromatic bound at " +
                          ts.system->describe_cell(c, phi.resolution));
    }
  }
  return phi;
}

Rational equivariance_defect(const SimplexMap& phi, const FiniteGroupSet& f) {
  const auto& sys = *phi.system;
  const Group& g = sys.group();
  const Resolution& r = phi.resolution;
  if (phi.values.size() != sys.num_cells(r)) throw InvalidInput("simplex map does not match its resolution");
  Rational worst = 0;
  for (const auto& s : f) {
    g.validate(s);
    const Resolution j = sys.join(r, sys.act_resolution(g.inverse(s), r));
    const Resolution moved = sys.act_resolution(s, j);
    const std::uint64_t n = sys.checked_num_cells(j);
    for (CellId x = 0; x < n; ++x) {
      const SparseMeasure& here = phi.values[r == j ? x : sys.coarsen(x, j, r)];
      CellId sx = sys.act_cell(s, x, j);
      if (!(moved == r)) sx = sys.coarsen(sx, moved, r);
      const SparseMeasure& there = phi.values[sx];
      // s phi(x) puts phi(x)(t) on st
      SparseMeasure diff = there;
      for (const auto& [t, v] : here) diff[g.multiply(s, t)] -= v;
      Rational norm = 0;
      for (const auto& [_, v] : diff) norm += abs(v);
      worst = std::max(worst, norm);
    }
  }
  return worst;
}

}  // namespace towerlab
