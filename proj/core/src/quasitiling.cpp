#include "towerlab/quasitiling.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace towerlab {

namespace {

void require_beta(const Rational& beta) {
  if (beta <= 0 || beta >= Rational(1, 2)) {
    throw InvalidInput("beta must lie in (0, 1/2), got " + to_string(beta));
  }
}

}  // namespace

int plan_scales(const Rational& beta) {
  require_beta(beta);
  const Rational ratio = 1 - beta / 2;
  Rational power = 1;
  for (int n = 1;; ++n) {
    power *= ratio;
    if (power < beta) return n;
  }
}

std::vector<std::string> tile_system_problems(const Group& g, const TileSystem& sys) {
  std::vector<std::string> problems;
  if (sys.beta <= 0 || sys.beta >= Rational(1, 2)) {
    problems.push_back("beta " + to_string(sys.beta) + " outside (0, 1/2)");
    return problems;
  }
  const auto& tiles = sys.tiles;
  if (tiles.empty()) {
    problems.push_back("no tiles");
    return problems;
  }
  if (!tiles.front().contains(g.identity())) problems.push_back("T_1 does not contain e");
  for (std::size_t i = 1; i < tiles.size(); ++i) {
    if (!is_subset(tiles[i - 1], tiles[i])) {
      problems.push_back("T_" + std::to_string(i) + " not inside T_" + std::to_string(i + 1));
      continue;
    }
    const auto boundary = t_boundary(g, tiles[i - 1], tiles[i]);
    if (Rational(boundary.size()) > sys.beta / 8 * tiles[i].size()) {
      problems.push_back("|boundary of T_" + std::to_string(i + 1) + "| = " +
                         std::to_string(boundary.size()) + " exceeds (beta/8)|T_" +
                         std::to_string(i + 1) + "|");
    }
  }
  Rational power = 1;
  for (std::size_t i = 0; i < tiles.size(); ++i) power *= 1 - sys.beta / 2;
  if (!(power < sys.beta)) {
    problems.push_back("(1-beta/2)^n = " + to_string(power) + " is not below beta (n = " +
                       std::to_string(tiles.size()) + ")");
  }
  return problems;
}

FiniteGroupSet QuasiTiling::centers(int scale) const {
  std::vector<GroupElement> out;
  for (const auto& p : placements)
    if (p.scale == scale) out.push_back(p.center);
  return FiniteGroupSet(std::move(out));
}

FiniteGroupSet QuasiTiling::covered(const Group& g) const {
  std::vector<GroupElement> out;
  for (const auto& p : placements)
    for (const auto& t : tiles[p.scale]) out.push_back(g.multiply(t, p.center));
  return FiniteGroupSet(std::move(out));
}

Rational QuasiTiling::coverage(const Group& g) const {
  if (ambient.empty()) return 1;
  return Rational(covered(g).size(), ambient.size());
}

QuasiTiling quasitile(const Group& g, const FiniteGroupSet& ambient, const TileSystem& sys,
                      QuasitileMode mode, std::optional<std::uint64_t> seed) {
  if (ambient.empty()) throw InvalidInput("quasitiling needs a nonempty ambient set");
  if (sys.tiles.empty()) throw InvalidInput("quasitiling needs at least one tile");
  if (mode == QuasitileMode::kStrict) {
    auto problems = tile_system_problems(g, sys);
    if (!problems.empty()) throw InvalidInput("tile system invalid: " + problems.front());
    const Rational defect = folner_defect(g, ambient, sys.tiles.back());
    if (!(defect < sys.beta / 4)) {
      throw InvarianceViolation("ambient set is not (T_n, beta/4)-invariant: defect " +
                                to_string(defect) + " >= " + to_string(sys.beta / 4));
    }
  } else if (sys.beta < 0 || sys.beta >= 1) {
    throw InvalidInput("beta must lie in [0, 1)");
  }

  QuasiTiling q{ambient, sys.beta, sys.tiles, {}};
  std::vector<GroupElement> order(ambient.begin(), ambient.end());
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  std::set<GroupElement> claimed;
  for (int scale = static_cast<int>(sys.tiles.size()) - 1; scale >= 0; --scale) {
    const auto& tile = sys.tiles[static_cast<std::size_t>(scale)];
    const Rational needed = (1 - sys.beta) * tile.size();
    for (const auto& c : order) {
      std::vector<GroupElement> free_part;
      bool inside = true;
      for (const auto& t : tile) {
        GroupElement x = g.multiply(t, c);
        if (!ambient.contains(x)) {
          inside = false;
          break;
        }
        if (!claimed.count(x)) free_part.push_back(t);
      }
      if (!inside || free_part.empty() || Rational(free_part.size()) < needed) continue;
      for (const auto& t : free_part) claimed.insert(g.multiply(t, c));
      q.placements.push_back({scale, c, FiniteGroupSet(std::move(free_part))});
    }
  }

  if (mode == QuasitileMode::kStrict && q.coverage(g) < 1 - sys.beta) {
    throw InternalError("quasitiling reached coverage " + to_string(q.coverage(g)) +
                        " below 1 - beta despite valid preconditions");
  }
  return q;
}

QuasiTilingCheck check_quasitiling(const Group& g, const QuasiTiling& q) {
  QuasiTilingCheck check;
  std::set<GroupElement> kept_points;
  for (std::size_t idx = 0; idx < q.placements.size(); ++idx) {
    const auto& p = q.placements[idx];
    if (p.scale < 0 || p.scale >= static_cast<int>(q.tiles.size())) {
      check.witness_valid = false;
      check.problems.push_back("placement " + std::to_string(idx) + " has an unknown scale");
      continue;
    }
    const auto& tile = q.tiles[static_cast<std::size_t>(p.scale)];
    for (const auto& t : tile) {
      if (!q.ambient.contains(g.multiply(t, p.center))) {
        check.tiles_inside = false;
        check.problems.push_back("tile at center " + to_string(p.center) + " leaves the ambient set");
        break;
      }
    }
    if (!is_subset(p.kept, tile)) {
      check.witness_valid = false;
      check.problems.push_back("kept part of placement " + std::to_string(idx) +
                               " is not inside its tile");
    }
    if (Rational(p.kept.size()) < (1 - q.beta) * tile.size()) {
      check.witness_valid = false;
      check.problems.push_back("placement " + std::to_string(idx) + " keeps fewer than (1-beta)|T|");
    }
    for (const auto& t : p.kept) {
      if (!kept_points.insert(g.multiply(t, p.center)).second) {
        check.witness_valid = false;
        check.problems.push_back("kept translates overlap at placement " + std::to_string(idx));
        break;
      }
    }
  }
  check.coverage = q.coverage(g);
  check.coverage_ok = check.coverage >= 1 - q.beta;
  if (!check.coverage_ok) check.problems.push_back("coverage " + to_string(check.coverage) + " below 1 - beta");
  return check;
}

std::vector<FiniteGroupSet> disjointify(const Group& g, const QuasiTiling& q) {
  std::set<GroupElement> taken;
  std::vector<FiniteGroupSet> out;
  for (const auto& p : q.placements) {
    const auto& tile = q.tiles.at(static_cast<std::size_t>(p.scale));
    std::vector<GroupElement> kept;
    for (const auto& t : tile) {
      GroupElement x = g.multiply(t, p.center);
      if (taken.insert(x).second) kept.push_back(x);
    }
    if (Rational(kept.size()) < (1 - q.beta) * tile.size()) {
      throw InvalidInput("tile at center " + to_string(p.center) + " retains " +
                         std::to_string(kept.size()) + " of " + std::to_string(tile.size()) +
                         " points, below 1 - beta");
    }
    out.emplace_back(std::move(kept));
  }
  return out;
}

bool verify_exact_tiling(const Group& g, const ExactTiling& t, const FiniteGroupSet& window) {
  if (!g.is_free_abelian()) throw Unsupported("exact tilings are lattice tilings of Z^d");
  if (t.moduli.size() != g.rank()) throw InvalidInput("tiling moduli have the wrong dimension");
  for (const auto& x : window) {
    int hits = 0;
    for (const auto& f : t.shape) {
      // x = f + c with c in the lattice
      bool in_lattice = true;
      for (std::size_t j = 0; j < g.rank(); ++j) {
        std::int64_t c = x[j] - f[j];
        if (c % t.moduli[j] != 0) {
          in_lattice = false;
          break;
        }
      }
      if (in_lattice) ++hits;
    }
    if (hits != 1) return false;
  }
  return true;
}

ExactTiling exact_tiling_ladder(const Group& g, int k) {
  if (!g.has_ladder()) throw Unsupported("group has no quotient ladder");
  const auto& q = g.ladder_moduli(k);
  std::vector<std::int64_t> lo(q.size(), 0), hi;
  for (auto m : q) hi.push_back(m - 1);
  return {FiniteGroupSet::box(lo, hi), q};
}

BoxTilingOracle::BoxTilingOracle(Group g) : group_(std::move(g)) {
  if (!group_.is_free_abelian()) throw Unsupported("box tilings need Z^d");
}

ExactTiling BoxTilingOracle::tiling(int level) const {
  if (level < 0) throw InvalidInput("tiling level must be nonnegative");
  const std::int64_t side = level + 1;
  std::vector<std::int64_t> lo(group_.rank(), 0), hi(group_.rank(), side - 1);
  return {FiniteGroupSet::box(lo, hi), std::vector<std::int64_t>(group_.rank(), side)};
}

}  // namespace towerlab
