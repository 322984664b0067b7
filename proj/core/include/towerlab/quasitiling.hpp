#pragma once

#include "towerlab/group.hpp"
#include "towerlab/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace towerlab {

// Nested tiles e in T_1 <= ... <= T_n with a disjointness tolerance beta.
struct TileSystem {
  std::vector<FiniteGroupSet> tiles;
  Rational beta;
};

// Smallest n with (1 - beta/2)^n < beta. Requires 0 < beta < 1/2.
int plan_scales(const Rational& beta);

// Empty when the system satisfies every tile-system invariant; otherwise one
// message per violated condition.
std::vector<std::string> tile_system_problems(const Group& g, const TileSystem& sys);

struct TilePlacement {
  int scale = 0;          // index into the tile list (0-based)
  GroupElement center;
  FiniteGroupSet kept;    // T'_c, a subset of tiles[scale]; the kept translates are disjoint
};

struct QuasiTiling {
  FiniteGroupSet ambient;
  Rational beta;
  std::vector<FiniteGroupSet> tiles;
  std::vector<TilePlacement> placements;  // acceptance order

  FiniteGroupSet centers(int scale) const;
  FiniteGroupSet covered(const Group& g) const;
  Rational coverage(const Group& g) const;
};

enum class QuasitileMode {
  kStrict,   // tile-system and (T_n, beta/4)-invariance preconditions enforced
  kRelaxed,  // preconditions skipped; no coverage guarantee
};

// Greedy Ornstein-Weiss quasitiling: scales from largest to smallest, centers in
// ascending order (or a seeded shuffle), a translate T_i c is accepted when it
// lies in E and at least (1-beta)|T_i| of it is still unclaimed.
QuasiTiling quasitile(const Group& g, const FiniteGroupSet& ambient, const TileSystem& sys,
                      QuasitileMode mode = QuasitileMode::kStrict,
                      std::optional<std::uint64_t> seed = std::nullopt);

struct QuasiTilingCheck {
  bool tiles_inside = true;
  bool witness_valid = true;
  bool coverage_ok = true;
  Rational coverage;
  std::vector<std::string> problems;
  bool ok() const { return tiles_inside && witness_valid && coverage_ok; }
};

QuasiTilingCheck check_quasitiling(const Group& g, const QuasiTiling& q);

// Pairwise-disjoint T'_c c obtained by letting earlier placements keep their
// points. Throws InvalidInput if some tile would retain less than (1-beta)|T|.
std::vector<FiniteGroupSet> disjointify(const Group& g, const QuasiTiling& q);

// Lattice tiling of Z^d: translates shape + c for c in prod_j moduli[j] Z.
struct ExactTiling {
  FiniteGroupSet shape;
  std::vector<std::int64_t> moduli;
};

// Every point of the window lies in exactly one translate.
bool verify_exact_tiling(const Group& g, const ExactTiling& t, const FiniteGroupSet& window);

// F_k = coset representatives of G/N_k, centers N_k.
ExactTiling exact_tiling_ladder(const Group& g, int k);

// Source of exact tilings at increasing invariance; the library ships the
// ladder and Z^d-box implementations.
class TilingOracle {
 public:
  virtual ~TilingOracle() = default;
  virtual ExactTiling tiling(int level) const = 0;
};

class LadderTilingOracle : public TilingOracle {
 public:
  explicit LadderTilingOracle(Group g) : group_(std::move(g)) {}
  ExactTiling tiling(int level) const override { return exact_tiling_ladder(group_, level); }

 private:
  Group group_;
};

// Cubes of side level+1 tiling Z^d.
class BoxTilingOracle : public TilingOracle {
 public:
  explicit BoxTilingOracle(Group g);
  ExactTiling tiling(int level) const override;

 private:
  Group group_;
};

}  // namespace towerlab
