#pragma once

#include "towerlab/cantor.hpp"
#include "towerlab/group.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace towerlab {

// Levels sV, s in shape, are pairwise disjoint.
struct Tower {
  ClopenSet base;
  FiniteGroupSet shape;
};

// A family of towers. As a castle the footprints S_iV_i are pairwise disjoint;
// as a tower collection they may overlap.
struct TowerFamily {
  SystemPtr system;
  std::vector<Tower> towers;
};
using Castle = TowerFamily;
using TowerCollection = TowerFamily;

ClopenSet level(const Tower& t, const GroupElement& s);
std::vector<ClopenSet> levels(const Tower& t);
ClopenSet footprint(const Tower& t);
// Join of the resolutions of every level of every tower.
Resolution level_resolution(const TowerFamily& f);

// S t0^{-1}, t0 V for t0 = min S, so that e is in the shape. No-op when e in S.
Tower normalize_tower(const Group& g, const Tower& t);

struct CastleViolation {
  std::string kind;  // "level-overlap" or "footprint-overlap"
  std::size_t tower_a = 0;
  std::size_t tower_b = 0;
  GroupElement element_a;
  GroupElement element_b;
  CellId cell = 0;
};

struct CastleReport {
  bool levels_disjoint = true;
  bool footprints_disjoint = true;
  bool partitions = false;
  Resolution resolution;
  std::uint64_t uncovered_cells = 0;
  std::vector<CastleViolation> violations;  // first few only
  bool valid() const { return levels_disjoint && footprints_disjoint; }
};

CastleReport verify_castle(const Castle& c);

struct LebesgueWitness {
  std::size_t tower = 0;
  GroupElement t;
};

struct LebesgueReport {
  bool holds = false;
  Resolution resolution;
  std::vector<LebesgueWitness> certificate;  // indexed by cell when holds
  std::optional<CellId> uncovered;
};

// Every cell lies in some tV_i with Et inside S_i.
LebesgueReport is_e_lebesgue(const TowerCollection& ts, const FiniteGroupSet& e);

// Weaker cover form: for every cell x, Ex lies inside a single footprint.
bool is_e_lebesgue_cover(const TowerCollection& ts, const FiniteGroupSet& e);

struct ChromaticResult {
  int number = 0;
  bool exact = true;           // false above the exact-solver cap: greedy bound
  std::vector<int> coloring;   // per tower
};

inline constexpr std::size_t kChromaticExactCap = 20;

ChromaticResult chromatic_number(const TowerCollection& ts,
                                 std::size_t exact_cap = kChromaticExactCap);

// First return castle of a Z action over V; shapes {0..n_i-1}. Throws
// CapExceeded when some return time exceeds cap.
Castle first_return_decomposition(const SystemPtr& sys, const ClopenSet& v, int cap);

// c together with the shifted copies (T^{-N}V_i, S_i).
TowerCollection double_castle(const Castle& c, std::int64_t n);

// Same footprint; every level is inside or disjoint from every target.
Castle refine_castle_to(const Castle& c, const std::vector<ClopenSet>& targets);

// First return castle over cell 0 of level(r), refined to the targets. For
// a minimal Z-action its levels partition X, and T^s maps level j of a tower
// onto level j + s whenever both lie in the shape.
Castle rokhlin_castle(const SystemPtr& sys, int r, const std::vector<ClopenSet>& targets, int cap);

// Z-actions whose translations move resolutions (subshifts and products
// containing them); comparison and transport run on Rokhlin castles there.
bool uses_castle_search(const CantorSystem& sys);

// Bases pi^{-1}(V_i) on a product system, where pi projects onto `factor`.
Castle pullback_castle(const Castle& c, const SystemPtr& product, std::size_t factor);

}  // namespace towerlab
