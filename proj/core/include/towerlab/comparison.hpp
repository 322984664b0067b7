#pragma once

#include "towerlab/cantor.hpp"
#include "towerlab/group.hpp"

#include <optional>
#include <string>
#include <vector>

namespace towerlab {

struct Piece {
  ClopenSet cells;
  GroupElement translation;
  int color = 0;
};

// Partition of A into pieces; per color, the translated pieces are disjoint
// subsets of B.
struct ComparisonWitness {
  int m = 0;
  Resolution resolution;
  std::vector<Piece> pieces;
};

struct WitnessReport {
  bool partition_ok = true;
  bool colors_ok = true;
  bool disjoint_ok = true;
  bool contained_ok = true;
  std::vector<std::string> violations;
  bool ok() const { return partition_ok && colors_ok && disjoint_ok && contained_ok; }
};

WitnessReport verify_witness(const ClopenSet& a, const ClopenSet& b, const ComparisonWitness& w);

struct SearchBudget {
  int m = 0;
  int radius = 8;
  int max_resolution = 16;  // clamped to the system's max_level()
};

enum class SearchStatus { Found, NotFound };
enum class NotFoundReason { None, BudgetExhausted, StructurallyInfeasible };

std::string to_string(SearchStatus s);
std::string to_string(NotFoundReason r);

struct Attempt {
  int resolution_level = 0;
  int radius = 0;
  Resolution resolution;
  std::size_t a_cells = 0;
  std::size_t b_cells = 0;
  std::size_t edges = 0;
  std::int64_t matched = 0;
};

struct ComparisonResult {
  SearchStatus status = SearchStatus::NotFound;
  NotFoundReason reason = NotFoundReason::None;
  std::optional<ComparisonWitness> witness;
  SearchBudget budget;
  std::vector<Attempt> attempts;
  Rational margin;
  std::vector<std::string> notes;
  bool found() const { return status == SearchStatus::Found; }
};

// Semi-decision for A <_m B by bipartite flow between cells of A and cells of
// B, escalating resolution and radius alternately up to the budget.
ComparisonResult find_witness(const ClopenSet& a, const ClopenSet& b, const SearchBudget& budget);

// Turns a cover of A (per color images disjoint) into a partition by
// subtracting earlier pieces in (color, index) order.
ComparisonWitness disjointify_cover(const std::vector<Piece>& pieces, const ClopenSet& a, int m);

// From A < B and B < C (m = 0) a witness for A < C.
ComparisonWitness compose_witnesses(const Group& g, const ComparisonWitness& ab,
                                    const ComparisonWitness& bc);

}  // namespace towerlab
