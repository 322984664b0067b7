#pragma once

#include "towerlab/rational.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace towerlab {

// Upper bound on cells / enumerated set sizes; TOWERLAB_CELL_CAP overrides the
// default of 10^6.
std::size_t cell_cap();

enum class GroupKind { Z, Zd, Heisenberg, Lamplighter, QuotientLadder };

std::string to_string(GroupKind kind);
GroupKind parse_group_kind(const std::string& name);

// Canonical integer coordinates of a group element:
//   Z, Zd, QuotientLadder : the integer vector itself
//   Heisenberg            : (a, b, c) for the matrix [[1,a,c],[0,1,b],[0,0,1]]
//   Lamplighter           : (lamp mask, position); bit j of the mask is the lamp
//                           at position j - window
class GroupElement {
 public:
  static constexpr std::size_t kMaxRank = 4;

  GroupElement() = default;
  GroupElement(std::initializer_list<std::int64_t> coords);
  explicit GroupElement(std::span<const std::int64_t> coords);
  static GroupElement zero(std::size_t rank);

  std::size_t rank() const { return rank_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  std::span<const std::int64_t> coords() const { return {coords_.data(), rank_}; }

  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  std::array<std::int64_t, kMaxRank> coords_{};
  std::uint8_t rank_ = 0;
};

std::string to_string(const GroupElement& g);

struct GroupDescriptor {
  GroupKind kind = GroupKind::Z;
  int dim = 1;           // Zd and QuotientLadder
  int lamp_window = 16;  // Lamplighter: lamps live in [-window, window]
  // QuotientLadder over Z^dim: ladder[k][j] is the modulus of coordinate j at
  // depth k, so N_k = prod_j ladder[k][j] Z. ladder[0] is all ones.
  std::vector<std::vector<std::int64_t>> ladder;

  static GroupDescriptor integers();
  static GroupDescriptor lattice(int d);
  static GroupDescriptor heisenberg();
  static GroupDescriptor lamplighter(int window);
  // N_k = (base^k Z)^d for k = 0..depth.
  static GroupDescriptor power_ladder(int d, std::int64_t base, int depth);
  static GroupDescriptor custom_ladder(int d, std::vector<std::vector<std::int64_t>> moduli);
};

class Group {
 public:
  explicit Group(GroupDescriptor desc);

  const GroupDescriptor& descriptor() const { return desc_; }
  GroupKind kind() const { return desc_.kind; }
  std::size_t rank() const { return rank_; }
  bool is_abelian() const;
  // Z^d as an abstract group (Z, Zd, QuotientLadder); these share coordinates.
  bool is_free_abelian() const;
  int free_rank() const;

  GroupElement identity() const { return GroupElement::zero(rank_); }
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  // Symmetric generating set, in canonical order.
  const std::vector<GroupElement>& generators() const { return generators_; }
  // Throws InvalidInput when the coordinates are not a canonical element.
  void validate(const GroupElement& g) const;
  GroupElement make(std::initializer_list<std::int64_t> coords) const;

  bool has_ladder() const { return !desc_.ladder.empty(); }
  int ladder_depth() const { return static_cast<int>(desc_.ladder.size()) - 1; }
  const std::vector<std::int64_t>& ladder_moduli(int k) const;

  bool operator==(const Group& other) const;

 private:
  GroupDescriptor desc_;
  std::size_t rank_;
  std::vector<GroupElement> generators_;
};

// Sorted, duplicate-free finite subset of a group.
class FiniteGroupSet {
 public:
  FiniteGroupSet() = default;
  explicit FiniteGroupSet(std::vector<GroupElement> elements);
  FiniteGroupSet(std::initializer_list<GroupElement> elements);
  // {lo, ..., hi} in a rank-one group.
  static FiniteGroupSet interval(std::int64_t lo, std::int64_t hi);
  // prod_j [lo_j, hi_j] in Z^d coordinates.
  static FiniteGroupSet box(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi);

  const std::vector<GroupElement>& elements() const& { return elements_; }
  std::vector<GroupElement> elements() && { return std::move(elements_); }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  bool contains(const GroupElement& g) const;
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  friend bool operator==(const FiniteGroupSet&, const FiniteGroupSet&) = default;

 private:
  std::vector<GroupElement> elements_;
};

FiniteGroupSet unite(const FiniteGroupSet& a, const FiniteGroupSet& b);
FiniteGroupSet intersect(const FiniteGroupSet& a, const FiniteGroupSet& b);
FiniteGroupSet subtract(const FiniteGroupSet& a, const FiniteGroupSet& b);
FiniteGroupSet symmetric_difference(const FiniteGroupSet& a, const FiniteGroupSet& b);
bool is_subset(const FiniteGroupSet& a, const FiniteGroupSet& b);

// tF
FiniteGroupSet translate_left(const Group& g, const GroupElement& t, const FiniteGroupSet& f);
// Ft
FiniteGroupSet translate_right(const Group& g, const FiniteGroupSet& f, const GroupElement& t);
// AB = {ab}
FiniteGroupSet product_set(const Group& g, const FiniteGroupSet& a, const FiniteGroupSet& b);
// F^k, with F^0 = {e}.
FiniteGroupSet power_set(const Group& g, const FiniteGroupSet& f, int k);
FiniteGroupSet inverse_set(const Group& g, const FiniteGroupSet& f);
bool is_symmetric(const Group& g, const FiniteGroupSet& f);

// Elements of word length <= r with respect to the symmetric generators.
FiniteGroupSet word_ball(const Group& g, int r);
// The same ball ordered by word length, then lexicographically.
std::vector<GroupElement> word_ball_shortlex(const Group& g, int r);

// max_{t in K} |tF symdiff F| / |F|.
Rational folner_defect(const Group& g, const FiniteGroupSet& f, const FiniteGroupSet& k);
// Strict: folner_defect < delta.
bool is_invariant(const Group& g, const FiniteGroupSet& f, const FiniteGroupSet& k,
                  const Rational& delta);

// Right translates of T that straddle E: {g : Tg meets E and Tg is not inside E}.
FiniteGroupSet t_boundary(const Group& g, const FiniteGroupSet& t, const FiniteGroupSet& e);

// B_0..B_n with B_n = cap_{t in F^n} tS, B_k = (cap_{F^k} tS) minus cap_{F^{k+1}} tS,
// B_0 = S minus cap_{F} tS. F must be symmetric and contain e.
std::vector<FiniteGroupSet> folner_layering(const Group& g, const FiniteGroupSet& s,
                                            const FiniteGroupSet& f, int n);

// A (K, delta)-invariant set from the built-in family for the group kind.
FiniteGroupSet folner_sequence(const Group& g, const FiniteGroupSet& k, const Rational& delta);

}  // namespace towerlab
