#pragma once

#include "towerlab/group.hpp"
#include "towerlab/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace towerlab {

using CellId = std::uint64_t;

// Opaque resolution parameters; their meaning belongs to the system:
//   odometer  {k}        cells are the cosets G/N_k
//   subshift  {lo, hi}   cells are admissible words on the window [lo, hi]
//                        (hi = lo - 1 is the one-cell empty window)
//   product   concatenation of the factor parameters
struct Resolution {
  std::vector<std::int64_t> params;
  friend auto operator<=>(const Resolution&, const Resolution&) = default;
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

std::string to_string(const Resolution& r);

// Invariant-measure value, exact when error == 0.
struct MeasureValue {
  Rational value;
  Rational error;
};

class CantorSystem;
using SystemPtr = std::shared_ptr<const CantorSystem>;

// A free action of a group on a Cantor space, described through nested finite
// clopen partitions ("resolutions").
class CantorSystem {
 public:
  virtual ~CantorSystem() = default;

  virtual std::string kind() const = 0;
  virtual const Group& group() const = 0;
  virtual std::size_t resolution_arity() const = 0;

  // Standard resolution of "diameter < 2^-r".
  virtual Resolution level(int r) const = 0;
  virtual Resolution trivial() const = 0;
  // Largest r accepted by level(r).
  virtual int max_level() const { return 1 << 20; }
  virtual void validate(const Resolution& r) const = 0;
  virtual std::uint64_t num_cells(const Resolution& r) const = 0;
  // Coarsest common refinement.
  virtual Resolution join(const Resolution& a, const Resolution& b) const = 0;
  virtual bool refines(const Resolution& fine, const Resolution& coarse) const = 0;
  virtual CellId coarsen(CellId cell, const Resolution& fine, const Resolution& coarse) const = 0;
  virtual std::vector<CellId> children(CellId cell, const Resolution& coarse,
                                       const Resolution& fine) const;

  // s maps a cell at resolution r onto exactly one cell at act_resolution(s, r).
  virtual Resolution act_resolution(const GroupElement& s, const Resolution& r) const = 0;
  virtual CellId act_cell(const GroupElement& s, CellId cell, const Resolution& r) const = 0;

  virtual std::size_t num_measures() const = 0;
  virtual MeasureValue cell_mass(std::size_t measure, CellId cell, const Resolution& r) const = 0;
  // Mass of a union of cells at one resolution; the default sums cell masses
  // and their error bounds.
  virtual MeasureValue set_mass(std::size_t measure, const std::vector<CellId>& cells,
                                const Resolution& r) const;

  virtual std::string describe_cell(CellId cell, const Resolution& r) const;

  // Throws ResourceExhausted when the resolution has more cells than cell_cap().
  std::uint64_t checked_num_cells(const Resolution& r) const;
};

// Inverse limit of G/N_k over a quotient ladder of Z^d.
class ProfiniteOdometer final : public CantorSystem {
 public:
  explicit ProfiniteOdometer(Group ladder_group);

  std::string kind() const override { return "ProfiniteOdometer"; }
  const Group& group() const override { return group_; }
  std::size_t resolution_arity() const override { return 1; }
  Resolution level(int r) const override;
  Resolution trivial() const override { return {{0}}; }
  int max_level() const override { return depth(); }
  void validate(const Resolution& r) const override;
  std::uint64_t num_cells(const Resolution& r) const override;
  Resolution join(const Resolution& a, const Resolution& b) const override;
  bool refines(const Resolution& fine, const Resolution& coarse) const override;
  CellId coarsen(CellId cell, const Resolution& fine, const Resolution& coarse) const override;
  std::vector<CellId> children(CellId cell, const Resolution& coarse,
                               const Resolution& fine) const override;
  Resolution act_resolution(const GroupElement&, const Resolution& r) const override { return r; }
  CellId act_cell(const GroupElement& s, CellId cell, const Resolution& r) const override;
  std::size_t num_measures() const override { return 1; }
  MeasureValue cell_mass(std::size_t measure, CellId cell, const Resolution& r) const override;
  std::string describe_cell(CellId cell, const Resolution& r) const override;

  int depth() const { return group_.ladder_depth(); }
  // Residue vector of a cell at depth k, and back.
  std::vector<std::int64_t> residues(CellId cell, int k) const;
  CellId cell_of(std::span<const std::int64_t> residues, int k) const;

 private:
  int depth_of(const Resolution& r) const;
  Group group_;
};

// Two-sided subshift generated by a primitive substitution, acted on by Z
// through the left shift. Cylinder masses are those of the empirical measure
// (1/N) sum_{i<N} delta_{T^i y} for a fixed sample point y, which is additive
// across resolutions; the reported error bounds its distance to the unique
// invariant measure heuristically.
class SubstitutionSubshift final : public CantorSystem {
 public:
  static constexpr std::size_t kDefaultSampleLength = std::size_t{1} << 20;
  // Windows must stay inside [-kPad, kPad].
  static constexpr std::int64_t kPad = 8192;

  SubstitutionSubshift(std::map<char, std::string> rules,
                       std::size_t sample_length = kDefaultSampleLength);

  std::string kind() const override { return "SubstitutionSubshift"; }
  const Group& group() const override { return group_; }
  std::size_t resolution_arity() const override { return 2; }
  Resolution level(int r) const override { return {{-r, r}}; }
  Resolution trivial() const override { return {{0, -1}}; }
  int max_level() const override { return 2047; }
  void validate(const Resolution& r) const override;
  std::uint64_t num_cells(const Resolution& r) const override;
  Resolution join(const Resolution& a, const Resolution& b) const override;
  bool refines(const Resolution& fine, const Resolution& coarse) const override;
  CellId coarsen(CellId cell, const Resolution& fine, const Resolution& coarse) const override;
  std::vector<CellId> children(CellId cell, const Resolution& coarse,
                               const Resolution& fine) const override;
  Resolution act_resolution(const GroupElement& s, const Resolution& r) const override;
  CellId act_cell(const GroupElement&, CellId cell, const Resolution&) const override {
    return cell;
  }
  std::size_t num_measures() const override { return 1; }
  MeasureValue cell_mass(std::size_t measure, CellId cell, const Resolution& r) const override;
  MeasureValue set_mass(std::size_t measure, const std::vector<CellId>& cells,
                        const Resolution& r) const override;
  std::string describe_cell(CellId cell, const Resolution& r) const override;

  const std::map<char, std::string>& rules() const { return rules_; }
  std::size_t sample_length() const { return sample_length_; }
  // Admissible words of length n, sorted; a cell id is an index into this list.
  const std::vector<std::string>& language(std::size_t n) const;
  CellId word_id(const std::string& word) const;  // throws if not admissible
  const std::string& word(CellId cell, const Resolution& r) const;
  // sigma^k(letter) for the smallest k with length >= min_length.
  std::string iterate(char letter, std::size_t min_length) const;
  // Word around y; coordinate 0 of y is sample()[kPad].
  const std::string& sample() const { return sample_; }

 private:
  struct Language {
    std::vector<std::string> words;
    std::map<std::string, CellId, std::less<>> index;
    std::vector<std::uint64_t> counts;  // occurrences starting in [kPad, kPad + N)
  };
  const Language& language_data(std::size_t n) const;
  static std::size_t window_length(const Resolution& r);

  Group group_;
  std::map<char, std::string> rules_;
  std::size_t sample_length_;
  std::string sample_;
  std::vector<std::string> two_letter_words_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<Language>> languages_;
};

// Diagonal action on a product of systems sharing the acting group Z^d.
// Measures are products of factor measures.
class ProductSystem final : public CantorSystem {
 public:
  explicit ProductSystem(std::vector<SystemPtr> factors);

  std::string kind() const override { return "Product"; }
  const Group& group() const override { return group_; }
  std::size_t resolution_arity() const override { return arity_; }
  Resolution level(int r) const override;
  Resolution trivial() const override;
  int max_level() const override;
  void validate(const Resolution& r) const override;
  std::uint64_t num_cells(const Resolution& r) const override;
  Resolution join(const Resolution& a, const Resolution& b) const override;
  bool refines(const Resolution& fine, const Resolution& coarse) const override;
  CellId coarsen(CellId cell, const Resolution& fine, const Resolution& coarse) const override;
  Resolution act_resolution(const GroupElement& s, const Resolution& r) const override;
  CellId act_cell(const GroupElement& s, CellId cell, const Resolution& r) const override;
  std::size_t num_measures() const override;
  MeasureValue cell_mass(std::size_t measure, CellId cell, const Resolution& r) const override;
  std::string describe_cell(CellId cell, const Resolution& r) const override;

  const std::vector<SystemPtr>& factors() const { return factors_; }
  Resolution factor_resolution(const Resolution& r, std::size_t factor) const;
  std::vector<Resolution> split(const Resolution& r) const;
  Resolution combine(const std::vector<Resolution>& parts) const;
  std::vector<CellId> split_cell(CellId cell, const std::vector<Resolution>& parts) const;
  CellId combine_cell(const std::vector<CellId>& cells, const std::vector<Resolution>& parts) const;

 private:
  std::vector<SystemPtr> factors_;
  Group group_;
  std::size_t arity_ = 0;
};

// Clopen subset of a system: a sorted set of cells at one resolution.
class ClopenSet {
 public:
  ClopenSet() = default;
  ClopenSet(SystemPtr system, Resolution res, std::vector<CellId> cells);

  static ClopenSet empty(SystemPtr system, Resolution res);
  static ClopenSet full(SystemPtr system, Resolution res);
  static ClopenSet cell(SystemPtr system, Resolution res, CellId id);

  const SystemPtr& system() const { return system_; }
  const Resolution& resolution() const { return res_; }
  const std::vector<CellId>& cells() const& { return cells_; }
  std::vector<CellId> cells() && { return std::move(cells_); }
  std::size_t cell_count() const { return cells_.size(); }
  bool is_empty() const { return cells_.empty(); }
  bool is_full() const;
  bool contains_cell(CellId id) const;

  ClopenSet refine(const Resolution& finer) const;
  // sA = {sx : x in A}
  ClopenSet act(const GroupElement& s) const;
  ClopenSet complement() const;
  MeasureValue measure(std::size_t mu) const;

  friend ClopenSet operator|(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet operator&(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet operator-(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet operator^(const ClopenSet& a, const ClopenSet& b);
  // Set equality after alignment to a common resolution.
  friend bool operator==(const ClopenSet& a, const ClopenSet& b);
  bool is_subset_of(const ClopenSet& other) const;
  bool intersects(const ClopenSet& other) const;

 private:
  SystemPtr system_;
  Resolution res_;
  std::vector<CellId> cells_;
};

// Both sets refined to the join of their resolutions.
std::pair<ClopenSet, ClopenSet> align(const ClopenSet& a, const ClopenSet& b);
Resolution common_resolution(const std::vector<ClopenSet>& sets);

// min over invariant measures of mu(B) - mu(A) on point estimates
// (exact for odometers).
Rational measure_margin(const ClopenSet& a, const ClopenSet& b);

}  // namespace towerlab
