#pragma once

#include "towerlab/cantor.hpp"
#include "towerlab/group.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace towerlab {

// Nonnegative integer function on X, constant on the cells of one resolution.
class TypeElement {
 public:
  TypeElement() = default;
  TypeElement(SystemPtr system, Resolution res, std::map<CellId, std::int64_t> weights = {});

  static TypeElement indicator(const ClopenSet& a, std::int64_t multiplicity = 1);
  // sum_j 1_{A_j}
  static TypeElement from_layers(const std::vector<ClopenSet>& layers);

  const SystemPtr& system() const { return system_; }
  const Resolution& resolution() const { return res_; }
  const std::map<CellId, std::int64_t>& weights() const& { return weights_; }
  std::map<CellId, std::int64_t> weights() && { return std::move(weights_); }
  std::int64_t weight(CellId cell) const;
  std::int64_t total() const;
  std::int64_t max_weight() const;
  bool is_zero() const { return weights_.empty(); }

  TypeElement refine(const Resolution& finer) const;
  // alpha_s(f)(x) = f(s^{-1}x)
  TypeElement act(const GroupElement& s) const;
  TypeElement scale(std::int64_t k) const;
  // A_j = {f >= j}, j = 1..max
  std::vector<ClopenSet> layers() const;

  friend TypeElement operator+(const TypeElement& a, const TypeElement& b);
  friend bool operator==(const TypeElement& a, const TypeElement& b);

 private:
  SystemPtr system_;
  Resolution res_;
  std::map<CellId, std::int64_t> weights_;  // zero weights are never stored
};

std::pair<TypeElement, TypeElement> align(const TypeElement& a, const TypeElement& b);
// f - g, throws when some weight would become negative.
TypeElement subtract(const TypeElement& f, const TypeElement& g);

// mu(f) = sum of weight * cell mass.
MeasureValue state(const TypeElement& f, std::size_t mu);

struct TranslatedPart {
  TypeElement h;
  GroupElement s;
};

// sum h_i = f and sum s_i h_i = g (exactly, or <= g with a remainder for leq).
struct EquidecompWitness {
  std::vector<TranslatedPart> parts;
};

struct WitnessCheck {
  bool sums_to_source = false;
  bool image_ok = false;
  std::string detail;
  bool ok() const { return sums_to_source && image_ok; }
};

// Independent check that sum h_i = f and sum s_i h_i = g.
WitnessCheck check_equidecomposition(const TypeElement& f, const TypeElement& g,
                                     const EquidecompWitness& w);
// sum h_i = f and sum s_i h_i + remainder = g.
WitnessCheck check_leq(const TypeElement& f, const TypeElement& g, const EquidecompWitness& w,
                       const TypeElement& remainder);

struct TypeBudget {
  int radius = 8;
  int max_resolution = 16;  // clamped to the system's max_level()
};

enum class TypeStatus { Found, SeparatedByState, BudgetExhausted };
std::string to_string(TypeStatus s);

struct Separation {
  std::size_t measure = 0;
  Rational f_value;
  Rational g_value;
};

struct TypeResult {
  TypeStatus status = TypeStatus::BudgetExhausted;
  std::optional<EquidecompWitness> witness;
  std::optional<TypeElement> remainder;  // leq only
  std::optional<Separation> separation;
  TypeBudget budget;
  int attempts = 0;
  bool found() const { return status == TypeStatus::Found; }
};

TypeResult find_equidecomposition(const TypeElement& f, const TypeElement& g, const TypeBudget& b);
TypeResult leq(const TypeElement& f, const TypeElement& g, const TypeBudget& b);

enum class PerforationVerdict { Holds, PremiseFails, Inconclusive };
std::string to_string(PerforationVerdict v);

struct PerforationProbe {
  PerforationVerdict verdict = PerforationVerdict::Inconclusive;
  int n = 1;
  TypeResult premise;
  std::optional<TypeResult> conclusion;
};

// Tries (n+1)f <= n g, and then f <= g. A missing conclusion is reported as
// inconclusive, never as perforation.
PerforationProbe probe_almost_unperforation(const TypeElement& f, const TypeElement& g, int n,
                                            const TypeBudget& b);

}  // namespace towerlab
