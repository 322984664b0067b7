#pragma once

#include "towerlab/cantor.hpp"
#include "towerlab/comparison.hpp"
#include "towerlab/group.hpp"
#include "towerlab/towers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace towerlab {

struct AFCertificate {
  Castle castle;
  int n = 1;
  FiniteGroupSet k;
  Rational delta;
  int diameter_resolution = 0;           // levels lie inside single level(r) cells
  std::vector<FiniteGroupSet> subshapes;  // S'_i
  ComparisonWitness witness;             // X \ footprint < union of S'_i V_i
};

struct CertificateReport {
  bool castle_ok = false;
  bool invariance_ok = false;
  bool diameter_ok = false;
  bool ratio_ok = false;
  bool witness_ok = false;
  std::vector<Rational> defects;  // per tower
  std::vector<std::string> problems;
  bool ok() const { return castle_ok && invariance_ok && diameter_ok && ratio_ok && witness_ok; }
};

ClopenSet remainder_set(const AFCertificate& cert);
ClopenSet subshape_set(const AFCertificate& cert);

CertificateReport verify_certificate(const AFCertificate& cert);

// Single tower over the depth-k base cell with shape the coset representatives
// F_k. Throws InvarianceViolation when F_k is not (K, delta)-invariant.
AFCertificate build_odometer_certificate(const SystemPtr& odometer, int k, int n,
                                         const FiniteGroupSet& kset, const Rational& delta);

struct ShapeBound {
  std::size_t tower = 0;
  GroupElement t;
  std::size_t original_defect = 0;  // |tS symdiff S|
  std::size_t added = 0;            // |S''|
  std::size_t extended_size = 0;    // |S~|
  std::size_t extended_defect = 0;  // |tS~ symdiff S~|
};

struct ExactDecomposition {
  Castle castle;
  Rational delta_target;
  std::vector<FiniteGroupSet> added;  // S''_i, per output tower
  std::vector<ShapeBound> bounds;
};

// Grafts the remainder onto the towers so that the levels partition X. The
// target invariance defaults to 2 delta and must satisfy delta + 2/n <= target.
ExactDecomposition exact_decomposition(const AFCertificate& cert,
                                       std::optional<Rational> delta_target = std::nullopt);

}  // namespace towerlab
