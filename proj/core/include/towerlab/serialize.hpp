#pragma once

#include "towerlab/afcheck.hpp"
#include "towerlab/amdim.hpp"
#include "towerlab/cantor.hpp"
#include "towerlab/comparison.hpp"
#include "towerlab/group.hpp"
#include "towerlab/quasitiling.hpp"
#include "towerlab/towers.hpp"
#include "towerlab/typesemigroup.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>

namespace towerlab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json to_json(const GroupDescriptor& d);
GroupDescriptor group_from_json(const Json& j);
// Rank-one elements are plain integers; others are coordinate arrays.
Json to_json(const GroupElement& g);
GroupElement element_from_json(const Json& j, const Group& g);
Json to_json(const FiniteGroupSet& s);
FiniteGroupSet set_from_json(const Json& j, const Group& g);
Json to_json(const Resolution& r);
Resolution resolution_from_json(const Json& j);

Json system_to_json(const CantorSystem& sys);
SystemPtr system_from_json(const Json& j);

// Systems parsed from equal JSON share one handle, so sets loaded from
// different files can be combined.
class SystemCache {
 public:
  SystemPtr get(const Json& j);

 private:
  std::map<std::string, SystemPtr> systems_;
};

// {"resolution": [...], "cells": [...]}; subshift sets may list "words"
// instead of cells. A "system" key is included on request.
Json to_json(const ClopenSet& a, bool with_system = false);
ClopenSet clopen_from_json(const Json& j, const SystemPtr& sys);
// Uses the "system" key of j.
ClopenSet clopen_from_json(const Json& j, SystemCache& cache);

// {"system": ..., "towers": [{"base": ..., "shape": [...]}]}
Json to_json(const TowerFamily& f);
TowerFamily family_from_json(const Json& j, SystemCache& cache);

Json to_json(const ComparisonWitness& w);
ComparisonWitness witness_from_json(const Json& j, const SystemPtr& sys);

Json to_json(const TypeElement& f, bool with_system = false);
TypeElement type_from_json(const Json& j, const SystemPtr& sys);
TypeElement type_from_json(const Json& j, SystemCache& cache);
Json to_json(const EquidecompWitness& w);

Json to_json(const SimplexMap& phi);
Json to_json(const AFCertificate& c);
AFCertificate certificate_from_json(const Json& j, SystemCache& cache);
Json to_json(const QuasiTiling& q, const Group& g);

Json to_json(const CastleReport& r);
Json to_json(const LebesgueReport& r, std::size_t max_certificate = 4096);
Json to_json(const ChromaticResult& r);
Json to_json(const WitnessReport& r);
Json to_json(const ComparisonResult& r);
Json to_json(const TypeResult& r);
Json to_json(const PerforationProbe& p);
Json to_json(const CertificateReport& r);
Json to_json(const ExactDecomposition& d);

}  // namespace towerlab
