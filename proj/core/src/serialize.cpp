#include "towerlab/serialize.hpp"

#include "towerlab/errors.hpp"

namespace towerlab {

namespace {

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing JSON key '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return req(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad JSON value for '") + key + "': " + e.what());
  }
}

std::vector<CellId> cells_from(const Json& j) {
  std::vector<CellId> out;
  if (!j.is_array()) throw InvalidInput("cells must be an array");
  for (const auto& c : j) {
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) throw InvalidInput("cell ids are nonnegative integers");
    out.push_back(c.get<CellId>());
  }
  return out;
}

}  // namespace

Json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw InvalidInput("rationals are integers or strings like \"3/4\"");
}

Json to_json(const GroupDescriptor& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case GroupKind::Zd: j["d"] = d.dim; break;
    case GroupKind::Lamplighter: j["window"] = d.lamp_window; break;
    case GroupKind::QuotientLadder:
      j["d"] = d.dim;
      j["ladder"] = d.ladder;
      break;
    default: break;
  }
  return j;
}

GroupDescriptor group_from_json(const Json& j) {
  const auto kind = parse_group_kind(get<std::string>(j, "kind"));
  switch (kind) {
    case GroupKind::Z: return GroupDescriptor::integers();
    case GroupKind::Zd: return GroupDescriptor::lattice(get<int>(j, "d"));
    case GroupKind::Heisenberg: return GroupDescriptor::heisenberg();
    case GroupKind::Lamplighter:
      return GroupDescriptor::lamplighter(j.contains("window") ? get<int>(j, "window") : 16);
    case GroupKind::QuotientLadder: {
      const int d = j.contains("d") ? get<int>(j, "d") : 1;
      if (j.contains("ladder")) {
        return GroupDescriptor::custom_ladder(d, get<std::vector<std::vector<std::int64_t>>>(j, "ladder"));
      }
      return GroupDescriptor::power_ladder(d, get<std::int64_t>(j, "base"), get<int>(j, "depth"));
    }
  }
  throw InvalidInput("unknown group kind");
}

Json to_json(const GroupElement& g) {
  if (g.rank() == 1) return g[0];
  Json j = Json::array();
  for (auto c : g.coords()) j.push_back(c);
  return j;
}

GroupElement element_from_json(const Json& j, const Group& g) {
  std::vector<std::int64_t> coords;
  if (j.is_number_integer()) {
    coords.push_back(j.get<std::int64_t>());
  } else if (j.is_array()) {
    for (const auto& c : j) {
      if (!c.is_number_integer()) throw InvalidInput("group element coordinates are integers");
      coords.push_back(c.get<std::int64_t>());
    }
  } else {
    throw InvalidInput("group elements are integers or integer arrays");
  }
  GroupElement e(coords);
  g.validate(e);
  return e;
}

Json to_json(const FiniteGroupSet& s) {
  Json j = Json::array();
  for (const auto& g : s) j.push_back(to_json(g));
  return j;
}

FiniteGroupSet set_from_json(const Json& j, const Group& g) {
  if (!j.is_array()) throw InvalidInput("group sets are arrays of elements");
  std::vector<GroupElement> out;
  for (const auto& e : j) out.push_back(element_from_json(e, g));
  return FiniteGroupSet(std::move(out));
}

Json to_json(const Resolution& r) { return r.params; }

Resolution resolution_from_json(const Json& j) {
  if (j.is_number_integer()) return {{j.get<std::int64_t>()}};
  if (!j.is_array()) throw InvalidInput("resolutions are integer arrays");
  Resolution r;
  for (const auto& p : j) {
    if (!p.is_number_integer()) throw InvalidInput("resolution parameters are integers");
    r.params.push_back(p.get<std::int64_t>());
  }
  return r;
}

Json system_to_json(const CantorSystem& sys) {
  Json j;
  if (const auto* o = dynamic_cast<const ProfiniteOdometer*>(&sys)) {
    j["kind"] = "ProfiniteOdometer";
    j["group"] = to_json(o->group().descriptor());
  } else if (const auto* s = dynamic_cast<const SubstitutionSubshift*>(&sys)) {
    j["kind"] = "SubstitutionSubshift";
    Json rules = Json::object();
    for (const auto& [a, img] : s->rules()) rules[std::string(1, a)] = img;
    j["rules"] = rules;
    j["sample_length"] = s->sample_length();
  } else if (const auto* p = dynamic_cast<const ProductSystem*>(&sys)) {
    j["kind"] = "Product";
    j["factors"] = Json::array();
    for (const auto& f : p->factors()) j["factors"].push_back(system_to_json(*f));
  } else {
    throw Unsupported("system kind has no JSON form");
  }
  return j;
}

SystemPtr system_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "ProfiniteOdometer") return std::make_shared<ProfiniteOdometer>(Group(group_from_json(req(j, "group"))));
  if (kind == "odometer") {
    const int d = j.contains("d") ? get<int>(j, "d") : 1;
    return std::make_shared<ProfiniteOdometer>(
        Group(GroupDescriptor::power_ladder(d, get<std::int64_t>(j, "mod"), get<int>(j, "depth"))));
  }
  if (kind == "SubstitutionSubshift") {
    std::map<char, std::string> rules;
    for (const auto& [k, v] : req(j, "rules").items()) {
      if (k.size() != 1 || !v.is_string()) throw InvalidInput("substitution rules map letters to strings");
      rules[k[0]] = v.get<std::string>();
    }
    const std::size_t n = j.contains("sample_length") ? get<std::size_t>(j, "sample_length")
                                                      : SubstitutionSubshift::kDefaultSampleLength;
    return std::make_shared<SubstitutionSubshift>(std::move(rules), n);
  }
  if (kind == "Product") {
    std::vector<SystemPtr> factors;
    for (const auto& f : req(j, "factors")) factors.push_back(system_from_json(f));
    return std::make_shared<ProductSystem>(std::move(factors));
  }
  throw InvalidInput("unknown system kind '" + kind + "'");
}

SystemPtr SystemCache::get(const Json& j) {
  SystemPtr built = system_from_json(j);
  const std::string key = system_to_json(*built).dump();
  auto [it, inserted] = systems_.emplace(key, built);
  return it->second;
}

Json to_json(const ClopenSet& a, bool with_system) {
  Json j;
  if (with_system) j["system"] = system_to_json(*a.system());
  j["resolution"] = to_json(a.resolution());
  j["cells"] = a.cells();
  return j;
}

ClopenSet clopen_from_json(const Json& j, const SystemPtr& sys) {
  const Resolution r = resolution_from_json(req(j, "resolution"));
  if (j.contains("words")) {
    const auto* s = dynamic_cast<const SubstitutionSubshift*>(sys.get());
    if (!s) throw InvalidInput("\"words\" is only meaningful for subshifts");
    s->validate(r);
    std::vector<CellId> cells;
    for (const auto& w : j.at("words")) {
      const auto word = w.get<std::string>();
      if (word.size() != static_cast<std::size_t>(r.params[1] - r.params[0] + 1)) {
        throw InvalidInput("word '" + word + "' does not fit the window");
      }
      cells.push_back(s->word_id(word));
    }
    return ClopenSet(sys, r, std::move(cells));
  }
  if (j.contains("full") && j.at("full").get<bool>()) return ClopenSet::full(sys, r);
  return ClopenSet(sys, r, cells_from(req(j, "cells")));
}

ClopenSet clopen_from_json(const Json& j, SystemCache& cache) {
  return clopen_from_json(j, cache.get(req(j, "system")));
}

Json to_json(const TowerFamily& f) {
  Json j;
  j["system"] = system_to_json(*f.system);
  j["towers"] = Json::array();
  for (const auto& t : f.towers) {
    Json tj;
    tj["base"] = to_json(t.base);
    tj["shape"] = to_json(t.shape);
    j["towers"].push_back(tj);
  }
  return j;
}

TowerFamily family_from_json(const Json& j, SystemCache& cache) {
  TowerFamily f;
  f.system = cache.get(req(j, "system"));
  for (const auto& t : req(j, "towers")) {
    f.towers.push_back({clopen_from_json(req(t, "base"), f.system), set_from_json(req(t, "shape"), f.system->group())});
  }
  return f;
}

Json to_json(const ComparisonWitness& w) {
  Json j;
  j["m"] = w.m;
  j["resolution"] = to_json(w.resolution);
  j["pieces"] = Json::array();
  for (const auto& p : w.pieces) {
    Json pj;
    pj["set"] = to_json(p.cells);
    pj["translation"] = to_json(p.translation);
    pj["color"] = p.color;
    j["pieces"].push_back(pj);
  }
  return j;
}

ComparisonWitness witness_from_json(const Json& j, const SystemPtr& sys) {
  ComparisonWitness w;
  w.m = get<int>(j, "m");
  w.resolution = j.contains("resolution") ? resolution_from_json(j.at("resolution")) : sys->trivial();
  for (const auto& p : req(j, "pieces")) {
    w.pieces.push_back({clopen_from_json(req(p, "set"), sys), element_from_json(req(p, "translation"), sys->group()),
                        p.contains("color") ? get<int>(p, "color") : 0});
  }
  return w;
}

Json to_json(const TypeElement& f, bool with_system) {
  Json j;
  if (with_system) j["system"] = system_to_json(*f.system());
  j["resolution"] = to_json(f.resolution());
  j["weights"] = Json::array();
  for (const auto& [c, w] : f.weights()) j["weights"].push_back({c, w});
  return j;
}

TypeElement type_from_json(const Json& j, const SystemPtr& sys) {
  const Resolution r = resolution_from_json(req(j, "resolution"));
  std::map<CellId, std::int64_t> weights;
  for (const auto& e : req(j, "weights")) {
    if (!e.is_array() || e.size() != 2) throw InvalidInput("weights are [cell, weight] pairs");
    weights[e[0].get<CellId>()] += e[1].get<std::int64_t>();
  }
  return TypeElement(sys, r, std::move(weights));
}

TypeElement type_from_json(const Json& j, SystemCache& cache) {
  return type_from_json(j, cache.get(req(j, "system")));
}

Json to_json(const EquidecompWitness& w) {
  Json j = Json::array();
  for (const auto& p : w.parts) j.push_back({{"h", to_json(p.h)}, {"s", to_json(p.s)}});
  return j;
}

Json to_json(const SimplexMap& phi) {
  Json j;
  j["resolution"] = to_json(phi.resolution);
  j["support_bound"] = phi.support_bound;
  j["min_normalizer"] = to_json(phi.min_normalizer);
  j["cells"] = Json::array();
  for (std::size_t c = 0; c < phi.values.size(); ++c) {
    Json w = Json::array();
    for (const auto& [t, v] : phi.values[c]) w.push_back({to_json(t), to_json(v)});
    j["cells"].push_back({{"cell", c}, {"weights", w}});
  }
  return j;
}

Json to_json(const AFCertificate& c) {
  Json j;
  j["castle"] = to_json(c.castle);
  j["n"] = c.n;
  j["K"] = to_json(c.k);
  j["delta"] = to_json(c.delta);
  j["diameter_resolution"] = c.diameter_resolution;
  j["subshapes"] = Json::array();
  for (const auto& s : c.subshapes) j["subshapes"].push_back(to_json(s));
  j["witness"] = to_json(c.witness);
  return j;
}

AFCertificate certificate_from_json(const Json& j, SystemCache& cache) {
  AFCertificate c;
  c.castle = family_from_json(req(j, "castle"), cache);
  const Group& g = c.castle.system->group();
  c.n = get<int>(j, "n");
  c.k = set_from_json(req(j, "K"), g);
  c.delta = rational_from_json(req(j, "delta"));
  c.diameter_resolution = get<int>(j, "diameter_resolution");
  for (const auto& s : req(j, "subshapes")) c.subshapes.push_back(set_from_json(s, g));
  c.witness = witness_from_json(req(j, "witness"), c.castle.system);
  return c;
}

Json to_json(const QuasiTiling& q, const Group& g) {
  Json j;
  j["beta"] = to_json(q.beta);
  j["ambient_size"] = q.ambient.size();
  j["tiles"] = Json::array();
  for (const auto& t : q.tiles) j["tiles"].push_back(to_json(t));
  j["placements"] = Json::array();
  for (const auto& p : q.placements) {
    j["placements"].push_back({{"scale", p.scale}, {"center", to_json(p.center)}, {"kept", to_json(p.kept)}});
  }
  j["coverage"] = to_json(q.coverage(g));
  return j;
}

Json to_json(const CastleReport& r) {
  Json j;
  j["valid"] = r.valid();
  j["levels_disjoint"] = r.levels_disjoint;
  j["footprints_disjoint"] = r.footprints_disjoint;
  j["partitions"] = r.partitions;
  j["resolution"] = to_json(r.resolution);
  j["uncovered_cells"] = r.uncovered_cells;
  j["violations"] = Json::array();
  for (const auto& v : r.violations) {
    j["violations"].push_back({{"kind", v.kind},
                               {"tower_a", v.tower_a},
                               {"tower_b", v.tower_b},
                               {"element_a", to_json(v.element_a)},
                               {"element_b", to_json(v.element_b)},
                               {"cell", v.cell}});
  }
  return j;
}

Json to_json(const LebesgueReport& r, std::size_t max_certificate) {
  Json j;
  j["holds"] = r.holds;
  j["resolution"] = to_json(r.resolution);
  if (r.uncovered) j["uncovered_cell"] = *r.uncovered;
  if (r.holds && r.certificate.size() <= max_certificate) {
    j["certificate"] = Json::array();
    for (const auto& w : r.certificate) j["certificate"].push_back({w.tower, to_json(w.t)});
  }
  return j;
}

Json to_json(const ChromaticResult& r) {
  return {{"chromatic_number", r.number}, {"exact", r.exact}, {"coloring", r.coloring}};
}

Json to_json(const WitnessReport& r) {
  return {{"ok", r.ok()},
          {"partition", r.partition_ok},
          {"colors", r.colors_ok},
          {"disjoint", r.disjoint_ok},
          {"contained", r.contained_ok},
          {"violations", r.violations}};
}

Json to_json(const ComparisonResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  if (!r.found()) j["reason"] = to_string(r.reason);
  j["budget"] = {{"m", r.budget.m}, {"radius", r.budget.radius}, {"max_resolution", r.budget.max_resolution}};
  j["measure_margin"] = to_json(r.margin);
  j["attempts"] = Json::array();
  for (const auto& a : r.attempts) {
    j["attempts"].push_back({{"level", a.resolution_level},
                             {"radius", a.radius},
                             {"resolution", to_json(a.resolution)},
                             {"a_cells", a.a_cells},
                             {"b_cells", a.b_cells},
                             {"edges", a.edges},
                             {"matched", a.matched}});
  }
  j["notes"] = r.notes;
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

Json to_json(const TypeResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["budget"] = {{"radius", r.budget.radius}, {"max_resolution", r.budget.max_resolution}};
  j["attempts"] = r.attempts;
  if (r.separation) {
    j["separation"] = {{"measure", r.separation->measure},
                       {"f", to_json(r.separation->f_value)},
                       {"g", to_json(r.separation->g_value)}};
  }
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.remainder) j["remainder"] = to_json(*r.remainder);
  return j;
}

Json to_json(const PerforationProbe& p) {
  Json j;
  j["verdict"] = to_string(p.verdict);
  j["n"] = p.n;
  j["premise"] = to_json(p.premise);
  if (p.conclusion) j["conclusion"] = to_json(*p.conclusion);
  return j;
}

Json to_json(const CertificateReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["castle"] = r.castle_ok;
  j["invariance"] = r.invariance_ok;
  j["diameter"] = r.diameter_ok;
  j["ratio"] = r.ratio_ok;
  j["witness"] = r.witness_ok;
  j["defects"] = Json::array();
  for (const auto& d : r.defects) j["defects"].push_back(to_json(d));
  j["problems"] = r.problems;
  return j;
}

Json to_json(const ExactDecomposition& d) {
  Json j;
  j["castle"] = to_json(d.castle);
  j["delta_target"] = to_json(d.delta_target);
  j["added"] = Json::array();
  for (const auto& a : d.added) j["added"].push_back(to_json(a));
  j["bounds"] = Json::array();
  for (const auto& b : d.bounds) {
    j["bounds"].push_back({{"tower", b.tower},
                           {"t", to_json(b.t)},
                           {"original_defect", b.original_defect},
                           {"added", b.added},
                           {"extended_size", b.extended_size},
                           {"extended_defect", b.extended_defect}});
  }
  return j;
}

}  // namespace towerlab
