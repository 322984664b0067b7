#include "towerlab/towerlab.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace towerlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  Json artifact;
};

void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

SystemPtr odometer(std::int64_t base, int depth) {
  return std::make_shared<ProfiniteOdometer>(Group(GroupDescriptor::power_ladder(1, base, depth)));
}

GroupElement z(std::int64_t n) { return GroupElement{n}; }

std::string thue_morse_word(std::size_t n) {
  std::string w(n, '0');
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<char>('0' + (__builtin_popcountll(i) & 1));
  return w;
}

Castle single_tower(const SystemPtr& sys, int k) {
  return Castle{sys, {Tower{ClopenSet::cell(sys, sys->level(k), 0),
                            FiniteGroupSet::interval(0, (std::int64_t{1} << k) - 1)}}};
}

// 1. Odometer tower certificate.
Outcome criterion1() {
  Outcome o;
  const auto sys = odometer(2, 5);
  const auto cert = build_odometer_certificate(sys, 5, 4, FiniteGroupSet{z(1)}, make_rational(1, 10));
  const auto report = verify_certificate(cert);
  require(o, report.ok(), "certificate does not verify");
  std::vector<GroupElement> expect;
  for (std::int64_t i = 0; i < 32; ++i) expect.push_back(z(i));
  require(o, cert.castle.towers.size() == 1 && cert.castle.towers[0].shape == FiniteGroupSet(expect),
          "shape is not {0..31}");
  require(o, report.defects.size() == 1 && report.defects[0] == make_rational(2, 32), "defect is not 2/32");
  o.artifact = {{"certificate", to_json(cert)}, {"report", to_json(report)}};
  o.detail = "shape {0..31}, defect " + to_string(report.defects.at(0));
  return o;
}

// 2. First-return decomposition on Thue-Morse.
Outcome criterion2() {
  Outcome o;
  const auto sys = std::make_shared<SubstitutionSubshift>(std::map<char, std::string>{{'0', "01"}, {'1', "10"}});
  const auto v = ClopenSet::cell(sys, Resolution{{0, 0}}, sys->word_id("0"));
  const auto castle = first_return_decomposition(sys, v, 64);
  std::set<std::size_t> lengths;
  for (const auto& t : castle.towers) lengths.insert(t.shape.size());
  require(o, lengths == std::set<std::size_t>{1, 2, 3}, "shape lengths are not {1,2,3}");
  const auto report = verify_castle(castle);
  require(o, report.partitions, "levels do not partition X");
  const std::size_t window = static_cast<std::size_t>(report.resolution.params[1] - report.resolution.params[0] + 1);

  const auto w = thue_morse_word(std::size_t{1} << 16);
  std::set<std::size_t> gaps;
  std::size_t checked = 0;
  for (std::size_t i = 16; i + 16 < w.size(); ++i) {
    if (w[i] != '0') continue;
    std::size_t gap = 1;
    while (w[i + gap] != '0') ++gap;
    gaps.insert(gap);
    int owners = 0;
    for (const auto& t : castle.towers) {
      const auto& r = t.base.resolution();
      const auto word = w.substr(static_cast<std::size_t>(static_cast<std::int64_t>(i) + r.params[0]),
                                 static_cast<std::size_t>(r.params[1] - r.params[0] + 1));
      if (t.base.contains_cell(sys->word_id(word))) {
        ++owners;
        require(o, t.shape.size() == gap, "tower height differs from the orbit return time");
      }
    }
    require(o, owners == 1, "orbit point not in exactly one base");
    ++checked;
  }
  require(o, gaps == lengths, "orbit enumeration gives different return times");
  o.artifact = {{"castle", to_json(castle)}, {"report", to_json(report)}};
  if (o.pass) {
    o.detail = "lengths {1,2,3}, partition at window length " + std::to_string(window) + ", " +
               std::to_string(checked) + " orbit points matched";
  }
  return o;
}

// 3. Double castle, E-Lebesgue and chromatic number.
Outcome criterion3() {
  Outcome o;
  const auto sys = odometer(2, 6);
  const auto doubled = double_castle(single_tower(sys, 6), 4);
  const FiniteGroupSet e{z(-1), z(0), z(1)};
  const auto leb = is_e_lebesgue(doubled, e);
  require(o, leb.holds, "double castle is not E-Lebesgue");
  bool oracle = true;
  for (std::int64_t x = 0; x < 64; ++x) {
    const auto good = [](std::int64_t t) { return t >= 1 && t <= 62; };
    if (!good(x) && !good((x + 4) % 64)) oracle = false;
  }
  require(o, oracle == leb.holds, "residue oracle disagrees");
  const auto chi = chromatic_number(doubled);
  require(o, chi.number == 2 && chi.exact, "chromatic number is not 2");
  require(o, !is_e_lebesgue(single_tower(sys, 6), e).holds, "single tower unexpectedly E-Lebesgue");
  o.artifact = {{"collection", to_json(doubled)}, {"lebesgue", to_json(leb)}, {"chromatic", to_json(chi)}};
  if (o.pass) o.detail = "E-Lebesgue, chromatic number 2";
  return o;
}

// 4. Quasitiling.
Outcome criterion4() {
  Outcome o;
  const Rational beta = make_rational(1, 4);
  const int n = plan_scales(beta);
  Rational p = 1;
  for (int i = 0; i < 10; ++i) p *= make_rational(7, 8);
  require(o, n == 11 && p >= beta && p * make_rational(7, 8) < beta, "planner does not return 11");

  const Group g(GroupDescriptor::integers());
  TileSystem sys{{}, beta};
  for (int i = 0; i < n - 1; ++i) sys.tiles.push_back(FiniteGroupSet{z(0)});
  sys.tiles.push_back(FiniteGroupSet::interval(0, 4));
  require(o, tile_system_problems(g, sys).empty(), "tile system invalid");
  const auto e = FiniteGroupSet::interval(0, 199);
  const auto q = quasitile(g, e, sys);
  const auto check = check_quasitiling(g, q);
  require(o, check.ok(), "quasitiling checker rejects the run");

  std::set<std::int64_t> covered, kept;
  bool disjoint = true;
  for (const auto& pl : q.placements) {
    for (const auto& t : q.tiles[static_cast<std::size_t>(pl.scale)]) covered.insert(t[0] + pl.center[0]);
    for (const auto& t : pl.kept) disjoint = kept.insert(t[0] + pl.center[0]).second && disjoint;
  }
  require(o, disjoint, "kept translates overlap");
  require(o, 4 * covered.size() >= 3 * e.size(), "coverage below 0.75");
  const auto parts = disjointify(g, q);
  for (std::size_t i = 0; i < parts.size(); ++i)
    require(o, 4 * parts[i].size() >= 3 * q.tiles[static_cast<std::size_t>(q.placements[i].scale)].size(),
            "disjointify keeps less than 0.75 of a tile");
  o.artifact = {{"quasitiling", to_json(q, g)}, {"coverage", to_json(check.coverage)}};
  if (o.pass) o.detail = "n = 11, coverage " + to_string(check.coverage);
  return o;
}

std::size_t full_matching(const std::vector<CellId>& a, const std::vector<CellId>& b) {
  std::vector<int> owner(b.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t i, std::vector<bool>& seen) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (seen[j]) continue;
      seen[j] = true;
      if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), seen)) {
        owner[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  std::size_t size = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<bool> seen(b.size(), false);
    if (augment(i, seen)) ++size;
  }
  return size;
}

// 5. Exhaustive comparison on the depth-3 odometer.
Outcome criterion5() {
  Outcome o;
  const auto sys = odometer(2, 3);
  const auto r = sys->level(3);
  std::uint64_t found = 0, infeasible = 0;
  Json digest = Json::array();
  for (std::uint32_t ma = 0; ma < 256 && o.pass; ++ma) {
    std::vector<CellId> ca;
    for (CellId c = 0; c < 8; ++c)
      if (ma >> c & 1) ca.push_back(c);
    const ClopenSet a(sys, r, ca);
    std::uint64_t row = 0;
    for (std::uint32_t mb = 0; mb < 256; ++mb) {
      std::vector<CellId> cb;
      for (CellId c = 0; c < 8; ++c)
        if (mb >> c & 1) cb.push_back(c);
      const ClopenSet b(sys, r, cb);
      const bool oracle = full_matching(ca, cb) == ca.size();
      const auto res = find_witness(a, b, SearchBudget{0, 8, 3});
      if (ca.size() <= cb.size()) {
        require(o, oracle, "matcher disagrees with the cell count");
        require(o, res.found() && verify_witness(a, b, *res.witness).ok(),
                "no verified witness for A=" + std::to_string(ma) + " B=" + std::to_string(mb));
        ++found;
        row = row * 31 + res.witness->pieces.size();
      } else {
        require(o, !oracle, "matcher disagrees with the cell count");
        require(o, !res.found() && res.reason == NotFoundReason::StructurallyInfeasible,
                "missing structural impossibility for A=" + std::to_string(ma) + " B=" + std::to_string(mb));
        ++infeasible;
      }
    }
    digest.push_back(row);
  }
  o.artifact = {{"found", found}, {"infeasible", infeasible}, {"piece_digest", digest}};
  if (o.pass) o.detail = std::to_string(found) + " found, " + std::to_string(infeasible) + " infeasible";
  return o;
}

void weight_vectors(std::vector<std::vector<std::int64_t>>& out, std::vector<std::int64_t>& cur, std::size_t i,
                    std::int64_t left) {
  if (i == cur.size()) {
    out.push_back(cur);
    return;
  }
  for (std::int64_t v = 0; v <= left; ++v) {
    cur[i] = v;
    weight_vectors(out, cur, i + 1, left - v);
  }
  cur[i] = 0;
}

// 6. Type semigroup on the depth-3 odometer.
Outcome criterion6() {
  Outcome o;
  const auto sys = odometer(2, 3);
  const auto r = sys->level(3);
  std::vector<std::vector<std::int64_t>> vecs;
  std::vector<std::int64_t> cur(8, 0);
  weight_vectors(vecs, cur, 0, 4);
  std::vector<TypeElement> elems;
  for (const auto& v : vecs) {
    std::map<CellId, std::int64_t> m;
    for (std::size_t c = 0; c < 8; ++c) m[c] = v[c];
    elems.emplace_back(sys, r, m);
  }
  std::uint64_t pairs = 0, witnesses = 0, separated = 0;
  for (std::size_t i = 0; i < elems.size() && o.pass; ++i) {
    for (std::size_t j = 0; j < elems.size(); ++j) {
      const auto& f = elems[i];
      const auto& g = elems[j];
      const bool states_agree = state(f, 0).value == state(g, 0).value;
      const auto res = find_equidecomposition(f, g, TypeBudget{8, 3});
      ++pairs;
      if (res.found() != states_agree) {
        require(o, false, "equidecomposition disagrees with the state at pair " + std::to_string(i) + "," +
                              std::to_string(j));
        break;
      }
      if (!res.found()) {
        ++separated;
        continue;
      }
      std::vector<std::int64_t> src(8, 0), img(8, 0);
      for (const auto& part : res.witness->parts) {
        const auto h = part.h.refine(r);
        for (const auto& [c, v] : h.weights()) {
          src[c] += v;
          img[sys->act_cell(part.s, c, r)] += v;
        }
      }
      require(o, src == vecs[i] && img == vecs[j], "witness identity fails");
      require(o, check_equidecomposition(f, g, *res.witness).ok(), "witness check fails");
      ++witnesses;
    }
  }

  std::mt19937_64 rng(2718);
  int holds = 0, premise_fails = 0, inconclusive = 0;
  for (int k = 0; k < 100; ++k) {
    const auto& f = elems[rng() % elems.size()];
    const auto& g = elems[rng() % elems.size()];
    const auto probe = probe_almost_unperforation(f, g, 2, TypeBudget{8, 3});
    switch (probe.verdict) {
      case PerforationVerdict::Holds: ++holds; break;
      case PerforationVerdict::PremiseFails: ++premise_fails; break;
      case PerforationVerdict::Inconclusive: ++inconclusive; break;
    }
    require(o, !(probe.premise.found() && !(probe.conclusion && probe.conclusion->found())),
            "premise holds but the conclusion was not found");
  }
  o.artifact = {{"pairs", pairs}, {"witnesses", witnesses}, {"separated", separated},
                {"probe", {{"holds", holds}, {"premise_fails", premise_fails}, {"inconclusive", inconclusive}}}};
  if (o.pass) {
    o.detail = std::to_string(pairs) + " pairs, " + std::to_string(witnesses) + " witnesses, probes " +
               std::to_string(holds) + " hold / " + std::to_string(premise_fails) + " premise fails";
  }
  return o;
}

// 7. Simplex map bound.
Outcome criterion7() {
  Outcome o;
  const auto sys = odometer(2, 8);
  const auto ts = double_castle(single_tower(sys, 8), 128);
  const FiniteGroupSet f{z(-1), z(0), z(1)};
  const auto phi = build_simplex_map(ts, f, 61, 1);
  std::size_t support = 0;
  for (std::size_t x = 0; x < phi.values.size(); ++x) {
    support = std::max(support, phi.values[x].size());
    Rational total = 0;
    for (const auto& [_, v] : phi.values[x]) total += v;
    require(o, total == 1, "phi(x) is not a probability vector");
  }
  require(o, support <= 2, "support exceeds 2");
  const auto defect = equivariance_defect(phi, f);
  require(o, defect <= make_rational(6, 61), "defect exceeds 6/61");
  o.artifact = {{"support", support}, {"defect", to_json(defect)}, {"map", to_json(phi)}};
  if (o.pass) o.detail = "support " + std::to_string(support) + ", defect " + to_string(defect) + " <= 6/61";
  return o;
}

// 8. Folner layering.
Outcome criterion8() {
  Outcome o;
  const Group g(GroupDescriptor::integers());
  const auto s = FiniteGroupSet::interval(0, 999);
  const FiniteGroupSet f{z(-1), z(0), z(1)};
  const auto b = folner_layering(g, s, f, 10);
  require(o, b.size() == 11, "wrong number of layers");
  std::size_t total = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    total += b[k].size();
    for (const auto& x : b[k]) {
      const std::int64_t depth = std::min<std::int64_t>({x[0], 999 - x[0], 10});
      require(o, static_cast<std::size_t>(depth) == k, "point in the wrong layer");
    }
  }
  require(o, total == 1000, "layers do not partition S");
  for (const auto& t : f) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (const auto& x : b[k]) {
        const auto y = x[0] + t[0];
        if (y < 0 || y > 999) {
          require(o, k == 0, "shift leaves S from an inner layer");
          continue;
        }
        const auto ky = static_cast<std::int64_t>(std::min<std::int64_t>({y, 999 - y, 10}));
        require(o, std::abs(ky - static_cast<std::int64_t>(k)) <= 1, "F-shift inclusion fails");
      }
    }
  }
  require(o, b.size() == 11 && b[10].size() == 980, "|B_10| != 980");
  Json sizes = Json::array();
  for (const auto& layer : b) sizes.push_back(layer.size());
  o.artifact = {{"sizes", sizes}};
  if (o.pass) o.detail = "partition, inclusions hold, |B_10| = 980";
  return o;
}

// 9. Exactification on Z/4 x Z/3.
Outcome criterion9() {
  Outcome o;
  const auto sys = std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, 3), odometer(3, 2)});
  const Resolution r{{2, 1}};
  const auto base = ClopenSet::cell(sys, r, 0);
  AFCertificate cert;
  cert.castle = Castle{sys, {Tower{base, FiniteGroupSet::interval(0, 9)}}};
  cert.n = 4;
  cert.k = FiniteGroupSet{z(1)};
  cert.delta = make_rational(1, 4);
  cert.diameter_resolution = 1;
  cert.subshapes = {FiniteGroupSet{z(0), z(1)}};
  cert.witness = ComparisonWitness{0, r, {{base.act(z(10)) | base.act(z(11)), z(-10), 0}}};
  const auto report = verify_certificate(cert);
  require(o, report.ok(), "certificate does not verify");
  require(o, !remainder_set(cert).is_empty(), "remainder is empty");
  const Rational target = make_rational(3, 4);
  const auto d = exact_decomposition(cert, target);
  const auto castle_report = verify_castle(d.castle);
  require(o, castle_report.partitions, "levels do not partition X");
  const Group& g = sys->group();
  for (std::size_t i = 0; i < d.castle.towers.size(); ++i) {
    const auto& ext = d.castle.towers[i].shape;
    const auto orig = subtract(ext, d.added[i]);
    for (const auto& t : cert.k) {
      const auto ext_defect = symmetric_difference(translate_left(g, t, ext), ext).size();
      const auto orig_defect = symmetric_difference(translate_left(g, t, orig), orig).size();
      require(o, ext_defect <= orig_defect + 2 * d.added[i].size(), "symmetric-difference route fails");
      require(o, Rational(BigInt(orig_defect + 2 * d.added[i].size())) < target * Rational(BigInt(ext.size())),
              "route bound exceeds the target");
    }
    require(o, folner_defect(g, ext, cert.k) < target, "extended shape not invariant");
  }
  o.artifact = {{"certificate", to_json(cert)}, {"decomposition", to_json(d)}};
  if (o.pass) {
    std::size_t added = 0;
    for (const auto& a : d.added) added += a.size();
    o.detail = std::to_string(d.castle.towers.size()) + " tower(s), " + std::to_string(added) +
               " grafted levels, partition verified";
  }
  return o;
}

struct Criterion {
  int id;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string artifact_dir;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--artifacts") artifact_dir = argv[i + 1];

  const std::vector<Criterion> criteria{
      {1, 1.0, criterion1}, {2, 5.0, criterion2},  {3, 1.0, criterion3}, {4, 10.0, criterion4}, {5, 60.0, criterion5},
      {6, 60.0, criterion6}, {7, 5.0, criterion7}, {8, 1.0, criterion8}, {9, 10.0, criterion9}};

  bool all = true;
  std::vector<std::string> first_run;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool ok = o.pass && in_time;
    all = all && ok;
    first_run.push_back(o.artifact.dump());
    if (!artifact_dir.empty()) {
      std::ofstream(artifact_dir + "/criterion" + std::to_string(c.id) + ".json") << o.artifact.dump(2) << "\n";
    }
    std::printf("%s criterion %d: %s%s [%.3f s, limit %.0f s]\n", ok ? "PASS" : "FAIL", c.id, o.detail.c_str(),
                in_time ? "" : " (over time limit)", secs, c.limit_s);
  }

  bool same = true;
  std::string mismatch;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception&) {
    }
    if (o.artifact.dump() != first_run[i]) {
      same = false;
      mismatch += " " + std::to_string(criteria[i].id);
    }
  }
  all = all && same;
  std::printf("%s criterion 10: %s\n", same ? "PASS" : "FAIL",
              same ? "second run reproduced all artifacts byte for byte"
                   : ("artifacts differ for criteria" + mismatch).c_str());
  std::fflush(stdout);
  return all ? 0 : 1;
}
