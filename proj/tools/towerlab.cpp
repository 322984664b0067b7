#include "towerlab/towerlab.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>

using namespace towerlab;

namespace {

struct Globals {
  std::string out;
  bool no_timing = false;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
  }
}

// Accepts either the object itself or a towerlab report holding it under one of the keys.
Json read_payload(const std::string& path, std::initializer_list<const char*> keys) {
  Json j = read_json_file(path);
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("result")) return j;
  for (const char* k : keys)
    if (j["result"].contains(k)) return j["result"][k];
  throw InvalidInput("report '" + path + "' holds no usable object");
}

Json parse_inline_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("malformed JSON '" + text + "': " + e.what());
  }
}

GroupDescriptor parse_group(const std::string& text) {
  if (!text.empty() && text.front() == '{') return group_from_json(parse_inline_json(text));
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  switch (parse_group_kind(name)) {
    case GroupKind::Z: return GroupDescriptor::integers();
    case GroupKind::Zd: return GroupDescriptor::lattice(arg.empty() ? 2 : std::stoi(arg));
    case GroupKind::Heisenberg: return GroupDescriptor::heisenberg();
    case GroupKind::Lamplighter: return GroupDescriptor::lamplighter(arg.empty() ? 16 : std::stoi(arg));
    case GroupKind::QuotientLadder: break;
  }
  throw InvalidInput("give QuotientLadder groups as JSON");
}

// "-1,0,1" for rank-one groups, or a JSON array of elements.
FiniteGroupSet parse_elements(const std::string& text, const Group& g) {
  if (!text.empty() && text.front() == '[') return set_from_json(parse_inline_json(text), g);
  std::vector<GroupElement> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      GroupElement e{v};
      g.validate(e);
      out.push_back(e);
    } catch (const std::logic_error&) {
      throw InvalidInput("bad group element '" + item + "'");
    }
  }
  return FiniteGroupSet(std::move(out));
}

class Runner {
 public:
  explicit Runner(const Globals& g) : globals_(g), start_(std::chrono::steady_clock::now()) {}

  int finish(const std::string& command, Json inputs, Json result, bool success, const std::string& summary) {
    Json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = command;
    report["inputs"] = std::move(inputs);
    report["jobs"] = globals_.jobs;
    if (globals_.seed) report["seed"] = *globals_.seed;
    report["success"] = success;
    report["summary"] = summary;
    report["result"] = std::move(result);
    if (!globals_.no_timing) {
      report["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }
    const std::string text = report.dump(2) + "\n";
    if (globals_.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(globals_.out);
      if (!out) throw InvalidInput("cannot write '" + globals_.out + "'");
      out << text;
      std::cout << summary << "\n";
    }
    return success ? 0 : 1;
  }

 private:
  const Globals& globals_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"towerlab: towers, comparison and almost finiteness on Cantor systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--out", globals.out, "Write the JSON report here");
  app.add_flag("--no-timing", globals.no_timing, "Omit timings from the report");
  app.add_option("--jobs", globals.jobs, "Worker cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", globals.seed, "Seed for randomized scan orders");

  std::function<int()> action;

  // tile
  auto* tile = app.add_subcommand("tile", "Ornstein-Weiss quasitiling of a box");
  std::string tile_group = "Z", tile_beta = "1/4", tiles_path;
  int window = 200, top_side = 5;
  bool relaxed = false;
  tile->add_option("--group", tile_group, "Z, Zd:<d>, or group JSON");
  tile->add_option("--beta", tile_beta, "Disjointness tolerance in (0, 1/2)");
  tile->add_option("--window", window, "Side of the ambient box")->check(CLI::PositiveNumber);
  tile->add_option("--tiles", tiles_path, "JSON array of nested tiles");
  tile->add_option("--top-side", top_side, "Side of the largest default tile")->check(CLI::PositiveNumber);
  tile->add_flag("--relaxed", relaxed, "Skip tile-system and invariance preconditions");
  tile->callback([&] {
    action = [&] {
      Runner run(globals);
      const Group g(parse_group(tile_group));
      if (!g.is_free_abelian()) throw Unsupported("tile builds boxes in Z^d");
      TileSystem sys;
      sys.beta = parse_rational(tile_beta);
      if (!tiles_path.empty()) {
        for (const auto& t : read_json_file(tiles_path)) sys.tiles.push_back(set_from_json(t, g));
      } else {
        const int n = plan_scales(sys.beta);
        for (int i = 1; i < n; ++i) sys.tiles.push_back(FiniteGroupSet{g.identity()});
        std::vector<std::int64_t> lo(g.rank(), 0), hi(g.rank(), top_side - 1);
        sys.tiles.push_back(FiniteGroupSet::box(lo, hi));
      }
      std::vector<std::int64_t> lo(g.rank(), 0), hi(g.rank(), window - 1);
      const FiniteGroupSet e = FiniteGroupSet::box(lo, hi);
      const QuasiTiling q = quasitile(g, e, sys, relaxed ? QuasitileMode::kRelaxed : QuasitileMode::kStrict,
                                      globals.seed);
      const QuasiTilingCheck check = check_quasitiling(g, q);
      const auto parts = disjointify(g, q);
      Rational retention = 1;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const Rational r(BigInt(parts[i].size()), BigInt(q.tiles[static_cast<std::size_t>(q.placements[i].scale)].size()));
        if (r < retention) retention = r;
      }
      Json result;
      result["quasitiling"] = to_json(q, g);
      result["check"] = {{"tiles_inside", check.tiles_inside},
                         {"witness_valid", check.witness_valid},
                         {"coverage_ok", check.coverage_ok},
                         {"coverage", to_json(check.coverage)},
                         {"problems", check.problems}};
      result["min_retention"] = to_json(retention);
      Json inputs = {{"group", to_json(g.descriptor())}, {"beta", to_json(sys.beta)}, {"window", window},
                     {"scales", sys.tiles.size()}, {"relaxed", relaxed}};
      return run.finish("tile", inputs, result, check.ok(),
                        std::string(check.ok() ? "OK" : "FAIL") + " coverage " + to_string(check.coverage));
    };
  });

  // decompose
  auto* decompose = app.add_subcommand("decompose", "First-return castle over a clopen base");
  std::string base_path, system_path;
  int cap = 1000;
  std::optional<std::int64_t> double_n;
  decompose->add_option("--base", base_path, "Clopen base JSON")->required();
  decompose->add_option("--system", system_path, "System JSON when the base has none");
  decompose->add_option("--cap", cap, "Return-time cap")->check(CLI::PositiveNumber);
  decompose->add_option("--double", double_n, "Also add the copy shifted by -N");
  decompose->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      Json base_json = read_json_file(base_path);
      if (!system_path.empty()) base_json["system"] = read_json_file(system_path);
      const ClopenSet v = clopen_from_json(base_json, cache);
      const Castle castle = first_return_decomposition(v.system(), v, cap);
      Json result;
      result["castle"] = to_json(castle);
      result["report"] = to_json(verify_castle(castle));
      bool ok = verify_castle(castle).partitions;
      if (double_n) {
        const TowerCollection doubled = double_castle(castle, *double_n);
        result["collection"] = to_json(doubled);
        result["chromatic"] = to_json(chromatic_number(doubled));
      }
      Json inputs = {{"base", to_json(v, true)}, {"cap", cap}};
      if (double_n) inputs["double"] = *double_n;
      return run.finish("decompose", inputs, result, ok,
                        std::string(ok ? "OK " : "FAIL ") + std::to_string(castle.towers.size()) + " towers");
    };
  });

  // verify-castle
  auto* verify = app.add_subcommand("verify-castle", "Check level and footprint disjointness");
  std::string castle_path;
  verify->add_option("--castle", castle_path, "Castle JSON")->required();
  verify->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const Castle c = family_from_json(read_payload(castle_path, {"castle", "collection"}), cache);
      const CastleReport r = verify_castle(c);
      return run.finish("verify-castle", {{"castle", castle_path}}, to_json(r), r.valid(),
                        std::string(r.valid() ? "VALID" : "INVALID") + (r.partitions ? " (partitions X)" : ""));
    };
  });

  // lebesgue
  auto* lebesgue = app.add_subcommand("lebesgue", "E-Lebesgue check for a tower collection");
  std::string e_text;
  lebesgue->add_option("--castle", castle_path, "Tower collection JSON")->required();
  lebesgue->add_option("--E", e_text, "Finite set E, e.g. --E=-1,0,1")->required();
  lebesgue->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const TowerCollection ts = family_from_json(read_payload(castle_path, {"collection", "castle"}), cache);
      const FiniteGroupSet e = parse_elements(e_text, ts.system->group());
      const LebesgueReport r = is_e_lebesgue(ts, e);
      Json result = to_json(r);
      result["cover_form"] = is_e_lebesgue_cover(ts, e);
      return run.finish("lebesgue", {{"castle", castle_path}, {"E", to_json(e)}}, result, r.holds,
                        r.holds ? "E-LEBESGUE" : "NOT E-LEBESGUE");
    };
  });

  // chromatic
  auto* chromatic = app.add_subcommand("chromatic", "Chromatic number of the footprints");
  chromatic->add_option("--castle", castle_path, "Tower collection JSON")->required();
  chromatic->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const TowerCollection ts = family_from_json(read_payload(castle_path, {"collection", "castle"}), cache);
      const ChromaticResult r = chromatic_number(ts);
      return run.finish("chromatic", {{"castle", castle_path}}, to_json(r), true,
                        std::to_string(r.number) + (r.exact ? "" : " (greedy bound)"));
    };
  });

  // compare
  auto* compare = app.add_subcommand("compare", "Search for a witness of A <_m B");
  std::string a_path, b_path;
  SearchBudget budget{0, 8, 16};
  compare->add_option("--A", a_path, "Clopen set A (JSON with system)")->required();
  compare->add_option("--B", b_path, "Clopen set B (JSON with system)")->required();
  compare->add_option("--m", budget.m, "Number of extra colors")->check(CLI::NonNegativeNumber);
  compare->add_option("--radius", budget.radius, "Translation ball radius")->check(CLI::NonNegativeNumber);
  compare->add_option("--max-res", budget.max_resolution, "Largest resolution level")->check(CLI::NonNegativeNumber);
  compare->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const ClopenSet a = clopen_from_json(read_json_file(a_path), cache);
      const ClopenSet b = clopen_from_json(read_json_file(b_path), cache);
      const ComparisonResult r = find_witness(a, b, budget);
      Json result = to_json(r);
      if (r.witness) result["verification"] = to_json(verify_witness(a, b, *r.witness));
      Json inputs = {{"A", to_json(a, true)}, {"B", to_json(b)}};
      std::string summary = to_string(r.status);
      if (!r.found()) summary += " (" + to_string(r.reason) + ")";
      return run.finish("compare", inputs, result, r.found(), summary);
    };
  });

  // typesemi
  auto* typesemi = app.add_subcommand("typesemi", "Type semigroup searches");
  typesemi->require_subcommand(1);
  std::string f_path, g_path;
  TypeBudget tbudget{8, 16};
  int probe_n = 1;
  auto add_type_opts = [&](CLI::App* sub) {
    sub->add_option("--f", f_path, "Type element f (JSON with system)")->required();
    sub->add_option("--g", g_path, "Type element g (JSON with system)")->required();
    sub->add_option("--radius", tbudget.radius, "Translation ball radius")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-res", tbudget.max_resolution, "Largest resolution level")->check(CLI::NonNegativeNumber);
  };
  auto* equi = typesemi->add_subcommand("equidecomp", "Search for f ~ g");
  auto* leqc = typesemi->add_subcommand("leq", "Search for f <= g");
  auto* probe = typesemi->add_subcommand("probe-au", "Probe (n+1)f <= ng => f <= g");
  add_type_opts(equi);
  add_type_opts(leqc);
  add_type_opts(probe);
  probe->add_option("--n", probe_n, "n")->check(CLI::PositiveNumber);
  auto type_action = [&](const std::string& mode) {
    return [&, mode] {
      action = [&, mode] {
        Runner run(globals);
        SystemCache cache;
        const TypeElement f = type_from_json(read_json_file(f_path), cache);
        const TypeElement g = type_from_json(read_json_file(g_path), cache);
        Json inputs = {{"f", to_json(f, true)}, {"g", to_json(g)}};
        if (mode == "probe-au") {
          inputs["n"] = probe_n;
          const PerforationProbe p = probe_almost_unperforation(f, g, probe_n, tbudget);
          return run.finish("typesemi probe-au", inputs, to_json(p), p.verdict == PerforationVerdict::Holds,
                            to_string(p.verdict));
        }
        const TypeResult r = mode == "equidecomp" ? find_equidecomposition(f, g, tbudget) : leq(f, g, tbudget);
        Json result = to_json(r);
        if (r.witness) {
          const WitnessCheck c = mode == "equidecomp" ? check_equidecomposition(f, g, *r.witness)
                                                      : check_leq(f, g, *r.witness, *r.remainder);
          result["verification"] = {{"ok", c.ok()}, {"detail", c.detail}};
        }
        return run.finish("typesemi " + mode, inputs, result, r.found(), to_string(r.status));
      };
    };
  };
  equi->callback(type_action("equidecomp"));
  leqc->callback(type_action("leq"));
  probe->callback(type_action("probe-au"));

  // amdim
  auto* amdim = app.add_subcommand("amdim", "Approximately equivariant simplex map");
  std::string f_text;
  int amdim_n = 2;
  std::optional<int> amdim_d;
  amdim->add_option("--towers", castle_path, "Tower collection JSON")->required();
  amdim->add_option("--F", f_text, "Symmetric F containing e, e.g. --F=-1,0,1")->required();
  amdim->add_option("--n", amdim_n, "Layer count n >= 2")->check(CLI::Range(2, 1 << 20));
  amdim->add_option("--d", amdim_d, "Dimension bound d");
  amdim->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const TowerCollection ts = family_from_json(read_payload(castle_path, {"collection", "castle"}), cache);
      const FiniteGroupSet f = parse_elements(f_text, ts.system->group());
      const SimplexMap phi = build_simplex_map(ts, f, amdim_n, amdim_d);
      const Rational defect = equivariance_defect(phi, f);
      const int d = phi.support_bound - 1;
      const Rational bound = make_rational((d + 1) * (d + 2), amdim_n);
      Json result;
      result["map"] = to_json(phi);
      result["defect"] = to_json(defect);
      result["bound"] = to_json(bound);
      const bool ok = defect <= bound;
      Json inputs = {{"towers", castle_path}, {"F", to_json(f)}, {"n", amdim_n}};
      if (amdim_d) inputs["d"] = *amdim_d;
      return run.finish("amdim", inputs, result, ok, "defect " + to_string(defect) + " (bound " + to_string(bound) + ")");
    };
  });

  // af
  auto* af = app.add_subcommand("af", "Almost-finiteness certificates");
  af->require_subcommand(1);
  std::string cert_path, k_text = "1", delta_text = "1/10";
  std::optional<std::string> target_text;
  std::int64_t mod = 2;
  int depth = 5, af_n = 4, dim = 1;
  auto* afv = af->add_subcommand("verify", "Verify a certificate");
  afv->add_option("--cert", cert_path, "Certificate JSON")->required();
  afv->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const AFCertificate c = certificate_from_json(read_payload(cert_path, {"certificate"}), cache);
      const CertificateReport r = verify_certificate(c);
      return run.finish("af verify", {{"cert", cert_path}}, to_json(r), r.ok(), r.ok() ? "VERIFIED" : "REJECTED");
    };
  });
  auto* afb = af->add_subcommand("build-odometer", "Single-tower certificate for a power odometer");
  afb->add_option("--mod", mod, "Ladder base")->check(CLI::Range(2, 1 << 16));
  afb->add_option("--depth", depth, "Depth k")->check(CLI::NonNegativeNumber);
  afb->add_option("--dim", dim, "Rank d of Z^d")->check(CLI::Range(1, 4));
  afb->add_option("--K", k_text, "Finite set K, e.g. --K=1 or JSON");
  afb->add_option("--delta", delta_text, "Invariance tolerance");
  afb->add_option("--n", af_n, "Ratio parameter n")->check(CLI::PositiveNumber);
  afb->callback([&] {
    action = [&] {
      Runner run(globals);
      const SystemPtr sys = std::make_shared<ProfiniteOdometer>(Group(GroupDescriptor::power_ladder(dim, mod, depth)));
      const FiniteGroupSet k = parse_elements(k_text, sys->group());
      const Rational delta = parse_rational(delta_text);
      const AFCertificate c = build_odometer_certificate(sys, depth, af_n, k, delta);
      const CertificateReport r = verify_certificate(c);
      Json result = {{"certificate", to_json(c)}, {"report", to_json(r)}};
      Json inputs = {{"mod", mod}, {"depth", depth}, {"dim", dim}, {"K", to_json(k)}, {"delta", to_json(delta)}, {"n", af_n}};
      return run.finish("af build-odometer", inputs, result, r.ok(), r.ok() ? "VERIFIED" : "REJECTED");
    };
  });
  auto* afx = af->add_subcommand("exactify", "Graft the remainder onto the towers");
  afx->add_option("--cert", cert_path, "Certificate JSON")->required();
  afx->add_option("--delta-target", target_text, "Invariance target (default 2 delta)");
  afx->callback([&] {
    action = [&] {
      Runner run(globals);
      SystemCache cache;
      const AFCertificate c = certificate_from_json(read_payload(cert_path, {"certificate"}), cache);
      std::optional<Rational> target;
      if (target_text) target = parse_rational(*target_text);
      const ExactDecomposition d = exact_decomposition(c, target);
      const CastleReport r = verify_castle(d.castle);
      Json result = {{"decomposition", to_json(d)}, {"report", to_json(r)}};
      return run.finish("af exactify", {{"cert", cert_path}}, result, r.partitions,
                        r.partitions ? "PARTITION" : "NOT A PARTITION");
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 2;
  }
  try {
    if (!action) {
      std::cerr << app.help();
      return 2;
    }
    return action();
  } catch (const InvalidInput& e) {
    std::cerr << "towerlab: " << e.category() << ": " << e.what() << "\n";
    return 2;
  } catch (const Unsupported& e) {
    std::cerr << "towerlab: " << e.category() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "towerlab: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "towerlab: error: " << e.what() << "\n";
    return 1;
  }
}
