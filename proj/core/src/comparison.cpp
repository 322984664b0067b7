#include "towerlab/comparison.hpp"

#include "towerlab/errors.hpp"
#include "towerlab/flow.hpp"
#include "towerlab/towers.hpp"

#include <algorithm>
#include <map>

namespace towerlab {

std::string to_string(SearchStatus s) { return s == SearchStatus::Found ? "FOUND" : "NOT-FOUND"; }

std::string to_string(NotFoundReason r) {
  switch (r) {
    case NotFoundReason::None: return "none";
    case NotFoundReason::BudgetExhausted: return "budget-exhausted";
    case NotFoundReason::StructurallyInfeasible: return "structurally-infeasible";
  }
  return "unknown";
}

WitnessReport verify_witness(const ClopenSet& a, const ClopenSet& b, const ComparisonWitness& w) {
  if (a.system() != b.system()) throw InvalidInput("A and B belong to different systems");
  const SystemPtr& sys = a.system();
  WitnessReport report;
  for (std::size_t j = 0; j < w.pieces.size(); ++j) {
    const auto& p = w.pieces[j];
    if (p.cells.system() != sys) throw InvalidInput("witness piece belongs to a different system");
    if (p.color < 0 || p.color > w.m) {
      report.colors_ok = false;
      report.violations.push_back("piece " + std::to_string(j) + " has color " +
                                  std::to_string(p.color) + " outside 0.." + std::to_string(w.m));
    }
  }

  Resolution r = a.resolution();
  for (const auto& p : w.pieces) r = sys->join(r, p.cells.resolution());
  const std::uint64_t n = sys->checked_num_cells(r);
  std::vector<std::int32_t> owner(n, -1);
  for (std::size_t j = 0; j < w.pieces.size(); ++j) {
    for (CellId c : w.pieces[j].cells.refine(r).cells()) {
      if (owner[c] >= 0) {
        if (report.partition_ok) {
          report.violations.push_back("pieces " + std::to_string(owner[c]) + " and " +
                                      std::to_string(j) + " overlap at " +
                                      sys->describe_cell(c, r));
        }
        report.partition_ok = false;
      }
      owner[c] = static_cast<std::int32_t>(j);
    }
  }
  const auto a_cells = a.refine(r);
  std::vector<bool> in_a(n, false);
  for (CellId c : a_cells.cells()) in_a[c] = true;
  for (CellId c = 0; c < n; ++c) {
    if (in_a[c] != (owner[c] >= 0)) {
      report.partition_ok = false;
      report.violations.push_back(std::string(in_a[c] ? "cell of A not covered: " : "piece leaves A: ") +
                                  sys->describe_cell(c, r));
      break;
    }
  }

  std::vector<ClopenSet> images;
  Resolution ri = b.resolution();
  for (const auto& p : w.pieces) {
    images.push_back(p.cells.act(p.translation));
    ri = sys->join(ri, images.back().resolution());
  }
  const std::uint64_t ni = sys->checked_num_cells(ri);
  std::vector<bool> in_b(ni, false);
  for (CellId c : b.refine(ri).cells()) in_b[c] = true;
  std::map<int, std::vector<std::int32_t>> used;
  for (std::size_t j = 0; j < images.size(); ++j) {
    auto& slot = used[w.pieces[j].color];
    if (slot.empty()) slot.assign(ni, -1);
    for (CellId c : images[j].refine(ri).cells()) {
      if (!in_b[c] && report.contained_ok) {
        report.contained_ok = false;
        report.violations.push_back("image of piece " + std::to_string(j) + " leaves B at " +
                                    sys->describe_cell(c, ri));
      }
      if (slot[c] >= 0 && report.disjoint_ok) {
        report.disjoint_ok = false;
        report.violations.push_back("images of pieces " + std::to_string(slot[c]) + " and " +
                                    std::to_string(j) + " (color " +
                                    std::to_string(w.pieces[j].color) + ") collide at " +
                                    sys->describe_cell(c, ri));
      }
      slot[c] = static_cast<std::int32_t>(j);
    }
  }
  return report;
}

namespace {

constexpr int kReturnCap = 1 << 16;

struct AttemptOutcome {
  Attempt info;
  std::optional<ComparisonWitness> witness;
  bool saturated = false;
};

AttemptOutcome attempt(const ClopenSet& a, const ClopenSet& b, int m, int res_level, int radius) {
  const SystemPtr& sys = a.system();
  const Group& g = sys->group();
  AttemptOutcome out;
  out.info.resolution_level = res_level;
  out.info.radius = radius;

  const Resolution w = sys->join(sys->join(sys->level(res_level), a.resolution()), b.resolution());
  const auto ball = word_ball_shortlex(g, radius);
  Resolution wa = w;
  for (const auto& s : ball) wa = sys->join(wa, sys->act_resolution(g.inverse(s), w));
  out.info.resolution = wa;

  const auto a_cells = a.refine(wa).cells();
  const auto b_cells = b.refine(w).cells();
  out.info.a_cells = a_cells.size();
  out.info.b_cells = b_cells.size();
  const std::uint64_t nw = sys->checked_num_cells(w);
  std::vector<std::int64_t> b_index(nw, -1);
  for (std::size_t j = 0; j < b_cells.size(); ++j) b_index[b_cells[j]] = static_cast<std::int64_t>(j);

  std::vector<Resolution> moved;
  for (const auto& s : ball) moved.push_back(sys->act_resolution(s, wa));

  const std::size_t na = a_cells.size(), nb = b_cells.size();
  const std::size_t source = na + nb, sink = na + nb + 1;
  MaxFlow flow(na + nb + 2);
  struct Edge {
    std::size_t a, b, handle;
    GroupElement s;
  };
  std::vector<Edge> edges;
  bool saturated = ball.size() >= nw;
  std::vector<std::size_t> b_seen(nb, SIZE_MAX);
  std::vector<std::size_t> w_seen(saturated ? nw : 0, SIZE_MAX);
  for (std::size_t i = 0; i < na; ++i) {
    flow.add_edge(source, i, 1);
    std::size_t reached = 0;
    std::size_t k = 0;
    for (const auto& s : ball) {
      const Resolution& mr = moved[k++];
      CellId image = sys->act_cell(s, a_cells[i], wa);
      if (!(mr == w)) image = sys->coarsen(image, mr, w);
      if (saturated && w_seen[image] != i) {
        w_seen[image] = i;
        ++reached;
      }
      const auto j = b_index[image];
      if (j < 0 || b_seen[static_cast<std::size_t>(j)] == i) continue;
      b_seen[static_cast<std::size_t>(j)] = i;
      edges.push_back({i, static_cast<std::size_t>(j),
                       flow.add_edge(i, na + static_cast<std::size_t>(j), 1), s});
    }
    if (saturated && reached < nw) saturated = false;
  }
  for (std::size_t j = 0; j < nb; ++j) flow.add_edge(na + j, sink, m + 1);
  out.info.edges = edges.size();
  out.info.matched = flow.solve(source, sink);
  out.saturated = saturated;
  if (out.info.matched != static_cast<std::int64_t>(na)) return out;

  std::vector<int> load(nb, 0);
  std::map<std::pair<int, GroupElement>, std::vector<CellId>> grouped;
  for (const auto& e : edges) {
    if (flow.flow_on(e.handle) == 0) continue;
    const int color = load[e.b]++;
    grouped[{color, e.s}].push_back(a_cells[e.a]);
  }
  ComparisonWitness wit;
  wit.m = m;
  wit.resolution = wa;
  for (auto& [key, cells] : grouped) wit.pieces.push_back({ClopenSet(sys, wa, std::move(cells)), key.second, key.first});
  out.witness = std::move(wit);
  return out;
}

// Levels of a Rokhlin castle adapted to A and B; level j of a tower is sent to
// level j + s of the same tower.
AttemptOutcome attempt_castle(const ClopenSet& a, const ClopenSet& b, int m, int res_level, int radius) {
  const SystemPtr& sys = a.system();
  AttemptOutcome out;
  out.info.resolution_level = res_level;
  out.info.radius = radius;
  Castle castle;
  try {
    castle = rokhlin_castle(sys, res_level, {a, b}, kReturnCap);
  } catch (const CapExceeded&) {
    return out;
  }
  struct Slot {
    std::size_t tower;
    std::int64_t height;
  };
  std::vector<Slot> a_levels, b_levels;
  std::vector<ClopenSet> a_sets;
  std::map<std::pair<std::size_t, std::int64_t>, std::size_t> b_index;
  for (std::size_t t = 0; t < castle.towers.size(); ++t) {
    for (const auto& s : castle.towers[t].shape) {
      const ClopenSet l = level(castle.towers[t], s);
      if (l.is_subset_of(a)) {
        a_levels.push_back({t, s[0]});
        a_sets.push_back(l);
      }
      if (l.is_subset_of(b)) {
        b_index.emplace(std::make_pair(t, s[0]), b_levels.size());
        b_levels.push_back({t, s[0]});
      }
    }
  }
  out.info.resolution = castle.towers.empty() ? sys->level(res_level) : level_resolution(castle);
  out.info.a_cells = a_levels.size();
  out.info.b_cells = b_levels.size();
  const std::size_t na = a_levels.size(), nb = b_levels.size();
  const std::size_t source = na + nb, sink = na + nb + 1;
  MaxFlow flow(na + nb + 2);
  struct Edge {
    std::size_t a, b, handle;
    std::int64_t s;
  };
  std::vector<Edge> edges;
  const auto ball = word_ball_shortlex(sys->group(), radius);
  for (std::size_t i = 0; i < na; ++i) {
    flow.add_edge(source, i, 1);
    for (const auto& g : ball) {
      auto it = b_index.find({a_levels[i].tower, a_levels[i].height + g[0]});
      if (it == b_index.end()) continue;
      edges.push_back({i, it->second, flow.add_edge(i, na + it->second, 1), g[0]});
    }
  }
  for (std::size_t j = 0; j < nb; ++j) flow.add_edge(na + j, sink, m + 1);
  out.info.edges = edges.size();
  out.info.matched = flow.solve(source, sink);
  if (out.info.matched != static_cast<std::int64_t>(na)) return out;

  std::vector<int> load(nb, 0);
  std::map<std::pair<int, std::int64_t>, std::vector<ClopenSet>> grouped;
  for (const auto& e : edges) {
    if (flow.flow_on(e.handle) == 0) continue;
    grouped[{load[e.b]++, e.s}].push_back(a_sets[e.a]);
  }
  ComparisonWitness wit;
  wit.m = m;
  std::vector<ClopenSet> all(a_sets);
  wit.resolution = all.empty() ? a.resolution() : common_resolution(all);
  for (auto& [key, sets] : grouped) {
    std::vector<CellId> cells;
    for (const auto& l : sets) {
      const auto fine = l.refine(wit.resolution);
      cells.insert(cells.end(), fine.cells().begin(), fine.cells().end());
    }
    wit.pieces.push_back({ClopenSet(sys, wit.resolution, std::move(cells)), GroupElement{key.second}, key.first});
  }
  out.witness = std::move(wit);
  return out;
}

}  // namespace

ComparisonResult find_witness(const ClopenSet& a, const ClopenSet& b, const SearchBudget& budget) {
  if (a.system() != b.system()) throw InvalidInput("A and B belong to different systems");
  if (budget.m < 0) throw InvalidInput("m must be nonnegative");
  if (budget.radius < 0) throw InvalidInput("radius must be nonnegative");
  const SystemPtr& sys = a.system();
  const int top = std::min(budget.max_resolution, sys->max_level());
  if (top < 0) throw InvalidInput("max resolution must be nonnegative");

  ComparisonResult result;
  result.budget = budget;
  if (sys->num_measures() > 0) {
    result.margin = measure_margin(a, b);
    if (result.margin <= 0) {
      result.notes.push_back("warning: measure margin " + to_string(result.margin) +
                             " is not positive; comparison may be impossible");
    }
  }
  if (a.is_empty()) {
    result.status = SearchStatus::Found;
    result.witness = ComparisonWitness{budget.m, a.resolution(), {}};
    return result;
  }

  int res = top;
  for (int r = 0; r <= top; ++r) {
    const Resolution lr = sys->level(r);
    if (sys->refines(lr, a.resolution()) && sys->refines(lr, b.resolution())) {
      res = r;
      break;
    }
  }
  int radius = budget.radius;
  bool saturated = false;
  const bool castle_mode = uses_castle_search(*sys);
  for (int step = 0;; ++step) {
    auto out = castle_mode ? attempt_castle(a, b, budget.m, res, radius) : attempt(a, b, budget.m, res, radius);
    result.attempts.push_back(out.info);
    if (out.witness) {
      result.status = SearchStatus::Found;
      result.witness = std::move(out.witness);
      return result;
    }
    saturated = out.saturated;
    if (step % 2 == 0) {
      if (res + 1 > top) break;
      ++res;
    } else {
      radius += 2;
    }
  }
  result.status = SearchStatus::NotFound;
  result.reason = saturated ? NotFoundReason::StructurallyInfeasible : NotFoundReason::BudgetExhausted;
  if (saturated) {
    result.notes.push_back("top-resolution flow infeasible although every translation class is available");
  }
  // Measure obstruction mu(A) > (m+1) mu(B).
  for (std::size_t mu = 0; mu < sys->num_measures(); ++mu) {
    const auto ma = a.measure(mu), mb = b.measure(mu);
    const Rational gap = ma.value - (budget.m + 1) * mb.value;
    if (gap > ma.error + (budget.m + 1) * mb.error) {
      if (result.reason != NotFoundReason::StructurallyInfeasible) {
        result.notes.push_back("measure " + std::to_string(mu) + " gives mu(A) > (m+1) mu(B)");
      }
      result.reason = NotFoundReason::StructurallyInfeasible;
      break;
    }
  }
  return result;
}

ComparisonWitness disjointify_cover(const std::vector<Piece>& pieces, const ClopenSet& a, int m) {
  std::vector<std::size_t> order(pieces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pieces[x].color < pieces[y].color; });
  ComparisonWitness out;
  out.m = m;
  ClopenSet covered = ClopenSet::empty(a.system(), a.resolution());
  for (std::size_t idx : order) {
    const Piece& p = pieces[idx];
    ClopenSet part = (p.cells & a) - covered;
    if (part.is_empty()) continue;
    covered = covered | part;
    out.pieces.push_back({part, p.translation, p.color});
  }
  if (!(covered == a)) throw InvalidInput("pieces do not cover A");
  std::vector<ClopenSet> sets{a};
  for (const auto& p : out.pieces) sets.push_back(p.cells);
  out.resolution = common_resolution(sets);
  return out;
}

ComparisonWitness compose_witnesses(const Group& g, const ComparisonWitness& ab,
                                    const ComparisonWitness& bc) {
  if (ab.m != 0 || bc.m != 0) throw Unsupported("witness composition needs m = 0");
  ComparisonWitness out;
  out.m = 0;
  std::vector<ClopenSet> sets;
  for (const auto& p : ab.pieces) {
    for (const auto& q : bc.pieces) {
      ClopenSet part = p.cells & q.cells.act(g.inverse(p.translation));
      if (part.is_empty()) continue;
      sets.push_back(part);
      out.pieces.push_back({std::move(part), g.multiply(q.translation, p.translation), 0});
    }
  }
  out.resolution = sets.empty() ? ab.resolution : common_resolution(sets);
  return out;
}

}  // namespace towerlab
