#include "towerlab/typesemigroup.hpp"

#include "towerlab/errors.hpp"
#include "towerlab/flow.hpp"
#include "towerlab/towers.hpp"

#include <algorithm>

namespace towerlab {

TypeElement::TypeElement(SystemPtr system, Resolution res, std::map<CellId, std::int64_t> weights)
    : system_(std::move(system)), res_(std::move(res)) {
  if (!system_) throw InvalidInput("type element without a system");
  system_->validate(res_);
  const std::uint64_t n = system_->num_cells(res_);
  for (const auto& [cell, w] : weights) {
    if (w < 0) throw InvalidInput("type element weights must be nonnegative");
    if (cell >= n) throw InvalidInput("type element cell out of range");
    if (w > 0) weights_.emplace(cell, w);
  }
}

TypeElement TypeElement::indicator(const ClopenSet& a, std::int64_t multiplicity) {
  std::map<CellId, std::int64_t> w;
  for (CellId c : a.cells()) w[c] = multiplicity;
  return TypeElement(a.system(), a.resolution(), std::move(w));
}

TypeElement TypeElement::from_layers(const std::vector<ClopenSet>& layers) {
  if (layers.empty()) throw InvalidInput("from_layers needs at least one layer");
  TypeElement out(layers.front().system(), layers.front().resolution());
  for (const auto& l : layers) out = out + indicator(l);
  return out;
}

std::int64_t TypeElement::weight(CellId cell) const {
  auto it = weights_.find(cell);
  return it == weights_.end() ? 0 : it->second;
}

std::int64_t TypeElement::total() const {
  std::int64_t t = 0;
  for (const auto& [_, w] : weights_) t += w;
  return t;
}

std::int64_t TypeElement::max_weight() const {
  std::int64_t m = 0;
  for (const auto& [_, w] : weights_) m = std::max(m, w);
  return m;
}

TypeElement TypeElement::refine(const Resolution& finer) const {
  if (finer == res_) return *this;
  if (!system_->refines(finer, res_)) throw InvalidInput("refine: coarsening requested");
  std::map<CellId, std::int64_t> out;
  for (const auto& [cell, w] : weights_)
    for (CellId c : system_->children(cell, res_, finer)) out.emplace(c, w);
  return TypeElement(system_, finer, std::move(out));
}

TypeElement TypeElement::act(const GroupElement& s) const {
  system_->group().validate(s);
  std::map<CellId, std::int64_t> out;
  for (const auto& [cell, w] : weights_) out.emplace(system_->act_cell(s, cell, res_), w);
  return TypeElement(system_, system_->act_resolution(s, res_), std::move(out));
}

TypeElement TypeElement::scale(std::int64_t k) const {
  if (k < 0) throw InvalidInput("scalar must be nonnegative");
  std::map<CellId, std::int64_t> out;
  for (const auto& [cell, w] : weights_) out.emplace(cell, w * k);
  return TypeElement(system_, res_, std::move(out));
}

std::vector<ClopenSet> TypeElement::layers() const {
  std::vector<ClopenSet> out;
  for (std::int64_t j = 1; j <= max_weight(); ++j) {
    std::vector<CellId> cells;
    for (const auto& [cell, w] : weights_)
      if (w >= j) cells.push_back(cell);
    out.emplace_back(system_, res_, std::move(cells));
  }
  return out;
}

std::pair<TypeElement, TypeElement> align(const TypeElement& a, const TypeElement& b) {
  if (a.system() != b.system()) throw InvalidInput("type elements belong to different systems");
  const Resolution j = a.system()->join(a.resolution(), b.resolution());
  return {a.refine(j), b.refine(j)};
}

TypeElement operator+(const TypeElement& a, const TypeElement& b) {
  auto [x, y] = align(a, b);
  auto w = x.weights();
  for (const auto& [cell, v] : y.weights()) w[cell] += v;
  return TypeElement(x.system(), x.resolution(), std::move(w));
}

bool operator==(const TypeElement& a, const TypeElement& b) {
  auto [x, y] = align(a, b);
  return x.weights() == y.weights();
}

TypeElement subtract(const TypeElement& f, const TypeElement& g) {
  auto [x, y] = align(f, g);
  auto w = x.weights();
  for (const auto& [cell, v] : y.weights()) {
    auto& slot = w[cell];
    if (slot < v) throw InvalidInput("subtraction would produce a negative weight");
    slot -= v;
  }
  return TypeElement(x.system(), x.resolution(), std::move(w));
}

MeasureValue state(const TypeElement& f, std::size_t mu) {
  if (mu >= f.system()->num_measures()) throw Unsupported("no invariant measure with index " + std::to_string(mu));
  std::map<std::int64_t, std::vector<CellId>> by_weight;
  for (const auto& [cell, w] : f.weights()) by_weight[w].push_back(cell);
  MeasureValue total{0, 0};
  for (const auto& [w, cells] : by_weight) {
    const auto m = f.system()->set_mass(mu, cells, f.resolution());
    total.value += m.value * w;
    total.error += m.error * w;
  }
  return total;
}

std::string to_string(TypeStatus s) {
  switch (s) {
    case TypeStatus::Found: return "FOUND";
    case TypeStatus::SeparatedByState: return "NOT-FOUND (separated by a state)";
    case TypeStatus::BudgetExhausted: return "NOT-FOUND (budget exhausted)";
  }
  return "unknown";
}

std::string to_string(PerforationVerdict v) {
  switch (v) {
    case PerforationVerdict::Holds: return "holds";
    case PerforationVerdict::PremiseFails: return "premise-fails";
    case PerforationVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

TypeElement sum_sources(const TypeElement& like, const EquidecompWitness& w) {
  TypeElement total(like.system(), like.resolution());
  for (const auto& p : w.parts) total = total + p.h;
  return total;
}

TypeElement sum_images(const TypeElement& like, const EquidecompWitness& w) {
  TypeElement total(like.system(), like.resolution());
  for (const auto& p : w.parts) total = total + p.h.act(p.s);
  return total;
}

WitnessCheck check(const TypeElement& f, const TypeElement& g, const EquidecompWitness& w,
                   const TypeElement* remainder) {
  WitnessCheck c;
  for (const auto& p : w.parts) {
    if (p.h.system() != f.system()) {
      c.detail = "witness part belongs to a different system";
      return c;
    }
  }
  c.sums_to_source = sum_sources(f, w) == f;
  TypeElement images = sum_images(g, w);
  if (remainder) images = images + *remainder;
  c.image_ok = images == g;
  if (!c.sums_to_source) c.detail = "parts do not sum to the source";
  else if (!c.image_ok) c.detail = "translated parts do not sum to the target";
  return c;
}

// Smallest level refining both resolutions, else the top level.
int start_level(const CantorSystem& sys, const Resolution& a, const Resolution& b, int top) {
  for (int r = 0; r <= top; ++r) {
    const Resolution lr = sys.level(r);
    if (sys.refines(lr, a) && sys.refines(lr, b)) return r;
  }
  return top;
}

struct Solved {
  EquidecompWitness witness;
};

std::optional<Solved> solve_attempt(const TypeElement& f, const TypeElement& g, int res_level,
                                    int radius, bool exact) {
  const SystemPtr& sys = f.system();
  const Group& grp = sys->group();
  const Resolution w = sys->join(sys->join(sys->level(res_level), f.resolution()), g.resolution());
  const auto ball = word_ball_shortlex(grp, radius);
  Resolution wa = w;
  for (const auto& s : ball) wa = sys->join(wa, sys->act_resolution(grp.inverse(s), w));
  const TypeElement fa = f.refine(wa);
  const TypeElement gb = g.refine(w);

  std::vector<CellId> a_cells, b_cells;
  for (const auto& [c, _] : fa.weights()) a_cells.push_back(c);
  for (const auto& [c, _] : gb.weights()) b_cells.push_back(c);
  std::map<CellId, std::size_t> b_index;
  for (std::size_t j = 0; j < b_cells.size(); ++j) b_index.emplace(b_cells[j], j);
  std::vector<Resolution> moved;
  for (const auto& s : ball) moved.push_back(sys->act_resolution(s, wa));
  std::map<std::pair<std::size_t, CellId>, bool> single_child;

  const std::size_t na = a_cells.size(), nb = b_cells.size();
  const std::size_t source = na + nb, sink = na + nb + 1;
  MaxFlow flow(na + nb + 2);
  struct Edge {
    std::size_t a, b, handle;
    GroupElement s;
  };
  std::vector<Edge> edges;
  std::vector<std::size_t> seen(nb, SIZE_MAX);
  for (std::size_t i = 0; i < na; ++i) {
    const std::int64_t supply = fa.weight(a_cells[i]);
    flow.add_edge(source, i, supply);
    for (std::size_t k = 0; k < ball.size(); ++k) {
      CellId image = sys->act_cell(ball[k], a_cells[i], wa);
      const bool same = moved[k] == w;
      if (!same) image = sys->coarsen(image, moved[k], w);
      auto it = b_index.find(image);
      if (it == b_index.end() || seen[it->second] == i) continue;
      if (exact && !same) {
        auto key = std::make_pair(k, image);
        auto cached = single_child.find(key);
        if (cached == single_child.end()) {
          cached = single_child.emplace(key, sys->children(image, w, moved[k]).size() == 1).first;
        }
        if (!cached->second) continue;
      }
      seen[it->second] = i;
      edges.push_back({i, it->second, flow.add_edge(i, na + it->second, supply), ball[k]});
    }
  }
  for (std::size_t j = 0; j < nb; ++j) flow.add_edge(na + j, sink, gb.weight(b_cells[j]));
  const std::int64_t total = flow.solve(source, sink);
  if (total != fa.total()) return std::nullopt;
  if (exact && total != gb.total()) return std::nullopt;

  std::map<GroupElement, std::map<CellId, std::int64_t>> parts;
  for (const auto& e : edges) {
    const std::int64_t x = flow.flow_on(e.handle);
    if (x > 0) parts[e.s][a_cells[e.a]] += x;
  }
  Solved out;
  for (auto& [s, weights] : parts) out.witness.parts.push_back({TypeElement(sys, wa, std::move(weights)), s});
  return out;
}

// Transport between levels of a Rokhlin castle on which f and g are constant.
std::optional<Solved> solve_castle(const TypeElement& f, const TypeElement& g, int res_level, int radius,
                                   bool exact) {
  const SystemPtr& sys = f.system();
  const auto f_layers = f.layers(), g_layers = g.layers();
  std::vector<ClopenSet> targets(f_layers);
  targets.insert(targets.end(), g_layers.begin(), g_layers.end());
  Castle castle;
  try {
    castle = rokhlin_castle(sys, res_level, targets, 1 << 16);
  } catch (const CapExceeded&) {
    return std::nullopt;
  }
  auto height = [](const ClopenSet& l, const std::vector<ClopenSet>& layers) {
    std::int64_t k = 0;
    while (k < static_cast<std::int64_t>(layers.size()) && l.is_subset_of(layers[static_cast<std::size_t>(k)])) ++k;
    return k;
  };
  struct Node {
    ClopenSet set;
    std::size_t tower;
    std::int64_t pos;
    std::int64_t weight;
  };
  std::vector<Node> sources, sinks;
  std::map<std::pair<std::size_t, std::int64_t>, std::size_t> sink_index;
  std::int64_t supply = 0, demand = 0;
  for (std::size_t t = 0; t < castle.towers.size(); ++t) {
    for (const auto& s : castle.towers[t].shape) {
      ClopenSet l = level(castle.towers[t], s);
      const std::int64_t fw = height(l, f_layers), gw = height(l, g_layers);
      if (gw > 0) {
        sink_index.emplace(std::make_pair(t, s[0]), sinks.size());
        sinks.push_back({l, t, s[0], gw});
        demand += gw;
      }
      if (fw > 0) {
        sources.push_back({std::move(l), t, s[0], fw});
        supply += fw;
      }
    }
  }
  const std::size_t na = sources.size(), nb = sinks.size();
  const std::size_t source = na + nb, sink = na + nb + 1;
  MaxFlow flow(na + nb + 2);
  struct Edge {
    std::size_t a, handle;
    std::int64_t s;
  };
  std::vector<Edge> edges;
  const auto ball = word_ball_shortlex(sys->group(), radius);
  for (std::size_t i = 0; i < na; ++i) {
    flow.add_edge(source, i, sources[i].weight);
    for (const auto& s : ball) {
      auto it = sink_index.find({sources[i].tower, sources[i].pos + s[0]});
      if (it == sink_index.end()) continue;
      edges.push_back({i, flow.add_edge(i, na + it->second, sources[i].weight), s[0]});
    }
  }
  for (std::size_t j = 0; j < nb; ++j) flow.add_edge(na + j, sink, sinks[j].weight);
  const std::int64_t total = flow.solve(source, sink);
  if (total != supply || (exact && total != demand)) return std::nullopt;

  std::map<std::int64_t, TypeElement> parts;
  for (const auto& e : edges) {
    const std::int64_t x = flow.flow_on(e.handle);
    if (x == 0) continue;
    const TypeElement piece = TypeElement::indicator(sources[e.a].set, x);
    auto it = parts.find(e.s);
    if (it == parts.end()) parts.emplace(e.s, piece);
    else it->second = it->second + piece;
  }
  Solved out;
  for (auto& [s, h] : parts) out.witness.parts.push_back({std::move(h), GroupElement{s}});
  return out;
}

TypeResult search(const TypeElement& f, const TypeElement& g, const TypeBudget& budget, bool exact) {
  if (f.system() != g.system()) throw InvalidInput("type elements belong to different systems");
  if (budget.radius < 0) throw InvalidInput("radius must be nonnegative");
  const SystemPtr& sys = f.system();
  const int top = std::min(budget.max_resolution, sys->max_level());
  if (top < 0) throw InvalidInput("max resolution must be nonnegative");
  TypeResult result;
  result.budget = budget;

  for (std::size_t mu = 0; mu < sys->num_measures(); ++mu) {
    const auto fv = state(f, mu), gv = state(g, mu);
    const Rational slack = fv.error + gv.error;
    const Rational diff = fv.value - gv.value;
    if ((exact && abs(diff) > slack) || (!exact && diff > slack)) {
      result.status = TypeStatus::SeparatedByState;
      result.separation = Separation{mu, fv.value, gv.value};
      return result;
    }
  }
  if (f.is_zero()) {
    if (exact && !g.is_zero()) {
      result.status = TypeStatus::BudgetExhausted;
      return result;
    }
    result.status = TypeStatus::Found;
    result.witness = EquidecompWitness{};
    if (!exact) result.remainder = g;
    return result;
  }

  int res = start_level(*sys, f.resolution(), g.resolution(), top);
  int radius = budget.radius;
  const bool castle_mode = uses_castle_search(*sys);
  for (int step = 0;; ++step) {
    ++result.attempts;
    auto solved = castle_mode ? solve_castle(f, g, res, radius, exact) : solve_attempt(f, g, res, radius, exact);
    if (solved) {
      result.status = TypeStatus::Found;
      if (!exact) result.remainder = subtract(g, sum_images(g, solved->witness));
      result.witness = std::move(solved->witness);
      return result;
    }
    if (step % 2 == 0) {
      if (res + 1 > top) break;
      ++res;
    } else {
      radius += 2;
    }
  }
  result.status = TypeStatus::BudgetExhausted;
  return result;
}

}  // namespace

WitnessCheck check_equidecomposition(const TypeElement& f, const TypeElement& g,
                                     const EquidecompWitness& w) {
  return check(f, g, w, nullptr);
}

WitnessCheck check_leq(const TypeElement& f, const TypeElement& g, const EquidecompWitness& w,
                       const TypeElement& remainder) {
  return check(f, g, w, &remainder);
}

TypeResult find_equidecomposition(const TypeElement& f, const TypeElement& g, const TypeBudget& b) {
  return search(f, g, b, true);
}

TypeResult leq(const TypeElement& f, const TypeElement& g, const TypeBudget& b) {
  return search(f, g, b, false);
}

PerforationProbe probe_almost_unperforation(const TypeElement& f, const TypeElement& g, int n,
                                            const TypeBudget& b) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  PerforationProbe probe;
  probe.n = n;
  probe.premise = leq(f.scale(n + 1), g.scale(n), b);
  if (!probe.premise.found()) {
    probe.verdict = PerforationVerdict::PremiseFails;
    return probe;
  }
  probe.conclusion = leq(f, g, b);
  probe.verdict = probe.conclusion->found() ? PerforationVerdict::Holds : PerforationVerdict::Inconclusive;
  return probe;
}

}  // namespace towerlab
