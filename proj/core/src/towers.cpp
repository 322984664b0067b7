#include "towerlab/towers.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace towerlab {

namespace {

constexpr std::size_t kMaxReportedViolations = 16;

void require_system(const TowerFamily& f) {
  if (!f.system) throw InvalidInput("tower family without a system");
  for (const auto& t : f.towers) {
    if (t.base.system() != f.system) throw InvalidInput("tower base belongs to a different system");
    if (t.shape.empty()) throw InvalidInput("tower with an empty shape");
  }
}

const Group& group_of(const TowerFamily& f) { return f.system->group(); }

GroupElement z(std::int64_t n) { return GroupElement{n}; }

void require_z_action(const SystemPtr& sys, const char* what) {
  if (!sys->group().is_free_abelian() || sys->group().free_rank() != 1) {
    throw Unsupported(std::string(what) + " needs a Z action");
  }
}

}  // namespace

ClopenSet level(const Tower& t, const GroupElement& s) { return t.base.act(s); }

std::vector<ClopenSet> levels(const Tower& t) {
  std::vector<ClopenSet> out;
  out.reserve(t.shape.size());
  for (const auto& s : t.shape) out.push_back(level(t, s));
  return out;
}

ClopenSet footprint(const Tower& t) {
  auto ls = levels(t);
  const Resolution r = common_resolution(ls);
  std::vector<CellId> cells;
  for (const auto& l : ls) {
    auto fine = l.refine(r);
    cells.insert(cells.end(), fine.cells().begin(), fine.cells().end());
  }
  return ClopenSet(t.base.system(), r, std::move(cells));
}

Resolution level_resolution(const TowerFamily& f) {
  require_system(f);
  Resolution r = f.system->trivial();
  for (const auto& t : f.towers)
    for (const auto& s : t.shape) r = f.system->join(r, f.system->act_resolution(s, t.base.resolution()));
  return r;
}

Tower normalize_tower(const Group& g, const Tower& t) {
  if (t.shape.contains(g.identity())) return t;
  const GroupElement t0 = *t.shape.begin();
  return {t.base.act(t0), translate_right(g, t.shape, g.inverse(t0))};
}

CastleReport verify_castle(const Castle& c) {
  CastleReport report;
  if (!c.system) {
    report.partitions = false;
    return report;
  }
  require_system(c);
  report.resolution = level_resolution(c);
  const std::uint64_t n = c.system->checked_num_cells(report.resolution);
  struct Owner {
    std::int64_t tower = -1;
    std::size_t element = 0;
  };
  std::vector<Owner> owner(n);
  for (std::size_t i = 0; i < c.towers.size(); ++i) {
    const auto& shape = c.towers[i].shape.elements();
    for (std::size_t k = 0; k < shape.size(); ++k) {
      const auto cells = level(c.towers[i], shape[k]).refine(report.resolution);
      for (CellId cell : cells.cells()) {
        Owner& o = owner[cell];
        if (o.tower < 0) {
          o = {static_cast<std::int64_t>(i), k};
          continue;
        }
        const auto j = static_cast<std::size_t>(o.tower);
        const bool same = j == i;
        (same ? report.levels_disjoint : report.footprints_disjoint) = false;
        if (report.violations.size() < kMaxReportedViolations) {
          report.violations.push_back({same ? "level-overlap" : "footprint-overlap", j, i,
                                       c.towers[j].shape.elements()[o.element], shape[k], cell});
        }
      }
    }
  }
  for (const auto& o : owner)
    if (o.tower < 0) ++report.uncovered_cells;
  report.partitions = report.valid() && report.uncovered_cells == 0 && !c.towers.empty();
  return report;
}

LebesgueReport is_e_lebesgue(const TowerCollection& ts, const FiniteGroupSet& e) {
  require_system(ts);
  const Group& g = group_of(ts);
  LebesgueReport report;
  report.resolution = level_resolution(ts);
  const std::uint64_t n = ts.system->checked_num_cells(report.resolution);
  std::vector<std::optional<LebesgueWitness>> cert(n);
  for (std::size_t i = 0; i < ts.towers.size(); ++i) {
    const auto& tower = ts.towers[i];
    for (const auto& t : tower.shape) {
      if (!is_subset(translate_right(g, e, t), tower.shape)) continue;
      for (CellId cell : level(tower, t).refine(report.resolution).cells())
        if (!cert[cell]) cert[cell] = LebesgueWitness{i, t};
    }
  }
  for (CellId cell = 0; cell < n; ++cell) {
    if (!cert[cell]) {
      report.uncovered = cell;
      return report;
    }
  }
  report.holds = true;
  report.certificate.reserve(n);
  for (auto& w : cert) report.certificate.push_back(std::move(*w));
  return report;
}

bool is_e_lebesgue_cover(const TowerCollection& ts, const FiniteGroupSet& e) {
  require_system(ts);
  const auto& sys = *ts.system;
  const Resolution r = level_resolution(ts);
  const std::uint64_t n = sys.checked_num_cells(r);
  std::vector<ClopenSet> prints;
  std::vector<std::vector<bool>> member;
  for (const auto& t : ts.towers) {
    prints.push_back(footprint(t).refine(r));
    std::vector<bool> m(n, false);
    for (CellId c : prints.back().cells()) m[c] = true;
    member.push_back(std::move(m));
  }
  for (CellId cell = 0; cell < n; ++cell) {
    bool found = false;
    for (std::size_t i = 0; i < prints.size() && !found; ++i) {
      found = true;
      for (const auto& s : e) {
        if (sys.act_resolution(s, r) == r) {
          if (!member[i][sys.act_cell(s, cell, r)]) found = false;
        } else if (!ClopenSet::cell(ts.system, r, cell).act(s).is_subset_of(prints[i])) {
          found = false;
        }
        if (!found) break;
      }
    }
    if (!found) return false;
  }
  return true;
}

ChromaticResult chromatic_number(const TowerCollection& ts, std::size_t exact_cap) {
  require_system(ts);
  const std::size_t n = ts.towers.size();
  ChromaticResult result;
  if (n == 0) return result;
  std::vector<ClopenSet> prints;
  for (const auto& t : ts.towers) prints.push_back(footprint(t));
  std::vector<std::vector<bool>> conflict(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      conflict[i][j] = conflict[j][i] = prints[i].intersects(prints[j]);

  std::vector<int> color(n, -1);
  auto fits = [&](std::size_t v, int c) {
    for (std::size_t u = 0; u < n; ++u)
      if (conflict[v][u] && color[u] == c) return false;
    return true;
  };

  if (n > exact_cap) {
    result.exact = false;
    for (std::size_t v = 0; v < n; ++v) {
      int c = 0;
      while (!fits(v, c)) ++c;
      color[v] = c;
      result.number = std::max(result.number, c + 1);
    }
    result.coloring = color;
    return result;
  }

  std::function<bool(std::size_t, int)> assign = [&](std::size_t v, int k) {
    if (v == n) return true;
    for (int c = 0; c < k; ++c) {
      if (!fits(v, c)) continue;
      color[v] = c;
      if (assign(v + 1, k)) return true;
      color[v] = -1;
    }
    return false;
  };
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    std::fill(color.begin(), color.end(), -1);
    if (assign(0, k)) {
      result.number = k;
      result.coloring = color;
      return result;
    }
  }
  throw InternalError("chromatic search failed");
}

Castle first_return_decomposition(const SystemPtr& sys, const ClopenSet& v, int cap) {
  require_z_action(sys, "first return decomposition");
  if (v.system() != sys) throw InvalidInput("base set belongs to a different system");
  if (v.is_empty()) throw InvalidInput("first return decomposition of an empty set");
  if (cap < 1) throw InvalidInput("return-time cap must be positive");
  Castle castle{sys, {}};
  ClopenSet remaining = v;
  for (std::int64_t t = 1; !remaining.is_empty(); ++t) {
    if (t > cap) {
      throw CapExceeded("return time exceeds cap " + std::to_string(cap) + "; raise the cap");
    }
    ClopenSet hit = remaining & v.act(z(-t));
    if (hit.is_empty()) continue;
    remaining = remaining - hit;
    castle.towers.push_back({hit, FiniteGroupSet::interval(0, t - 1)});
  }
  return castle;
}

TowerCollection double_castle(const Castle& c, std::int64_t n) {
  require_system(c);
  require_z_action(c.system, "double castle");
  if (n <= 0) throw InvalidInput("double castle shift must be positive");
  TowerCollection out{c.system, c.towers};
  for (const auto& t : c.towers) out.towers.push_back({t.base.act(z(-n)), t.shape});
  return out;
}

Castle refine_castle_to(const Castle& c, const std::vector<ClopenSet>& targets) {
  require_system(c);
  for (const auto& t : targets)
    if (t.system() != c.system) throw InvalidInput("target belongs to a different system");
  const auto& sys = *c.system;
  const Group& g = sys.group();
  Castle out{c.system, {}};
  for (const auto& tower : c.towers) {
    Resolution r = tower.base.resolution();
    for (const auto& s : tower.shape)
      for (const auto& target : targets)
        r = sys.join(r, sys.act_resolution(g.inverse(s), target.resolution()));
    const ClopenSet base = tower.base.refine(r);
    std::map<std::vector<bool>, std::vector<CellId>> groups;
    for (CellId cell : base.cells()) {
      std::vector<bool> signature;
      for (const auto& s : tower.shape) {
        const Resolution moved = sys.act_resolution(s, r);
        const CellId image = sys.act_cell(s, cell, r);
        for (const auto& target : targets)
          signature.push_back(target.contains_cell(sys.coarsen(image, moved, target.resolution())));
      }
      groups[signature].push_back(cell);
    }
    for (auto it = groups.rbegin(); it != groups.rend(); ++it)
      out.towers.push_back({ClopenSet(c.system, r, it->second), tower.shape});
  }
  return out;
}

Castle rokhlin_castle(const SystemPtr& sys, int r, const std::vector<ClopenSet>& targets, int cap) {
  const Castle c = first_return_decomposition(sys, ClopenSet::cell(sys, sys->level(r), 0), cap);
  return refine_castle_to(c, targets);
}

bool uses_castle_search(const CantorSystem& sys) {
  const Group& g = sys.group();
  if (!g.is_free_abelian() || g.free_rank() != 1) return false;
  const Resolution r = sys.level(0);
  return !(sys.act_resolution(g.generators().front(), r) == r);
}

Castle pullback_castle(const Castle& c, const SystemPtr& product, std::size_t factor) {
  const auto* prod = dynamic_cast<const ProductSystem*>(product.get());
  if (!prod) throw Unsupported("pullback needs a product system");
  if (factor >= prod->factors().size() || prod->factors()[factor] != c.system) {
    throw InvalidInput("castle does not live on the requested product factor");
  }
  require_system(c);
  Castle out{product, {}};
  for (const auto& tower : c.towers) {
    std::vector<Resolution> parts;
    for (const auto& f : prod->factors()) parts.push_back(f->trivial());
    parts[factor] = tower.base.resolution();
    const Resolution r = prod->combine(parts);
    std::vector<CellId> cells;
    std::vector<CellId> tuple(parts.size(), 0);
    for (CellId cell : tower.base.cells()) {
      tuple[factor] = cell;
      cells.push_back(prod->combine_cell(tuple, parts));
    }
    out.towers.push_back({ClopenSet(product, r, std::move(cells)), tower.shape});
  }
  return out;
}

}  // namespace towerlab
