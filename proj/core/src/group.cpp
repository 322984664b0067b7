#include "towerlab/group.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <iterator>
#include <set>

namespace towerlab {

std::size_t cell_cap() {
  if (const char* env = std::getenv("TOWERLAB_CELL_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw InvalidInput("TOWERLAB_CELL_CAP must be a positive integer");
  }
  return 1'000'000;
}

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Z: return "Z";
    case GroupKind::Zd: return "Zd";
    case GroupKind::Heisenberg: return "Heisenberg";
    case GroupKind::Lamplighter: return "Lamplighter";
    case GroupKind::QuotientLadder: return "QuotientLadder";
  }
  return "?";
}

GroupKind parse_group_kind(const std::string& name) {
  if (name == "Z") return GroupKind::Z;
  if (name == "Zd") return GroupKind::Zd;
  if (name == "Heisenberg") return GroupKind::Heisenberg;
  if (name == "Lamplighter") return GroupKind::Lamplighter;
  if (name == "QuotientLadder") return GroupKind::QuotientLadder;
  throw InvalidInput("unknown group kind '" + name + "'");
}

GroupElement::GroupElement(std::initializer_list<std::int64_t> coords)
    : GroupElement(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

GroupElement::GroupElement(std::span<const std::int64_t> coords) {
  if (coords.size() > kMaxRank) throw Unsupported("group elements have at most 4 coordinates");
  std::copy(coords.begin(), coords.end(), coords_.begin());
  rank_ = static_cast<std::uint8_t>(coords.size());
}

GroupElement GroupElement::zero(std::size_t rank) {
  GroupElement g;
  if (rank > kMaxRank) throw Unsupported("group elements have at most 4 coordinates");
  g.rank_ = static_cast<std::uint8_t>(rank);
  return g;
}

std::string to_string(const GroupElement& g) {
  std::string out = "(";
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (i) out += ",";
    out += std::to_string(g[i]);
  }
  return out + ")";
}

GroupDescriptor GroupDescriptor::integers() { return {}; }

GroupDescriptor GroupDescriptor::lattice(int d) {
  GroupDescriptor desc;
  desc.kind = GroupKind::Zd;
  desc.dim = d;
  return desc;
}

GroupDescriptor GroupDescriptor::heisenberg() {
  GroupDescriptor desc;
  desc.kind = GroupKind::Heisenberg;
  desc.dim = 3;
  return desc;
}

GroupDescriptor GroupDescriptor::lamplighter(int window) {
  GroupDescriptor desc;
  desc.kind = GroupKind::Lamplighter;
  desc.lamp_window = window;
  return desc;
}

GroupDescriptor GroupDescriptor::power_ladder(int d, std::int64_t base, int depth) {
  if (base < 2) throw InvalidInput("ladder base must be at least 2");
  if (depth < 0) throw InvalidInput("ladder depth must be nonnegative");
  std::vector<std::vector<std::int64_t>> moduli;
  std::int64_t q = 1;
  for (int k = 0; k <= depth; ++k) {
    moduli.emplace_back(static_cast<std::size_t>(d), q);
    if (k < depth) {
      if (q > INT64_MAX / base) throw ResourceExhausted("ladder modulus overflows 64 bits");
      q *= base;
    }
  }
  return custom_ladder(d, std::move(moduli));
}

GroupDescriptor GroupDescriptor::custom_ladder(int d,
                                               std::vector<std::vector<std::int64_t>> moduli) {
  GroupDescriptor desc;
  desc.kind = GroupKind::QuotientLadder;
  desc.dim = d;
  desc.ladder = std::move(moduli);
  return desc;
}

namespace {

std::size_t rank_of(const GroupDescriptor& d) {
  switch (d.kind) {
    case GroupKind::Z: return 1;
    case GroupKind::Zd:
    case GroupKind::QuotientLadder: return static_cast<std::size_t>(d.dim);
    case GroupKind::Heisenberg: return 3;
    case GroupKind::Lamplighter: return 2;
  }
  return 0;
}

int lamp_bits(int window) { return 2 * window + 1; }

// Lamp mask g translated so that the lamp at x moves to x + p.
std::int64_t shift_lamps(std::int64_t mask, std::int64_t p, int window) {
  if (mask == 0 || p == 0) return mask;
  const int bits = lamp_bits(window);
  auto umask = static_cast<std::uint64_t>(mask);
  if (p >= bits || -p >= bits) throw ResourceExhausted("lamplighter element leaves the lamp window");
  std::uint64_t shifted;
  if (p > 0) {
    if (umask >> (bits - p)) throw ResourceExhausted("lamplighter element leaves the lamp window");
    shifted = umask << p;
  } else {
    if (umask & ((std::uint64_t{1} << (-p)) - 1))
      throw ResourceExhausted("lamplighter element leaves the lamp window");
    shifted = umask >> (-p);
  }
  return static_cast<std::int64_t>(shifted);
}

}  // namespace

Group::Group(GroupDescriptor desc) : desc_(std::move(desc)), rank_(rank_of(desc_)) {
  if (desc_.kind == GroupKind::Z) desc_.dim = 1;
  if ((desc_.kind == GroupKind::Zd || desc_.kind == GroupKind::QuotientLadder) &&
      (desc_.dim < 1 || desc_.dim > static_cast<int>(GroupElement::kMaxRank))) {
    throw InvalidInput("lattice dimension must be between 1 and 4");
  }
  if (desc_.kind == GroupKind::Lamplighter && (desc_.lamp_window < 1 || desc_.lamp_window > 31)) {
    throw InvalidInput("lamp window must be between 1 and 31");
  }
  if (desc_.kind == GroupKind::QuotientLadder) {
    if (desc_.ladder.empty()) throw InvalidInput("QuotientLadder requires a ladder");
    for (std::size_t k = 0; k < desc_.ladder.size(); ++k) {
      const auto& q = desc_.ladder[k];
      if (q.size() != rank_) throw InvalidInput("ladder level has wrong dimension");
      for (std::size_t j = 0; j < rank_; ++j) {
        if (q[j] < 1) throw InvalidInput("ladder moduli must be positive");
        if (k == 0 && q[j] != 1) throw InvalidInput("ladder level 0 must be the whole group");
        if (k > 0) {
          const auto prev = desc_.ladder[k - 1][j];
          if (q[j] % prev != 0) throw InvalidInput("ladder subgroups must be nested");
        }
      }
      if (k > 0 && q == desc_.ladder[k - 1]) throw InvalidInput("ladder must strictly decrease");
    }
  } else if (!desc_.ladder.empty()) {
    throw Unsupported("ladders are only supported for QuotientLadder over Z^d");
  }

  switch (desc_.kind) {
    case GroupKind::Z:
    case GroupKind::Zd:
    case GroupKind::QuotientLadder:
      for (std::size_t j = 0; j < rank_; ++j) {
        GroupElement plus = identity(), minus = identity();
        plus[j] = 1;
        minus[j] = -1;
        generators_.push_back(plus);
        generators_.push_back(minus);
      }
      break;
    case GroupKind::Heisenberg:
      generators_ = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
      break;
    case GroupKind::Lamplighter:
      generators_ = {{0, 1}, {0, -1}, {std::int64_t{1} << desc_.lamp_window, 0}};
      break;
  }
  std::sort(generators_.begin(), generators_.end());
}

bool Group::is_abelian() const {
  return kind() != GroupKind::Heisenberg && kind() != GroupKind::Lamplighter;
}

bool Group::is_free_abelian() const { return is_abelian(); }

int Group::free_rank() const { return is_free_abelian() ? static_cast<int>(rank_) : 0; }

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  GroupElement out = GroupElement::zero(rank_);
  switch (kind()) {
    case GroupKind::Z:
    case GroupKind::Zd:
    case GroupKind::QuotientLadder:
      for (std::size_t j = 0; j < rank_; ++j) out[j] = a[j] + b[j];
      break;
    case GroupKind::Heisenberg:
      out[0] = a[0] + b[0];
      out[1] = a[1] + b[1];
      out[2] = a[2] + b[2] + a[0] * b[1];
      break;
    case GroupKind::Lamplighter:
      out[0] = a[0] ^ shift_lamps(b[0], a[1], desc_.lamp_window);
      out[1] = a[1] + b[1];
      break;
  }
  return out;
}

GroupElement Group::inverse(const GroupElement& a) const {
  GroupElement out = GroupElement::zero(rank_);
  switch (kind()) {
    case GroupKind::Z:
    case GroupKind::Zd:
    case GroupKind::QuotientLadder:
      for (std::size_t j = 0; j < rank_; ++j) out[j] = -a[j];
      break;
    case GroupKind::Heisenberg:
      out[0] = -a[0];
      out[1] = -a[1];
      out[2] = -a[2] + a[0] * a[1];
      break;
    case GroupKind::Lamplighter:
      out[0] = shift_lamps(a[0], -a[1], desc_.lamp_window);
      out[1] = -a[1];
      break;
  }
  return out;
}

void Group::validate(const GroupElement& g) const {
  if (g.rank() != rank_) {
    throw InvalidInput("element " + to_string(g) + " has " + std::to_string(g.rank()) +
                       " coordinates, group " + to_string(kind()) + " needs " +
                       std::to_string(rank_));
  }
  if (kind() == GroupKind::Lamplighter) {
    const int bits = lamp_bits(desc_.lamp_window);
    if (g[0] < 0 || (static_cast<std::uint64_t>(g[0]) >> bits) != 0) {
      throw ResourceExhausted("lamp configuration outside the window in " + to_string(g));
    }
  }
}

GroupElement Group::make(std::initializer_list<std::int64_t> coords) const {
  GroupElement g(coords);
  validate(g);
  return g;
}

const std::vector<std::int64_t>& Group::ladder_moduli(int k) const {
  if (!has_ladder()) throw Unsupported("group has no quotient ladder");
  if (k < 0 || k > ladder_depth()) {
    throw InvalidInput("ladder depth " + std::to_string(k) + " not defined (max " +
                       std::to_string(ladder_depth()) + ")");
  }
  return desc_.ladder[static_cast<std::size_t>(k)];
}

bool Group::operator==(const Group& other) const {
  return kind() == other.kind() && rank_ == other.rank_ &&
         desc_.lamp_window == other.desc_.lamp_window && desc_.ladder == other.desc_.ladder;
}

// ---------------------------------------------------------------------------

FiniteGroupSet::FiniteGroupSet(std::vector<GroupElement> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

FiniteGroupSet::FiniteGroupSet(std::initializer_list<GroupElement> elements)
    : FiniteGroupSet(std::vector<GroupElement>(elements)) {}

FiniteGroupSet FiniteGroupSet::interval(std::int64_t lo, std::int64_t hi) {
  std::vector<GroupElement> out;
  for (std::int64_t x = lo; x <= hi; ++x) out.push_back(GroupElement{x});
  FiniteGroupSet s;
  s.elements_ = std::move(out);
  return s;
}

FiniteGroupSet FiniteGroupSet::box(std::span<const std::int64_t> lo,
                                   std::span<const std::int64_t> hi) {
  if (lo.size() != hi.size()) throw InvalidInput("box corners differ in dimension");
  std::size_t total = 1;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (hi[j] < lo[j]) return {};
    total *= static_cast<std::size_t>(hi[j] - lo[j] + 1);
    if (total > cell_cap()) throw ResourceExhausted("box exceeds the cell cap");
  }
  std::vector<GroupElement> out;
  out.reserve(total);
  GroupElement g(lo);
  for (std::size_t n = 0; n < total; ++n) {
    out.push_back(g);
    for (std::size_t j = lo.size(); j-- > 0;) {
      if (++g[j] <= hi[j]) break;
      g[j] = lo[j];
    }
  }
  return FiniteGroupSet(std::move(out));
}

bool FiniteGroupSet::contains(const GroupElement& g) const {
  return std::binary_search(elements_.begin(), elements_.end(), g);
}

namespace {

template <typename Op>
FiniteGroupSet set_op(const FiniteGroupSet& a, const FiniteGroupSet& b, Op op) {
  std::vector<GroupElement> out;
  op(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteGroupSet(std::move(out));
}

}  // namespace

FiniteGroupSet unite(const FiniteGroupSet& a, const FiniteGroupSet& b) {
  return set_op(a, b, [](auto... args) { return std::set_union(args...); });
}

FiniteGroupSet intersect(const FiniteGroupSet& a, const FiniteGroupSet& b) {
  return set_op(a, b, [](auto... args) { return std::set_intersection(args...); });
}

FiniteGroupSet subtract(const FiniteGroupSet& a, const FiniteGroupSet& b) {
  return set_op(a, b, [](auto... args) { return std::set_difference(args...); });
}

FiniteGroupSet symmetric_difference(const FiniteGroupSet& a, const FiniteGroupSet& b) {
  return set_op(a, b, [](auto... args) { return std::set_symmetric_difference(args...); });
}

bool is_subset(const FiniteGroupSet& a, const FiniteGroupSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

FiniteGroupSet translate_left(const Group& g, const GroupElement& t, const FiniteGroupSet& f) {
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& x : f) out.push_back(g.multiply(t, x));
  return FiniteGroupSet(std::move(out));
}

FiniteGroupSet translate_right(const Group& g, const FiniteGroupSet& f, const GroupElement& t) {
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& x : f) out.push_back(g.multiply(x, t));
  return FiniteGroupSet(std::move(out));
}

FiniteGroupSet product_set(const Group& g, const FiniteGroupSet& a, const FiniteGroupSet& b) {
  if (a.size() * b.size() > 16 * cell_cap()) throw ResourceExhausted("product set too large");
  std::vector<GroupElement> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(g.multiply(x, y));
  FiniteGroupSet result(std::move(out));
  if (result.size() > cell_cap()) throw ResourceExhausted("product set exceeds the cell cap");
  return result;
}

FiniteGroupSet power_set(const Group& g, const FiniteGroupSet& f, int k) {
  if (k < 0) throw InvalidInput("negative power of a set");
  FiniteGroupSet out{g.identity()};
  for (int i = 0; i < k; ++i) out = product_set(g, out, f);
  return out;
}

FiniteGroupSet inverse_set(const Group& g, const FiniteGroupSet& f) {
  std::vector<GroupElement> out;
  for (const auto& x : f) out.push_back(g.inverse(x));
  return FiniteGroupSet(std::move(out));
}

bool is_symmetric(const Group& g, const FiniteGroupSet& f) { return inverse_set(g, f) == f; }

std::vector<GroupElement> word_ball_shortlex(const Group& g, int r) {
  if (r < 0) throw InvalidInput("ball radius must be nonnegative");
  const std::size_t cap = cell_cap();
  std::set<GroupElement> seen{g.identity()};
  std::vector<GroupElement> out{g.identity()};
  std::vector<GroupElement> frontier{g.identity()};
  for (int step = 0; step < r && !frontier.empty(); ++step) {
    std::vector<GroupElement> next;
    for (const auto& x : frontier) {
      for (const auto& s : g.generators()) {
        GroupElement y = g.multiply(x, s);
        if (seen.insert(y).second) {
          if (seen.size() > cap) {
            throw ResourceExhausted("word ball of radius " + std::to_string(r) +
                                    " exceeds the cell cap");
          }
          next.push_back(y);
        }
      }
    }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

FiniteGroupSet word_ball(const Group& g, int r) { return FiniteGroupSet(word_ball_shortlex(g, r)); }

Rational folner_defect(const Group& g, const FiniteGroupSet& f, const FiniteGroupSet& k) {
  if (f.empty()) throw InvalidInput("Folner defect of an empty set");
  std::size_t worst = 0;
  for (const auto& t : k) {
    worst = std::max(worst, symmetric_difference(translate_left(g, t, f), f).size());
  }
  return Rational(BigInt(worst), BigInt(f.size()));
}

bool is_invariant(const Group& g, const FiniteGroupSet& f, const FiniteGroupSet& k,
                  const Rational& delta) {
  return folner_defect(g, f, k) < delta;
}

FiniteGroupSet t_boundary(const Group& g, const FiniteGroupSet& t, const FiniteGroupSet& e) {
  if (!t.contains(g.identity())) throw InvalidInput("boundary tile must contain the identity");
  // Any straddling g has tg in E for some t, so g ranges over T^{-1}E.
  std::vector<GroupElement> out;
  std::set<GroupElement> tried;
  for (const auto& tt : t) {
    const GroupElement tinv = g.inverse(tt);
    for (const auto& x : e) {
      GroupElement cand = g.multiply(tinv, x);
      if (!tried.insert(cand).second) continue;
      bool inside = true;
      for (const auto& u : t) {
        if (!e.contains(g.multiply(u, cand))) {
          inside = false;
          break;
        }
      }
      if (!inside) out.push_back(cand);
    }
  }
  return FiniteGroupSet(std::move(out));
}

std::vector<FiniteGroupSet> folner_layering(const Group& g, const FiniteGroupSet& s,
                                            const FiniteGroupSet& f, int n) {
  if (n < 1) throw InvalidInput("layering depth must be positive");
  if (!f.contains(g.identity())) throw InvalidInput("layering set must contain the identity");
  if (!is_symmetric(g, f)) throw InvalidInput("layering set must be symmetric");
  // inner[k] = cap_{t in F^k} tS, computed as cap_{u in F} u inner[k-1].
  std::vector<FiniteGroupSet> inner{s};
  for (int k = 1; k <= n; ++k) {
    FiniteGroupSet next = inner.back();
    for (const auto& u : f) next = intersect(next, translate_left(g, u, inner.back()));
    inner.push_back(std::move(next));
  }
  std::vector<FiniteGroupSet> layers(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k < n; ++k) layers[k] = subtract(inner[k], inner[k + 1]);
  layers[n] = inner[n];
  return layers;
}

namespace {

FiniteGroupSet cube(std::size_t d, std::int64_t side) {
  std::vector<std::int64_t> lo(d, 0), hi(d, side - 1);
  return FiniteGroupSet::box(lo, hi);
}

}  // namespace

FiniteGroupSet folner_sequence(const Group& g, const FiniteGroupSet& k, const Rational& delta) {
  if (delta <= 0) throw InvalidInput("delta must be positive");
  for (const auto& t : k) g.validate(t);
  const std::size_t cap = cell_cap();
  switch (g.kind()) {
    case GroupKind::Z:
    case GroupKind::Zd: {
      for (std::int64_t side = 1;; ++side) {
        std::size_t size = 1;
        for (std::size_t j = 0; j < g.rank(); ++j) size *= static_cast<std::size_t>(side);
        if (size > cap) break;
        FiniteGroupSet f = cube(g.rank(), side);
        if (is_invariant(g, f, k, delta)) return f;
      }
      break;
    }
    case GroupKind::QuotientLadder: {
      for (int depth = 0; depth <= g.ladder_depth(); ++depth) {
        const auto& q = g.ladder_moduli(depth);
        std::size_t size = 1;
        for (auto m : q) size *= static_cast<std::size_t>(m);
        if (size > cap) break;
        std::vector<std::int64_t> lo(q.size(), 0), hi;
        for (auto m : q) hi.push_back(m - 1);
        FiniteGroupSet f = FiniteGroupSet::box(lo, hi);
        if (is_invariant(g, f, k, delta)) return f;
      }
      break;
    }
    case GroupKind::Heisenberg: {
      for (std::int64_t side = 1; side * side * side * side <= static_cast<std::int64_t>(cap);
           ++side) {
        const std::int64_t lo[] = {0, 0, 0};
        const std::int64_t hi[] = {side - 1, side - 1, side * side - 1};
        FiniteGroupSet f = FiniteGroupSet::box(lo, hi);
        if (is_invariant(g, f, k, delta)) return f;
      }
      break;
    }
    case GroupKind::Lamplighter: {
      const int window = g.descriptor().lamp_window;
      for (std::int64_t len = 1; len <= window; ++len) {
        if ((static_cast<std::size_t>(len) << len) > cap) break;
        std::vector<GroupElement> elems;
        for (std::int64_t mask = 0; mask < (std::int64_t{1} << len); ++mask) {
          for (std::int64_t p = 0; p < len; ++p) elems.push_back({mask << window, p});
        }
        FiniteGroupSet f(std::move(elems));
        bool ok;
        try {
          ok = is_invariant(g, f, k, delta);
        } catch (const ResourceExhausted&) {
          break;
        }
        if (ok) return f;
      }
      break;
    }
  }
  throw ResourceExhausted("no (K," + to_string(delta) + ")-invariant set within the cell cap for " +
                          to_string(g.kind()));
}

}  // namespace towerlab
