#include "towerlab/cantor.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>
#include <set>
#include <string_view>

namespace towerlab {

std::string to_string(const Resolution& r) {
  std::string out = "[";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(r.params[i]);
  }
  return out + "]";
}

std::vector<CellId> CantorSystem::children(CellId cell, const Resolution& coarse,
                                           const Resolution& fine) const {
  if (!refines(fine, coarse)) throw InvalidInput("children: resolution does not refine");
  std::vector<CellId> out;
  const std::uint64_t n = checked_num_cells(fine);
  for (CellId c = 0; c < n; ++c)
    if (coarsen(c, fine, coarse) == cell) out.push_back(c);
  return out;
}

MeasureValue CantorSystem::set_mass(std::size_t measure, const std::vector<CellId>& cells,
                                    const Resolution& r) const {
  MeasureValue total{0, 0};
  for (CellId c : cells) {
    MeasureValue m = cell_mass(measure, c, r);
    total.value += m.value;
    total.error += m.error;
  }
  if (total.error > 1) total.error = 1;
  return total;
}

std::string CantorSystem::describe_cell(CellId cell, const Resolution& r) const {
  return "cell " + std::to_string(cell) + " @" + to_string(r);
}

std::uint64_t CantorSystem::checked_num_cells(const Resolution& r) const {
  const std::uint64_t n = num_cells(r);
  if (n > cell_cap()) {
    throw ResourceExhausted("resolution " + to_string(r) + " has " + std::to_string(n) +
                            " cells, above the cell cap " + std::to_string(cell_cap()));
  }
  return n;
}

// ---------------------------------------------------------------------------
// Odometer

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

ProfiniteOdometer::ProfiniteOdometer(Group ladder_group) : group_(std::move(ladder_group)) {
  if (!group_.has_ladder()) throw Unsupported("odometers need a QuotientLadder group");
}

int ProfiniteOdometer::depth_of(const Resolution& r) const {
  validate(r);
  return static_cast<int>(r.params[0]);
}

Resolution ProfiniteOdometer::level(int r) const {
  Resolution res{{r}};
  validate(res);
  return res;
}

void ProfiniteOdometer::validate(const Resolution& r) const {
  if (r.params.size() != 1) throw InvalidInput("odometer resolution has one parameter");
  if (r.params[0] < 0 || r.params[0] > depth()) {
    throw InvalidInput("odometer depth " + std::to_string(r.params[0]) + " outside 0.." +
                       std::to_string(depth()));
  }
}

std::uint64_t ProfiniteOdometer::num_cells(const Resolution& r) const {
  std::uint64_t n = 1;
  for (auto q : group_.ladder_moduli(depth_of(r))) {
    if (n > UINT64_MAX / static_cast<std::uint64_t>(q)) return UINT64_MAX;
    n *= static_cast<std::uint64_t>(q);
  }
  return n;
}

Resolution ProfiniteOdometer::join(const Resolution& a, const Resolution& b) const {
  return {{std::max(depth_of(a), depth_of(b))}};
}

bool ProfiniteOdometer::refines(const Resolution& fine, const Resolution& coarse) const {
  return depth_of(fine) >= depth_of(coarse);
}

std::vector<std::int64_t> ProfiniteOdometer::residues(CellId cell, int k) const {
  const auto& q = group_.ladder_moduli(k);
  std::vector<std::int64_t> out(q.size());
  for (std::size_t j = q.size(); j-- > 0;) {
    out[j] = static_cast<std::int64_t>(cell % static_cast<std::uint64_t>(q[j]));
    cell /= static_cast<std::uint64_t>(q[j]);
  }
  return out;
}

CellId ProfiniteOdometer::cell_of(std::span<const std::int64_t> res, int k) const {
  const auto& q = group_.ladder_moduli(k);
  CellId id = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    id = id * static_cast<std::uint64_t>(q[j]) + static_cast<std::uint64_t>(floor_mod(res[j], q[j]));
  }
  return id;
}

CellId ProfiniteOdometer::coarsen(CellId cell, const Resolution& fine,
                                  const Resolution& coarse) const {
  if (!refines(fine, coarse)) throw InvalidInput("coarsen: resolution does not refine");
  return cell_of(residues(cell, depth_of(fine)), depth_of(coarse));
}

std::vector<CellId> ProfiniteOdometer::children(CellId cell, const Resolution& coarse,
                                                const Resolution& fine) const {
  if (!refines(fine, coarse)) throw InvalidInput("refine: coarsening requested");
  checked_num_cells(fine);
  const int kc = depth_of(coarse), kf = depth_of(fine);
  const auto& qc = group_.ladder_moduli(kc);
  const auto& qf = group_.ladder_moduli(kf);
  const auto base = residues(cell, kc);
  // all residue vectors r with r_j = base_j mod qc_j
  std::vector<std::int64_t> steps(qc.size());
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < qc.size(); ++j) {
    steps[j] = qf[j] / qc[j];
    total *= static_cast<std::uint64_t>(steps[j]);
  }
  std::vector<CellId> out;
  out.reserve(total);
  std::vector<std::int64_t> idx(qc.size(), 0), res(qc.size());
  for (std::uint64_t n = 0; n < total; ++n) {
    for (std::size_t j = 0; j < qc.size(); ++j) res[j] = base[j] + idx[j] * qc[j];
    out.push_back(cell_of(res, kf));
    for (std::size_t j = qc.size(); j-- > 0;) {
      if (++idx[j] < steps[j]) break;
      idx[j] = 0;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CellId ProfiniteOdometer::act_cell(const GroupElement& s, CellId cell, const Resolution& r) const {
  const int k = depth_of(r);
  auto res = residues(cell, k);
  for (std::size_t j = 0; j < res.size(); ++j) res[j] += s[j];
  return cell_of(res, k);
}

MeasureValue ProfiniteOdometer::cell_mass(std::size_t measure, CellId, const Resolution& r) const {
  if (measure != 0) throw Unsupported("odometers are uniquely ergodic; measure index must be 0");
  return {Rational(BigInt(1), BigInt(num_cells(r))), 0};
}

std::string ProfiniteOdometer::describe_cell(CellId cell, const Resolution& r) const {
  const int k = depth_of(r);
  const auto res = residues(cell, k);
  const auto& q = group_.ladder_moduli(k);
  std::string out;
  for (std::size_t j = 0; j < res.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(res[j]) + " mod " + std::to_string(q[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution subshift

namespace {

bool is_primitive(const std::map<char, std::string>& rules) {
  std::vector<char> letters;
  for (const auto& [a, _] : rules) letters.push_back(a);
  const std::size_t n = letters.size();
  auto index = [&](char c) {
    return static_cast<std::size_t>(std::lower_bound(letters.begin(), letters.end(), c) -
                                    letters.begin());
  };
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (const auto& [a, img] : rules)
    for (char b : img) m[index(a)][index(b)] = true;
  auto power = m;
  // Wielandt: a primitive n x n matrix has a positive power at exponent (n-1)^2 + 1.
  const std::size_t bound = (n - 1) * (n - 1) + 1;
  for (std::size_t e = 1; e <= bound; ++e) {
    bool positive = true;
    for (const auto& row : power)
      for (bool v : row) positive = positive && v;
    if (positive) return true;
    std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (power[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (m[k][j]) next[i][j] = true;
    power = std::move(next);
  }
  return false;
}

}  // namespace

SubstitutionSubshift::SubstitutionSubshift(std::map<char, std::string> rules,
                                           std::size_t sample_length)
    : group_(GroupDescriptor::integers()), rules_(std::move(rules)), sample_length_(sample_length) {
  if (rules_.size() < 2) throw InvalidInput("substitution needs at least two letters");
  for (const auto& [a, img] : rules_) {
    if (img.empty()) throw InvalidInput(std::string("substitution image of '") + a + "' is empty");
    for (char b : img) {
      if (!rules_.count(b)) {
        throw InvalidInput(std::string("substitution image uses unknown letter '") + b + "'");
      }
    }
  }
  if (!is_primitive(rules_)) throw InvalidInput("substitution is not primitive");
  if (sample_length_ < 16) throw InvalidInput("sample length must be at least 16");

  std::set<std::string> pairs;
  auto add_factors = [&](const std::string& w) {
    bool grew = false;
    for (std::size_t i = 0; i + 2 <= w.size(); ++i) grew |= pairs.insert(w.substr(i, 2)).second;
    return grew;
  };
  for (const auto& [a, img] : rules_) add_factors(img);
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<std::string> current(pairs.begin(), pairs.end());
    for (const auto& ab : current) {
      std::string image = rules_.at(ab[0]) + rules_.at(ab[1]);
      grew |= add_factors(image);
    }
  }
  two_letter_words_.assign(pairs.begin(), pairs.end());

  const std::size_t total = sample_length_ + 2 * static_cast<std::size_t>(kPad);
  sample_ = iterate(rules_.begin()->first, total);
  sample_.resize(total);
}

std::string SubstitutionSubshift::iterate(char letter, std::size_t min_length) const {
  std::string w(1, letter);
  while (w.size() < min_length) {
    std::string next;
    for (char c : w) next += rules_.at(c);
    if (next.size() == w.size()) throw InternalError("substitution does not grow");
    w = std::move(next);
  }
  return w;
}

std::size_t SubstitutionSubshift::window_length(const Resolution& r) {
  return static_cast<std::size_t>(r.params[1] - r.params[0] + 1);
}

void SubstitutionSubshift::validate(const Resolution& r) const {
  if (r.params.size() != 2) throw InvalidInput("subshift resolution is a window [lo, hi]");
  if (r.params[1] < r.params[0] - 1) throw InvalidInput("subshift window has negative length");
  if (r.params[1] - r.params[0] + 1 > 4096) throw ResourceExhausted("subshift window too long");
  if (r.params[1] >= r.params[0] && (r.params[0] < -kPad || r.params[1] > kPad)) {
    throw ResourceExhausted("subshift window " + to_string(r) + " leaves the sampled range");
  }
}

const SubstitutionSubshift::Language& SubstitutionSubshift::language_data(std::size_t n) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = languages_.find(n);
  if (it != languages_.end()) return *it->second;

  std::set<std::string> words;
  if (n == 0) {
    words.insert("");
  } else {
    // Every admissible word of length n sits inside sigma^k(ab) for a legal
    // pair ab once every sigma^k(letter) has length >= n.
    std::map<char, std::string> blocks;
    for (const auto& [a, _] : rules_) blocks[a] = std::string(1, a);
    auto shortest = [&] {
      std::size_t m = SIZE_MAX;
      for (const auto& [_, b] : blocks) m = std::min(m, b.size());
      return m;
    };
    while (shortest() < n) {
      std::map<char, std::string> next;
      for (const auto& [a, b] : blocks) {
        std::string img;
        for (char c : b) img += rules_.at(c);
        next[a] = std::move(img);
      }
      blocks = std::move(next);
    }
    for (const auto& ab : two_letter_words_) {
      const std::string w = blocks.at(ab[0]) + blocks.at(ab[1]);
      for (std::size_t i = 0; i + n <= w.size(); ++i) words.insert(w.substr(i, n));
      if (words.size() > cell_cap()) throw ResourceExhausted("subshift language exceeds the cell cap");
    }
  }

  auto lang = std::make_unique<Language>();
  lang->words.assign(words.begin(), words.end());
  for (CellId i = 0; i < lang->words.size(); ++i) lang->index.emplace(lang->words[i], i);
  lang->counts.assign(lang->words.size(), 0);
  if (n <= static_cast<std::size_t>(kPad)) {
    std::string_view view(sample_);
    const auto first = static_cast<std::size_t>(kPad);
    for (std::size_t i = first; i < first + sample_length_; ++i) {
      auto found = lang->index.find(view.substr(i, n));
      if (found == lang->index.end()) throw InternalError("sample contains a non-admissible word");
      ++lang->counts[found->second];
    }
  }
  auto& ref = *lang;
  languages_.emplace(n, std::move(lang));
  return ref;
}

const std::vector<std::string>& SubstitutionSubshift::language(std::size_t n) const {
  return language_data(n).words;
}

CellId SubstitutionSubshift::word_id(const std::string& w) const {
  const auto& lang = language_data(w.size());
  auto it = lang.index.find(w);
  if (it == lang.index.end()) throw InvalidInput("word '" + w + "' is not admissible");
  return it->second;
}

const std::string& SubstitutionSubshift::word(CellId cell, const Resolution& r) const {
  validate(r);
  const auto& words = language(window_length(r));
  if (cell >= words.size()) throw InvalidInput("cell id out of range for " + to_string(r));
  return words[cell];
}

std::uint64_t SubstitutionSubshift::num_cells(const Resolution& r) const {
  validate(r);
  return language(window_length(r)).size();
}

Resolution SubstitutionSubshift::join(const Resolution& a, const Resolution& b) const {
  validate(a);
  validate(b);
  if (window_length(a) == 0) return b;
  if (window_length(b) == 0) return a;
  return {{std::min(a.params[0], b.params[0]), std::max(a.params[1], b.params[1])}};
}

bool SubstitutionSubshift::refines(const Resolution& fine, const Resolution& coarse) const {
  validate(fine);
  validate(coarse);
  if (window_length(coarse) == 0) return true;
  return fine.params[0] <= coarse.params[0] && fine.params[1] >= coarse.params[1];
}

CellId SubstitutionSubshift::coarsen(CellId cell, const Resolution& fine,
                                     const Resolution& coarse) const {
  if (!refines(fine, coarse)) throw InvalidInput("coarsen: resolution does not refine");
  if (window_length(coarse) == 0) return 0;
  const std::string& w = word(cell, fine);
  return word_id(w.substr(static_cast<std::size_t>(coarse.params[0] - fine.params[0]),
                          window_length(coarse)));
}

std::vector<CellId> SubstitutionSubshift::children(CellId cell, const Resolution& coarse,
                                                   const Resolution& fine) const {
  if (!refines(fine, coarse)) throw InvalidInput("refine: coarsening requested");
  checked_num_cells(fine);
  const std::string& w = word(cell, coarse);
  const auto offset = window_length(coarse) == 0
                          ? std::size_t{0}
                          : static_cast<std::size_t>(coarse.params[0] - fine.params[0]);
  const auto& words = language(window_length(fine));
  std::vector<CellId> out;
  for (CellId i = 0; i < words.size(); ++i)
    if (words[i].compare(offset, w.size(), w) == 0) out.push_back(i);
  return out;
}

Resolution SubstitutionSubshift::act_resolution(const GroupElement& s, const Resolution& r) const {
  validate(r);
  return {{r.params[0] - s[0], r.params[1] - s[0]}};
}

MeasureValue SubstitutionSubshift::cell_mass(std::size_t measure, CellId cell,
                                             const Resolution& r) const {
  return set_mass(measure, {cell}, r);
}

MeasureValue SubstitutionSubshift::set_mass(std::size_t measure, const std::vector<CellId>& cells,
                                            const Resolution& r) const {
  if (measure != 0) throw Unsupported("substitution subshifts here are uniquely ergodic");
  validate(r);
  const std::size_t n = window_length(r);
  if (n == 0) return {cells.empty() ? Rational(0) : Rational(1), 0};
  const auto& lang = language_data(n);
  if (lang.counts.empty() || n > static_cast<std::size_t>(kPad)) {
    throw ResourceExhausted("subshift window too long for the sample");
  }
  // Occurrences starting in [kPad + lo, kPad + lo + N), from the counts at
  // offset zero plus the two boundary strips.
  const std::int64_t lo = r.params[0];
  std::map<CellId, std::int64_t> correction;
  std::string_view view(sample_);
  auto strip = [&](std::int64_t from, std::int64_t to, std::int64_t sign) {
    for (std::int64_t j = from; j < to; ++j) {
      auto found = lang.index.find(view.substr(static_cast<std::size_t>(j), n));
      correction[found->second] += sign;
    }
  };
  const std::int64_t base = kPad, len = static_cast<std::int64_t>(sample_length_);
  if (lo < 0) {
    strip(base + lo, base, 1);
    strip(base + len + lo, base + len, -1);
  } else {
    strip(base, base + lo, -1);
    strip(base + len, base + len + lo, 1);
  }
  BigInt count = 0;
  for (CellId c : cells) {
    count += lang.counts.at(c);
    auto it = correction.find(c);
    if (it != correction.end()) count += it->second;
  }
  const std::uint64_t spread = n + static_cast<std::uint64_t>(lo < 0 ? -lo : lo);
  return {Rational(count, BigInt(sample_length_)), Rational(BigInt(2 * spread), BigInt(sample_length_))};
}

std::string SubstitutionSubshift::describe_cell(CellId cell, const Resolution& r) const {
  return "[" + word(cell, r) + "]@" + std::to_string(r.params[0]);
}

// ---------------------------------------------------------------------------
// Products

namespace {

Group product_group(const std::vector<SystemPtr>& factors) {
  if (factors.size() < 2) throw InvalidInput("a product needs at least two factors");
  const int rank = factors.front()->group().free_rank();
  for (const auto& f : factors) {
    if (!f->group().is_free_abelian() || f->group().free_rank() != rank || rank == 0) {
      throw Unsupported("product factors must all be actions of the same Z^d");
    }
  }
  return Group(rank == 1 ? GroupDescriptor::integers() : GroupDescriptor::lattice(rank));
}

}  // namespace

ProductSystem::ProductSystem(std::vector<SystemPtr> factors)
    : factors_(std::move(factors)), group_(product_group(factors_)) {
  for (const auto& f : factors_) arity_ += f->resolution_arity();
}

std::vector<Resolution> ProductSystem::split(const Resolution& r) const {
  if (r.params.size() != arity_) throw InvalidInput("product resolution has the wrong arity");
  std::vector<Resolution> parts;
  std::size_t pos = 0;
  for (const auto& f : factors_) {
    const auto a = f->resolution_arity();
    parts.push_back({{r.params.begin() + static_cast<std::ptrdiff_t>(pos),
                      r.params.begin() + static_cast<std::ptrdiff_t>(pos + a)}});
    pos += a;
  }
  return parts;
}

Resolution ProductSystem::combine(const std::vector<Resolution>& parts) const {
  Resolution r;
  for (const auto& p : parts) r.params.insert(r.params.end(), p.params.begin(), p.params.end());
  return r;
}

Resolution ProductSystem::factor_resolution(const Resolution& r, std::size_t factor) const {
  return split(r).at(factor);
}

std::vector<CellId> ProductSystem::split_cell(CellId cell, const std::vector<Resolution>& parts) const {
  std::vector<CellId> out(factors_.size());
  for (std::size_t j = factors_.size(); j-- > 0;) {
    const auto n = factors_[j]->num_cells(parts[j]);
    out[j] = cell % n;
    cell /= n;
  }
  return out;
}

CellId ProductSystem::combine_cell(const std::vector<CellId>& cells,
                                   const std::vector<Resolution>& parts) const {
  CellId id = 0;
  for (std::size_t j = 0; j < factors_.size(); ++j) id = id * factors_[j]->num_cells(parts[j]) + cells[j];
  return id;
}

Resolution ProductSystem::level(int r) const {
  std::vector<Resolution> parts;
  for (const auto& f : factors_) parts.push_back(f->level(r));
  return combine(parts);
}

Resolution ProductSystem::trivial() const {
  std::vector<Resolution> parts;
  for (const auto& f : factors_) parts.push_back(f->trivial());
  return combine(parts);
}

int ProductSystem::max_level() const {
  int m = factors_.front()->max_level();
  for (const auto& f : factors_) m = std::min(m, f->max_level());
  return m;
}

void ProductSystem::validate(const Resolution& r) const {
  auto parts = split(r);
  for (std::size_t j = 0; j < factors_.size(); ++j) factors_[j]->validate(parts[j]);
}

std::uint64_t ProductSystem::num_cells(const Resolution& r) const {
  auto parts = split(r);
  std::uint64_t n = 1;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto m = factors_[j]->num_cells(parts[j]);
    if (m != 0 && n > UINT64_MAX / m) return UINT64_MAX;
    n *= m;
  }
  return n;
}

Resolution ProductSystem::join(const Resolution& a, const Resolution& b) const {
  auto pa = split(a), pb = split(b);
  for (std::size_t j = 0; j < factors_.size(); ++j) pa[j] = factors_[j]->join(pa[j], pb[j]);
  return combine(pa);
}

bool ProductSystem::refines(const Resolution& fine, const Resolution& coarse) const {
  auto pf = split(fine), pc = split(coarse);
  for (std::size_t j = 0; j < factors_.size(); ++j)
    if (!factors_[j]->refines(pf[j], pc[j])) return false;
  return true;
}

CellId ProductSystem::coarsen(CellId cell, const Resolution& fine, const Resolution& coarse) const {
  auto pf = split(fine), pc = split(coarse);
  auto cells = split_cell(cell, pf);
  for (std::size_t j = 0; j < factors_.size(); ++j) cells[j] = factors_[j]->coarsen(cells[j], pf[j], pc[j]);
  return combine_cell(cells, pc);
}

Resolution ProductSystem::act_resolution(const GroupElement& s, const Resolution& r) const {
  auto parts = split(r);
  for (std::size_t j = 0; j < factors_.size(); ++j) parts[j] = factors_[j]->act_resolution(s, parts[j]);
  return combine(parts);
}

CellId ProductSystem::act_cell(const GroupElement& s, CellId cell, const Resolution& r) const {
  auto parts = split(r);
  auto cells = split_cell(cell, parts);
  std::vector<Resolution> moved(parts.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    cells[j] = factors_[j]->act_cell(s, cells[j], parts[j]);
    moved[j] = factors_[j]->act_resolution(s, parts[j]);
  }
  return combine_cell(cells, moved);
}

std::size_t ProductSystem::num_measures() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= f->num_measures();
  return n;
}

MeasureValue ProductSystem::cell_mass(std::size_t measure, CellId cell, const Resolution& r) const {
  auto parts = split(r);
  auto cells = split_cell(cell, parts);
  Rational value = 1, upper = 1;
  for (std::size_t j = factors_.size(); j-- > 0;) {
    const auto count = factors_[j]->num_measures();
    const auto m = factors_[j]->cell_mass(measure % count, cells[j], parts[j]);
    measure /= count;
    value *= m.value;
    upper *= m.value + m.error;
  }
  return {value, upper - value};
}

std::string ProductSystem::describe_cell(CellId cell, const Resolution& r) const {
  auto parts = split(r);
  auto cells = split_cell(cell, parts);
  std::string out = "(";
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (j) out += " x ";
    out += factors_[j]->describe_cell(cells[j], parts[j]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Clopen sets

ClopenSet::ClopenSet(SystemPtr system, Resolution res, std::vector<CellId> cells)
    : system_(std::move(system)), res_(std::move(res)), cells_(std::move(cells)) {
  if (!system_) throw InvalidInput("clopen set without a system");
  system_->validate(res_);
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  if (!cells_.empty() && cells_.back() >= system_->num_cells(res_)) {
    throw InvalidInput("cell id " + std::to_string(cells_.back()) + " invalid at resolution " +
                       to_string(res_));
  }
}

ClopenSet ClopenSet::empty(SystemPtr system, Resolution res) {
  return ClopenSet(std::move(system), std::move(res), {});
}

ClopenSet ClopenSet::full(SystemPtr system, Resolution res) {
  const std::uint64_t n = system->checked_num_cells(res);
  std::vector<CellId> cells(n);
  for (CellId i = 0; i < n; ++i) cells[i] = i;
  return ClopenSet(std::move(system), std::move(res), std::move(cells));
}

ClopenSet ClopenSet::cell(SystemPtr system, Resolution res, CellId id) {
  return ClopenSet(std::move(system), std::move(res), {id});
}

bool ClopenSet::is_full() const { return cells_.size() == system_->num_cells(res_); }

bool ClopenSet::contains_cell(CellId id) const {
  return std::binary_search(cells_.begin(), cells_.end(), id);
}

ClopenSet ClopenSet::refine(const Resolution& finer) const {
  if (finer == res_) return *this;
  if (!system_->refines(finer, res_)) {
    throw InvalidInput("refine: " + to_string(finer) + " is coarser than " + to_string(res_));
  }
  system_->checked_num_cells(finer);
  std::vector<CellId> out;
  if (is_full()) return full(system_, finer);
  for (CellId c : cells_) {
    auto kids = system_->children(c, res_, finer);
    out.insert(out.end(), kids.begin(), kids.end());
  }
  return ClopenSet(system_, finer, std::move(out));
}

ClopenSet ClopenSet::act(const GroupElement& s) const {
  system_->group().validate(s);
  Resolution target = system_->act_resolution(s, res_);
  std::vector<CellId> out;
  out.reserve(cells_.size());
  for (CellId c : cells_) out.push_back(system_->act_cell(s, c, res_));
  return ClopenSet(system_, std::move(target), std::move(out));
}

ClopenSet ClopenSet::complement() const {
  const std::uint64_t n = system_->checked_num_cells(res_);
  std::vector<CellId> out;
  std::size_t i = 0;
  for (CellId c = 0; c < n; ++c) {
    if (i < cells_.size() && cells_[i] == c) {
      ++i;
      continue;
    }
    out.push_back(c);
  }
  return ClopenSet(system_, res_, std::move(out));
}

MeasureValue ClopenSet::measure(std::size_t mu) const {
  if (mu >= system_->num_measures()) throw Unsupported("no invariant measure with index " + std::to_string(mu));
  return system_->set_mass(mu, cells_, res_);
}

std::pair<ClopenSet, ClopenSet> align(const ClopenSet& a, const ClopenSet& b) {
  if (a.system() != b.system()) throw InvalidInput("clopen sets belong to different systems");
  const Resolution j = a.system()->join(a.resolution(), b.resolution());
  return {a.refine(j), b.refine(j)};
}

Resolution common_resolution(const std::vector<ClopenSet>& sets) {
  if (sets.empty()) throw InvalidInput("common resolution of no sets");
  Resolution r = sets.front().resolution();
  for (const auto& s : sets) {
    if (s.system() != sets.front().system()) throw InvalidInput("sets belong to different systems");
    r = s.system()->join(r, s.resolution());
  }
  return r;
}

namespace {

template <typename Op>
ClopenSet combine_sets(const ClopenSet& a, const ClopenSet& b, Op op) {
  auto [x, y] = align(a, b);
  std::vector<CellId> out;
  op(x.cells().begin(), x.cells().end(), y.cells().begin(), y.cells().end(), std::back_inserter(out));
  return ClopenSet(x.system(), x.resolution(), std::move(out));
}

}  // namespace

ClopenSet operator|(const ClopenSet& a, const ClopenSet& b) {
  return combine_sets(a, b, [](auto... args) { return std::set_union(args...); });
}

ClopenSet operator&(const ClopenSet& a, const ClopenSet& b) {
  return combine_sets(a, b, [](auto... args) { return std::set_intersection(args...); });
}

ClopenSet operator-(const ClopenSet& a, const ClopenSet& b) {
  return combine_sets(a, b, [](auto... args) { return std::set_difference(args...); });
}

ClopenSet operator^(const ClopenSet& a, const ClopenSet& b) {
  return combine_sets(a, b, [](auto... args) { return std::set_symmetric_difference(args...); });
}

bool operator==(const ClopenSet& a, const ClopenSet& b) {
  auto [x, y] = align(a, b);
  return x.cells() == y.cells();
}

bool ClopenSet::is_subset_of(const ClopenSet& other) const {
  auto [x, y] = align(*this, other);
  return std::includes(y.cells().begin(), y.cells().end(), x.cells().begin(), x.cells().end());
}

bool ClopenSet::intersects(const ClopenSet& other) const { return !(*this & other).is_empty(); }

Rational measure_margin(const ClopenSet& a, const ClopenSet& b) {
  if (a.system() != b.system()) throw InvalidInput("clopen sets belong to different systems");
  const std::size_t count = a.system()->num_measures();
  if (count == 0) throw Unsupported("system has no invariant-measure oracle");
  Rational best;
  for (std::size_t mu = 0; mu < count; ++mu) {
    Rational diff = b.measure(mu).value - a.measure(mu).value;
    if (mu == 0 || diff < best) best = diff;
  }
  return best;
}

}  // namespace towerlab
