#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace th;

namespace {

// Thue-Morse word t_i = parity of popcount(i).
std::string thue_morse_word(std::size_t n) {
  std::string w(n, '0');
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<char>('0' + (__builtin_popcountll(i) & 1));
  return w;
}

std::set<std::string> factors(const std::string& w, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.insert(w.substr(i, n));
  return out;
}

ClopenSet random_set(const SystemPtr& sys, const Resolution& r, std::mt19937_64& rng) {
  std::vector<CellId> cs;
  const auto n = sys->num_cells(r);
  for (CellId c = 0; c < n; ++c)
    if (rng() & 1) cs.push_back(c);
  return ClopenSet(sys, r, std::move(cs));
}

std::set<CellId> cell_set(const ClopenSet& a, const Resolution& r) {
  const auto refined = a.refine(r);
  return {refined.cells().begin(), refined.cells().end()};
}

void boolean_algebra(const SystemPtr& sys, const std::vector<Resolution>& resolutions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& ra = resolutions[rng() % resolutions.size()];
    const auto& rb = resolutions[rng() % resolutions.size()];
    const auto& rc = resolutions[rng() % resolutions.size()];
    const auto a = random_set(sys, ra, rng), b = random_set(sys, rb, rng), c = random_set(sys, rc, rng);
    const auto j = sys->join(sys->join(ra, rb), rc);
    const auto sa = cell_set(a, j), sb = cell_set(b, j);
    std::set<CellId> uni, inter, diff;
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(uni, uni.end()));
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(inter, inter.end()));
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(diff, diff.end()));
    CHECK(cell_set(a | b, j) == uni);
    CHECK(cell_set(a & b, j) == inter);
    CHECK(cell_set(a - b, j) == diff);
    CHECK(((a | b) - (a & b)) == (a ^ b));
    CHECK((a & (b | c)) == ((a & b) | (a & c)));
    CHECK((a | b).complement() == (a.complement() & b.complement()));
    CHECK(a.complement().complement() == a);
    CHECK((a & b).is_subset_of(a));
    CHECK(a.intersects(b) == !inter.empty());
    CHECK((a | a.complement()).is_full());
    const auto mu = [](const ClopenSet& s) { return s.measure(0).value; };
    CHECK(mu(a | b) + mu(a & b) == mu(a) + mu(b));
  }
}

}  // namespace

TEST_SUITE("cantor") {
  TEST_CASE("odometer cells") {
    const auto sys = odometer(2, 6);
    CHECK(sys->num_cells(sys->level(3)) == 8);
    const auto cell = ClopenSet::cell(sys, sys->level(2), 1);
    const auto fine = cell.refine(sys->level(3));
    REQUIRE(fine.cell_count() == 2);
    auto& odo = static_cast<const ProfiniteOdometer&>(*sys);
    std::set<std::int64_t> residues;
    for (auto c : fine.cells()) residues.insert(odo.residues(c, 3)[0]);
    CHECK(residues == std::set<std::int64_t>{1, 5});
    CHECK(ClopenSet::cell(sys, sys->level(3), 0).act(z(1)) == ClopenSet::cell(sys, sys->level(3), 1));
    CHECK(ClopenSet::cell(sys, sys->level(3), 7).act(z(1)) == ClopenSet::cell(sys, sys->level(3), 0));
    CHECK(ClopenSet::cell(sys, sys->level(3), 0).measure(0).value == make_rational(1, 8));
    CHECK(ClopenSet::cell(sys, sys->level(3), 0).measure(0).error == 0);
    CHECK(sys->describe_cell(5, sys->level(3)) == "5 mod 8");
    CHECK_THROWS(sys->level(7));
    CHECK(sys->max_level() == 6);
  }

  TEST_CASE("odometer in two dimensions") {
    const auto sys = odometer(3, 3, 2);
    auto& odo = static_cast<const ProfiniteOdometer&>(*sys);
    const auto r = sys->level(2);
    CHECK(sys->num_cells(r) == 81);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      const CellId c = rng() % 81;
      const GroupElement s{static_cast<std::int64_t>(rng() % 20) - 10, static_cast<std::int64_t>(rng() % 20) - 10};
      const auto res = odo.residues(c, 2);
      const auto moved = odo.residues(sys->act_cell(s, c, r), 2);
      CHECK(moved[0] == ((res[0] + s[0]) % 9 + 9) % 9);
      CHECK(moved[1] == ((res[1] + s[1]) % 9 + 9) % 9);
      CHECK(odo.cell_of(res, 2) == c);
    }
  }

  TEST_CASE("measure margin") {
    const auto sys = odometer(2, 4);
    const auto a = cells(sys, sys->level(3), {0, 1});
    const auto b = cells(sys, sys->level(3), {2, 3, 4});
    CHECK(measure_margin(a, b) == make_rational(1, 8));
    CHECK(measure_margin(b, a) == make_rational(-1, 8));
  }

  TEST_CASE("thue-morse language") {
    const auto sys = thue_morse();
    auto& tm = static_cast<const SubstitutionSubshift&>(*sys);
    const auto w = thue_morse_word(1 << 14);
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto expect = factors(w, n);
      const auto& got = tm.language(n);
      CHECK(std::set<std::string>(got.begin(), got.end()) == expect);
      CHECK(std::is_sorted(got.begin(), got.end()));
    }
    CHECK(tm.language(2).size() == 4);
    CHECK(tm.language(3).size() == 6);
    CHECK(tm.language(4).size() == 10);
    CHECK_THROWS(tm.word_id("000"));
  }

  TEST_CASE("thue-morse cylinders") {
    const auto sys = thue_morse();
    auto& tm = static_cast<const SubstitutionSubshift&>(*sys);
    const Resolution r01{{0, 1}};
    const auto cyl = ClopenSet::cell(sys, r01, tm.word_id("01"));
    const Resolution wide{{-1, 2}};
    const auto fine = cyl.refine(wide);
    std::set<std::string> got, expect;
    for (auto c : fine.cells()) got.insert(tm.word(c, wide));
    for (const auto& f : factors(thue_morse_word(1 << 14), 4))
      if (f.substr(1, 2) == "01") expect.insert(f);
    CHECK(got == expect);

    const auto zero = ClopenSet::cell(sys, Resolution{{0, 0}}, tm.word_id("0"));
    const auto m = zero.measure(0);
    CHECK(abs(m.value - make_rational(1, 2)) <= m.error);
    CHECK(m.error < make_rational(1, 1000));
    CHECK(zero.act(z(1)).act(z(-1)) == zero);
    CHECK(zero.act(z(3)).resolution() == Resolution{{-3, -3}});
    CHECK((zero | zero.complement()).is_full());
    CHECK(ClopenSet::full(sys, sys->trivial()) == (zero | zero.complement()));
    CHECK(abs(zero.act(z(5)).measure(0).value - m.value) <= 2 * m.error + make_rational(1, 1000));
  }

  TEST_CASE("fibonacci subshift") {
    const auto sys = fibonacci();
    auto& fib = static_cast<const SubstitutionSubshift&>(*sys);
    for (std::size_t n = 1; n <= 12; ++n) CHECK(fib.language(n).size() == n + 1);
    const auto a = ClopenSet::cell(sys, Resolution{{0, 0}}, fib.word_id("a"));
    const auto m = a.measure(0);
    const double golden = 0.6180339887498949;
    CHECK(std::abs(m.value.convert_to<double>() - golden) <= m.error.convert_to<double>() + 1e-9);
  }

  TEST_CASE("substitution validation") {
    using Rules = std::map<char, std::string>;
    CHECK_THROWS_AS(SubstitutionSubshift(Rules{{'a', "a"}, {'b', "b"}}), InvalidInput);
    CHECK_THROWS_AS(SubstitutionSubshift(Rules{{'a', "ab"}}), InvalidInput);
    CHECK_THROWS_AS(SubstitutionSubshift(Rules{{'a', ""}, {'b', "ab"}}), InvalidInput);
  }

  TEST_CASE("product systems") {
    const auto sys = std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, 4), odometer(3, 3)});
    const auto r = sys->level(2);
    CHECK(sys->num_cells(r) == 4 * 9);
    CHECK(sys->max_level() == 3);
    const auto parts = sys->split(r);
    CHECK(sys->combine(parts) == r);
    for (CellId c = 0; c < 36; ++c) {
      const auto split = sys->split_cell(c, parts);
      CHECK(sys->combine_cell(split, parts) == c);
      const auto moved = sys->split_cell(sys->act_cell(z(1), c, r), parts);
      CHECK(moved[0] == (split[0] + 1) % 4);
      CHECK(moved[1] == (split[1] + 1) % 9);
      CHECK(sys->cell_mass(0, c, r).value == make_rational(1, 36));
    }
    const auto mixed = std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, 4), thue_morse()});
    const auto m = ClopenSet::full(mixed, mixed->level(1)).measure(0);
    CHECK(abs(m.value - 1) <= m.error);
    CHECK_THROWS_AS(ProductSystem({odometer(2, 3)}), InvalidInput);
    CHECK_THROWS_AS(ProductSystem({odometer(2, 3), odometer(2, 3, 2)}), Unsupported);
  }

  TEST_CASE("boolean algebra on random sets") {
    const auto odo = odometer(2, 5);
    boolean_algebra(odo, {odo->level(1), odo->level(2), odo->level(4)}, 17);
    const auto tm = thue_morse();
    boolean_algebra(tm, {Resolution{{0, 1}}, Resolution{{-1, 1}}, Resolution{{1, 3}}}, 18);
    const auto prod = std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, 3), odometer(3, 2)});
    boolean_algebra(prod, {prod->level(1), prod->trivial(), Resolution{{2, 1}}, Resolution{{1, 2}}}, 19);
  }

  TEST_CASE("actions are automorphisms") {
    const auto sys = odometer(2, 5);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
      const auto r = sys->level(static_cast<int>(rng() % 6));
      const auto a = random_set(sys, r, rng), b = random_set(sys, r, rng);
      const auto s = z(static_cast<std::int64_t>(rng() % 41) - 20), t = z(static_cast<std::int64_t>(rng() % 41) - 20);
      CHECK((a | b).act(s) == (a.act(s) | b.act(s)));
      CHECK((a - b).act(s) == (a.act(s) - b.act(s)));
      CHECK(a.act(s).act(t) == a.act(z(s[0] + t[0])));
      CHECK(a.act(s).measure(0).value == a.measure(0).value);
    }
  }

  TEST_CASE("cell cap") {
    const auto sys = odometer(2, 30);
    CHECK_THROWS_AS(ClopenSet::full(sys, sys->level(25)), ResourceExhausted);
  }
}
