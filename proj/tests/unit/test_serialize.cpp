#include "helpers.hpp"

#include <doctest.h>

using namespace th;

TEST_SUITE("serialize") {
  TEST_CASE("rationals and groups") {
    for (const auto& q : {make_rational(0), make_rational(-3, 4), make_rational(7), make_rational(1, 1000000007)})
      CHECK(rational_from_json(to_json(q)) == q);
    CHECK(to_json(make_rational(2, 4)).get<std::string>() == "1/2");
    CHECK(parse_rational("0.125") == make_rational(1, 8));
    CHECK(parse_rational("-3/6") == make_rational(-1, 2));
    CHECK_THROWS_AS(parse_rational("1e-2"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
    for (const auto& d : {GroupDescriptor::integers(), GroupDescriptor::lattice(3), GroupDescriptor::heisenberg(),
                          GroupDescriptor::lamplighter(8), GroupDescriptor::power_ladder(2, 3, 4)}) {
      const auto back = group_from_json(to_json(d));
      CHECK(Group(back) == Group(d));
    }
    const Group h(GroupDescriptor::heisenberg());
    const GroupElement e{1, -2, 5};
    CHECK(element_from_json(to_json(e), h) == e);
    CHECK(to_json(z(4)).is_number_integer());
    const auto s = FiniteGroupSet{GroupElement{1, 0, 0}, GroupElement{0, 1, 3}};
    CHECK(set_from_json(to_json(s), h) == s);
  }

  TEST_CASE("systems and clopen sets") {
    const std::vector<SystemPtr> systems{
        odometer(2, 5), odometer(3, 3, 2), thue_morse(1 << 12),
        std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, 4), fibonacci(1 << 12)})};
    for (const auto& sys : systems) {
      const auto j = system_to_json(*sys);
      const auto back = system_from_json(j);
      CHECK(system_to_json(*back) == j);
      const auto r = sys->level(1);
      std::vector<CellId> cs;
      for (CellId c = 0; c < sys->num_cells(r); c += 2) cs.push_back(c);
      const ClopenSet a(sys, r, cs);
      const auto ja = to_json(a, true);
      SystemCache cache;
      const auto a2 = clopen_from_json(ja, cache);
      CHECK(to_json(a2, true) == ja);
      CHECK(clopen_from_json(to_json(a), sys) == a);
      CHECK(cache.get(j) == cache.get(j));
    }
    const auto shorthand = system_from_json(Json::parse(R"({"kind":"odometer","mod":2,"depth":4})"));
    CHECK(shorthand->num_cells(shorthand->level(3)) == 8);
    CHECK_THROWS_AS(system_from_json(Json::parse(R"({"kind":"nope"})")), InvalidInput);
    const auto tm = thue_morse(1 << 12);
    const auto words = clopen_from_json(Json::parse(R"({"resolution":[0,1],"words":["01","10"]})"), tm);
    CHECK(words.cell_count() == 2);
    CHECK_THROWS(clopen_from_json(Json::parse(R"({"resolution":[0,2],"words":["000"]})"), tm));
    CHECK(clopen_from_json(Json::parse(R"({"resolution":[1],"full":true})"), odometer(2, 3)).is_full());
  }

  TEST_CASE("families, witnesses and type elements") {
    const auto sys = odometer(2, 4);
    const Castle c{sys, {Tower{ClopenSet::cell(sys, sys->level(3), 0), FiniteGroupSet::interval(0, 7)}}};
    SystemCache cache;
    const auto fj = to_json(double_castle(c, 4));
    const auto f2 = family_from_json(fj, cache);
    CHECK(to_json(f2) == fj);
    CHECK(f2.towers.size() == 2);

    const auto a = cells(sys, sys->level(3), {0, 1}), b = cells(sys, sys->level(3), {2, 3, 4});
    const auto w = *find_witness(a, b, SearchBudget{0, 8, 3}).witness;
    const auto w2 = witness_from_json(to_json(w), sys);
    CHECK(verify_witness(a, b, w2).ok());
    CHECK(to_json(w2) == to_json(w));

    const TypeElement t(sys, sys->level(2), {{0, 2}, {3, 1}});
    CHECK(type_from_json(to_json(t), sys) == t);
    CHECK(type_from_json(to_json(t, true), cache) == TypeElement(cache.get(system_to_json(*sys)), t.resolution(),
                                                                   t.weights()));
  }

  TEST_CASE("certificates") {
    const auto sys = odometer(2, 6);
    const auto cert = build_odometer_certificate(sys, 5, 4, ints({1}), make_rational(1, 10));
    SystemCache cache;
    const auto j = to_json(cert);
    const auto back = certificate_from_json(j, cache);
    CHECK(to_json(back) == j);
    CHECK(verify_certificate(back).ok());
    CHECK(j.dump() == to_json(certificate_from_json(Json::parse(j.dump()), cache)).dump());
  }

  TEST_CASE("reports are plain data") {
    const auto sys = odometer(2, 3);
    const auto a = cells(sys, sys->level(3), {0, 1}), b = cells(sys, sys->level(3), {2, 3, 4});
    const auto res = find_witness(a, b, SearchBudget{0, 8, 3});
    const auto j = to_json(res);
    CHECK(j.at("status") == "FOUND");
    CHECK(j.dump() == to_json(find_witness(a, b, SearchBudget{0, 8, 3})).dump());
    const auto nf = to_json(find_witness(b, a, SearchBudget{0, 8, 3}));
    CHECK(nf.at("status") == "NOT-FOUND");
  }
}
