#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace th;

namespace {

std::shared_ptr<const ProductSystem> two_three(int depth2, int depth3) {
  return std::make_shared<ProductSystem>(std::vector<SystemPtr>{odometer(2, depth2), odometer(3, depth3)});
}

// One tower over a cell of Z/(2^a 3^b) with shape {0..len-1}; the remaining
// levels are sent onto subshape levels by the assignment `targets`.
AFCertificate cyclic_certificate(const std::shared_ptr<const ProductSystem>& sys, int a, int b, std::int64_t len,
                                 const std::vector<std::int64_t>& targets, int n, Rational delta) {
  const Resolution r{{a, b}};
  const std::int64_t l = (std::int64_t{1} << a) * static_cast<std::int64_t>(std::pow(3, b));
  const auto base = ClopenSet::cell(sys, r, 0);
  AFCertificate cert;
  cert.castle = Castle{sys, {Tower{base, FiniteGroupSet::interval(0, len - 1)}}};
  cert.n = n;
  cert.k = ints({1});
  cert.delta = std::move(delta);
  cert.diameter_resolution = std::min(a, b);
  std::vector<GroupElement> sub;
  for (auto s : targets) sub.push_back(z(s));
  cert.subshapes = {FiniteGroupSet(sub)};
  cert.witness.m = 0;
  cert.witness.resolution = r;
  for (std::int64_t j = len; j < l; ++j)
    cert.witness.pieces.push_back({base.act(z(j)), z(targets[static_cast<std::size_t>(j - len)] - j), 0});
  return cert;
}

}  // namespace

TEST_SUITE("afcheck") {
  TEST_CASE("odometer certificate") {
    const auto sys = odometer(2, 8);
    const auto cert = build_odometer_certificate(sys, 5, 4, ints({1}), make_rational(1, 10));
    CHECK(as_ints(cert.castle.towers[0].shape) == range(0, 31));
    const auto report = verify_certificate(cert);
    CHECK(report.ok());
    REQUIRE(report.defects.size() == 1);
    CHECK(report.defects[0] == make_rational(2, 32));
    CHECK(remainder_set(cert).is_empty());
    CHECK(subshape_set(cert) == ClopenSet::cell(sys, sys->level(5), 0));
    CHECK_THROWS_AS(build_odometer_certificate(sys, 4, 4, ints({1}), make_rational(1, 10)), InvarianceViolation);
    CHECK_THROWS_AS(build_odometer_certificate(sys, 2, 4, ints({1}), make_rational(1, 1)), InvalidInput);
    CHECK_THROWS_AS(build_odometer_certificate(sys, 9, 4, ints({1}), make_rational(1, 10)), InvalidInput);
    CHECK_THROWS_AS(build_odometer_certificate(thue_morse(), 2, 4, ints({1}), make_rational(1, 10)), Unsupported);

    const auto two_d = odometer(2, 5, 2);
    const auto cert2 = build_odometer_certificate(two_d, 4, 4, FiniteGroupSet{GroupElement{1, 0}, GroupElement{0, 1}},
                                                  make_rational(1, 5));
    CHECK(cert2.castle.towers[0].shape.size() == 256);
    CHECK(verify_certificate(cert2).ok());
  }

  TEST_CASE("negative controls") {
    const auto sys = odometer(2, 8);
    const auto good = build_odometer_certificate(sys, 5, 4, ints({1}), make_rational(1, 10));

    auto tight = good;
    tight.n = 32;
    const auto r1 = verify_certificate(tight);
    CHECK_FALSE(r1.ratio_ok);
    CHECK(r1.castle_ok);

    auto strict = good;
    strict.delta = make_rational(1, 16);
    CHECK_FALSE(verify_certificate(strict).invariance_ok);

    auto coarse = good;
    coarse.diameter_resolution = 6;
    CHECK_FALSE(verify_certificate(coarse).diameter_ok);
    coarse.diameter_resolution = 99;
    CHECK_FALSE(verify_certificate(coarse).diameter_ok);

    auto short_shape = good;
    short_shape.castle.towers[0].shape = FiniteGroupSet::interval(0, 29);
    const auto r2 = verify_certificate(short_shape);
    CHECK_FALSE(r2.witness_ok);
    CHECK(r2.castle_ok);

    auto overlapping = good;
    overlapping.castle.towers[0].shape = FiniteGroupSet::interval(0, 32);
    CHECK_FALSE(verify_certificate(overlapping).castle_ok);

    auto outside = good;
    outside.subshapes = {ints({40})};
    CHECK_FALSE(verify_certificate(outside).ratio_ok);
  }

  TEST_CASE("exact decomposition without remainder") {
    const auto sys = odometer(2, 8);
    const auto cert = build_odometer_certificate(sys, 5, 4, ints({1}), make_rational(1, 10));
    CHECK_THROWS_AS(exact_decomposition(cert), InvarianceViolation);
    const auto d = exact_decomposition(cert, make_rational(3, 5));
    REQUIRE(d.castle.towers.size() == 1);
    CHECK(d.added[0].empty());
    CHECK(verify_castle(d.castle).partitions);
  }

  TEST_CASE("grafting the remainder on a product") {
    const auto sys = two_three(3, 2);
    const auto cert = cyclic_certificate(sys, 2, 1, 10, {0, 1}, 4, make_rational(1, 4));
    REQUIRE(verify_certificate(cert).ok());
    CHECK_FALSE(remainder_set(cert).is_empty());
    const auto d = exact_decomposition(cert, make_rational(3, 4));
    CHECK(verify_castle(d.castle).partitions);
    REQUIRE(d.castle.towers.size() == 1);
    CHECK(as_ints(d.added[0]) == std::set<std::int64_t>{10, 11});
    CHECK(as_ints(d.castle.towers[0].shape) == range(0, 11));
    for (const auto& b : d.bounds) {
      CHECK(b.extended_defect <= b.original_defect + 2 * b.added);
      CHECK(Rational(BigInt(b.original_defect + 2 * b.added)) < d.delta_target * Rational(BigInt(b.extended_size)));
    }
    CHECK_THROWS_AS(exact_decomposition(cert, make_rational(1, 2)), InvarianceViolation);
    auto broken = cert;
    broken.witness.pieces.pop_back();
    CHECK_THROWS_AS(exact_decomposition(broken, make_rational(3, 4)), InvalidInput);
  }

  TEST_CASE("random remainder assignments graft into partitions") {
    std::mt19937_64 rng(12);
    const auto sys = two_three(4, 2);
    for (int trial = 0; trial < 40; ++trial) {
      const int a = 2 + static_cast<int>(rng() % 3);
      const int b = 1 + static_cast<int>(rng() % 2);
      const std::int64_t l = (std::int64_t{1} << a) * (b == 1 ? 3 : 9);
      const std::int64_t rem = 1 + static_cast<std::int64_t>(rng() % 3);
      const std::int64_t len = l - rem;
      std::vector<std::int64_t> pool(static_cast<std::size_t>(len));
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(rem));
      const int n = static_cast<int>(std::max<std::int64_t>(2, (len - 1) / rem));
      const Rational delta = make_rational(2, len) + make_rational(1, 1000);
      const auto cert = cyclic_certificate(sys, a, b, len, pool, n, delta);
      const auto report = verify_certificate(cert);
      REQUIRE_MESSAGE(report.ok(), (report.problems.empty() ? "" : report.problems.front()));
      const Rational target = delta + make_rational(2, n) + make_rational(1, 2);
      const auto d = exact_decomposition(cert, target);
      CHECK(verify_castle(d.castle).partitions);
      std::size_t added = 0;
      for (const auto& s : d.added) added += s.size();
      CHECK(added == static_cast<std::size_t>(rem));
      for (const auto& bnd : d.bounds) CHECK(bnd.extended_defect <= bnd.original_defect + 2 * bnd.added);
    }
  }
}
