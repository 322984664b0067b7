#include "towerlab/towerlab.hpp"

#include <benchmark/benchmark.h>

using namespace towerlab;

namespace {

SystemPtr odometer(std::int64_t base, int depth) {
  return std::make_shared<ProfiniteOdometer>(Group(GroupDescriptor::power_ladder(1, base, depth)));
}

void BM_Quasitile(benchmark::State& state) {
  const Group g(GroupDescriptor::integers());
  TileSystem sys{{}, make_rational(1, 4)};
  for (int i = 0; i < 10; ++i) sys.tiles.push_back(FiniteGroupSet{GroupElement{0}});
  sys.tiles.push_back(FiniteGroupSet::interval(0, 4));
  const auto e = FiniteGroupSet::interval(0, state.range(0) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(quasitile(g, e, sys));
}
BENCHMARK(BM_Quasitile)->Arg(200)->Arg(2000);

void BM_FirstReturnThueMorse(benchmark::State& state) {
  const auto sys = std::make_shared<SubstitutionSubshift>(std::map<char, std::string>{{'0', "01"}, {'1', "10"}});
  const auto v = ClopenSet::cell(sys, Resolution{{0, 0}}, sys->word_id("0"));
  for (auto _ : state) benchmark::DoNotOptimize(first_return_decomposition(sys, v, 64));
}
BENCHMARK(BM_FirstReturnThueMorse);

void BM_CompareOdometer(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto sys = odometer(2, depth);
  const auto r = sys->level(depth);
  const std::uint64_t cells = std::uint64_t{1} << depth;
  std::vector<CellId> ca, cb;
  for (CellId c = 0; c < cells; ++c) (c % 3 == 0 ? ca : cb).push_back(c);
  const ClopenSet a(sys, r, ca), b(sys, r, cb);
  for (auto _ : state) benchmark::DoNotOptimize(find_witness(a, b, SearchBudget{0, 4, depth}));
}
BENCHMARK(BM_CompareOdometer)->Arg(4)->Arg(6)->Arg(8);

void BM_SimplexMap(benchmark::State& state) {
  const auto sys = odometer(2, 8);
  const Castle c{sys, {Tower{ClopenSet::cell(sys, sys->level(8), 0), FiniteGroupSet::interval(0, 255)}}};
  const auto ts = double_castle(c, 128);
  const FiniteGroupSet f{GroupElement{-1}, GroupElement{0}, GroupElement{1}};
  for (auto _ : state) benchmark::DoNotOptimize(build_simplex_map(ts, f, 61, 1));
}
BENCHMARK(BM_SimplexMap);

void BM_OdometerCertificate(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto sys = odometer(2, depth);
  for (auto _ : state) {
    const auto cert = build_odometer_certificate(sys, depth, 4, FiniteGroupSet{GroupElement{1}}, make_rational(1, 10));
    benchmark::DoNotOptimize(verify_certificate(cert));
  }
}
BENCHMARK(BM_OdometerCertificate)->Arg(5)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
