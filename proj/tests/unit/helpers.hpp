#pragma once

#include "towerlab/towerlab.hpp"

#include <memory>
#include <random>
#include <set>

namespace th {

using namespace towerlab;

inline SystemPtr odometer(std::int64_t base, int depth, int d = 1) {
  return std::make_shared<ProfiniteOdometer>(Group(GroupDescriptor::power_ladder(d, base, depth)));
}

inline SystemPtr thue_morse(std::size_t sample = std::size_t{1} << 16) {
  return std::make_shared<SubstitutionSubshift>(std::map<char, std::string>{{'0', "01"}, {'1', "10"}}, sample);
}

inline SystemPtr fibonacci(std::size_t sample = std::size_t{1} << 16) {
  return std::make_shared<SubstitutionSubshift>(std::map<char, std::string>{{'a', "ab"}, {'b', "a"}}, sample);
}

inline GroupElement z(std::int64_t n) { return GroupElement{n}; }

inline FiniteGroupSet ints(std::initializer_list<std::int64_t> xs) {
  std::vector<GroupElement> out;
  for (auto x : xs) out.push_back(z(x));
  return FiniteGroupSet(std::move(out));
}

inline std::set<std::int64_t> as_ints(const FiniteGroupSet& s) {
  std::set<std::int64_t> out;
  for (const auto& g : s) out.insert(g[0]);
  return out;
}

inline std::set<std::int64_t> range(std::int64_t lo, std::int64_t hi) {
  std::set<std::int64_t> out;
  for (auto i = lo; i <= hi; ++i) out.insert(i);
  return out;
}

inline ClopenSet cells(const SystemPtr& sys, const Resolution& r, std::vector<CellId> cs) {
  return ClopenSet(sys, r, std::move(cs));
}

inline std::vector<CellId> bits_to_cells(std::uint64_t mask, int n) {
  std::vector<CellId> out;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1) out.push_back(static_cast<CellId>(i));
  return out;
}

}  // namespace th
