#include "dynmem/util.hpp"

#include <numeric>

namespace dynmem {

namespace {

using u128 = unsigned __int128;
constexpr u128 kSat = ~static_cast<u128>(0);

// x^k, saturating at kSat.
u128 sat_pow(u64 x, int k) {
  u128 acc = 1;
  for (int i = 0; i < k; ++i) {
    if (x != 0 && acc > kSat / x) return kSat;
    acc *= x;
  }
  return acc;
}

}  // namespace

i64 ipow(i64 n, int k) {
  DM_CHECK(n >= 0 && k >= 0, "ipow: bad arguments");
  u128 r = sat_pow(static_cast<u64>(n), k);
  DM_CHECK(r <= static_cast<u128>(INT64_MAX), "ipow: overflow");
  return static_cast<i64>(r);
}

i64 ipow_floor(i64 n, int num, int den) {
  DM_CHECK(n >= 0 && num >= 0 && den >= 1, "ipow_floor: bad arguments");
  if (num == 0) return 1;
  if (n == 0) return 0;
  if (n == 1) return 1;
  int g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den == 1) return ipow(n, num);

  u128 target = sat_pow(static_cast<u64>(n), num);
  DM_CHECK(target != kSat, "ipow_floor: n^num overflows");

  // Largest x with x^den <= n^num.
  i64 hi = 2;
  while (sat_pow(static_cast<u64>(hi), den) <= target) hi *= 2;
  i64 lo = hi / 2;  // lo^den <= target < hi^den
  while (hi - lo > 1) {
    i64 mid = lo + (hi - lo) / 2;
    if (sat_pow(static_cast<u64>(mid), den) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

i32 SymbolTable::intern(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  i32 id = static_cast<i32>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

i32 SymbolTable::find(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

i32 SymbolTable::require(const std::string& name) const {
  i32 id = find(name);
  DM_REQUIRE(id >= 0, "unknown symbol: " + name);
  return id;
}

const std::string& SymbolTable::name(i32 id) const {
  DM_CHECK(id >= 0 && id < size(), "SymbolTable::name: bad id");
  return names_[static_cast<size_t>(id)];
}

}  // namespace dynmem
