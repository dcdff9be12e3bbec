#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dynmem {

using i8 = std::int8_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

// Malformed user input (files, descriptors, scripts). CLI maps this to exit 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A script `expect` clause did not hold. CLI maps this to exit 1.
struct ExpectationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal invariant broke. CLI maps this to exit 3.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

#define DM_REQUIRE(cond, msg) \
  do {                        \
    if (!(cond)) throw ::dynmem::ValidationError(msg); \
  } while (0)

#define DM_CHECK(cond, msg) \
  do {                      \
    if (!(cond)) throw ::dynmem::InvariantError(std::string("invariant: ") + (msg)); \
  } while (0)

// floor(n^(num/den)), exact. Requires n >= 0, num >= 0, den >= 1 and that
// n^(num/gcd) fits in 127 bits.
i64 ipow_floor(i64 n, int num, int den);

// n^k with overflow detection.
i64 ipow(i64 n, int k);

// Interned string symbols; ids are dense, stable, in insertion order.
class SymbolTable {
 public:
  i32 intern(const std::string& name);
  i32 find(const std::string& name) const;     // -1 if absent
  i32 require(const std::string& name) const;  // throws ValidationError if absent
  const std::string& name(i32 id) const;
  i32 size() const { return static_cast<i32>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, i32> ids_;
};

}  // namespace dynmem
