#pragma once

#include <optional>
#include <unordered_map>

#include "dynmem/automata.hpp"
#include "dynmem/oracles.hpp"

namespace dynmem {

// Sparse height grid for the string engines: all values a * B^b with
// 1 <= a <= B, 0 <= b < h that do not exceed the engine bound, where B is the
// smallest integer with B^h >= bound. Arbitrary k in [1, bound] decompose
// into at most h grid values (their base-B digits, top digit allowed to be B).
class SpecialK {
 public:
  SpecialK() = default;
  SpecialK(i64 bound, int h);

  i64 bound() const { return bound_; }
  int levels() const { return h_; }
  i64 base() const { return base_; }
  i64 size() const { return static_cast<i64>(values_.size()); }
  const std::vector<i64>& values() const { return values_; }
  bool contains(i64 k) const { return index_.count(k) != 0; }
  // Dense index of a grid value; -1 when k is off the grid.
  i32 index_of(i64 k) const {
    auto it = index_.find(k);
    return it == index_.end() ? -1 : it->second;
  }
  // Digits of k (0 <= k <= bound), least significant first, h entries.
  // digits[b] * B^b sums to k; every nonzero digit value is on the grid.
  std::vector<i64> digits(i64 k) const;

 private:
  i64 bound_ = 0;
  int h_ = 0;
  i64 base_ = 0;
  std::vector<i64> values_;
  std::unordered_map<i64, i32> index_;
};

// Summary of one run over a window. Field-for-field the same data as PdaRun;
// dlen < window length implies dead for both machine kinds.
struct HatDelta {
  bool dead = false;
  i32 end = 0;        // state after dlen symbols (at death when dead)
  i64 height = 0;     // stack height after dlen symbols
  i32 top = -1;       // -1 = empty stack
  i64 empty_pos = 0;  // first prefix length with empty stack; 0 = never
  i32 empty_state = -1;
  i64 dlen = 0;
  bool operator==(const HatDelta&) const = default;
};

HatDelta hat_from_run(const PdaRun& r);

// Pop answer: offset of the k-th pop within the suffix plus the state right
// after it. {0, -1} encodes both "never that many pops" and "undefined".
struct PopResult {
  i64 offset = 0;
  i32 state = -1;
  bool operator==(const PopResult&) const = default;
};

// Full stack (bottom first) after running over word[i..j] (0-based,
// inclusive); nullopt if the run dies. An RDPDA run that empties early is
// dead; a VPA run continues, so its stack is always defined unless a
// transition is missing. tau == -1 starts the VPA run on an empty stack.
std::optional<std::vector<i32>> rdpda_stack(const Rdpda& m, const std::vector<i32>& word, i64 i,
                                            i64 j, i32 p, i32 tau);
std::optional<std::vector<i32>> vpa_stack(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j,
                                          i32 q, i32 tau);

// RDPDA run from an explicit stack (bottom first).
PdaRun rdpda_run_stack(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p,
                       std::vector<i32> stack);

// VPA run from a single stack symbol (or empty when tau == -1).
PdaRun vpa_run_sym(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 q, i32 tau);

// Length of the longest prefix of word[i..j] after which the stack height is
// exactly k. Defined iff the run survives the whole window (for the RDPDA
// additionally: never empties) and 1 <= k <= final height and height k is
// visited at all.
std::optional<i64> oracle_push_pos(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j,
                                   i32 p, i32 tau, i64 k);
std::optional<i64> oracle_vpa_push_pos(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j,
                                       i32 q, i32 tau, i64 k);

// Run word[i..j] from (p, tau), keep the top k stack symbols, then run
// word[ms..me] from q on them: offset and state of the moment the k-th
// symbol is popped. {0, -1} when the first run dies or ends with fewer than
// k symbols, or when the pops never complete.
PopResult oracle_pop_pos(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p,
                         i32 tau, i32 q, i64 ms, i64 me, i64 k);
PopResult oracle_vpa_pop2(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 p, i32 tau,
                          i32 q, i64 ms, i64 me, i64 k);

// Clamped height profile over the whole word: s[0] = 1, call +1, return -1
// when s > 1, internal 0. s has word.size() + 1 entries; s[i] is the height
// after i symbols.
std::vector<i64> vpa_s_profile(const Vpa& m, const std::vector<i32>& word);

// Unclamped typesum: T[0] = 0, call +1, return -1, internal 0.
std::vector<i64> vpa_typesum(const Vpa& m, const std::vector<i32>& word);

// v-pop-state over the whole word (positions 0-based): build the height-k
// stack from (p, tau) on the minimal suffix of word[..jpos] that reaches
// height k unclamped, then run from q over word[mpos..] until the k-th pop;
// the state right after it. nullopt when either anchor does not exist, the
// pops never complete, or a run dies first.
std::optional<i32> oracle_v_pop_state(const Vpa& m, const std::vector<i32>& word, i64 jpos, i32 p,
                                      i32 tau, i32 q, i64 mpos, i64 k);

}  // namespace dynmem
