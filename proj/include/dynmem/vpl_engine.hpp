#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "dynmem/dcfl_engine.hpp"
#include "dynmem/ledger.hpp"
#include "dynmem/string_tables.hpp"
#include "dynmem/zone.hpp"

namespace dynmem {

// Dynamic membership structure for a visibly pushdown language. The stack
// height after each position is a function of the symbol types alone, so the
// structure maintains, besides the per-window run summaries (hat table), the
// type-sum profile and two jump tables over it: the anchor table (where the
// shortest window ending at j that builds k stack levels starts) and the
// passage table (where the k-th pop lands when a suffix starting at m consumes
// a k-level stack). The v-pop-state table stores, for a window end j and
// rebuild start (p, tau), the state right after the k-th pop during the
// continuation from (q, m); arbitrary k composes stored entries along the
// grid digits of k. Symbol replacement rewrites the profile rows and exactly
// the entries whose rebuild window or pop run spans the changed position;
// insertion shifts the tables around a neutral placeholder and relabels it.
// Entry refills within one stage are independent and could run concurrently;
// this implementation executes them sequentially and reports one round per
// stage (profiles+jumps, hats, then one per grid level).
class VplEngine {
 public:
  // size_bound = 0 picks max(4 |word|, 2^h). Larger explicit bounds are
  // allowed (used when comparing a doubled engine against a fresh build).
  VplEngine(const Vpa& m, std::vector<i32> word, Theta theta, i64 size_bound = 0);

  // Positions are 1-based. relabel(pos, sym) replaces one symbol;
  // insert places `sym` before/after `pos` (before 1..|w|+1, after 0..|w|).
  void relabel(i64 pos, i32 sym);
  void insert(i64 pos, InsertSide side, i32 sym);

  // Membership of w[i..j] (j = i-1 queries the empty word). A VPA may accept
  // words that are not well formed; this is plain acceptance from the start
  // state and the empty stack.
  bool query(i64 i, i64 j);

  // State right after the k-th pop when the k stack levels built by the
  // shortest suffix of w[1..j] that reaches height k from (p, tau) are
  // consumed by the run from q over w[m..]. tau = -1 rebuilds from the empty
  // stack. k = 0 returns q; -1 = undefined. Charged composed read.
  i32 v_pop_state_any(i32 p, i64 j, i32 tau, i32 q, i64 m, i64 k);

  // Conversions between the two pop summaries. pop2_from_vps answers the
  // explicit-window form (stack of w[i..j] from (p, tau), top-k popped by
  // w[m..]) out of stored v-pop-state entries; vps_from_pop2 answers a
  // v-pop-state query through a caller-supplied explicit-window provider.
  // Both return -1 outside their domain; k = 0 returns q. Charged.
  using Pop2Fn = std::function<PopResult(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k)>;
  i32 pop2_from_vps(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k);
  i32 vps_from_pop2(const Pop2Fn& pop2, i32 p, i64 j, i32 tau, i32 q, i64 m, i64 k);

  // Height profile (clamped at 1) and raw type sum after i symbols, i in
  // [0, |w|]. Uncharged probes; both depend on symbol types only.
  i64 stack_height_at(i64 i) const;
  i64 type_sum_at(i64 i) const;

  // Jump views over the height profile. jump_down_right(i, d): first j > i
  // with s(j) = s(i) - d, defined for call positions; jump_down_left(i, d):
  // last j < i with s(j) = s(i) + d, defined for return positions. Uncharged.
  std::optional<i64> jump_down_right(i64 i, i64 d) const;
  std::optional<i64> jump_down_left(i64 i, i64 d) const;

  // Last prefix of (q, tau, w[i..j]) with exactly k stack symbols (uncharged
  // diagnostic; direct simulation, same domain as the oracle).
  std::optional<i64> push_pos(i64 i, i64 j, i32 q, i32 tau, i64 k) const;

  // Stored-entry probes (uncharged; for tests and sweeps). anchor_entry
  // returns the prefix length x such that w[x+1..j] is the shortest suffix
  // reaching height k (grid k; -1 = unreachable); pop_end_entry the position
  // whose consumption completes the k-th pop of a run from m (grid k; -1 =
  // never). vps_entry reads one stored v-pop-state (-1 = undefined).
  HatDelta hat_entry(i64 i, i64 j, i32 q, i32 tau) const;
  i64 anchor_entry(i64 j, i64 k) const;
  i64 pop_end_entry(i64 m, i64 k) const;
  i32 vps_entry(i32 p, i64 j, i32 tau, i32 q, i64 m, i64 k) const;

  // Profile and jump tables vs a from-scratch recomputation (cheap; for the
  // per-change checks). Full table-vs-oracle sweep / sampled row sweep.
  // All return fault descriptions (empty = clean); ledger-muted.
  std::vector<std::string> verify_profiles() const;
  std::vector<std::string> verify_tables(i64 max_faults = 8) const;
  std::vector<std::string> verify_sample(std::mt19937_64& rng, i64 rows, i64 max_faults = 8) const;

  const std::vector<i32>& word() const { return word_; }
  i64 size() const { return static_cast<i64>(word_.size()); }
  i64 size_bound() const { return bound_; }
  const SpecialK& grid() const { return grid_; }
  const Vpa& vpa() const { return vpa_; }
  i32 gap_symbol() const { return nu_; }
  Theta theta() const { return theta_; }
  WorkLedger& ledger() { return ledger_; }
  const WorkLedger& ledger() const { return ledger_; }

 private:
  // Clean rebuild base: at prefix `pos` the stack holds exactly [sym] in
  // `state`, and the type sum never drops below t_[pos] up to the window end.
  struct Base {
    i32 state = 0;
    i32 sym = -1;
    i64 pos = 0;
  };

  i64 tri0(i64 i, i64 j) const { return j * (j + 1) / 2 + i; }
  i64 hat_index(i64 i, i64 j, i32 q, i32 tau) const {
    return (tri0(i, j) * nq_ + q) * (ng_ + 1) + (tau + 1);
  }
  i64 jump_index(i64 pos, i32 kidx) const { return pos * sk_ + kidx; }
  i64 vps_index(i32 p, i64 jpos, i32 tau, i32 q, i64 mpos, i32 kidx) const {
    return ((((jpos * size() + mpos) * nq_ + p) * (ng_ + 1) + (tau + 1)) * nq_ + q) * sk_ + kidx;
  }

  // Charged stored reads.
  const HatDelta& hat_at(i64 i, i64 j, i32 q, i32 tau);
  i64 anchor_at(i64 jpos, i32 kidx);
  i64 passage_at(i64 mpos, i32 kidx);
  i64 prev_lower_at(i64 x);
  i32 vps_at(i32 p, i64 jpos, i32 tau, i32 q, i64 mpos, i32 kidx);
  // Derived-index reads over the type sum (charged one touch each).
  i64 last_at_value(i64 v, i64 lo, i64 hi);
  i64 range_min(i64 a, i64 b);

  // Summary of the rebuild from `b` through position endpos (synthetic when
  // endpos < b.pos; a stored hat read otherwise).
  HatDelta rebuild_hat(const Base& b, i64 endpos);

  // Reduces (p, tau, anchor x, window end jpos) to a clean base, re-anchoring
  // below the deepest type-sum dip when the start symbol is consumed mid-way.
  // nullopt = the rebuilt stack cannot hold exactly the requested levels.
  std::optional<Base> clean_base(i32 p, i32 tau, i64 x, i64 jpos, i64 k);

  // One stored-table entry for grid k (any k >= 1 with k = a * B^b). Used by
  // the init fill, the per-change refills, and the new lines after an insert.
  i32 compute_vps(i32 p, i32 tau, i64 jpos, i32 q, i64 mpos, i64 k);
  // Arbitrary-k composition along the grid digits of k.
  i32 vps_any_impl(i32 p, i64 jpos, i32 tau, i32 q, i64 mpos, i64 k);

  void rebuild_profiles();    // s_, t_, pl_, tidx_, rmq_ from word_
  void rebuild_jump_scans();  // full anchor/passage scans (init and grow)
  void rebuild_splits();      // chunk split rule per grid value
  void fill_hats();
  void fill_vps();
  void relabel_impl(i64 l0, i32 sym);
  void insert_shift(i64 l0);
  void grow_bound();

  Vpa vpa_;  // input automaton plus the neutral gap symbol
  i32 nu_ = 0;
  Theta theta_;
  i64 bound_ = 0;
  SpecialK grid_;
  std::vector<i32> word_;
  i32 nq_ = 0, ng_ = 0;  // tau axes have ng_ + 1 slots (slot 0 = empty stack)
  i64 sk_ = 0;
  std::vector<i64> split_c_, split_d_;  // top/rest chunk per grid index; -1 = atom

  std::vector<i64> s_, t_;  // height profile / type sum, prefix-indexed 0..|w|
  std::vector<i32> pl_;     // last earlier prefix with type sum one lower
  std::vector<i32> la_;     // anchor table, row = window end position
  std::vector<i32> r_;      // passage table, row = suffix start position
  std::vector<HatDelta> hat_;
  std::vector<i8> vps_;
  std::vector<std::vector<i32>> tidx_;  // prefixes per type-sum value (offset |w|)
  std::vector<std::vector<i64>> rmq_;   // sparse range-min table over t_
  WorkLedger ledger_;
};

}  // namespace dynmem
