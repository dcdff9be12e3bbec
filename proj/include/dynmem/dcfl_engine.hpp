#pragma once

#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "dynmem/ledger.hpp"
#include "dynmem/string_tables.hpp"
#include "dynmem/zone.hpp"

namespace dynmem {

enum class InsertSide : char { kBefore, kAfter };

// Dynamic membership structure for a realtime DCPDA language. Maintains, for
// every window w[i..j] and start configuration (p, tau), the run summary
// (hat table), the last visit to each grid height (push table), and for every
// suffix start m > j the position/state of the k-th pop during the
// continuation (pop table, grid heights). Symbol replacement rewrites exactly
// the entries whose window or suffix spans the changed position; insertion
// shifts the tables around a neutral placeholder and then relabels it. All
// per-change entry recomputations are independent over disjoint entries and
// could run concurrently; this implementation executes them sequentially and
// reports one round per change.
//
// Pushes that replace the symbol below the new top are not supported: the
// anchor composition identifies the levels below a revisited height with a
// frozen prefix stack, which a rewriting push would silently invalidate.
class DcflEngine {
 public:
  // size_bound = 0 picks max(4 |word|, 2^h). Larger explicit bounds are
  // allowed (used when comparing a doubled engine against a fresh build).
  DcflEngine(const Rdpda& m, std::vector<i32> word, Theta theta, i64 size_bound = 0);

  // Positions are 1-based. relabel(pos, sym) replaces one symbol;
  // insert places `sym` before/after `pos` (before 1..|w|+1, after 0..|w|).
  void relabel(i64 pos, i32 sym);
  void insert(i64 pos, InsertSide side, i32 sym);

  // Membership of w[i..j] (j = i-1 queries the empty word).
  bool query(i64 i, i64 j);

  // Composed reads for arbitrary k (charged like ordinary reads).
  std::optional<i64> push_pos_any(i64 i, i64 j, i32 p, i32 tau, i64 k);
  PopResult pop_pos_any(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k);

  // Stored-entry probes (uncharged; for tests and sweeps).
  HatDelta hat_entry(i64 i, i64 j, i32 p, i32 tau) const;
  i64 push_entry(i64 i, i64 j, i32 p, i32 tau, i64 k) const;  // -1 = undefined
  PopResult pop_entry(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k) const;

  // Full table-vs-oracle sweep / sampled row sweep. Return fault descriptions
  // (empty = clean); ledger-muted.
  std::vector<std::string> verify_tables(i64 max_faults = 8) const;
  std::vector<std::string> verify_sample(std::mt19937_64& rng, i64 rows, i64 max_faults = 8) const;

  const std::vector<i32>& word() const { return word_; }
  i64 size() const { return static_cast<i64>(word_.size()); }
  i64 size_bound() const { return bound_; }
  const SpecialK& grid() const { return grid_; }
  const Rdpda& pda() const { return pda_; }
  i32 gap_symbol() const { return nu_; }
  Theta theta() const { return theta_; }
  WorkLedger& ledger() { return ledger_; }
  const WorkLedger& ledger() const { return ledger_; }

 private:
  struct Decomp {
    HatDelta hat;
    i64 kf = 0;      // surviving prefix-stack levels (incl. the exposed one)
    i64 pos_f = 0;   // absolute position where the tail starts (tail = [pos_f+1, j])
    i32 q_f = 0;     // state entering the tail
    i32 tau_e = -1;  // tail base symbol
    HatDelta tail;   // tail segment summary (synthetic when pos_f == j)
    bool live() const { return !hat.dead && hat.empty_pos == 0; }
  };

  i64 tri(i64 i, i64 j) const { return (j - 1) * j / 2 + (i - 1); }
  i64 hat_index(i64 i, i64 j, i32 p, i32 tau) const;
  i64 push_index(i64 i, i64 j, i32 p, i32 tau, i32 kidx) const;
  i64 pop_index(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i32 kidx) const;
  void rebuild_pop_base();

  // Charged stored reads.
  const HatDelta& hat_at(i64 i, i64 j, i32 p, i32 tau);
  i64 push_at(i64 i, i64 j, i32 p, i32 tau, i64 k);
  PopResult pop_at(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k);

  HatDelta synth_hat(i32 state, i32 tau) const;
  // First pop of a one-symbol stack [tau] during (q, w[m..L]): a hat read.
  PopResult single_pop(i32 q, i64 m, i32 tau);

  // Prefix anchor of config (i..x, p, tau) at stack level `level`: the window
  // end of the longest prefix whose stack has exactly `level` symbols, plus
  // the state/top there. Reads hats/push entries; memoized per operation.
  struct Anchor {
    i64 end = 0;  // absolute window end (i-1 = empty prefix)
    i32 state = 0;
    i32 top = -1;
  };
  std::optional<Anchor> anchor_at(i64 i, i64 x, i32 p, i32 tau, i64 level);

  std::optional<i64> push_any_impl(i64 i, i64 j, i32 p, i32 tau, i64 k);
  PopResult pop_any_impl(i64 i, i64 x, i32 p, i32 tau, i32 q, i64 m, i64 k);

  Decomp flow(i64 i, i64 j, i32 p, i32 tau, i64 l, i32 sym);
  // Maximal staged pop of the prefix stack (levels k0 .. 1, prefix = [i, xpre])
  // starting at (r, pos+1); composes the surviving tail summary.
  Decomp batch(i64 i, i64 j, i32 p, i32 tau, i64 xpre, i64 pos, i32 r, i64 k0);
  void relabel_impl(i64 l, i32 sym);
  void insert_shift(i64 l);
  void grow_bound();
  void fill_from_oracle();

  Rdpda pda_;  // input automaton plus the neutral gap symbol
  i32 nu_ = 0;
  Theta theta_;
  i64 bound_ = 0;
  SpecialK grid_;
  std::vector<i32> word_;
  i32 nq_ = 0, ng_ = 0;
  i64 sk_ = 0;

  std::vector<HatDelta> hat_;
  std::vector<i32> push_;
  std::vector<u16> pop_off_;
  std::vector<i8> pop_st_;
  std::vector<i64> pop_base_;  // (pair, m)-slot base per tri index

  std::unordered_map<u64, std::optional<Anchor>> anchor_memo_;
  WorkLedger ledger_;
};

}  // namespace dynmem
