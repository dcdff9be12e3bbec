#pragma once

#include "dynmem/automata.hpp"
#include "dynmem/tree.hpp"

namespace dynmem {

// Bottom-up states of every node (iterative; safe on deep trees).
std::vector<i32> dta_states(const UnrankedTree& t, const Dta& m);
bool dta_accepts(const UnrankedTree& t, const Dta& m);

// Horizontal-run value over the sibling interval u..v (inclusive) starting
// from p, reading the states in `rho`. u==kNoNode means the empty interval.
i32 oracle_row_run(const UnrankedTree& t, const Dta& m, const std::vector<i32>& rho, i32 p,
                   NodeId u, NodeId v);

// State that an ancestor-or-self v of u takes when u's subtree value is
// replaced by q and everything else keeps the values in `rho`.
i32 oracle_lift_run(const UnrankedTree& t, const Dta& m, const std::vector<i32>& rho, i32 q,
                    NodeId u, NodeId v);

// One run of an RDPDA (or a VPA) from an explicit start configuration.
struct PdaRun {
  i64 consumed = 0;   // symbols consumed before the run stopped
  bool dead = false;  // stopped before the end (undefined move / empty stack mid-input)
  i32 state = 0;      // state after `consumed` symbols
  i64 height = 0;     // stack height after `consumed` symbols
  i32 top = -1;       // -1 when the stack is empty
  i64 empty_pos = 0;  // first k >= 1 with empty stack after k symbols; 0 = never
  i32 empty_state = -1;  // state right after `empty_pos` symbols (VPA runs continue)
};

// Runs m on word[i..j] (0-based, inclusive; i > j means the empty window)
// from state p with stack holding exactly `tau`.
PdaRun rdpda_run(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p, i32 tau);
bool rdpda_accepts(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j);

// Runs a VPA from state q with an explicit initial stack (back = top;
// usually empty).
PdaRun vpa_run(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 q,
               std::vector<i32> stack = {});
bool vpa_accepts(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j);

}  // namespace dynmem
