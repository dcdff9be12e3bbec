#pragma once

#include <optional>

#include "dynmem/util.hpp"

namespace dynmem {

// Bottom-up deterministic automaton over ordered unranked trees. The state of
// a node is delta(p, label) where p is the state of the horizontal DFA after
// reading the children's states left to right from hstart.
struct Dta {
  SymbolTable sigma;
  i32 states = 0;   // bottom-up states
  i32 hstates = 0;  // horizontal DFA states
  i32 hstart = 0;
  std::vector<char> final_;  // size `states`
  std::vector<i32> delta;    // [p * |sigma| + c] -> bottom-up state
  std::vector<i32> hdelta;   // [p * states + q] -> horizontal state

  i32 apply(i32 p, i32 c) const { return delta[static_cast<size_t>(p) * sigma.size() + c]; }
  i32 hstep(i32 p, i32 q) const { return hdelta[static_cast<size_t>(p) * states + q]; }
  bool accepting(i32 q) const { return final_[static_cast<size_t>(q)] != 0; }
  void validate() const;
};

// Realtime deterministic pushdown automaton: one symbol consumed per move,
// top stack symbol popped, at most two symbols pushed (so the height changes
// by at most one per move). No moves on an empty stack. Acceptance is by
// final state after consuming the whole input; the stack may empty exactly at
// the end but a run that empties it earlier is dead.
struct Rdpda {
  struct Move {
    i32 state = 0;
    std::vector<i32> push;  // replaces the popped symbol; push[0] is the new top
  };

  SymbolTable sigma;  // input alphabet
  SymbolTable gamma;  // stack alphabet
  i32 states = 0;
  i32 start = 0;
  i32 init_stack = 0;  // initial stack is this single symbol
  std::vector<char> final_;
  std::vector<std::optional<Move>> delta;  // [(q * |sigma| + a) * |gamma| + g]

  const Move* move(i32 q, i32 a, i32 g) const {
    const auto& m = delta[(static_cast<size_t>(q) * sigma.size() + a) * gamma.size() + g];
    return m ? &*m : nullptr;
  }
  bool accepting(i32 q) const { return final_[static_cast<size_t>(q)] != 0; }
  void validate() const;
};

enum class SymKind : char { kCall, kReturn, kInternal };

// Visibly pushdown automaton: calls always push one symbol, returns pop one
// (with dedicated moves on an empty stack), internals leave the stack alone.
// Transitions are partial; a missing one kills the run. Acceptance is by
// final state.
struct Vpa {
  SymbolTable sigma;
  std::vector<SymKind> kind;  // per input symbol
  SymbolTable gamma;
  i32 states = 0;
  i32 start = 0;
  std::vector<char> final_;
  struct CallMove {
    i32 state = 0;
    i32 push = 0;
  };
  std::vector<std::optional<CallMove>> call_delta;  // [q * |sigma| + a]
  std::vector<std::optional<i32>> ret_delta;        // [(q * |sigma| + a) * |gamma| + g]
  std::vector<std::optional<i32>> ret_empty_delta;  // [q * |sigma| + a]
  std::vector<std::optional<i32>> int_delta;        // [q * |sigma| + a]

  const CallMove* call(i32 q, i32 a) const {
    const auto& m = call_delta[static_cast<size_t>(q) * sigma.size() + a];
    return m ? &*m : nullptr;
  }
  std::optional<i32> ret(i32 q, i32 a, i32 g) const {
    return ret_delta[(static_cast<size_t>(q) * sigma.size() + a) * gamma.size() + g];
  }
  std::optional<i32> ret_empty(i32 q, i32 a) const {
    return ret_empty_delta[static_cast<size_t>(q) * sigma.size() + a];
  }
  std::optional<i32> internal(i32 q, i32 a) const {
    return int_delta[static_cast<size_t>(q) * sigma.size() + a];
  }
  bool accepting(i32 q) const { return final_[static_cast<size_t>(q)] != 0; }
  bool is_call(i32 a) const { return kind[static_cast<size_t>(a)] == SymKind::kCall; }
  bool is_return(i32 a) const { return kind[static_cast<size_t>(a)] == SymKind::kReturn; }
  bool is_internal(i32 a) const { return kind[static_cast<size_t>(a)] == SymKind::kInternal; }
  void validate() const;
};

}  // namespace dynmem
