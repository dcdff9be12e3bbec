#pragma once

#include <random>

#include "dynmem/automata.hpp"

namespace dynmem {

// Accepts trees over {a, b} with an even number of a-labelled nodes.
Dta parity_dta();

// Uniformly random total DTA; every state is final with probability 1/2
// (re-rolled so that at least one final/non-final split exists when possible).
Dta random_dta(std::mt19937_64& rng, i32 states, i32 hstates, i32 nsymbols);

// One-state PDA over {(,)} that just pushes and pops; it exercises the stack
// machinery (including runs that empty the stack) rather than deciding a
// language by state.
Rdpda dyck_push_pop_rdpda();

// Two-state PDA over {(,)} accepting balanced strings by final state; the
// lowest open parenthesis is tracked with a marked stack symbol, the bottom
// symbol is never popped.
Rdpda dyck_final_state_rdpda();

// VPA over call '(' / return ')' / internal 'c' accepting the well-matched
// words: returns restore the state saved at the matching call, so the state
// says whether any call is still open.
Vpa dyck_vpa();

}  // namespace dynmem
