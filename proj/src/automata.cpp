#include "dynmem/automata.hpp"

namespace dynmem {

void Dta::validate() const {
  DM_REQUIRE(states >= 1 && hstates >= 1, "dta: needs at least one state");
  DM_REQUIRE(sigma.size() >= 1, "dta: empty alphabet");
  DM_REQUIRE(hstart >= 0 && hstart < hstates, "dta: bad horizontal start state");
  DM_REQUIRE(static_cast<i32>(final_.size()) == states, "dta: final set size mismatch");
  DM_REQUIRE(delta.size() == static_cast<size_t>(hstates) * sigma.size(),
             "dta: delta must be total over hstates x alphabet");
  DM_REQUIRE(hdelta.size() == static_cast<size_t>(hstates) * states,
             "dta: hdelta must be total over hstates x states");
  for (i32 q : delta) DM_REQUIRE(q >= 0 && q < states, "dta: delta target out of range");
  for (i32 p : hdelta) DM_REQUIRE(p >= 0 && p < hstates, "dta: hdelta target out of range");
}

void Rdpda::validate() const {
  DM_REQUIRE(states >= 1, "rdpda: needs at least one state");
  DM_REQUIRE(sigma.size() >= 1 && gamma.size() >= 1, "rdpda: empty alphabet");
  DM_REQUIRE(start >= 0 && start < states, "rdpda: bad start state");
  DM_REQUIRE(init_stack >= 0 && init_stack < gamma.size(), "rdpda: bad initial stack symbol");
  DM_REQUIRE(static_cast<i32>(final_.size()) == states, "rdpda: final set size mismatch");
  DM_REQUIRE(delta.size() == static_cast<size_t>(states) * sigma.size() * gamma.size(),
             "rdpda: delta table size mismatch");
  for (const auto& m : delta) {
    if (!m) continue;
    DM_REQUIRE(m->state >= 0 && m->state < states, "rdpda: move target out of range");
    DM_REQUIRE(m->push.size() <= 2, "rdpda: push strings longer than 2 are not supported");
    for (i32 g : m->push) DM_REQUIRE(g >= 0 && g < gamma.size(), "rdpda: pushed symbol out of range");
  }
}

void Vpa::validate() const {
  DM_REQUIRE(states >= 1, "vpa: needs at least one state");
  DM_REQUIRE(sigma.size() >= 1 && gamma.size() >= 1, "vpa: empty alphabet");
  DM_REQUIRE(start >= 0 && start < states, "vpa: bad start state");
  DM_REQUIRE(static_cast<i32>(final_.size()) == states, "vpa: final set size mismatch");
  DM_REQUIRE(static_cast<i32>(kind.size()) == sigma.size(), "vpa: kind per symbol required");
  size_t qa = static_cast<size_t>(states) * sigma.size();
  DM_REQUIRE(call_delta.size() == qa && ret_empty_delta.size() == qa && int_delta.size() == qa &&
                 ret_delta.size() == qa * gamma.size(),
             "vpa: transition table size mismatch");
  for (i32 q = 0; q < states; ++q) {
    for (i32 a = 0; a < sigma.size(); ++a) {
      size_t idx = static_cast<size_t>(q) * sigma.size() + a;
      switch (kind[static_cast<size_t>(a)]) {
        case SymKind::kCall:
          DM_REQUIRE(!ret_empty_delta[idx] && !int_delta[idx], "vpa: call symbol with non-call moves");
          if (call_delta[idx]) {
            DM_REQUIRE(call_delta[idx]->state >= 0 && call_delta[idx]->state < states,
                       "vpa: call target out of range");
            DM_REQUIRE(call_delta[idx]->push >= 0 && call_delta[idx]->push < gamma.size(),
                       "vpa: pushed symbol out of range");
          }
          for (i32 g = 0; g < gamma.size(); ++g)
            DM_REQUIRE(!ret_delta[idx * gamma.size() + g], "vpa: call symbol with return moves");
          break;
        case SymKind::kReturn:
          DM_REQUIRE(!call_delta[idx] && !int_delta[idx], "vpa: return symbol with non-return moves");
          for (i32 g = 0; g < gamma.size(); ++g) {
            const auto& m = ret_delta[idx * gamma.size() + g];
            if (m) DM_REQUIRE(*m >= 0 && *m < states, "vpa: return target out of range");
          }
          if (ret_empty_delta[idx])
            DM_REQUIRE(*ret_empty_delta[idx] >= 0 && *ret_empty_delta[idx] < states,
                       "vpa: empty-return target out of range");
          break;
        case SymKind::kInternal:
          DM_REQUIRE(!call_delta[idx] && !ret_empty_delta[idx], "vpa: internal symbol with stack moves");
          for (i32 g = 0; g < gamma.size(); ++g)
            DM_REQUIRE(!ret_delta[idx * gamma.size() + g], "vpa: internal symbol with return moves");
          if (int_delta[idx])
            DM_REQUIRE(*int_delta[idx] >= 0 && *int_delta[idx] < states,
                       "vpa: internal target out of range");
          break;
      }
    }
  }
}

}  // namespace dynmem
