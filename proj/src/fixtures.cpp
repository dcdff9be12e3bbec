#include "dynmem/fixtures.hpp"

namespace dynmem {

Dta parity_dta() {
  Dta m;
  i32 a = m.sigma.intern("a");
  i32 b = m.sigma.intern("b");
  (void)b;
  m.states = 2;   // parity of a's in the subtree
  m.hstates = 2;  // parity of a's in the row so far
  m.hstart = 0;
  m.final_ = {1, 0};
  m.delta.assign(4, 0);
  m.hdelta.assign(4, 0);
  for (i32 p = 0; p < 2; ++p) {
    for (i32 c = 0; c < 2; ++c) {
      m.delta[static_cast<size_t>(p) * 2 + c] = p ^ (c == a ? 1 : 0);
      m.hdelta[static_cast<size_t>(p) * 2 + c] = p ^ c;
    }
  }
  m.validate();
  return m;
}

Dta random_dta(std::mt19937_64& rng, i32 states, i32 hstates, i32 nsymbols) {
  Dta m;
  for (i32 c = 0; c < nsymbols; ++c) m.sigma.intern(std::string(1, static_cast<char>('a' + c)));
  m.states = states;
  m.hstates = hstates;
  m.hstart = static_cast<i32>(rng() % hstates);
  m.final_.resize(static_cast<size_t>(states));
  for (auto& f : m.final_) f = static_cast<char>(rng() % 2);
  if (states >= 2) {
    // Force a split so the language is not constant for silly reasons.
    bool all_same = true;
    for (char f : m.final_)
      if (f != m.final_[0]) all_same = false;
    if (all_same) m.final_[static_cast<size_t>(rng() % states)] ^= 1;
  }
  m.delta.resize(static_cast<size_t>(hstates) * nsymbols);
  for (auto& q : m.delta) q = static_cast<i32>(rng() % states);
  m.hdelta.resize(static_cast<size_t>(hstates) * states);
  for (auto& p : m.hdelta) p = static_cast<i32>(rng() % hstates);
  m.validate();
  return m;
}

Rdpda dyck_push_pop_rdpda() {
  Rdpda m;
  i32 open = m.sigma.intern("(");
  i32 close = m.sigma.intern(")");
  i32 x = m.gamma.intern("X");
  m.states = 1;
  m.start = 0;
  m.init_stack = x;
  m.final_ = {1};
  m.delta.assign(static_cast<size_t>(1) * 2 * 1, std::nullopt);
  m.delta[static_cast<size_t>(open) * 1 + x] = Rdpda::Move{0, {x, x}};
  m.delta[static_cast<size_t>(close) * 1 + x] = Rdpda::Move{0, {}};
  m.validate();
  return m;
}

Rdpda dyck_final_state_rdpda() {
  Rdpda m;
  i32 open = m.sigma.intern("(");
  i32 close = m.sigma.intern(")");
  i32 bot = m.gamma.intern("#");
  i32 y = m.gamma.intern("Y");  // lowest open parenthesis
  i32 x = m.gamma.intern("X");
  m.states = 2;  // 0: balanced so far, 1: pending opens
  m.start = 0;
  m.init_stack = bot;
  m.final_ = {1, 0};
  m.delta.assign(static_cast<size_t>(2) * 2 * 3, std::nullopt);
  auto at = [&](i32 q, i32 a, i32 g) -> std::optional<Rdpda::Move>& {
    return m.delta[(static_cast<size_t>(q) * 2 + a) * 3 + g];
  };
  at(0, open, bot) = Rdpda::Move{1, {y, bot}};
  at(1, open, y) = Rdpda::Move{1, {x, y}};
  at(1, open, x) = Rdpda::Move{1, {x, x}};
  at(1, close, x) = Rdpda::Move{1, {}};
  at(1, close, y) = Rdpda::Move{0, {}};
  // (0, close, bot) stays undefined: prefix violation kills the run.
  m.validate();
  return m;
}

Vpa dyck_vpa() {
  Vpa m;
  i32 open = m.sigma.intern("(");
  i32 close = m.sigma.intern(")");
  i32 internal = m.sigma.intern("c");
  (void)close;
  (void)internal;
  m.kind = {SymKind::kCall, SymKind::kReturn, SymKind::kInternal};
  i32 a0 = m.gamma.intern("A0");  // saved state 0
  i32 a1 = m.gamma.intern("A1");  // saved state 1
  m.states = 3;  // 0: no open call, 1: open calls pending, 2: dead-end sink
  m.start = 0;
  m.final_ = {1, 0, 0};
  size_t qa = static_cast<size_t>(3) * 3;
  m.call_delta.assign(qa, std::nullopt);
  m.ret_delta.assign(qa * 2, std::nullopt);
  m.ret_empty_delta.assign(qa, std::nullopt);
  m.int_delta.assign(qa, std::nullopt);
  auto qi = [&](i32 q, i32 a) { return static_cast<size_t>(q) * 3 + a; };
  m.call_delta[qi(0, open)] = Vpa::CallMove{1, a0};
  m.call_delta[qi(1, open)] = Vpa::CallMove{1, a1};
  m.call_delta[qi(2, open)] = Vpa::CallMove{2, a0};
  for (i32 q = 0; q < 3; ++q) {
    m.ret_delta[qi(q, close) * 2 + a0] = (q == 2) ? 2 : 0;
    m.ret_delta[qi(q, close) * 2 + a1] = (q == 2) ? 2 : 1;
    m.ret_empty_delta[qi(q, close)] = 2;
    m.int_delta[qi(q, internal)] = q;
  }
  m.validate();
  return m;
}

}  // namespace dynmem
