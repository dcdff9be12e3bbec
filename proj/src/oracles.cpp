#include "dynmem/oracles.hpp"

#include <algorithm>

namespace dynmem {

std::vector<i32> dta_states(const UnrankedTree& t, const Dta& m) {
  std::vector<i32> rho(static_cast<size_t>(t.size()));
  // Children always have larger ids than their parent, so a reverse id sweep
  // is a valid bottom-up order.
  for (NodeId v = static_cast<NodeId>(t.size()) - 1; v >= 0; --v) {
    i32 p = m.hstart;
    for (NodeId c = t.fchild(v); c != kNoNode; c = t.rsib(c))
      p = m.hstep(p, rho[static_cast<size_t>(c)]);
    rho[static_cast<size_t>(v)] = m.apply(p, t.label(v));
  }
  return rho;
}

bool dta_accepts(const UnrankedTree& t, const Dta& m) {
  return m.accepting(dta_states(t, m)[static_cast<size_t>(t.root())]);
}

i32 oracle_row_run(const UnrankedTree& t, const Dta& m, const std::vector<i32>& rho, i32 p,
                   NodeId u, NodeId v) {
  if (u == kNoNode) return p;
  DM_CHECK(u == v || t.sib_before_eq(u, v), "oracle_row_run: not an ordered sibling interval");
  for (NodeId c = u;; c = t.rsib(c)) {
    p = m.hstep(p, rho[static_cast<size_t>(c)]);
    if (c == v) break;
  }
  return p;
}

i32 oracle_lift_run(const UnrankedTree& t, const Dta& m, const std::vector<i32>& rho, i32 q,
                    NodeId u, NodeId v) {
  DM_CHECK(t.is_anc_or_self(v, u), "oracle_lift_run: v must be ancestor-or-self of u");
  i32 cur = q;
  NodeId w = u;
  while (w != v) {
    NodeId par = t.parent(w);
    i32 p = m.hstart;
    for (NodeId c = t.fchild(par); c != kNoNode; c = t.rsib(c))
      p = m.hstep(p, c == w ? cur : rho[static_cast<size_t>(c)]);
    cur = m.apply(p, t.label(par));
    w = par;
  }
  return cur;
}

PdaRun rdpda_run(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p, i32 tau) {
  PdaRun r;
  r.state = p;
  std::vector<i32> stack{tau};
  for (i64 k = i; k <= j; ++k) {
    if (stack.empty()) {
      r.dead = true;
      break;
    }
    const Rdpda::Move* mv = m.move(r.state, word[static_cast<size_t>(k)], stack.back());
    if (!mv) {
      r.dead = true;
      break;
    }
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    r.state = mv->state;
    r.consumed = k - i + 1;
    if (stack.empty() && r.empty_pos == 0) {
      r.empty_pos = r.consumed;
      r.empty_state = r.state;
    }
  }
  r.height = static_cast<i64>(stack.size());
  r.top = stack.empty() ? -1 : stack.back();
  return r;
}

bool rdpda_accepts(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j) {
  if (j < i) return m.accepting(m.start);
  PdaRun r = rdpda_run(m, word, i, j, m.start, m.init_stack);
  return !r.dead && r.consumed == j - i + 1 && m.accepting(r.state);
}

PdaRun vpa_run(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 q,
               std::vector<i32> stack) {
  PdaRun r;
  r.state = q;
  for (i64 k = i; k <= j; ++k) {
    i32 a = word[static_cast<size_t>(k)];
    if (m.is_call(a)) {
      const Vpa::CallMove* mv = m.call(r.state, a);
      if (!mv) {
        r.dead = true;
        break;
      }
      stack.push_back(mv->push);
      r.state = mv->state;
    } else if (m.is_return(a)) {
      std::optional<i32> nxt;
      if (stack.empty()) {
        nxt = m.ret_empty(r.state, a);
      } else {
        nxt = m.ret(r.state, a, stack.back());
        if (nxt) stack.pop_back();
      }
      if (!nxt) {
        r.dead = true;
        break;
      }
      r.state = *nxt;
    } else {
      std::optional<i32> nxt = m.internal(r.state, a);
      if (!nxt) {
        r.dead = true;
        break;
      }
      r.state = *nxt;
    }
    r.consumed = k - i + 1;
    if (stack.empty() && r.empty_pos == 0) {
      r.empty_pos = r.consumed;
      r.empty_state = r.state;
    }
  }
  r.height = static_cast<i64>(stack.size());
  r.top = stack.empty() ? -1 : stack.back();
  return r;
}

bool vpa_accepts(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j) {
  if (j < i) return m.accepting(m.start);
  PdaRun r = vpa_run(m, word, i, j, m.start);
  return !r.dead && r.consumed == j - i + 1 && m.accepting(r.state);
}

}  // namespace dynmem
