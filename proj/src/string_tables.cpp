#include "dynmem/string_tables.hpp"

#include <algorithm>

namespace dynmem {

SpecialK::SpecialK(i64 bound, int h) : bound_(bound), h_(h) {
  DM_REQUIRE(bound >= 1, "special grid: bound must be positive");
  DM_REQUIRE(h >= 1 && h <= 62, "special grid: levels out of range");
  base_ = 1;
  while (ipow(base_, h) < bound) ++base_;
  i64 pw = 1;
  for (int b = 0; b < h_; ++b) {
    for (i64 a = 1; a <= base_; ++a) {
      i64 v = a * pw;
      if (v > bound_) break;
      values_.push_back(v);
    }
    pw *= base_;
  }
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  for (size_t idx = 0; idx < values_.size(); ++idx)
    index_.emplace(values_[idx], static_cast<i32>(idx));
}

std::vector<i64> SpecialK::digits(i64 k) const {
  DM_REQUIRE(k >= 0 && k <= bound_, "special grid: value out of range");
  std::vector<i64> d(static_cast<size_t>(h_), 0);
  // Top digit may equal B (when k == B^h); lower digits are standard base-B.
  for (int b = h_ - 1; b >= 0; --b) {
    i64 pw = ipow(base_, b);
    d[static_cast<size_t>(b)] = k / pw;
    k %= pw;
  }
  return d;
}

HatDelta hat_from_run(const PdaRun& r) {
  return HatDelta{r.dead, r.state, r.height, r.top, r.empty_pos, r.empty_state, r.consumed};
}

std::optional<std::vector<i32>> rdpda_stack(const Rdpda& m, const std::vector<i32>& word, i64 i,
                                            i64 j, i32 p, i32 tau) {
  std::vector<i32> stack{tau};
  i32 q = p;
  for (i64 k = i; k <= j; ++k) {
    if (stack.empty()) return std::nullopt;
    const Rdpda::Move* mv = m.move(q, word[static_cast<size_t>(k)], stack.back());
    if (!mv) return std::nullopt;
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    q = mv->state;
  }
  return stack;
}

std::optional<std::vector<i32>> vpa_stack(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j,
                                          i32 q, i32 tau) {
  std::vector<i32> stack;
  if (tau >= 0) stack.push_back(tau);
  for (i64 k = i; k <= j; ++k) {
    i32 a = word[static_cast<size_t>(k)];
    if (m.is_call(a)) {
      const Vpa::CallMove* mv = m.call(q, a);
      if (!mv) return std::nullopt;
      stack.push_back(mv->push);
      q = mv->state;
    } else if (m.is_return(a)) {
      std::optional<i32> nxt;
      if (stack.empty()) {
        nxt = m.ret_empty(q, a);
      } else {
        nxt = m.ret(q, a, stack.back());
        if (nxt) stack.pop_back();
      }
      if (!nxt) return std::nullopt;
      q = *nxt;
    } else {
      std::optional<i32> nxt = m.internal(q, a);
      if (!nxt) return std::nullopt;
      q = *nxt;
    }
  }
  return stack;
}

PdaRun rdpda_run_stack(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p,
                       std::vector<i32> stack) {
  PdaRun r;
  r.state = p;
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

PdaRun vpa_run_sym(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 q, i32 tau) {
  std::vector<i32> stack;
  if (tau >= 0) stack.push_back(tau);
  return vpa_run(m, word, i, j, q, std::move(stack));
}

namespace {

// Last prefix length at which the simulated stack height equals k.
template <typename StepFn>
std::optional<i64> push_pos_scan(i64 len, i64 h0, i64 k, StepFn step) {
  i64 h = h0;
  i64 last = (h == k) ? 0 : -1;
  for (i64 t = 1; t <= len; ++t) {
    std::optional<i64> nh = step(t);
    if (!nh) return std::nullopt;  // run died
    h = *nh;
    if (h == k) last = t;
  }
  if (k < 1 || k > h) return std::nullopt;
  if (last < 0) return std::nullopt;
  return last;
}

}  // namespace

std::optional<i64> oracle_push_pos(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j,
                                   i32 p, i32 tau, i64 k) {
  std::vector<i32> stack{tau};
  i32 q = p;
  bool emptied = false;
  auto step = [&](i64 t) -> std::optional<i64> {
    i64 pos = i + t - 1;
    if (stack.empty()) return std::nullopt;
    const Rdpda::Move* mv = m.move(q, word[static_cast<size_t>(pos)], stack.back());
    if (!mv) return std::nullopt;
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    q = mv->state;
    if (stack.empty()) emptied = true;
    return static_cast<i64>(stack.size());
  };
  auto res = push_pos_scan(j - i + 1, 1, k, step);
  if (emptied) return std::nullopt;
  return res;
}

std::optional<i64> oracle_vpa_push_pos(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j,
                                       i32 q0, i32 tau, i64 k) {
  std::vector<i32> stack;
  if (tau >= 0) stack.push_back(tau);
  i32 q = q0;
  auto step = [&](i64 t) -> std::optional<i64> {
    i64 pos = i + t - 1;
    i32 a = word[static_cast<size_t>(pos)];
    if (m.is_call(a)) {
      const Vpa::CallMove* mv = m.call(q, a);
      if (!mv) return std::nullopt;
      stack.push_back(mv->push);
      q = mv->state;
    } else if (m.is_return(a)) {
      std::optional<i32> nxt;
      if (stack.empty()) {
        nxt = m.ret_empty(q, a);
      } else {
        nxt = m.ret(q, a, stack.back());
        if (nxt) stack.pop_back();
      }
      if (!nxt) return std::nullopt;
      q = *nxt;
    } else {
      std::optional<i32> nxt = m.internal(q, a);
      if (!nxt) return std::nullopt;
      q = *nxt;
    }
    return static_cast<i64>(stack.size());
  };
  return push_pos_scan(j - i + 1, tau >= 0 ? 1 : 0, k, step);
}

PopResult oracle_pop_pos(const Rdpda& m, const std::vector<i32>& word, i64 i, i64 j, i32 p,
                         i32 tau, i32 q, i64 ms, i64 me, i64 k) {
  auto stack = rdpda_stack(m, word, i, j, p, tau);
  if (!stack) return {};
  i64 h = static_cast<i64>(stack->size());
  if (k < 1 || k > h) return {};
  std::vector<i32> topk(stack->end() - k, stack->end());
  PdaRun r = rdpda_run_stack(m, word, ms, me, q, std::move(topk));
  if (r.empty_pos == 0) return {};
  return {r.empty_pos, r.empty_state};
}

PopResult oracle_vpa_pop2(const Vpa& m, const std::vector<i32>& word, i64 i, i64 j, i32 p, i32 tau,
                          i32 q, i64 ms, i64 me, i64 k) {
  auto stack = vpa_stack(m, word, i, j, p, tau);
  if (!stack) return {};
  i64 h = static_cast<i64>(stack->size());
  if (k < 1 || k > h) return {};
  std::vector<i32> topk(stack->end() - k, stack->end());
  PdaRun r = vpa_run(m, word, ms, me, q, std::move(topk));
  if (r.empty_pos == 0) return {};
  return {r.empty_pos, r.empty_state};
}

std::vector<i64> vpa_s_profile(const Vpa& m, const std::vector<i32>& word) {
  std::vector<i64> s(word.size() + 1);
  s[0] = 1;
  for (size_t i = 0; i < word.size(); ++i) {
    i64 prev = s[i];
    if (m.is_call(word[i])) {
      s[i + 1] = prev + 1;
    } else if (m.is_return(word[i])) {
      s[i + 1] = prev > 1 ? prev - 1 : prev;
    } else {
      s[i + 1] = prev;
    }
  }
  return s;
}

std::vector<i64> vpa_typesum(const Vpa& m, const std::vector<i32>& word) {
  std::vector<i64> t(word.size() + 1);
  t[0] = 0;
  for (size_t i = 0; i < word.size(); ++i) {
    i64 d = m.is_call(word[i]) ? 1 : (m.is_return(word[i]) ? -1 : 0);
    t[i + 1] = t[i] + d;
  }
  return t;
}

std::optional<i32> oracle_v_pop_state(const Vpa& m, const std::vector<i32>& word, i64 jpos, i32 p,
                                      i32 tau, i32 q, i64 mpos, i64 k) {
  if (k < 1) return std::nullopt;
  std::vector<i64> T = vpa_typesum(m, word);
  i64 L = static_cast<i64>(word.size());
  // Minimal suffix of word[..jpos] building height k from a single symbol:
  // starts right after the last x <= jpos with T(x) = T(jpos + 1) - (k - 1)
  // (T indexed by prefix length; position jpos consumes prefix jpos + 1).
  i64 target = T[static_cast<size_t>(jpos + 1)] - (k - 1);
  i64 anchor = -1;
  for (i64 x = jpos; x >= 0; --x) {
    if (T[static_cast<size_t>(x)] == target) {
      anchor = x;
      break;
    }
  }
  if (anchor < 0) return std::nullopt;
  auto stack = vpa_stack(m, word, anchor, jpos, p, tau);
  if (!stack) return std::nullopt;
  if (static_cast<i64>(stack->size()) != k) return std::nullopt;
  PdaRun r = vpa_run(m, word, mpos, L - 1, q, std::move(*stack));
  if (r.empty_pos == 0) return std::nullopt;
  return r.empty_state;
}

}  // namespace dynmem
