#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynmem/fixtures.hpp"
#include "dynmem/string_tables.hpp"

using namespace dynmem;

namespace {

std::vector<i32> syms(const std::string& s, const Rdpda& m) {
  std::vector<i32> w;
  for (char c : s) w.push_back(m.sigma.require(std::string(1, c)));
  return w;
}

std::vector<i32> random_word(std::mt19937_64& rng, i64 len, i32 base) {
  std::vector<i32> w(static_cast<size_t>(len));
  for (auto& c : w) c = static_cast<i32>(rng() % base);
  return w;
}

// Direct last-visit scan used as the independent reference for push positions.
std::optional<i64> ref_push_pos(const Rdpda& m, const std::vector<i32>& w, i64 i, i64 j, i32 p,
                                i32 tau, i64 k) {
  std::vector<i32> stack{tau};
  i32 q = p;
  i64 last = k == 1 ? 0 : -1;
  for (i64 x = i; x <= j; ++x) {
    if (stack.empty()) return std::nullopt;
    const Rdpda::Move* mv = m.move(q, w[static_cast<size_t>(x)], stack.back());
    if (!mv) return std::nullopt;
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    q = mv->state;
    if (static_cast<i64>(stack.size()) == k) last = x - i + 1;
  }
  if (stack.empty() || k > static_cast<i64>(stack.size()) || last < 0) return std::nullopt;
  return last;
}

// Direct first-passage scan used as the independent reference for pops.
PopResult ref_pop_pos(const Rdpda& m, const std::vector<i32>& w, i64 i, i64 j, i32 p, i32 tau,
                      i32 q, i64 ms, i64 me, i64 k) {
  std::vector<i32> stack{tau};
  i32 st = p;
  for (i64 x = i; x <= j; ++x) {
    if (stack.empty()) return {};
    const Rdpda::Move* mv = m.move(st, w[static_cast<size_t>(x)], stack.back());
    if (!mv) return {};
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    st = mv->state;
  }
  const i64 h = static_cast<i64>(stack.size());
  if (k < 1 || k > h) return {};
  i64 minh = h;
  st = q;
  for (i64 x = ms; x <= me; ++x) {
    if (stack.empty()) break;
    const Rdpda::Move* mv = m.move(st, w[static_cast<size_t>(x)], stack.back());
    if (!mv) break;
    stack.pop_back();
    for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
    st = mv->state;
    if (static_cast<i64>(stack.size()) < minh) {
      minh = static_cast<i64>(stack.size());
      if (h - minh == k) return {x - ms + 1, st};
    }
  }
  return {};
}

}  // namespace

TEST_CASE("special height grid: frozen shape at bound 256, two levels") {
  SpecialK g(256, 2);
  CHECK(g.base() == 16);
  CHECK(g.size() == 31);  // 1..16 plus 32, 48, ..., 256
  CHECK(g.contains(16));
  CHECK(g.contains(48));
  CHECK(!g.contains(37));
  CHECK(g.index_of(37) == -1);
  CHECK(g.digits(37) == std::vector<i64>{5, 2});   // 5 + 2*16
  CHECK(g.digits(256) == std::vector<i64>{0, 16});  // top digit may equal B
  CHECK(g.digits(0) == std::vector<i64>{0, 0});
}

TEST_CASE("special height grid: digits decompose every value into grid chunks") {
  for (i64 bound : {7L, 20L, 64L, 100L, 384L}) {
    for (int h : {2, 3, 4}) {
      SpecialK g(bound, h);
      CHECK(ipow(g.base(), h) >= bound);
      if (g.base() > 1) CHECK(ipow(g.base() - 1, h) < bound);
      CHECK(g.contains(1));
      for (i64 k = 0; k <= bound; ++k) {
        auto d = g.digits(k);
        REQUIRE(static_cast<int>(d.size()) == h);
        i64 sum = 0;
        for (int b = 0; b < h; ++b) {
          const i64 chunk = d[static_cast<size_t>(b)] * ipow(g.base(), b);
          sum += chunk;
          if (d[static_cast<size_t>(b)] != 0) {
            CHECK(d[static_cast<size_t>(b)] <= g.base());
            CHECK(g.contains(chunk));
          }
        }
        CHECK(sum == k);
      }
      for (i64 v : g.values()) CHECK(g.index_of(v) >= 0);
    }
  }
}

TEST_CASE("run summaries: frozen fields on the one-state dyck machine") {
  Rdpda m = dyck_push_pop_rdpda();
  std::vector<i32> w = syms("(()((", m);

  HatDelta h = hat_from_run(rdpda_run(m, w, 0, 4, m.start, m.init_stack));
  CHECK(!h.dead);
  CHECK(h.height == 4);  // profile 1,2,3,2,3,4
  CHECK(h.dlen == 5);
  CHECK(h.empty_pos == 0);

  // emptied exactly at the end: alive, empty recorded
  std::vector<i32> v = syms("()", m);
  HatDelta h2 = hat_from_run(rdpda_run(m, v, 1, 1, m.start, m.init_stack));
  CHECK(!h2.dead);
  CHECK(h2.height == 0);
  CHECK(h2.top == -1);
  CHECK(h2.empty_pos == 1);
  CHECK(h2.empty_state == 0);

  // emptied mid-window: dead, length stops at the empty position
  std::vector<i32> u = syms(")((", m);
  HatDelta h3 = hat_from_run(rdpda_run(m, u, 0, 2, m.start, m.init_stack));
  CHECK(h3.dead);
  CHECK(h3.dlen == 1);
  CHECK(h3.empty_pos == 1);
}

TEST_CASE("push positions: frozen last visits on profile 1,2,3,2,3,4") {
  Rdpda m = dyck_push_pop_rdpda();
  std::vector<i32> w = syms("(()((", m);
  CHECK(oracle_push_pos(m, w, 0, 4, 0, m.init_stack, 1) == std::optional<i64>(0));
  CHECK(oracle_push_pos(m, w, 0, 4, 0, m.init_stack, 2) == std::optional<i64>(3));
  CHECK(oracle_push_pos(m, w, 0, 4, 0, m.init_stack, 3) == std::optional<i64>(4));
  CHECK(oracle_push_pos(m, w, 0, 4, 0, m.init_stack, 4) == std::optional<i64>(5));
  CHECK(!oracle_push_pos(m, w, 0, 4, 0, m.init_stack, 5).has_value());

  // empty window: only the initial height is visited
  CHECK(oracle_push_pos(m, w, 2, 1, 0, m.init_stack, 1) == std::optional<i64>(0));
  CHECK(!oracle_push_pos(m, w, 2, 1, 0, m.init_stack, 2).has_value());

  // a run that empties its stack is undefined at every height
  std::vector<i32> v = syms(")", m);
  CHECK(!oracle_push_pos(m, v, 0, 0, 0, m.init_stack, 1).has_value());
}

TEST_CASE("push positions match the direct scan on random windows") {
  std::mt19937_64 rng(71);
  for (Rdpda m : {dyck_push_pop_rdpda(), dyck_final_state_rdpda()}) {
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<i32> w = random_word(rng, 18, m.sigma.size());
      for (i64 i = 0; i < 18; ++i)
        for (i64 j = i - 1; j < 18; ++j)
          for (i32 p = 0; p < m.states; ++p)
            for (i32 t = 0; t < m.gamma.size(); ++t)
              for (i64 k = 1; k <= 20; k += (k < 4 ? 1 : 5)) {
                auto got = oracle_push_pos(m, w, i, j, p, t, k);
                auto want = j < i ? (k == 1 ? std::optional<i64>(0) : std::optional<i64>())
                                  : ref_push_pos(m, w, i, j, p, t, k);
                CHECK(got == want);
              }
    }
  }
}

TEST_CASE("pop positions: frozen events after a one-symbol window") {
  Rdpda m = dyck_push_pop_rdpda();
  std::vector<i32> w = syms("())", m);
  CHECK(oracle_pop_pos(m, w, 0, 0, 0, m.init_stack, 0, 1, 2, 1) == PopResult{1, 0});
  CHECK(oracle_pop_pos(m, w, 0, 0, 0, m.init_stack, 0, 1, 2, 2) == PopResult{2, 0});
  CHECK(oracle_pop_pos(m, w, 0, 0, 0, m.init_stack, 0, 1, 2, 3) == PopResult{});

  // dead first run yields nothing
  Rdpda f = dyck_final_state_rdpda();
  std::vector<i32> u = syms(")(", f);
  CHECK(oracle_pop_pos(f, u, 0, 1, f.start, f.init_stack, 0, 2, 1, 1) == PopResult{});
}

TEST_CASE("pop positions match the direct scan on random windows") {
  std::mt19937_64 rng(72);
  for (Rdpda m : {dyck_push_pop_rdpda(), dyck_final_state_rdpda()}) {
    for (int rep = 0; rep < 300; ++rep) {
      std::vector<i32> w = random_word(rng, 16, m.sigma.size());
      const i64 i = static_cast<i64>(rng() % 8);
      const i64 j = i + static_cast<i64>(rng() % 6);
      const i64 ms = j + 1 + static_cast<i64>(rng() % 4);
      const i64 me = 15;
      const i32 p = static_cast<i32>(rng() % m.states);
      const i32 q = static_cast<i32>(rng() % m.states);
      const i32 t = static_cast<i32>(rng() % m.gamma.size());
      for (i64 k = 1; k <= 10; ++k)
        CHECK(oracle_pop_pos(m, w, i, j, p, t, q, ms, me, k) ==
              ref_pop_pos(m, w, i, j, p, t, q, ms, me, k));
    }
  }
}

TEST_CASE("clamped and unclamped height profiles of the dyck vpa") {
  Vpa m = dyck_vpa();
  std::vector<i32> w{m.sigma.require("("), m.sigma.require("c"), m.sigma.require(")")};
  CHECK(vpa_s_profile(m, w) == std::vector<i64>{1, 2, 2, 1});
  CHECK(vpa_typesum(m, w) == std::vector<i64>{0, 1, 1, 0});

  std::vector<i32> v{m.sigma.require(")"), m.sigma.require("(")};
  CHECK(vpa_s_profile(m, v) == std::vector<i64>{1, 1, 2});   // dips clamp at 1
  CHECK(vpa_typesum(m, v) == std::vector<i64>{0, -1, 0});    // typesum does not
}

TEST_CASE("vpa push positions and pops on the well-matched example") {
  Vpa m = dyck_vpa();
  i32 open = m.sigma.require("(");
  i32 close = m.sigma.require(")");
  std::vector<i32> w{open, open, close, close};

  // heights from the empty stack: 0,1,2,1,0
  CHECK(oracle_vpa_push_pos(m, w, 0, 1, 0, -1, 1) == std::optional<i64>(1));
  CHECK(oracle_vpa_push_pos(m, w, 0, 1, 0, -1, 2) == std::optional<i64>(2));
  CHECK(!oracle_vpa_push_pos(m, w, 0, 3, 0, -1, 1).has_value());  // final height 0

  // stack after "((" is [A0, A1]; the two pops land in states 1 then 0
  CHECK(oracle_vpa_pop2(m, w, 0, 1, 0, -1, 1, 2, 3, 1) == PopResult{1, 1});
  CHECK(oracle_vpa_pop2(m, w, 0, 1, 0, -1, 1, 2, 3, 2) == PopResult{2, 0});
}
