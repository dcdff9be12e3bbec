#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynmem/automata_io.hpp"
#include "dynmem/fixtures.hpp"
#include "dynmem/oracles.hpp"
#include "dynmem/tree.hpp"

using namespace dynmem;

namespace {

UnrankedTree random_tree(std::mt19937_64& rng, int n, int nlabels) {
  UnrankedTree t;
  std::uniform_int_distribution<i32> lab(0, nlabels - 1);
  t.init_root(lab(rng));
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(t.size()) - 1);
    t.add_last_child(pick(rng), lab(rng));
  }
  return t;
}

i32 ref_state(const UnrankedTree& t, const Dta& m, NodeId v) {
  i32 p = m.hstart;
  for (NodeId c = t.fchild(v); c != kNoNode; c = t.rsib(c)) p = m.hstep(p, ref_state(t, m, c));
  return m.apply(p, t.label(v));
}

// words over symbols 0..base-1 of exactly length len, enumerated by `code`
std::vector<i32> nth_word(u64 code, int len, int base) {
  std::vector<i32> w(static_cast<size_t>(len));
  for (int k = 0; k < len; ++k) {
    w[static_cast<size_t>(k)] = static_cast<i32>(code % base);
    code /= base;
  }
  return w;
}

// balance of ( vs ) with given symbol ids; internals ignored
bool dyck_ok(const std::vector<i32>& w, i32 open, i32 close, bool allow_end_dip) {
  i64 bal = 0;
  for (size_t k = 0; k < w.size(); ++k) {
    if (w[k] == open) ++bal;
    if (w[k] == close) --bal;
    if (bal < 0 && !(allow_end_dip && k + 1 == w.size() && bal == -1)) return false;
  }
  return allow_end_dip ? bal >= -1 : bal == 0;
}

}  // namespace

TEST_CASE("parity dta counts a-parity") {
  Dta m = parity_dta();
  i32 a = m.sigma.require("a");
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    UnrankedTree t = random_tree(rng, 1 + static_cast<int>(rng() % 40), 2);
    i64 as = 0;
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v)
      if (t.label(v) == a) ++as;
    CHECK(dta_accepts(t, m) == (as % 2 == 0));
  }
}

TEST_CASE("dta_states matches the recursive definition") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    Dta m = random_dta(rng, 3, 3, 2);
    UnrankedTree t = random_tree(rng, 30, 2);
    auto rho = dta_states(t, m);
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v)
      CHECK(rho[static_cast<size_t>(v)] == ref_state(t, m, v));
  }
}

TEST_CASE("row and lift oracles satisfy their defining identities") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Dta m = random_dta(rng, 3, 3, 2);
    UnrankedTree t = random_tree(rng, 40, 2);
    auto rho = dta_states(t, m);
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
      // full row + apply reproduces rho
      i32 p = oracle_row_run(t, m, rho, m.hstart, t.fchild(v),
                             t.lchild(v));  // kNoNode when childless
      CHECK(m.apply(p, t.label(v)) == rho[static_cast<size_t>(v)]);
      // lift with the node's own value is the ancestor's value
      CHECK(oracle_lift_run(t, m, rho, rho[static_cast<size_t>(v)], v, t.root()) ==
            rho[static_cast<size_t>(t.root())]);
      CHECK(oracle_lift_run(t, m, rho, rho[static_cast<size_t>(v)], v, v) ==
            rho[static_cast<size_t>(v)]);
    }
    // row runs split associatively
    for (int q = 0; q < 50; ++q) {
      NodeId v = static_cast<NodeId>(rng() % t.size());
      if (t.nchildren(v) < 2) continue;
      NodeId mid = t.kth_child(v, static_cast<i64>(rng() % (t.nchildren(v) - 1)));
      i32 left = oracle_row_run(t, m, rho, m.hstart, t.fchild(v), mid);
      i32 whole = oracle_row_run(t, m, rho, m.hstart, t.fchild(v), t.lchild(v));
      CHECK(oracle_row_run(t, m, rho, left, t.rsib(mid), t.lchild(v)) == whole);
    }
  }
}

TEST_CASE("push-pop pda dies exactly on prefix violations") {
  Rdpda m = dyck_push_pop_rdpda();
  i32 open = m.sigma.require("(");
  i32 close = m.sigma.require(")");
  for (int len = 0; len <= 10; ++len) {
    u64 total = 1;
    for (int k = 0; k < len; ++k) total *= 2;
    for (u64 code = 0; code < total; ++code) {
      auto w = nth_word(code, len, 2);
      bool expect = dyck_ok(w, open, close, /*allow_end_dip=*/true);
      CHECK(rdpda_accepts(m, w, 0, len - 1) == expect);
    }
  }
  // run summary details
  std::vector<i32> w{open, close, close, open};
  PdaRun r = rdpda_run(m, w, 0, 3, m.start, m.init_stack);
  CHECK(r.dead);
  CHECK(r.consumed == 3);  // "( ) )" consumed, then dead on the last symbol
  CHECK(r.empty_pos == 3);
  CHECK(r.height == 0);
  CHECK(r.top == -1);
}

TEST_CASE("final-state pda accepts exactly the balanced strings") {
  Rdpda m = dyck_final_state_rdpda();
  i32 open = m.sigma.require("(");
  i32 close = m.sigma.require(")");
  for (int len = 0; len <= 12; ++len) {
    u64 total = 1;
    for (int k = 0; k < len; ++k) total *= 2;
    for (u64 code = 0; code < total; ++code) {
      auto w = nth_word(code, len, 2);
      bool expect = dyck_ok(w, open, close, /*allow_end_dip=*/false);
      CHECK(rdpda_accepts(m, w, 0, len - 1) == expect);
    }
  }
  // the bottom marker is never popped
  std::vector<i32> w{open, open, close, close};
  PdaRun r = rdpda_run(m, w, 0, 3, m.start, m.init_stack);
  CHECK(!r.dead);
  CHECK(r.empty_pos == 0);
  CHECK(r.height == 1);
}

TEST_CASE("dyck vpa accepts exactly the well-matched words") {
  Vpa m = dyck_vpa();
  i32 open = m.sigma.require("(");
  i32 close = m.sigma.require(")");
  for (int len = 0; len <= 9; ++len) {
    u64 total = 1;
    for (int k = 0; k < len; ++k) total *= 3;
    for (u64 code = 0; code < total; ++code) {
      auto w = nth_word(code, len, 3);
      bool expect = dyck_ok(w, open, close, /*allow_end_dip=*/false);
      CHECK(vpa_accepts(m, w, 0, len - 1) == expect);
    }
  }
}

TEST_CASE("automata json round-trips") {
  {
    Dta m = parity_dta();
    Dta n = dta_from_json(dta_to_json(m));
    CHECK(n.states == m.states);
    CHECK(n.hdelta == m.hdelta);
    CHECK(n.delta == m.delta);
    CHECK(n.final_ == m.final_);
  }
  {
    Rdpda m = dyck_final_state_rdpda();
    Rdpda n = rdpda_from_json(rdpda_to_json(m));
    CHECK(n.states == m.states);
    CHECK(n.init_stack == m.init_stack);
    REQUIRE(n.delta.size() == m.delta.size());
    for (size_t i = 0; i < m.delta.size(); ++i) {
      CHECK(m.delta[i].has_value() == n.delta[i].has_value());
      if (m.delta[i]) {
        CHECK(m.delta[i]->state == n.delta[i]->state);
        CHECK(m.delta[i]->push == n.delta[i]->push);
      }
    }
  }
  {
    Vpa m = dyck_vpa();
    Vpa n = vpa_from_json(vpa_to_json(m));
    CHECK(n.states == m.states);
    CHECK(n.kind == m.kind);
    CHECK(n.ret_delta == m.ret_delta);
    CHECK(n.call_delta.size() == m.call_delta.size());
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
      auto w = nth_word(rng(), 8, 3);
      CHECK(vpa_accepts(m, w, 0, 7) == vpa_accepts(n, w, 0, 7));
    }
  }
}

TEST_CASE("automata json rejects malformed input") {
  nlohmann::json j = dta_to_json(parity_dta());
  j["kind"] = "nope";
  CHECK_THROWS_AS(automaton_from_json(j), ValidationError);
  j["kind"] = "dta";
  j["delta"] = nlohmann::json::array();
  CHECK_THROWS_AS(dta_from_json(j), ValidationError);  // not total

  nlohmann::json r = rdpda_to_json(dyck_push_pop_rdpda());
  r["delta"][0][4] = {"X", "X", "X"};  // push string too long
  CHECK_THROWS_AS(rdpda_from_json(r), ValidationError);

  nlohmann::json v = vpa_to_json(dyck_vpa());
  v["internal_delta"].push_back({0, "(", 0});  // call symbol with internal move
  CHECK_THROWS_AS(vpa_from_json(v), ValidationError);
}
