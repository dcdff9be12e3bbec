#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dynmem/tree.hpp"
#include "dynmem/tree_io.hpp"
#include "dynmem/util.hpp"

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

std::vector<NodeId> root_path(const UnrankedTree& t, NodeId v) {
  std::vector<NodeId> p;
  for (NodeId w = v; w != kNoNode; w = t.parent(w)) p.push_back(w);
  std::reverse(p.begin(), p.end());
  return p;
}

i64 brute_subtree_size(const UnrankedTree& t, NodeId v) {
  i64 total = 1;
  for (NodeId c = t.fchild(v); c != kNoNode; c = t.rsib(c)) total += brute_subtree_size(t, c);
  return total;
}

}  // namespace

TEST_CASE("ipow_floor exact on powers and monotone") {
  CHECK(ipow_floor(1024, 1, 2) == 32);
  CHECK(ipow_floor(1024, 3, 4) == 181);  // floor(1024^0.75) = floor(181.01...)
  CHECK(ipow_floor(16, 1, 4) == 2);
  CHECK(ipow_floor(81, 1, 4) == 3);
  CHECK(ipow_floor(80, 1, 4) == 2);
  CHECK(ipow_floor(7, 0, 3) == 1);
  CHECK(ipow_floor(0, 2, 3) == 0);
  CHECK(ipow_floor(1, 5, 2) == 1);
  CHECK(ipow_floor(1 << 20, 3, 2) == 1 << 30);
  for (i64 n = 2; n < 200; ++n) {
    i64 r = ipow_floor(n, 2, 3);
    CHECK(ipow(r, 3) <= ipow(n, 2));
    CHECK(ipow(r + 1, 3) > ipow(n, 2));
  }
}

TEST_CASE("symbol table interning") {
  SymbolTable s;
  CHECK(s.intern("a") == 0);
  CHECK(s.intern("b") == 1);
  CHECK(s.intern("a") == 0);
  CHECK(s.find("c") == -1);
  CHECK(s.require("b") == 1);
  CHECK(s.name(1) == "b");
  CHECK_THROWS_AS(s.require("zz"), ValidationError);
}

TEST_CASE("tree construction maintains links and counters") {
  UnrankedTree t;
  NodeId r = t.init_root(5);
  NodeId a = t.add_last_child(r, 1);
  NodeId b = t.add_last_child(r, 2);
  NodeId c = t.add_last_child(a, 3);
  CHECK(t.size() == 4);
  CHECK(t.fchild(r) == a);
  CHECK(t.lchild(r) == b);
  CHECK(t.rsib(a) == b);
  CHECK(t.lsib(b) == a);
  CHECK(t.nchildren(r) == 2);
  CHECK(t.depth(c) == 2);
  CHECK(t.sib_index(b) == 1);
  CHECK(t.num_desc(r) == 4);
  CHECK(t.num_desc(a) == 2);
  t.relabel(a, 9);
  CHECK(t.label(a) == 9);
  CHECK(t.num_desc(a) == 2);
  CHECK(t.kth_child(r, 1) == b);
  CHECK_THROWS_AS(t.kth_child(r, 2), InvariantError);
}

TEST_CASE("structural queries agree with brute force on random trees") {
  std::mt19937_64 rng(20260815);
  for (int rep = 0; rep < 12; ++rep) {
    int n = 2 + static_cast<int>(rng() % 120);
    UnrankedTree t = random_tree(rng, n, 3);

    for (NodeId v = 0; v < n; ++v) {
      CHECK(t.num_desc(v) == brute_subtree_size(t, v));
      CHECK(t.depth(v) == static_cast<i32>(root_path(t, v).size()) - 1);
      if (t.parent(v) != kNoNode) CHECK(t.kth_child(t.parent(v), t.sib_index(v)) == v);
    }

    std::uniform_int_distribution<NodeId> pick(0, n - 1);
    for (int q = 0; q < 300; ++q) {
      NodeId u = pick(rng), v = pick(rng);
      auto pu = root_path(t, u), pv = root_path(t, v);
      bool anc = std::find(pv.begin(), pv.end(), u) != pv.end();
      CHECK(t.is_anc_or_self(u, v) == anc);

      NodeId l = kNoNode;
      for (size_t i = 0; i < std::min(pu.size(), pv.size()) && pu[i] == pv[i]; ++i) l = pu[i];
      CHECK(t.lca(u, v) == l);

      if (anc && u != v) {
        NodeId ac = t.anc_child(u, v);
        CHECK(t.parent(ac) == u);
        CHECK(t.is_anc_or_self(ac, v));
      }

      bool sib = t.parent(u) != kNoNode && t.parent(u) == t.parent(v) &&
                 t.sib_index(u) <= t.sib_index(v);
      CHECK(t.sib_before_eq(u, v) == sib);
      if (sib) {
        i64 sum = 0;
        for (NodeId c = u;; c = t.rsib(c)) {
          sum += brute_subtree_size(t, c);
          if (c == v) break;
        }
        CHECK(t.num_desc_range(u, v) == sum);
      }
    }
  }
}

TEST_CASE("tree serialization round-trips") {
  std::mt19937_64 rng(7);
  SymbolTable syms;
  syms.intern("a");
  syms.intern("b");
  syms.intern("c");
  UnrankedTree t = random_tree(rng, 60, 3);
  std::string text = serialize_tree(t, syms);
  SymbolTable syms2;
  UnrankedTree u = parse_tree_text(text, syms2, /*intern_labels=*/true);
  REQUIRE(u.size() == t.size());
  for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
    CHECK(u.parent(v) == t.parent(v));
    CHECK(syms2.name(u.label(v)) == syms.name(t.label(v)));
    CHECK(u.sib_index(v) == t.sib_index(v));
  }
}

TEST_CASE("tree parse rejects malformed input") {
  SymbolTable syms;
  CHECK_THROWS_AS(parse_tree_text("0 - a\n1 - b\n", syms, true), ValidationError);  // two roots
  CHECK_THROWS_AS(parse_tree_text("0 - a\n1 2 b\n", syms, true), ValidationError);  // fwd parent
  CHECK_THROWS_AS(parse_tree_text("0 - a\n0 0 b\n", syms, true), ValidationError);  // dup id
  CHECK_THROWS_AS(parse_tree_text("0 -\n", syms, true), ValidationError);           // short line
  CHECK_THROWS_AS(parse_tree_text("", syms, true), ValidationError);                // empty
  CHECK_THROWS_AS(parse_tree_text("x - a\n", syms, true), ValidationError);         // bad id
  SymbolTable fixed;
  fixed.intern("a");
  CHECK_THROWS_AS(parse_tree_text("0 - q\n", fixed, false), ValidationError);  // unknown label
  UnrankedTree ok = parse_tree_text("# comment\n\n10 - a\n", fixed, false);
  CHECK(ok.size() == 1);
}
