#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "dynmem/fixtures.hpp"
#include "dynmem/oracles.hpp"
#include "dynmem/tree_engine.hpp"

using namespace dynmem;

namespace {

UnrankedTree random_labeled_tree(std::mt19937_64& rng, int n, i32 nsym) {
  UnrankedTree t;
  t.init_root(static_cast<i32>(rng() % static_cast<u64>(nsym)));
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(t.size()) - 1);
    t.add_last_child(pick(rng), static_cast<i32>(rng() % static_cast<u64>(nsym)));
  }
  return t;
}

EngineConfig static_cfg(int h = 4) {
  EngineConfig cfg;
  cfg.theta.h = h;
  cfg.mode = EngineMode::kRelabelOnly;
  return cfg;
}

EngineConfig dynamic_cfg(int h = 4, i64 n = 0) {
  EngineConfig cfg;
  cfg.theta.h = h;
  cfg.n = n;
  cfg.mode = EngineMode::kDynamic;
  return cfg;
}

void require_clean(TreeEngine& e) {
  const auto faults = e.verify_tables(4);
  if (!faults.empty()) FAIL(faults.front());
}

// every node's query must agree with a fresh bottom-up run
void check_all_queries(TreeEngine& e) {
  const std::vector<i32> rho = dta_states(e.tree(), e.dta());
  for (NodeId v = 0; v < static_cast<NodeId>(e.tree().size()); ++v) {
    CAPTURE(v);
    CHECK(e.query(v) == e.dta().accepting(rho[static_cast<size_t>(v)]));
  }
}

void check_eval_against_oracles(TreeEngine& e) {
  const UnrankedTree& t = e.tree();
  const Dta& m = e.dta();
  const std::vector<i32> rho = dta_states(t, m);
  const NodeId n = static_cast<NodeId>(t.size());
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = 0; b < n; ++b) {
      if (t.at(a).parent == t.at(b).parent && t.sib_index(a) <= t.sib_index(b)) {
        for (i32 p = 0; p < m.hstates; ++p) {
          CAPTURE(a);
          CAPTURE(b);
          CHECK(e.eval_row(p, a, b) == oracle_row_run(t, m, rho, p, a, b));
        }
      }
      if (t.is_strict_anc(b, a)) {
        for (i32 q = 0; q < m.states; ++q) {
          CAPTURE(a);
          CAPTURE(b);
          CHECK(e.eval_lift(q, a, b) == oracle_lift_run(t, m, rho, q, a, b));
        }
      }
    }
    CHECK(e.eval_node_state(a) == rho[static_cast<size_t>(a)]);
  }
}

// all three guarded evaluation forms against a relabeled copy of the tree
void check_hypothetical_against_copy(TreeEngine& e) {
  const UnrankedTree& t = e.tree();
  const Dta& m = e.dta();
  const NodeId n = static_cast<NodeId>(t.size());
  const i32 nsym = static_cast<i32>(m.sigma.size());
  for (NodeId v = 0; v < n; ++v) {
    for (i32 sigma = 0; sigma < nsym; ++sigma) {
      UnrankedTree tc = t;
      tc.relabel(v, sigma);
      const std::vector<i32> rho = dta_states(tc, m);
      for (NodeId x = 0; x < n; ++x) {
        CAPTURE(v);
        CAPTURE(sigma);
        CAPTURE(x);
        CHECK(e.evaluate_state(v, sigma, x) == rho[static_cast<size_t>(x)]);
      }
      for (NodeId x = 0; x < n; ++x) {
        for (NodeId y = 0; y < n; ++y) {
          if (t.at(x).parent == t.at(y).parent && t.sib_index(x) <= t.sib_index(y)) {
            for (i32 p = 0; p < m.hstates; ++p) {
              CAPTURE(v);
              CAPTURE(x);
              CAPTURE(y);
              CHECK(e.evaluate_sequence(v, sigma, p, x, y) ==
                    oracle_row_run(tc, m, rho, p, x, y));
            }
          }
          if (t.is_strict_anc(x, y)) {
            for (i32 q = 0; q < m.states; ++q) {
              CAPTURE(v);
              CAPTURE(x);
              CAPTURE(y);
              CHECK(e.evaluate_path(v, sigma, q, x, y) == oracle_lift_run(tc, m, rho, q, y, x));
            }
          }
        }
      }
    }
  }
}

void check_structure_queries(TreeEngine& e, std::mt19937_64& rng) {
  const UnrankedTree& t = e.tree();
  const NodeId n = static_cast<NodeId>(t.size());
  for (int i = 0; i < 30; ++i) {
    const NodeId v = static_cast<NodeId>(rng() % static_cast<u64>(n));
    const i64 nc = t.nchildren(v);
    for (i64 k = 0; k < nc; ++k) {
      CAPTURE(v);
      CAPTURE(k);
      CHECK(e.eval_child(v, k) == t.kth_child(v, k));
    }
    CHECK(e.eval_child(v, nc) == kNoNode);
  }
  for (int i = 0; i < 30; ++i) {
    const NodeId u = static_cast<NodeId>(rng() % static_cast<u64>(n));
    NodeId v = u;
    for (NodeId s = t.rsib(v); s != kNoNode && rng() % 2 == 0; s = t.rsib(v)) v = s;
    CAPTURE(u);
    CAPTURE(v);
    CHECK(e.eval_num_desc(u, v) == t.num_desc_range(u, v));
  }
}

}  // namespace

TEST_CASE("fresh engines verify clean and answer queries") {
  std::mt19937_64 rng(20260815);
  for (int n : {1, 2, 3, 7, 20, 60}) {
    for (bool dynamic : {false, true}) {
      UnrankedTree t = random_labeled_tree(rng, n, 2);
      TreeEngine e(t, parity_dta(), dynamic ? dynamic_cfg() : static_cfg());
      CAPTURE(n);
      CAPTURE(dynamic);
      require_clean(e);
      check_all_queries(e);
    }
  }
}

TEST_CASE("row and lift evaluation match the oracles") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    UnrankedTree t = random_labeled_tree(rng, n, 3);
    Dta m = random_dta(rng, 3, 3, 3);
    TreeEngine e(t, m, trial % 2 == 0 ? static_cfg() : dynamic_cfg());
    CAPTURE(trial);
    check_eval_against_oracles(e);
  }
}

TEST_CASE("hypothetical evaluation matches a relabeled copy") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 14);
    UnrankedTree t = random_labeled_tree(rng, n, 2);
    Dta m = trial < 3 ? parity_dta() : random_dta(rng, 3, 2, 2);
    TreeEngine e(t, m, trial % 2 == 0 ? static_cfg() : dynamic_cfg(5));
    CAPTURE(trial);
    check_hypothetical_against_copy(e);
  }
}

TEST_CASE("relabel keeps every table current") {
  std::mt19937_64 rng(63);
  for (bool dynamic : {false, true}) {
    UnrankedTree t = random_labeled_tree(rng, 50, 2);
    TreeEngine e(t, parity_dta(), dynamic ? dynamic_cfg() : static_cfg());
    for (int step = 0; step < 80; ++step) {
      const NodeId v = static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size()));
      e.relabel(v, static_cast<i32>(rng() % 2));
      CAPTURE(dynamic);
      CAPTURE(step);
      if (step % 4 == 0) require_clean(e);
      const std::vector<i32> rho = dta_states(e.tree(), e.dta());
      const NodeId probe = static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size()));
      CHECK(e.query(probe) == e.dta().accepting(rho[static_cast<size_t>(probe)]));
    }
    require_clean(e);
    check_all_queries(e);
    CHECK(e.violations() == 0);
  }
}

TEST_CASE("mixed insertions and relabels keep every table current") {
  std::mt19937_64 rng(64);
  UnrankedTree t = random_labeled_tree(rng, 5, 2);
  TreeEngine e(t, parity_dta(), dynamic_cfg());
  for (int step = 0; step < 250; ++step) {
    const NodeId pick = static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size()));
    if (rng() % 5 < 3)
      e.add_child(pick, static_cast<i32>(rng() % 2));
    else
      e.relabel(pick, static_cast<i32>(rng() % 2));
    CAPTURE(step);
    if (step % 5 == 0) require_clean(e);
    const std::vector<i32> rho = dta_states(e.tree(), e.dta());
    for (int probe_i = 0; probe_i < 3; ++probe_i) {
      const NodeId probe = static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size()));
      CHECK(e.query(probe) == e.dta().accepting(rho[static_cast<size_t>(probe)]));
    }
  }
  require_clean(e);
  check_all_queries(e);
  CHECK(e.violations() == 0);
  CHECK(e.tree().size() > 140);
}

TEST_CASE("structure queries match the tree") {
  std::mt19937_64 rng(65);
  for (bool dynamic : {false, true}) {
    UnrankedTree t = random_labeled_tree(rng, 70, 2);
    TreeEngine e(t, parity_dta(), dynamic ? dynamic_cfg() : static_cfg());
    check_structure_queries(e, rng);
    if (dynamic) {
      for (int i = 0; i < 120; ++i)
        e.add_child(static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size())),
                    static_cast<i32>(rng() % 2));
      check_structure_queries(e, rng);
      require_clean(e);
    }
  }
}

TEST_CASE("growth doubles the size budget without violations") {
  std::mt19937_64 rng(66);
  UnrankedTree t = random_labeled_tree(rng, 16, 2);
  TreeEngine e(t, parity_dta(), dynamic_cfg(4, 64));
  CHECK(e.size_budget() == 64);
  for (int i = 0; i < 220; ++i) {
    e.add_child(static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size())),
                static_cast<i32>(rng() % 2));
    if (i % 16 == 0) require_clean(e);
  }
  CHECK(e.tree().size() == 236);
  CHECK(e.size_budget() >= 256);
  CHECK(e.violations() == 0);
  require_clean(e);
  check_all_queries(e);
}

TEST_CASE("level caps and part budgets hold while growing") {
  std::mt19937_64 rng(67);
  UnrankedTree t = random_labeled_tree(rng, 8, 2);
  TreeEngine e(t, parity_dta(), dynamic_cfg());
  for (int i = 0; i < 200; ++i) {
    e.add_child(static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size())),
                static_cast<i32>(rng() % 2));
    const double part_cap =
        10.0 * std::pow(static_cast<double>(e.size_budget()), 1.0 / e.config().theta.h);
    e.for_each_record([&](const ZoneRecord& r) {
      if (!r.primary) return;
      if (r.level < e.config().theta.h) {
        CAPTURE(r.level);
        CHECK(r.size <= e.level_cap(r.level));
      }
      if (!r.is_base(e.base_level()))
        CHECK(static_cast<double>(r.p1.k()) <= part_cap);
    });
  }
  CHECK(e.violations() == 0);
}

TEST_CASE("identical scripts produce identical ledgers") {
  auto run_script = [](TreeEngine& e) {
    std::mt19937_64 rng(68);
    for (int step = 0; step < 120; ++step) {
      const NodeId pick = static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size()));
      const u64 roll = rng() % 10;
      if (roll < 5)
        e.add_child(pick, static_cast<i32>(rng() % 2));
      else if (roll < 8)
        e.relabel(pick, static_cast<i32>(rng() % 2));
      else
        e.query(pick);
    }
  };
  std::mt19937_64 rng(69);
  UnrankedTree t = random_labeled_tree(rng, 10, 2);
  TreeEngine e1(t, parity_dta(), dynamic_cfg());
  TreeEngine e2(t, parity_dta(), dynamic_cfg());
  run_script(e1);
  run_script(e2);
  REQUIRE(e1.ledger().ops().size() == e2.ledger().ops().size());
  for (size_t i = 0; i < e1.ledger().ops().size(); ++i) {
    const OpRecord& a = e1.ledger().ops()[i];
    const OpRecord& b = e2.ledger().ops()[i];
    CAPTURE(i);
    CHECK(a.op == b.op);
    CHECK(a.touched == b.touched);
    CHECK(a.steps == b.steps);
    CHECK(a.rounds == b.rounds);
    CHECK(a.threads_live == b.threads_live);
    CHECK(a.violations == b.violations);
  }
}

TEST_CASE("invalid arguments are rejected") {
  std::mt19937_64 rng(70);
  UnrankedTree t = random_labeled_tree(rng, 10, 2);
  TreeEngine stat(t, parity_dta(), static_cfg());
  CHECK_THROWS_AS(stat.add_child(0, 0), ValidationError);
  CHECK_THROWS_AS(stat.relabel(0, 7), ValidationError);
  CHECK_THROWS_AS(stat.relabel(kNoNode, 0), ValidationError);
  EngineConfig small = dynamic_cfg(4, 8);  // below the legal floor of 4|t|
  CHECK_THROWS_AS(TreeEngine(t, parity_dta(), small), ValidationError);
  TreeEngine dyn(t, parity_dta(), dynamic_cfg());
  CHECK_THROWS_AS(dyn.add_child(kNoNode, 0), ValidationError);
  CHECK_THROWS_AS(dyn.add_child(0, -1), ValidationError);
}

TEST_CASE("query work stays within a flat envelope") {
  std::mt19937_64 rng(71);
  std::vector<i64> costs;
  for (int n : {32, 256, 1024}) {
    UnrankedTree t = random_labeled_tree(rng, n, 2);
    TreeEngine e(t, parity_dta(), static_cfg());
    i64 worst = 0;
    for (int i = 0; i < 20; ++i) {
      e.query(static_cast<NodeId>(rng() % static_cast<u64>(e.tree().size())));
      worst = std::max(worst, e.ledger().ops().back().touched);
    }
    costs.push_back(worst);
  }
  CHECK(costs[0] == costs[1]);
  CHECK(costs[1] == costs[2]);
}
