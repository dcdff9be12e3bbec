#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynmem/dcfl_engine.hpp"
#include "dynmem/fixtures.hpp"

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

// words over symbols 0..base-1 of exactly length len, enumerated by `code`
std::vector<i32> nth_word(u64 code, int len, int base) {
  std::vector<i32> w(static_cast<size_t>(len));
  for (int k = 0; k < len; ++k) {
    w[static_cast<size_t>(k)] = static_cast<i32>(code % base);
    code /= base;
  }
  return w;
}

// Every stored entry of two engines over the same word must agree.
void check_same_tables(DcflEngine& a, DcflEngine& b) {
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size_bound() == b.size_bound());
  const i64 len = a.size();
  const auto& ks = a.grid().values();
  const i32 nq = a.pda().states;
  const i32 ng = a.pda().gamma.size();
  for (i64 i = 1; i <= len; ++i)
    for (i64 j = i; j <= len; ++j)
      for (i32 p = 0; p < nq; ++p)
        for (i32 t = 0; t < ng; ++t) {
          REQUIRE(a.hat_entry(i, j, p, t) == b.hat_entry(i, j, p, t));
          for (i64 k : ks) REQUIRE(a.push_entry(i, j, p, t, k) == b.push_entry(i, j, p, t, k));
          for (i32 q = 0; q < nq; ++q)
            for (i64 m = j + 1; m <= len; ++m)
              for (i64 k : ks)
                REQUIRE(a.pop_entry(i, j, p, t, q, m, k) == b.pop_entry(i, j, p, t, q, m, k));
        }
}

}  // namespace

TEST_CASE("fresh tables pass the oracle sweep on fixed and random words") {
  for (Rdpda m : {dyck_push_pop_rdpda(), dyck_final_state_rdpda()}) {
    for (const char* s : {"()", "(())", "(()((", "))((", "((((((((", "()()()(())"}) {
      DcflEngine e(m, syms(s, m), Theta{2});
      CHECK(e.verify_tables() == std::vector<std::string>{});
    }
  }
  std::mt19937_64 rng(5);
  Rdpda m = dyck_final_state_rdpda();
  for (int rep = 0; rep < 10; ++rep) {
    DcflEngine e(m, random_word(rng, 20, 2), Theta{3});
    CHECK(e.verify_tables() == std::vector<std::string>{});
  }
}

TEST_CASE("frozen summaries on the two-state dyck machine") {
  Rdpda m = dyck_final_state_rdpda();
  DcflEngine e(m, syms("(())", m), Theta{2});

  HatDelta h = e.hat_entry(1, 2, 0, m.init_stack);  // "(("
  CHECK(!h.dead);
  CHECK(h.end == 1);
  CHECK(h.height == 3);

  HatDelta full = e.hat_entry(1, 4, 0, m.init_stack);
  CHECK(!full.dead);
  CHECK(full.end == 0);  // balanced again
  CHECK(full.height == 1);
  CHECK(e.query(1, 4));
  CHECK(!e.query(1, 3));
  CHECK(e.query(2, 3));    // inner "()" is balanced on its own
  CHECK(!e.query(2, 4));   // "())" dies on the dangling close
  CHECK(e.query(2, 1));    // empty word: start state is accepting
}

TEST_CASE("queries agree with direct runs on every window") {
  std::mt19937_64 rng(9);
  for (Rdpda m : {dyck_push_pop_rdpda(), dyck_final_state_rdpda()}) {
    for (int rep = 0; rep < 12; ++rep) {
      std::vector<i32> w = random_word(rng, 14, m.sigma.size());
      DcflEngine e(m, w, Theta{2});
      for (i64 i = 1; i <= 15; ++i)
        for (i64 j = i - 1; j <= 14; ++j)
          CHECK(e.query(i, j) == rdpda_accepts(m, w, i - 1, j - 1));
    }
  }
}

TEST_CASE("arbitrary-height reads match the oracles exhaustively") {
  Rdpda m = dyck_final_state_rdpda();
  for (u64 code = 0; code < 64; ++code) {
    std::vector<i32> w = nth_word(code, 6, 2);
    DcflEngine e(m, w, Theta{2});
    for (i64 i = 1; i <= 6; ++i)
      for (i64 j = i - 1; j <= 6; ++j)
        for (i32 p = 0; p < m.states; ++p)
          for (i32 t = 0; t < m.gamma.size(); ++t) {
            for (i64 k = 1; k <= 8; ++k) {
              auto got = e.push_pos_any(i, j, p, t, k);
              auto want = j < i ? (k == 1 ? std::optional<i64>(0) : std::optional<i64>())
                                : oracle_push_pos(m, w, i - 1, j - 1, p, t, k);
              CHECK(got == want);
            }
            for (i32 q = 0; q < m.states; ++q)
              for (i64 mm = j + 1; mm <= 6; ++mm)
                for (i64 k = 1; k <= 8; ++k)
                  CHECK(e.pop_pos_any(i, j, p, t, q, mm, k) ==
                        oracle_pop_pos(m, w, i - 1, j - 1, p, t, q, mm - 1, 5, k));
          }
  }
}

TEST_CASE("arbitrary-height reads compose multiple grid chunks") {
  // Height 13 ladder; theta = 1/2 gives base 7, so k = 9, 11, 13 need two
  // chunks each and exercise the anchored composition.
  Rdpda m = dyck_push_pop_rdpda();
  std::vector<i32> w(12, m.sigma.require("("));
  DcflEngine e(m, w, Theta{2});
  CHECK(e.grid().base() == 7);
  for (i64 k = 1; k <= 13; ++k) {
    auto got = e.push_pos_any(1, 12, 0, m.init_stack, k);
    CHECK(got == oracle_push_pos(m, w, 0, 11, 0, m.init_stack, k));
    CHECK(got == std::optional<i64>(k == 1 ? 0 : k - 1));
  }

  // deep pops across the same ladder
  std::vector<i32> v = w;
  v.resize(24, m.sigma.require(")"));
  DcflEngine e2(m, v, Theta{2});
  for (i64 k = 1; k <= 13; ++k) {
    PopResult got = e2.pop_pos_any(1, 12, 0, m.init_stack, 0, 13, k);
    CHECK(got == oracle_pop_pos(m, v, 0, 11, 0, m.init_stack, 0, 12, 23, k));
    // 12 closes pop 12 of the 13 levels; the bottom one never goes
    CHECK(got == (k <= 12 ? PopResult{k, 0} : PopResult{}));
  }
  CHECK(e2.verify_tables() == std::vector<std::string>{});
}

TEST_CASE("relabel keeps every table entry correct") {
  std::mt19937_64 rng(31);
  Rdpda m = dyck_final_state_rdpda();
  std::vector<i32> w = random_word(rng, 24, 2);
  DcflEngine e(m, w, Theta{2});
  for (int step = 0; step < 200; ++step) {
    const i64 pos = 1 + static_cast<i64>(rng() % 24);
    const i32 sym = static_cast<i32>(rng() % 2);
    e.relabel(pos, sym);
    w[static_cast<size_t>(pos - 1)] = sym;
    CHECK(e.word() == w);
    auto faults = e.verify_tables();
    if (!faults.empty()) {
      CAPTURE(step);
      CAPTURE(pos);
      CAPTURE(sym);
      for (auto& f : faults) MESSAGE(f);
    }
    REQUIRE(faults.empty());
  }
}

TEST_CASE("relabel keeps tables correct when runs die and empty") {
  std::mt19937_64 rng(32);
  Rdpda m = dyck_push_pop_rdpda();  // close-heavy words empty the stack a lot
  std::vector<i32> w = random_word(rng, 16, 2);
  DcflEngine e(m, w, Theta{3});
  for (int step = 0; step < 120; ++step) {
    const i64 pos = 1 + static_cast<i64>(rng() % 16);
    const i32 sym = static_cast<i32>(rng() % 2);
    e.relabel(pos, sym);
    auto faults = e.verify_tables();
    for (auto& f : faults) MESSAGE(f);
    REQUIRE(faults.empty());
  }
}

TEST_CASE("relabel flips membership on the frozen example") {
  Rdpda m = dyck_final_state_rdpda();
  DcflEngine e(m, syms("(())", m), Theta{2});
  CHECK(e.query(1, 4));
  e.relabel(2, m.sigma.require(")"));
  CHECK(!e.query(1, 4));
  CHECK(e.query(1, 2));  // "()" prefix is now balanced
  e.relabel(2, m.sigma.require("("));
  CHECK(e.query(1, 4));
}

TEST_CASE("relabel leaves non-crossing entries untouched") {
  std::mt19937_64 rng(33);
  Rdpda m = dyck_final_state_rdpda();
  std::vector<i32> w = random_word(rng, 16, 2);
  DcflEngine e(m, w, Theta{2});
  const i64 l = 9;
  const auto& ks = e.grid().values();

  struct Shot {
    HatDelta hat;
    std::vector<i64> push;
    std::vector<PopResult> pops;
  };
  std::vector<Shot> before;
  auto scan = [&](auto&& sink) {
    for (i64 i = 1; i <= 16; ++i)
      for (i64 j = i; j <= 16; ++j) {
        if (i <= l && l <= j) continue;  // window crosses
        for (i32 p = 0; p < m.states; ++p)
          for (i32 t = 0; t < m.gamma.size(); ++t) {
            Shot s;
            s.hat = e.hat_entry(i, j, p, t);
            for (i64 k : ks) s.push.push_back(e.push_entry(i, j, p, t, k));
            for (i32 q = 0; q < m.states; ++q)
              for (i64 mm = j + 1; mm <= 16; ++mm) {
                if (j < l && mm <= l) continue;  // suffix crosses
                for (i64 k : ks) s.pops.push_back(e.pop_entry(i, j, p, t, q, mm, k));
              }
            sink(std::move(s));
          }
      }
  };
  scan([&](Shot s) { before.push_back(std::move(s)); });
  e.relabel(l, 1 - w[static_cast<size_t>(l - 1)]);
  size_t at = 0;
  scan([&](Shot s) {
    REQUIRE(at < before.size());
    CHECK(before[at].hat == s.hat);
    CHECK(before[at].push == s.push);
    CHECK(before[at].pops == s.pops);
    ++at;
  });
  CHECK(at == before.size());
}

TEST_CASE("relabeling the current symbol changes nothing and costs nothing") {
  Rdpda m = dyck_final_state_rdpda();
  std::vector<i32> w = syms("(())()", m);
  DcflEngine e(m, w, Theta{2});
  e.ledger().clear_ops();
  e.relabel(3, w[2]);
  REQUIRE(e.ledger().ops().size() == 1);
  CHECK(e.ledger().ops()[0].touched == 0);
  CHECK(e.verify_tables() == std::vector<std::string>{});
}

TEST_CASE("insert matches a freshly built structure at every step") {
  std::mt19937_64 rng(41);
  Rdpda m = dyck_final_state_rdpda();
  std::vector<i32> w = syms("()", m);
  DcflEngine e(m, w, Theta{2});
  for (int step = 0; step < 40; ++step) {
    const i32 sym = static_cast<i32>(rng() % 2);
    const bool after = rng() % 2 == 0;
    if (after) {
      const i64 pos = static_cast<i64>(rng() % (w.size() + 1));  // 0 = front
      e.insert(pos, InsertSide::kAfter, sym);
      w.insert(w.begin() + pos, sym);
    } else {
      const i64 pos = 1 + static_cast<i64>(rng() % (w.size() + 1));
      e.insert(pos, InsertSide::kBefore, sym);
      w.insert(w.begin() + (pos - 1), sym);
    }
    REQUIRE(e.word() == w);
    auto faults = e.verify_tables();
    for (auto& f : faults) MESSAGE(f);
    REQUIRE(faults.empty());
    DcflEngine fresh(m, w, Theta{2}, e.size_bound());
    check_same_tables(e, fresh);
  }
  CHECK(e.size() == 42);
}

TEST_CASE("insert grows the bound by doubling") {
  Rdpda m = dyck_push_pop_rdpda();
  std::vector<i32> w = syms("()()", m);
  DcflEngine e(m, w, Theta{2});
  CHECK(e.size_bound() == 16);
  std::mt19937_64 rng(43);
  while (e.size() < 12) {
    const i64 pos = 1 + static_cast<i64>(rng() % e.size());
    e.insert(pos, InsertSide::kBefore, static_cast<i32>(rng() % 2));
  }
  CHECK(e.size_bound() == 32);  // doubled when 2 * size reached 16
  auto faults = e.verify_tables();
  for (auto& f : faults) MESSAGE(f);
  REQUIRE(faults.empty());
  DcflEngine fresh(m, e.word(), Theta{2}, 32);
  check_same_tables(e, fresh);
}

TEST_CASE("insert works at the boundaries and on the empty word") {
  Rdpda m = dyck_final_state_rdpda();
  DcflEngine e(m, {}, Theta{2});
  CHECK(e.query(1, 0));  // empty word, accepting start state
  e.insert(1, InsertSide::kBefore, m.sigma.require("("));
  e.insert(1, InsertSide::kAfter, m.sigma.require(")"));
  CHECK(e.word() == syms("()", m));
  CHECK(e.query(1, 2));
  e.insert(0, InsertSide::kAfter, m.sigma.require(")"));  // front insert
  CHECK(e.word() == syms(")()", m));
  CHECK(!e.query(1, 3));
  CHECK(e.query(2, 3));
  CHECK(e.verify_tables() == std::vector<std::string>{});
}

TEST_CASE("sampled verification passes on a fresh build") {
  std::mt19937_64 rng(51);
  Rdpda m = dyck_final_state_rdpda();
  DcflEngine e(m, random_word(rng, 32, 2), Theta{2});
  std::mt19937_64 sweep(7);
  CHECK(e.verify_sample(sweep, 400) == std::vector<std::string>{});
}

TEST_CASE("ledger records deterministic per-operation work") {
  Rdpda m = dyck_final_state_rdpda();
  std::vector<i32> w = syms("(()())", m);
  auto run = [&]() {
    DcflEngine e(m, w, Theta{2});
    e.relabel(3, m.sigma.require("("));
    e.query(1, 6);
    e.insert(2, InsertSide::kBefore, m.sigma.require(")"));
    return std::vector<OpRecord>(e.ledger().ops().begin(), e.ledger().ops().end());
  };
  auto a = run();
  auto b = run();
  REQUIRE(a.size() == 3);
  CHECK(a[0].op == "relabel");
  CHECK(a[1].op == "query");
  CHECK(a[2].op == "insert");
  CHECK(a[0].touched > 0);
  CHECK(a[0].rounds == 4);
  CHECK(a[1].rounds == 1);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].touched == b[i].touched);
    CHECK(a[i].steps == b[i].steps);
    CHECK(a[i].threads_live == b[i].threads_live);
  }
}

TEST_CASE("construction rejects unsupported automata and bad arguments") {
  Rdpda m = dyck_final_state_rdpda();
  CHECK_THROWS_AS(DcflEngine(m, {9}, Theta{2}), ValidationError);  // bad symbol
  CHECK_THROWS_AS(DcflEngine(m, {}, Theta{1}), ValidationError);   // theta needs h >= 2
  CHECK_THROWS_AS(DcflEngine(m, syms("()", m), Theta{2}, 3), ValidationError);  // bound too small

  Rdpda rw = dyck_push_pop_rdpda();  // make the push rewrite the symbol below
  i32 y = rw.gamma.intern("Y");
  rw.delta.assign(static_cast<size_t>(1) * 2 * 2, std::nullopt);
  rw.delta[static_cast<size_t>(0) * 2 + 0] = Rdpda::Move{0, {0, y}};
  rw.validate();
  CHECK_THROWS_AS(DcflEngine(rw, {}, Theta{2}), ValidationError);
}
