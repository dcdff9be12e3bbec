#include "dynmem/tree_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dynmem/oracles.hpp"
#include "dynmem/util.hpp"

namespace dynmem {

namespace {

constexpr u8 kNoVal = SpecialPairTables::kNoVal;

// A connection hole below a childless node cuts nothing; dropping it keeps
// the membership rules uniform when that node later gains children.
Zone norm_zone(const UnrankedTree& t, Zone z) {
  if (z.lower != kNoNode && t.nchildren(z.lower) == 0) z.lower = kNoNode;
  return z;
}

}  // namespace

// Structure provider backed by the engine's own tables. Partition steps of
// rebuild threads resolve subtree counts through the stored counters, so
// their cost lands in the ledger like any other table access.
class EngineTreeFns final : public TreeFns {
 public:
  explicit EngineTreeFns(TreeEngine& e) : e_(e) {}

  i64 num_desc(NodeId v) override { return e_.eval_num_desc(v, v); }
  i64 num_desc_range(NodeId u, NodeId v) override { return e_.eval_num_desc(u, v); }
  bool is_anc_or_self(NodeId u, NodeId v) override {
    e_.ledger_.step();
    return e_.t_.is_anc_or_self(u, v);
  }
  NodeId lca(NodeId u, NodeId v) override {
    e_.ledger_.step();
    return e_.t_.lca(u, v);
  }
  NodeId anc_child(NodeId u, NodeId v) override {
    e_.ledger_.step();
    return e_.t_.anc_child(u, v);
  }

 private:
  TreeEngine& e_;
};

TreeEngine::TreeEngine(UnrankedTree t, Dta dta, EngineConfig cfg)
    : t_(std::move(t)), m_(std::move(dta)), cfg_(cfg) {
  m_.validate();
  cfg_.theta.validate();
  DM_REQUIRE(cfg_.theta.h >= 4, "engine: the zone hierarchy needs h >= 4");
  DM_REQUIRE(cfg_.theta.h <= 24, "engine: hierarchy height out of range");
  DM_REQUIRE(cfg_.rounds_per_change >= 1, "engine: rounds_per_change must be positive");
  DM_REQUIRE(t_.size() >= 1, "engine: empty tree");
  DM_REQUIRE(m_.states <= 254 && m_.hstates <= 254,
             "engine: automaton too large for byte-packed tables");
  const NodeId n_nodes = static_cast<NodeId>(t_.size());
  for (NodeId v = 0; v < n_nodes; ++v)
    DM_REQUIRE(t_.label(v) >= 0 && t_.label(v) < static_cast<i32>(m_.sigma.size()),
               "engine: tree label outside the automaton alphabet");
  base_ = cfg_.mode == EngineMode::kDynamic ? 3 : 1;
  DM_REQUIRE(cfg_.theta.h > base_, "engine: hierarchy height must exceed the base level");
  tree_size_ = t_.size();
  const i64 floor_n = std::max<i64>(
      cfg_.mode == EngineMode::kDynamic ? 4 * tree_size_ : tree_size_, ipow(2, cfg_.theta.h));
  n_ = cfg_.n == 0 ? floor_n : cfg_.n;
  DM_REQUIRE(n_ >= floor_n, "engine: size budget below the legal floor for this tree");
  prints_.resize(static_cast<size_t>(tree_size_));
  // Queries are charged at a flat envelope independent of the tree size.
  query_envelope_ = 64LL * cfg_.theta.h * (m_.states + m_.hstates + 2);

  ledger_.begin_init();
  const std::vector<i32> rho0 = dta_states(t_, m_);
  ledger_.step(tree_size_);
  root_rec_ = new_record(Zone{t_.root(), t_.root(), kNoNode}, cfg_.theta.h, nullptr, -1);
  RecomputationThread* boot = spawn_thread(nullptr, n_, 2, false, true);
  run_to_done(boot, &rho0);
  ledger_.set_threads_live(live_threads());
  ledger_.end();
}

TreeEngine::~TreeEngine() = default;

i64 TreeEngine::level_cap(int level) const { return ipow_floor(n_, level, cfg_.theta.h); }

i64 TreeEngine::m_for(i64 n_param, int level, int m_div) const {
  return std::max<i64>(2, ipow_floor(n_param, level, cfg_.theta.h) / m_div);
}

i64 TreeEngine::live_threads() const {
  i64 n = 0;
  for (const auto& th : threads_)
    if (!th->done) ++n;
  return n;
}

void TreeEngine::for_each_record(const std::function<void(const ZoneRecord&)>& fn) const {
  for (const auto& up : arena_)
    if (up->alive) fn(*up);
}

const ZoneRecord* TreeEngine::record_of(NodeId v, int level) const {
  if (!t_.valid(v)) return nullptr;
  const ZoneRecord* r = nullptr;
  for (const auto& ref : prints_[static_cast<size_t>(v)].refs)
    if (ref.rec->alive && ref.rec->primary) {
      r = ref.rec;
      break;
    }
  while (r != nullptr && r->level < level) r = r->owner;
  return (r != nullptr && r->level == level) ? r : nullptr;
}

// --- chain / navigation helpers -------------------------------------------

ZoneRecord* TreeEngine::primary_base(NodeId v) {
  DM_CHECK(t_.valid(v), "node outside the tree");
  FingerPrint& fp = prints_[static_cast<size_t>(v)];
  ZoneRecord* hit = nullptr;
  size_t w = 0;
  for (size_t i = 0; i < fp.refs.size(); ++i) {
    if (!fp.refs[i].rec->alive) continue;
    fp.refs[w++] = fp.refs[i];
    if (fp.refs[i].rec->primary) hit = fp.refs[i].rec;
  }
  fp.refs.resize(w);
  ledger_.step();
  DM_CHECK(hit != nullptr, "node has no operable base record");
  return hit;
}

ZoneRecord* TreeEngine::record_at_level(NodeId v, int level) {
  ZoneRecord* r = primary_base(v);
  while (r != nullptr && r->level < level) r = r->owner;
  DM_CHECK(r != nullptr && r->level == level, "no record at the requested level");
  return r;
}

ZoneRecord* TreeEngine::meet_record(NodeId a, NodeId b) {
  std::array<ZoneRecord*, 32> ca{};
  int na = 0;
  for (ZoneRecord* r = primary_base(a); r != nullptr; r = r->owner) {
    DM_CHECK(na < 32, "record chain too deep");
    ca[static_cast<size_t>(na++)] = r;
  }
  for (ZoneRecord* r = primary_base(b); r != nullptr; r = r->owner)
    for (int i = 0; i < na; ++i)
      if (ca[static_cast<size_t>(i)] == r) return r;
  DM_CHECK(false, "nodes share no record");
  return nullptr;
}

NodeId TreeEngine::ancestor_at_depth(NodeId v, i32 depth) {
  NodeId cur = v;
  while (cur != kNoNode && t_.depth(cur) > depth) {
    cur = t_.parent(cur);
    ledger_.step();
  }
  DM_CHECK(cur != kNoNode && t_.depth(cur) == depth, "no ancestor at the requested depth");
  return cur;
}

NodeId TreeEngine::row_anchor(NodeId below, NodeId row_node) {
  const i32 d = t_.depth(row_node);
  if (t_.depth(below) < d) return kNoNode;
  NodeId cur = below;
  while (t_.depth(cur) > d) {
    cur = t_.parent(cur);
    ledger_.step();
  }
  return cur;
}

NodeId TreeEngine::top_anchor(const ZoneRecord* rec, NodeId v) {
  return ancestor_at_depth(v, t_.depth(rec->zone.left));
}

int TreeEngine::max_lower_level(NodeId v) {
  int j = base_ - 1;
  for (ZoneRecord* r = primary_base(v); r != nullptr; r = r->owner) {
    ledger_.step();
    if (r->zone.lower != v) break;
    j = r->level;
  }
  return j;
}

// --- table reads ------------------------------------------------------------

i32 TreeEngine::read_h(ZoneRecord* rec, i32 p, NodeId a, NodeId b) {
  ledger_.touch();
  u8 val;
  if (rec->is_base(base_)) {
    auto ia = rec->local.find(a);
    auto ib = rec->local.find(b);
    DM_CHECK(ia != rec->local.end() && ib != rec->local.end(), "horizontal read outside the zone");
    const size_t s = static_cast<size_t>(rec->tabs.stride);
    val = rec->tabs.hdense[(static_cast<size_t>(p) * s + ia->second) * s + ib->second];
  } else {
    auto it = rec->tabs.hpairs.find(SpecialPairTables::key(a, b));
    DM_CHECK(it != rec->tabs.hpairs.end(), "horizontal pair not stored");
    val = it->second[static_cast<size_t>(p)];
  }
  DM_CHECK(val != kNoVal, "blocked horizontal entry read");
  return val;
}

i32 TreeEngine::read_v(ZoneRecord* rec, i32 q, NodeId a, NodeId b) {
  ledger_.touch();
  u8 val;
  if (rec->is_base(base_)) {
    auto ia = rec->local.find(a);
    auto ib = rec->local.find(b);
    DM_CHECK(ia != rec->local.end() && ib != rec->local.end(), "vertical read outside the zone");
    const size_t s = static_cast<size_t>(rec->tabs.stride);
    val = rec->tabs.vdense[(static_cast<size_t>(q) * s + ia->second) * s + ib->second];
  } else {
    auto it = rec->tabs.vpairs.find(SpecialPairTables::key(a, b));
    DM_CHECK(it != rec->tabs.vpairs.end(), "vertical pair not stored");
    val = it->second[static_cast<size_t>(q)];
  }
  DM_CHECK(val != kNoVal, "blocked vertical entry read");
  return val;
}

i32 TreeEngine::row_in_zone(ZoneRecord* rec, i32 p, NodeId a, NodeId b) {
  if (!rec->zone.complete()) {
    NodeId w = row_anchor(rec->zone.lower, a);
    if (w != kNoNode && t_.at(w).parent == t_.at(a).parent && t_.sib_index(a) <= t_.sib_index(w) &&
        t_.sib_index(w) <= t_.sib_index(b)) {
      // the span crosses the hole's branch: its single column is taken live
      i32 st = (w == a) ? p : read_h(rec, p, a, t_.lsib(w));
      st = m_.hstep(st, eval_node_state(w));
      return (w == b) ? st : read_h(rec, st, t_.rsib(w), b);
    }
  }
  return read_h(rec, p, a, b);
}

i32 TreeEngine::lift_in_zone(ZoneRecord* rec, i32 q, NodeId a, NodeId b) {
  if (a == b) return q;
  if (!rec->zone.complete() && rec->zone.lower != a) {
    NodeId w = t_.lca(rec->zone.lower, a);
    ledger_.step();
    if (w != a && t_.depth(w) >= t_.depth(b)) {
      // the climb crosses the branch point towards the hole; bridge through
      // it live and continue on the stored pieces
      NodeId ac = t_.anc_child(w, a);
      i32 st = (ac == a) ? q : read_v(rec, q, a, ac);
      st = bridge_step(st, ac);
      return (w == b) ? st : read_v(rec, st, w, b);
    }
  }
  return read_v(rec, q, a, b);
}

i32 TreeEngine::bridge_step(i32 q, NodeId child) {
  NodeId x = t_.parent(child);
  DM_CHECK(x != kNoNode, "bridge above the root");
  i32 p = eval_row(m_.hstart, t_.fchild(x), t_.lsib(child));
  p = m_.hstep(p, q);
  p = eval_row(p, t_.rsib(child), t_.lchild(x));
  return m_.apply(p, t_.label(x));
}

i64 TreeEngine::span_count(ZoneRecord* rec, NodeId a, NodeId b) {
  i64 total = 0;
  if (rec->is_base(base_)) {
    auto ia = rec->local.find(a);
    auto ib = rec->local.find(b);
    DM_CHECK(ia != rec->local.end() && ib != rec->local.end(), "count span outside the zone");
    total = rec->fn.pref3[ib->second] - rec->fn.pref3[ia->second] + rec->fn.size3[ia->second];
    ledger_.touch(3);
  } else {
    ZoneRecord* wa = record_at_level(a, rec->level - 1);
    DM_CHECK(wa->owner == rec && wa->zone.left == a, "count span must open a part");
    DM_CHECK(b == rec->zone.right, "upper count span must close the zone");
    DM_CHECK(!rec->p1.top_order.empty(), "zone without top parts");
    const i32 bi = rec->p1.top_order.back();
    total = rec->p1.zsize[static_cast<size_t>(rec->p1.idx(wa->part_index, bi))];
    DM_CHECK(total >= 0, "undefined span count");
    ledger_.touch();
  }
  if (!rec->zone.complete()) {
    NodeId w = row_anchor(rec->zone.lower, a);
    if (w != kNoNode && t_.at(w).parent == t_.at(a).parent && t_.sib_index(a) <= t_.sib_index(w) &&
        t_.sib_index(w) <= t_.sib_index(b)) {
      total += t_.num_desc(rec->zone.lower) - 1;
      ledger_.touch();
    }
  }
  return total;
}

// --- evaluation -------------------------------------------------------------

i32 TreeEngine::eval_node_state(NodeId v) {
  // Chase the hole chain: the state of the chain's bottom node is assembled
  // from its children and lifted back up through the stored vertical pairs.
  std::vector<std::pair<ZoneRecord*, NodeId>> chain;
  NodeId cur = v;
  ZoneRecord* rec = primary_base(v);
  while (true) {
    chain.emplace_back(rec, cur);
    ledger_.step();
    if (rec->zone.complete() || !t_.is_anc_or_self(cur, rec->zone.lower)) break;
    cur = rec->zone.lower;
    DM_CHECK(rec->level < cfg_.theta.h, "hole chain escaped the hierarchy");
    rec = record_at_level(cur, rec->level + 1);
  }
  const NodeId vj = chain.back().second;
  i32 st = m_.apply(eval_row(m_.hstart, t_.fchild(vj), t_.lchild(vj)), t_.label(vj));
  for (i64 i = static_cast<i64>(chain.size()) - 2; i >= 0; --i) {
    ZoneRecord* ri = chain[static_cast<size_t>(i)].first;
    const NodeId vi = chain[static_cast<size_t>(i)].second;
    const NodeId lo = ri->zone.lower;
    if (lo != vi) st = lift_in_zone(ri, st, lo, vi);
  }
  return st;
}

i32 TreeEngine::eval_row(i32 p, NodeId a, NodeId b) {
  if (a == kNoNode || b == kNoNode) return p;
  DM_CHECK(t_.at(a).parent == t_.at(b).parent, "eval_row: endpoints must be siblings");
  // exclusive gaps between adjacent siblings arrive as a crossed pair
  if (t_.sib_index(a) == t_.sib_index(b) + 1) return p;
  DM_CHECK(t_.sib_index(a) <= t_.sib_index(b), "eval_row: endpoints must be ordered");
  i32 st = p;
  NodeId cur = a;
  while (true) {
    ledger_.step();
    ZoneRecord* rc = primary_base(cur);
    if (rc == primary_base(b)) return row_in_zone(rc, st, cur, b);
    ZoneRecord* meet = meet_record(cur, b);
    const int big = meet->level;
    int kl = base_ - 1;
    for (ZoneRecord* r = rc; r != nullptr && r->zone.left == cur; r = r->owner) {
      kl = r->level;
      if (kl >= big) break;
    }
    const int lvl = std::min(big - 1, kl + 1);
    ZoneRecord* seg = rc;
    while (seg != nullptr && seg->level < lvl) seg = seg->owner;
    DM_CHECK(seg != nullptr && seg->level == lvl, "segment record missing");
    const NodeId y = seg->zone.right;
    st = row_in_zone(seg, st, cur, y);
    cur = t_.rsib(y);
    DM_CHECK(cur != kNoNode, "row run escaped the sibling row");
  }
}

i32 TreeEngine::eval_lift(i32 q, NodeId u, NodeId v) {
  if (u == v) return q;
  DM_CHECK(t_.is_strict_anc(v, u), "eval_lift: target must be a proper ancestor");
  i32 st = q;
  NodeId cur = u;
  while (cur != v) {
    ledger_.step();
    ZoneRecord* rc = primary_base(cur);
    if (rc == primary_base(v)) return lift_in_zone(rc, st, cur, v);
    ZoneRecord* meet = meet_record(cur, v);
    const int big = meet->level;
    const int j = max_lower_level(cur);
    if (j + 1 < big) {
      // climb to the top of the next enclosing zone and bridge out of it
      ZoneRecord* z = record_at_level(cur, j + 1);
      const NodeId y = top_anchor(z, cur);
      if (y != cur) {
        st = lift_in_zone(z, st, cur, y);
        cur = y;
      }
      st = bridge_step(st, cur);
      cur = t_.parent(cur);
    } else {
      // hop onto the hole of the deepest record of v below the meet
      ZoneRecord* w = record_at_level(v, big - 1);
      DM_CHECK(!w->zone.complete(), "meet part without a connection hole");
      const NodeId wk = w->zone.lower;
      DM_CHECK(t_.is_strict_anc(wk, cur), "hop target not above the cursor");
      st = lift_in_zone(meet, st, cur, wk);
      cur = wk;
    }
  }
  return st;
}

i32 TreeEngine::evaluate_state(NodeId v, i32 sigma, NodeId x) {
  ledger_.step();
  if (!t_.is_anc_or_self(x, v)) return eval_node_state(x);
  const i32 q = m_.apply(eval_row(m_.hstart, t_.fchild(v), t_.lchild(v)), sigma);
  return (x == v) ? q : eval_lift(q, v, x);
}

i32 TreeEngine::evaluate_sequence(NodeId v, i32 sigma, i32 p, NodeId x, NodeId y) {
  DM_CHECK(x != kNoNode && y != kNoNode, "evaluate_sequence: bad span");
  NodeId w = row_anchor(v, x);
  const bool hit = w != kNoNode && t_.at(w).parent == t_.at(x).parent &&
                   t_.sib_index(x) <= t_.sib_index(w) && t_.sib_index(w) <= t_.sib_index(y);
  if (!hit) return eval_row(p, x, y);
  i32 st = (w == x) ? p : eval_row(p, x, t_.lsib(w));
  st = m_.hstep(st, evaluate_state(v, sigma, w));
  return (w == y) ? st : eval_row(st, t_.rsib(w), y);
}

i32 TreeEngine::evaluate_path(NodeId v, i32 sigma, i32 q, NodeId x, NodeId y) {
  DM_CHECK(t_.is_strict_anc(x, y), "evaluate_path: x must be a proper ancestor of y");
  ledger_.step();
  if (t_.is_anc_or_self(y, v) || !t_.is_anc_or_self(x, v)) return eval_lift(q, y, x);
  const NodeId u = t_.lca(v, y);
  i32 pacc;
  i32 qq;
  if (u == v) {
    const NodeId z = t_.anc_child(u, y);
    pacc = eval_row(m_.hstart, t_.fchild(u), t_.lsib(z));
    pacc = m_.hstep(pacc, (z == y) ? q : eval_lift(q, y, z));
    pacc = eval_row(pacc, t_.rsib(z), t_.lchild(u));
    qq = m_.apply(pacc, sigma);
  } else {
    const NodeId z = t_.anc_child(u, y);
    const NodeId zp = t_.anc_child(u, v);
    DM_CHECK(z != zp, "diverging branches must differ");
    const i32 liftq = (z == y) ? q : eval_lift(q, y, z);
    const i32 stv = evaluate_state(v, sigma, zp);
    if (t_.sib_index(z) < t_.sib_index(zp)) {
      pacc = eval_row(m_.hstart, t_.fchild(u), t_.lsib(z));
      pacc = m_.hstep(pacc, liftq);
      pacc = eval_row(pacc, t_.rsib(z), t_.lsib(zp));
      pacc = m_.hstep(pacc, stv);
      pacc = eval_row(pacc, t_.rsib(zp), t_.lchild(u));
    } else {
      pacc = eval_row(m_.hstart, t_.fchild(u), t_.lsib(zp));
      pacc = m_.hstep(pacc, stv);
      pacc = eval_row(pacc, t_.rsib(zp), t_.lsib(z));
      pacc = m_.hstep(pacc, liftq);
      pacc = eval_row(pacc, t_.rsib(z), t_.lchild(u));
    }
    qq = m_.apply(pacc, t_.label(u));
  }
  return (u == x) ? qq : eval_lift(qq, u, x);
}

NodeId TreeEngine::eval_child(NodeId v, i64 k) {
  DM_REQUIRE(t_.valid(v), "eval_child: bad node");
  if (k < 0 || k >= t_.nchildren(v)) return kNoNode;
  const int j = max_lower_level(v);
  ZoneRecord* c = nullptr;
  i64 kk = k;
  if (j < base_) {
    c = primary_base(v);
  } else {
    // v's children hang below its deepest hole-typed zone; select the part
    // of the enclosing record by the stored child-count ranges
    ZoneRecord* w = record_at_level(v, j);
    ZoneRecord* r = w->owner;
    DM_CHECK(r != nullptr, "children outside the hierarchy");
    for (ZoneRecord* p : r->p1.parts) {
      ledger_.touch();
      if (r->p1.zparent[static_cast<size_t>(p->part_index)] != w->part_index) continue;
      if (p->n_zleft <= kk && kk < p->n_zleft + p->n_tops) {
        c = p;
        kk -= p->n_zleft;
        break;
      }
    }
    DM_CHECK(c != nullptr, "child index not covered by any part");
  }
  while (!c->is_base(base_)) {
    ZoneRecord* nxt = nullptr;
    for (ZoneRecord* p : c->p1.parts) {
      ledger_.touch();
      if (c->p1.zparent[static_cast<size_t>(p->part_index)] != -1) continue;
      if (p->n_zleft <= kk && kk < p->n_zleft + p->n_tops) {
        nxt = p;
        kk -= p->n_zleft;
        break;
      }
    }
    DM_CHECK(nxt != nullptr, "top index not covered by any part");
    c = nxt;
  }
  i64 seen = 0;
  for (NodeId mem : c->members) {
    ledger_.touch();
    if (t_.at(mem).parent == v) {
      if (seen == kk) return mem;
      ++seen;
    }
  }
  DM_CHECK(false, "child not found in the base zone");
  return kNoNode;
}

i64 TreeEngine::eval_num_desc(NodeId u, NodeId v) {
  DM_CHECK(u != kNoNode && v != kNoNode, "eval_num_desc: bad span");
  DM_CHECK(t_.at(u).parent == t_.at(v).parent && t_.sib_index(u) <= t_.sib_index(v),
           "eval_num_desc: endpoints must be ordered siblings");
  i64 total = 0;
  NodeId cur = u;
  while (true) {
    ledger_.step();
    ZoneRecord* rc = primary_base(cur);
    if (rc == primary_base(v)) return total + span_count(rc, cur, v);
    ZoneRecord* meet = meet_record(cur, v);
    const int big = meet->level;
    int kl = base_ - 1;
    for (ZoneRecord* r = rc; r != nullptr && r->zone.left == cur; r = r->owner) {
      kl = r->level;
      if (kl >= big) break;
    }
    const int lvl = std::min(big - 1, kl + 1);
    ZoneRecord* seg = rc;
    while (seg != nullptr && seg->level < lvl) seg = seg->owner;
    DM_CHECK(seg != nullptr && seg->level == lvl, "segment record missing");
    const NodeId y = seg->zone.right;
    total += span_count(seg, cur, y);
    cur = t_.rsib(y);
    DM_CHECK(cur != kNoNode, "count run escaped the sibling row");
  }
}

// --- key derivation and fills ------------------------------------------------

TreeEngine::UpperKeys TreeEngine::derive_upper_keys(ZoneRecord* rec) {
  UpperKeys out;
  const Zone& z = rec->zone;
  const NodeId hole = z.complete() ? kNoNode : z.lower;
  const i32 d0 = t_.depth(z.left);
  const NodeId hrow = hole == kNoNode ? kNoNode : row_anchor(hole, z.left);

  auto add_h = [&](NodeId a, NodeId b) {
    if (hrow != kNoNode && t_.sib_index(a) <= t_.sib_index(hrow) &&
        t_.sib_index(hrow) <= t_.sib_index(b)) {
      if (hrow != a) out.hkeys.emplace_back(a, t_.lsib(hrow));
      if (hrow != b) out.hkeys.emplace_back(t_.rsib(hrow), b);
      return;
    }
    out.hkeys.emplace_back(a, b);
  };
  auto add_v = [&](NodeId a, NodeId b) {
    if (hole != kNoNode && hole != a) {
      NodeId w = t_.lca(hole, a);
      if (w != a && t_.depth(w) >= t_.depth(b)) {
        NodeId ac = t_.anc_child(w, a);
        if (ac != a) out.vkeys.emplace_back(a, ac);
        if (w != b) out.vkeys.emplace_back(w, b);
        return;
      }
    }
    out.vkeys.emplace_back(a, b);
  };

  std::vector<NodeId> ucands;
  for (ZoneRecord* p : rec->p1.parts) {
    ledger_.step();
    if (t_.depth(p->zone.left) == d0) add_h(p->zone.left, z.right);
    if (!p->zone.complete()) ucands.push_back(p->zone.lower);
  }
  if (hole != kNoNode) ucands.push_back(hole);
  for (NodeId uc : ucands) {
    const NodeId top = ancestor_at_depth(uc, d0);
    if (top != uc) add_v(uc, top);
    for (ZoneRecord* p : rec->p1.parts) {
      if (p->zone.complete()) continue;
      const NodeId lw = p->zone.lower;
      ledger_.step();
      if (lw != uc && t_.is_strict_anc(lw, uc)) add_v(uc, lw);
    }
  }
  std::sort(out.hkeys.begin(), out.hkeys.end());
  out.hkeys.erase(std::unique(out.hkeys.begin(), out.hkeys.end()), out.hkeys.end());
  std::sort(out.vkeys.begin(), out.vkeys.end());
  out.vkeys.erase(std::unique(out.vkeys.begin(), out.vkeys.end()), out.vkeys.end());
  return out;
}

void TreeEngine::fill_base(ZoneRecord* rec, const std::vector<i32>* init_rho, NodeId pend_node,
                           i32 pend_label) {
  const Zone& z = rec->zone;
  rec->members = zone_members(t_, z);
  const i64 cnt = static_cast<i64>(rec->members.size());
  rec->size = cnt;
  rec->local.clear();
  rec->local.reserve(static_cast<size_t>(cnt) * 2);
  for (i64 i = 0; i < cnt; ++i)
    rec->local.emplace(rec->members[static_cast<size_t>(i)], static_cast<u32>(i));
  for (i64 i = 0; i < cnt; ++i) {
    FingerPrint& fp = prints_[static_cast<size_t>(rec->members[static_cast<size_t>(i)])];
    bool found = false;
    for (auto& ref : fp.refs)
      if (ref.rec == rec) {
        ref.idx = static_cast<u32>(i);
        found = true;
      }
    if (!found) fp.refs.push_back({rec, static_cast<u32>(i)});
  }
  ledger_.step(cnt);

  auto label_of = [&](NodeId x) { return x == pend_node ? pend_label : t_.label(x); };
  const NodeId hole = z.complete() ? kNoNode : z.lower;

  TreeFunctionTables& fn = rec->fn;
  fn.parz.assign(static_cast<size_t>(cnt), u32(-1));
  fn.size3.assign(static_cast<size_t>(cnt), 1);
  fn.pref3.assign(static_cast<size_t>(cnt), 0);
  for (i64 i = 0; i < cnt; ++i) {
    const NodeId par = t_.parent(rec->members[static_cast<size_t>(i)]);
    if (par == kNoNode) continue;
    auto it = rec->local.find(par);
    if (it != rec->local.end()) fn.parz[static_cast<size_t>(i)] = it->second;
  }
  // document order puts descendants after their zone parent, so a reverse
  // sweep accumulates in-zone subtree sizes
  for (i64 i = cnt - 1; i > 0; --i)
    if (fn.parz[static_cast<size_t>(i)] != u32(-1))
      fn.size3[fn.parz[static_cast<size_t>(i)]] += fn.size3[static_cast<size_t>(i)];

  // sibling rows, members listed left to right
  std::unordered_map<NodeId, std::vector<u32>> rows;
  rows.reserve(static_cast<size_t>(cnt));
  std::vector<NodeId> row_parents;
  for (i64 i = 0; i < cnt; ++i) {
    const NodeId par = t_.parent(rec->members[static_cast<size_t>(i)]);
    auto [it, fresh] = rows.try_emplace(par);
    if (fresh) row_parents.push_back(par);
    it->second.push_back(static_cast<u32>(i));
  }
  for (NodeId par : row_parents) {
    i64 acc = 0;
    for (u32 ix : rows[par]) {
      acc += fn.size3[ix];
      fn.pref3[ix] = acc;
    }
  }
  ledger_.touch(3 * cnt);

  // true member states under the pending label; the hole's state involves
  // labels below the zone and is taken live (or from the initial array)
  std::vector<i32> rho(static_cast<size_t>(cnt), 0);
  for (i64 i = cnt - 1; i >= 0; --i) {
    const NodeId vn = rec->members[static_cast<size_t>(i)];
    if (vn == hole) {
      rho[static_cast<size_t>(i)] =
          init_rho != nullptr
              ? (*init_rho)[static_cast<size_t>(vn)]
              : m_.apply(eval_row(m_.hstart, t_.fchild(vn), t_.lchild(vn)), label_of(vn));
      continue;
    }
    i32 p = m_.hstart;
    auto it = rows.find(vn);
    if (it != rows.end())
      for (u32 ci : it->second) p = m_.hstep(p, rho[ci]);
    rho[static_cast<size_t>(i)] = m_.apply(p, label_of(vn));
  }

  rec->tabs.stride = cnt;
  rec->tabs.hpairs.clear();
  rec->tabs.vpairs.clear();
  rec->tabs.hdense.assign(static_cast<size_t>(m_.hstates * cnt * cnt), kNoVal);
  rec->tabs.vdense.assign(static_cast<size_t>(m_.states * cnt * cnt), kNoVal);
  const size_t stride = static_cast<size_t>(cnt);
  i64 writes = 0;

  // horizontal: forward runs per row and start; spans that cross the hole's
  // column in this row stay empty (their value depends on outside labels)
  for (NodeId par : row_parents) {
    const std::vector<u32>& row = rows[par];
    i64 block = -1;
    if (hole != kNoNode) {
      const NodeId anchor = row_anchor(hole, rec->members[row[0]]);
      if (anchor != kNoNode)
        for (i64 pos = 0; pos < static_cast<i64>(row.size()); ++pos)
          if (rec->members[row[static_cast<size_t>(pos)]] == anchor) {
            block = pos;
            break;
          }
    }
    for (i64 s = 0; s < static_cast<i64>(row.size()); ++s) {
      if (s == block) continue;
      for (i32 p = 0; p < m_.hstates; ++p) {
        i32 st = p;
        for (i64 e = s; e < static_cast<i64>(row.size()); ++e) {
          if (e == block) break;
          st = m_.hstep(st, rho[row[static_cast<size_t>(e)]]);
          rec->tabs.hdense[(static_cast<size_t>(p) * stride + row[static_cast<size_t>(s)]) * stride +
                           row[static_cast<size_t>(e)]] = static_cast<u8>(st);
          ++writes;
        }
      }
    }
  }

  // vertical: climb from every member towards the zone top; climbs stop
  // before the branch point towards the hole (the stored pieces end there)
  for (i64 ai = 0; ai < cnt; ++ai) {
    const NodeId a = rec->members[static_cast<size_t>(ai)];
    NodeId w2 = kNoNode;
    bool full = true;
    if (hole != kNoNode && a != hole) {
      w2 = t_.lca(hole, a);
      full = (w2 == a);
    }
    std::vector<i32> vals(static_cast<size_t>(m_.states));
    for (i32 q = 0; q < m_.states; ++q) vals[static_cast<size_t>(q)] = q;
    NodeId prev = a;
    NodeId y = t_.parent(a);
    while (y != kNoNode && rec->local.count(y) != 0) {
      if (!full && t_.depth(y) <= t_.depth(w2)) break;
      const u32 yi = rec->local.at(y);
      i32 pre = m_.hstart;
      for (NodeId s = t_.fchild(y); s != prev; s = t_.rsib(s)) {
        pre = m_.hstep(pre, rho[rec->local.at(s)]);
        ledger_.step();
      }
      for (i32 q = 0; q < m_.states; ++q) {
        i32 p = m_.hstep(pre, vals[static_cast<size_t>(q)]);
        for (NodeId s2 = t_.rsib(prev); s2 != kNoNode; s2 = t_.rsib(s2))
          p = m_.hstep(p, rho[rec->local.at(s2)]);
        vals[static_cast<size_t>(q)] = m_.apply(p, label_of(y));
        rec->tabs.vdense[(static_cast<size_t>(q) * stride + static_cast<size_t>(ai)) * stride + yi] =
            static_cast<u8>(vals[static_cast<size_t>(q)]);
        ++writes;
      }
      prev = y;
      y = t_.parent(y);
    }
  }
  ledger_.touch(writes);
  rec->filled = true;
}

void TreeEngine::fill_upper(ZoneRecord* rec, const std::vector<i32>* init_rho) {
  PartitionRecord& pr = rec->p1;
  const i64 k = pr.k();
  DM_CHECK(k > 0, "upper record with no parts");
  rec->size = 0;
  for (ZoneRecord* p : pr.parts) rec->size += p->size;
  const i32 d0 = t_.depth(rec->zone.left);
  const NodeId hole = rec->zone.complete() ? kNoNode : rec->zone.lower;

  auto part_of = [&](NodeId x) -> i32 {
    if (x == kNoNode) return -1;
    for (i64 i = 0; i < k; ++i) {
      ledger_.step();
      if (zone_contains(t_, pr.parts[static_cast<size_t>(i)]->zone, x)) return static_cast<i32>(i);
    }
    return -1;
  };

  pr.zparent.assign(static_cast<size_t>(k), -1);
  pr.troot.assign(static_cast<size_t>(k), -1);
  pr.top_order.clear();
  for (i64 i = 0; i < k; ++i) {
    ZoneRecord* p = pr.parts[static_cast<size_t>(i)];
    DM_CHECK(p->part_index == static_cast<i32>(i), "part index out of order");
    if (t_.depth(p->zone.left) == d0) {
      pr.top_order.push_back(static_cast<i32>(i));
    } else {
      pr.zparent[static_cast<size_t>(i)] = part_of(t_.parent(p->zone.left));
      DM_CHECK(pr.zparent[static_cast<size_t>(i)] != -1, "inner part without a forest parent");
    }
  }
  std::sort(pr.top_order.begin(), pr.top_order.end(), [&](i32 x, i32 y) {
    return t_.sib_index(pr.parts[static_cast<size_t>(x)]->zone.left) <
           t_.sib_index(pr.parts[static_cast<size_t>(y)]->zone.left);
  });
  for (i64 i = 0; i < k; ++i) {
    i32 r = static_cast<i32>(i);
    while (pr.zparent[static_cast<size_t>(r)] != -1) r = pr.zparent[static_cast<size_t>(r)];
    pr.troot[static_cast<size_t>(i)] = r;
  }

  pr.zanc.assign(static_cast<size_t>(k * k), 0);
  pr.zprec.assign(static_cast<size_t>(k * k), 0);
  pr.zlca.assign(static_cast<size_t>(k * k), -1);
  pr.zancchild.assign(static_cast<size_t>(k * k), -1);
  pr.zsize.assign(static_cast<size_t>(k * k), -1);
  for (i64 i = 0; i < k; ++i) {
    const Zone& zi = pr.parts[static_cast<size_t>(i)]->zone;
    for (i64 j = 0; j < k; ++j) {
      const Zone& zj = pr.parts[static_cast<size_t>(j)]->zone;
      const size_t id = static_cast<size_t>(pr.idx(i, j));
      if (i != j && zi.lower != kNoNode && t_.is_strict_anc(zi.lower, zj.left)) {
        pr.zanc[id] = 1;
        pr.zancchild[id] = part_of(t_.anc_child(zi.lower, zj.left));
      }
      if (i != j && t_.at(zi.left).parent == t_.at(zj.left).parent &&
          t_.sib_index(zi.right) < t_.sib_index(zj.left))
        pr.zprec[id] = 1;
      pr.zlca[id] = part_of(t_.lca(zi.left, zj.left));
    }
  }
  {
    const i64 kt = static_cast<i64>(pr.top_order.size());
    std::vector<i64> cum(static_cast<size_t>(kt) + 1, 0);
    for (i64 p = 0; p < kt; ++p) {
      const Zone& zp = pr.parts[static_cast<size_t>(pr.top_order[static_cast<size_t>(p)])]->zone;
      cum[static_cast<size_t>(p) + 1] = cum[static_cast<size_t>(p)] + t_.num_desc_range(zp.left, zp.right);
    }
    i64 hpos = -1;
    if (hole != kNoNode) {
      const NodeId hrow = row_anchor(hole, rec->zone.left);
      for (i64 p = 0; p < kt && hpos < 0; ++p) {
        const Zone& zp = pr.parts[static_cast<size_t>(pr.top_order[static_cast<size_t>(p)])]->zone;
        if (t_.sib_index(zp.left) <= t_.sib_index(hrow) && t_.sib_index(hrow) <= t_.sib_index(zp.right))
          hpos = p;
      }
      DM_CHECK(hpos >= 0, "hole outside the top row");
    }
    for (i64 a = 0; a < kt; ++a)
      for (i64 b = a; b < kt; ++b) {
        i64 val = cum[static_cast<size_t>(b) + 1] - cum[static_cast<size_t>(a)];
        if (hpos >= a && hpos <= b) val -= t_.num_desc(hole) - 1;
        pr.zsize[static_cast<size_t>(pr.idx(pr.top_order[static_cast<size_t>(a)],
                                            pr.top_order[static_cast<size_t>(b)]))] = val;
      }
  }
  for (i64 i = 0; i < k; ++i) {
    ZoneRecord* p = pr.parts[static_cast<size_t>(i)];
    p->n_tops = t_.sib_index(p->zone.right) - t_.sib_index(p->zone.left) + 1;
    p->n_zleft = t_.depth(p->zone.left) == d0
                     ? t_.sib_index(p->zone.left) - t_.sib_index(rec->zone.left)
                     : t_.sib_index(p->zone.left);
    p->n_zdesc = 0;
    if (p->zone.lower != kNoNode) {
      p->n_zdesc = t_.num_desc(p->zone.lower) - 1;
      if (hole != kNoNode && t_.is_anc_or_self(p->zone.lower, hole))
        p->n_zdesc -= t_.num_desc(hole) - 1;
    }
  }
  ledger_.touch(3 * k + 5 * k * k);

  UpperKeys keys = derive_upper_keys(rec);
  rec->tabs.hdense.clear();
  rec->tabs.vdense.clear();
  rec->tabs.stride = 0;
  rec->tabs.hpairs.clear();
  rec->tabs.vpairs.clear();
  for (const auto& [a, b] : keys.hkeys) {
    std::vector<u8> vals(static_cast<size_t>(m_.hstates));
    for (i32 p = 0; p < m_.hstates; ++p)
      vals[static_cast<size_t>(p)] = static_cast<u8>(
          init_rho != nullptr ? oracle_row_run(t_, m_, *init_rho, p, a, b) : eval_row(p, a, b));
    ledger_.touch(m_.hstates);
    rec->tabs.hpairs.emplace(SpecialPairTables::key(a, b), std::move(vals));
  }
  for (const auto& [a, b] : keys.vkeys) {
    std::vector<u8> vals(static_cast<size_t>(m_.states));
    for (i32 q = 0; q < m_.states; ++q)
      vals[static_cast<size_t>(q)] = static_cast<u8>(
          init_rho != nullptr ? oracle_lift_run(t_, m_, *init_rho, q, a, b) : eval_lift(q, a, b));
    ledger_.touch(m_.states);
    rec->tabs.vpairs.emplace(SpecialPairTables::key(a, b), std::move(vals));
  }
  rec->filled = true;
}

// --- relabel ------------------------------------------------------------------

void TreeEngine::relabel(NodeId v, i32 label) {
  DM_REQUIRE(t_.valid(v), "relabel: bad node");
  DM_REQUIRE(label >= 0 && label < static_cast<i32>(m_.sigma.size()),
             "relabel: label outside the alphabet");
  ledger_.begin("relabel");
  if (label != t_.label(v)) {
    recompute_after_relabel(v, label);
    t_.relabel(v, label);
  }
  recomputation_tick(v);
  ledger_.set_violations(violations_);
  ledger_.end();
}

void TreeEngine::recompute_after_relabel(NodeId v, i32 sigma) {
  // Only records whose zone contains v store affected values. Their v-free
  // entries are read sources and stay as they are, so order does not matter.
  std::vector<ZoneRecord*> affected;
  for (ZoneRecord* r = primary_base(v); r != nullptr; r = r->owner) affected.push_back(r);
  for (const auto& th : threads_) {
    if (th->done) continue;
    for (ZoneRecord* r : th->built)
      if (r->alive && r->filled && zone_contains(t_, r->zone, v)) affected.push_back(r);
  }
  for (ZoneRecord* rec : affected) {
    if (rec->is_base(base_)) {
      fill_base(rec, nullptr, v, sigma);
      continue;
    }
    for (auto& kv : rec->tabs.hpairs) {
      const NodeId a = static_cast<NodeId>(kv.first >> 32);
      const NodeId b = static_cast<NodeId>(kv.first & 0xffffffffu);
      const NodeId w = row_anchor(v, a);
      if (w == kNoNode || t_.at(w).parent != t_.at(a).parent || t_.sib_index(w) < t_.sib_index(a) ||
          t_.sib_index(w) > t_.sib_index(b))
        continue;
      std::vector<u8> nv(static_cast<size_t>(m_.hstates));
      for (i32 p = 0; p < m_.hstates; ++p)
        nv[static_cast<size_t>(p)] = static_cast<u8>(evaluate_sequence(v, sigma, p, a, b));
      ledger_.touch(m_.hstates);
      kv.second = std::move(nv);
    }
    for (auto& kv : rec->tabs.vpairs) {
      const NodeId a = static_cast<NodeId>(kv.first >> 32);
      const NodeId b = static_cast<NodeId>(kv.first & 0xffffffffu);
      ledger_.step();
      if (t_.is_anc_or_self(a, v) || !t_.is_anc_or_self(b, v)) continue;
      std::vector<u8> nv(static_cast<size_t>(m_.states));
      for (i32 q = 0; q < m_.states; ++q)
        nv[static_cast<size_t>(q)] = static_cast<u8>(evaluate_path(v, sigma, q, b, a));
      ledger_.touch(m_.states);
      kv.second = std::move(nv);
    }
  }
}

// --- insertion ------------------------------------------------------------------

NodeId TreeEngine::add_child(NodeId parent, i32 label) {
  DM_REQUIRE(cfg_.mode == EngineMode::kDynamic, "add_child: engine is relabel-only");
  DM_REQUIRE(t_.valid(parent), "add_child: bad parent");
  DM_REQUIRE(label >= 0 && label < static_cast<i32>(m_.sigma.size()),
             "add_child: label outside the alphabet");
  ledger_.begin("add_child");
  const NodeId c = t_.add_last_child(parent, label);
  ++tree_size_;
  prints_.emplace_back();
  std::vector<ZoneRecord*> base_sweeps;
  std::vector<ZoneRecord*> upper_recs;
  membership_insert(parent, c, base_sweeps, upper_recs);
  for (ZoneRecord* r : base_sweeps) fill_base(r, nullptr, kNoNode, 0);
  for (ZoneRecord* r : upper_recs) recompute_upper_after_addchild(r, c);
  check_limits(c);
  recomputation_tick(c);
  ledger_.set_violations(violations_);
  ledger_.end();
  return c;
}

void TreeEngine::membership_insert(NodeId u, NodeId c, std::vector<ZoneRecord*>& base_sweeps,
                                   std::vector<ZoneRecord*>& upper_recs) {
  const NodeId ls = t_.lsib(c);

  // Zone-level membership rule: a pending zone holding u away from its hole
  // absorbs c by itself; otherwise the zone ending at c's left sibling grows
  // its top row by one.
  auto zone_join = [&](std::vector<Zone>& zl) -> bool {
    for (const Zone& z : zl) {
      ledger_.step();
      if (zone_contains(t_, z, u) && z.lower != u) return true;
    }
    return false;
  };
  auto zone_extend = [&](std::vector<Zone>& zl) -> bool {
    for (Zone& z : zl) {
      ledger_.step();
      if (z.right == ls) {
        z.right = c;
        return true;
      }
    }
    return false;
  };

  std::function<void(ZoneRecord*)> route = [&](ZoneRecord* rec) {
    rec->size += 1;
    if (rec->thread != nullptr && !rec->thread->done) {
      rec->thread->replacement->zone = rec->zone;
      route(rec->thread->replacement);
    }
    if (rec->is_base(base_)) {
      if (rec->filled) base_sweeps.push_back(rec);
      return;
    }
    if (rec->filled) upper_recs.push_back(rec);
    if (rec->p1.parts.empty()) {
      // partition still splitting: fix up the pending zone lists
      for (const auto& th : threads_) {
        if (th->done) continue;
        for (auto& task : th->splits) {
          if (task.rec != rec) continue;
          if (zone_join(task.todo) || zone_join(task.parts)) return;
          DM_CHECK(ls != kNoNode, "insertion without a left sibling in a pending split");
          DM_CHECK(zone_extend(task.todo) || zone_extend(task.parts),
                   "insertion fell outside every pending zone");
          return;
        }
      }
      DM_CHECK(false, "unfilled record without a pending split");
      return;
    }
    ZoneRecord* target = nullptr;
    ZoneRecord* holder = nullptr;
    for (ZoneRecord* p : rec->p1.parts) {
      ledger_.step();
      if (zone_contains(t_, p->zone, u)) {
        holder = p;
        break;
      }
    }
    if (holder != nullptr && holder->zone.lower != u) {
      target = holder;
    } else {
      DM_CHECK(ls != kNoNode, "insertion without a left sibling outside the base");
      for (ZoneRecord* p : rec->p1.parts) {
        ledger_.step();
        if (p->zone.right == ls) {
          p->zone.right = c;
          p->n_tops += 1;
          target = p;
          break;
        }
      }
    }
    DM_CHECK(target != nullptr, "insertion fell outside every part");
    if (rec->filled) {
      // maintain the zone-lifted counters of this partition
      for (ZoneRecord* p : rec->p1.parts) {
        ledger_.step();
        if (p->zone.lower != kNoNode && t_.is_strict_anc(p->zone.lower, c)) {
          p->n_zdesc += 1;
          ledger_.touch();
        }
      }
      const i32 tr = rec->p1.troot[static_cast<size_t>(target->part_index)];
      const auto& topo = rec->p1.top_order;
      i64 postr = -1;
      for (i64 x = 0; x < static_cast<i64>(topo.size()); ++x)
        if (topo[static_cast<size_t>(x)] == tr) {
          postr = x;
          break;
        }
      DM_CHECK(postr >= 0, "forest root missing from the top order");
      for (i64 i = 0; i <= postr; ++i)
        for (i64 j = postr; j < static_cast<i64>(topo.size()); ++j) {
          const size_t id = static_cast<size_t>(
              rec->p1.idx(topo[static_cast<size_t>(i)], topo[static_cast<size_t>(j)]));
          if (rec->p1.zsize[id] >= 0) {
            rec->p1.zsize[id] += 1;
            ledger_.touch();
          }
        }
    }
    route(target);
  };

  route(root_rec_);
}

i32 TreeEngine::new_leaf_state_at(NodeId c, NodeId x) {
  const i32 qc = m_.apply(m_.hstart, t_.label(c));
  if (x == c) return qc;
  const NodeId u = t_.parent(c);
  i32 p = eval_row(m_.hstart, t_.fchild(u), t_.lsib(c));
  p = m_.hstep(p, qc);
  const i32 qu = m_.apply(p, t_.label(u));  // c is the last child: nothing to its right
  return (x == u) ? qu : eval_lift(qu, u, x);
}

i32 TreeEngine::addchild_h_value(NodeId c, i32 p, NodeId a, NodeId b, NodeId w) {
  if (w == c) {
    DM_CHECK(b == c, "appended child must close its row");
    const i32 st = (a == c) ? p : eval_row(p, a, t_.lsib(c));
    return m_.hstep(st, m_.apply(m_.hstart, t_.label(c)));
  }
  i32 st = (w == a) ? p : eval_row(p, a, t_.lsib(w));
  st = m_.hstep(st, new_leaf_state_at(c, w));
  return (w == b) ? st : eval_row(st, t_.rsib(w), b);
}

i32 TreeEngine::addchild_v_value(NodeId c, i32 q, NodeId a, NodeId b) {
  // stored pair runs from a up to its ancestor b with the value at a fixed;
  // the new leaf c sits strictly inside the read region
  const NodeId u = t_.lca(c, a);
  DM_CHECK(u != c && u != kNoNode, "leaf cannot span the pair");
  const NodeId z = t_.anc_child(u, a);
  const NodeId zp = t_.anc_child(u, c);
  DM_CHECK(z != zp, "diverging branches must differ");
  const i32 liftq = (z == a) ? q : eval_lift(q, a, z);
  const i32 stc = new_leaf_state_at(c, zp);
  i32 pacc;
  if (t_.sib_index(z) < t_.sib_index(zp)) {
    pacc = eval_row(m_.hstart, t_.fchild(u), t_.lsib(z));
    pacc = m_.hstep(pacc, liftq);
    pacc = eval_row(pacc, t_.rsib(z), t_.lsib(zp));
    pacc = m_.hstep(pacc, stc);
    pacc = eval_row(pacc, t_.rsib(zp), t_.lchild(u));
  } else {
    pacc = eval_row(m_.hstart, t_.fchild(u), t_.lsib(zp));
    pacc = m_.hstep(pacc, stc);
    pacc = eval_row(pacc, t_.rsib(zp), t_.lsib(z));
    pacc = m_.hstep(pacc, liftq);
    pacc = eval_row(pacc, t_.rsib(z), t_.lchild(u));
  }
  const i32 qq = m_.apply(pacc, t_.label(u));
  return (u == b) ? qq : eval_lift(qq, u, b);
}

void TreeEngine::recompute_upper_after_addchild(ZoneRecord* rec, NodeId c) {
  UpperKeys keys = derive_upper_keys(rec);
  std::unordered_map<u64, std::vector<u8>> nh;
  std::unordered_map<u64, std::vector<u8>> nv;
  nh.reserve(keys.hkeys.size() * 2);
  nv.reserve(keys.vkeys.size() * 2);
  for (const auto& [a, b] : keys.hkeys) {
    const u64 kk = SpecialPairTables::key(a, b);
    const NodeId w = row_anchor(c, a);
    const bool hit = w != kNoNode && t_.at(w).parent == t_.at(a).parent &&
                     t_.sib_index(a) <= t_.sib_index(w) && t_.sib_index(w) <= t_.sib_index(b);
    if (!hit) {
      auto old = rec->tabs.hpairs.find(kk);
      DM_CHECK(old != rec->tabs.hpairs.end(), "unaffected pair missing from the old tables");
      nh.emplace(kk, old->second);
      continue;
    }
    std::vector<u8> vals(static_cast<size_t>(m_.hstates));
    for (i32 p = 0; p < m_.hstates; ++p)
      vals[static_cast<size_t>(p)] = static_cast<u8>(addchild_h_value(c, p, a, b, w));
    ledger_.touch(m_.hstates);
    nh.emplace(kk, std::move(vals));
  }
  for (const auto& [a, b] : keys.vkeys) {
    const u64 kk = SpecialPairTables::key(a, b);
    ledger_.step();
    const bool hit = !t_.is_anc_or_self(a, c) && t_.is_anc_or_self(b, c);
    if (!hit) {
      auto old = rec->tabs.vpairs.find(kk);
      DM_CHECK(old != rec->tabs.vpairs.end(), "unaffected pair missing from the old tables");
      nv.emplace(kk, old->second);
      continue;
    }
    std::vector<u8> vals(static_cast<size_t>(m_.states));
    for (i32 q = 0; q < m_.states; ++q)
      vals[static_cast<size_t>(q)] = static_cast<u8>(addchild_v_value(c, q, a, b));
    ledger_.touch(m_.states);
    nv.emplace(kk, std::move(vals));
  }
  rec->tabs.hpairs = std::move(nh);
  rec->tabs.vpairs = std::move(nv);
}

// --- queries ------------------------------------------------------------------

bool TreeEngine::query(NodeId v) {
  DM_REQUIRE(t_.valid(v), "query: bad node");
  ledger_.begin("query");
  const i32 q = eval_node_state(v);
  ledger_.touch_at_least(query_envelope_);
  ledger_.set_threads_live(live_threads());
  ledger_.set_violations(violations_);
  ledger_.end();
  return m_.accepting(q);
}

// --- rebuild threads ------------------------------------------------------------

ZoneRecord* TreeEngine::new_record(const Zone& z, int level, ZoneRecord* owner, i32 part_index) {
  auto up = std::make_unique<ZoneRecord>();
  ZoneRecord* r = up.get();
  r->zone = norm_zone(t_, z);
  r->level = level;
  r->owner = owner;
  r->part_index = part_index;
  r->seq = ++seq_counter_;
  arena_.push_back(std::move(up));
  return r;
}

RecomputationThread* TreeEngine::spawn_thread(ZoneRecord* target, i64 n_param, int m_div,
                                              bool overall, bool init_mode) {
  auto hold = std::make_unique<RecomputationThread>();
  RecomputationThread* th = hold.get();
  th->target = target;
  th->n_param = n_param;
  th->m_div = m_div;
  th->overall = overall;
  th->init_mode = init_mode;
  th->seq = ++seq_counter_;
  ZoneRecord* repl;
  if (target != nullptr) {
    repl = new_record(target->zone, target->level, target->owner, target->part_index);
    target->thread = th;
  } else {
    repl = root_rec_;
  }
  th->replacement = repl;
  repl->size = zone_size(t_, repl->zone);
  ledger_.step();
  th->built.push_back(repl);
  DM_CHECK(repl->level > base_, "rebuild target must own a partition");
  th->splits.push_back({repl, {repl->zone}, {}, m_for(n_param, repl->level - 1, m_div)});
  threads_.push_back(std::move(hold));
  return th;
}

void TreeEngine::run_round(RecomputationThread* th, const std::vector<i32>* init_rho) {
  if (th->done) return;
  ledger_.round();
  if (!th->split_done) {
    if (th->splits.empty()) {
      th->split_done = true;
      th->fills = th->built;
      std::stable_sort(th->fills.begin(), th->fills.end(),
                       [](const ZoneRecord* x, const ZoneRecord* y) { return x->level < y->level; });
      return;
    }
    RecomputationThread::SplitTask& task = th->splits.front();
    if (!task.todo.empty()) {
      const Zone zs = task.todo.front();
      task.todo.erase(task.todo.begin());
      std::vector<Zone> pieces;
      if (th->init_mode) {
        NaiveTreeFns fns(t_);
        ledger_.step(4);
        if (zone_size_fns(fns, zs) > task.m) pieces = partition_step(t_, fns, zs, task.m);
      } else {
        EngineTreeFns fns(*this);
        if (zone_size_fns(fns, zs) > task.m) pieces = partition_step(t_, fns, zs, task.m);
      }
      if (pieces.empty()) {
        task.parts.push_back(zs);
        return;
      }
      for (const Zone& raw : pieces) {
        const Zone pc = norm_zone(t_, raw);
        i64 psz;
        if (th->init_mode) {
          NaiveTreeFns fns(t_);
          psz = zone_size_fns(fns, pc);
        } else {
          EngineTreeFns fns(*this);
          psz = zone_size_fns(fns, pc);
        }
        if (psz > task.m)
          task.todo.push_back(pc);
        else
          task.parts.push_back(pc);
      }
      return;
    }
    ZoneRecord* rec = task.rec;
    DM_CHECK(rec->p1.parts.empty(), "partition already materialized");
    for (const Zone& pz : task.parts) {
      ZoneRecord* p = new_record(pz, rec->level - 1, rec, static_cast<i32>(rec->p1.parts.size()));
      p->size = zone_size(t_, p->zone);
      ledger_.step();
      rec->p1.parts.push_back(p);
      th->built.push_back(p);
      if (p->level > base_)
        th->splits.push_back({p, {p->zone}, {}, m_for(th->n_param, p->level - 1, th->m_div)});
    }
    th->splits.pop_front();
    return;
  }
  while (th->fill_cursor < th->fills.size() && !th->fills[th->fill_cursor]->alive) ++th->fill_cursor;
  if (th->fill_cursor < th->fills.size()) {
    ZoneRecord* rec = th->fills[th->fill_cursor++];
    if (rec->is_base(base_))
      fill_base(rec, init_rho, kNoNode, 0);
    else
      fill_upper(rec, init_rho);
    return;
  }
  commit_swap(th);
  th->done = true;
}

void TreeEngine::run_to_done(RecomputationThread* th, const std::vector<i32>* init_rho) {
  while (!th->done) run_round(th, init_rho);
}

void TreeEngine::commit_swap(RecomputationThread* th) {
  ZoneRecord* repl = th->replacement;
  if (th->target != nullptr) {
    ZoneRecord* old = th->target;
    repl->n_tops = old->n_tops;
    repl->n_zleft = old->n_zleft;
    repl->n_zdesc = old->n_zdesc;
    if (old->owner != nullptr) {
      DM_CHECK(old->owner->p1.parts[static_cast<size_t>(old->part_index)] == old,
               "replacement slot mismatch");
      old->owner->p1.parts[static_cast<size_t>(old->part_index)] = repl;
    } else {
      DM_CHECK(old == root_rec_, "top record without an owner");
      root_rec_ = repl;
    }
    if (old->thread == th) old->thread = nullptr;
    mark_dead(old);
  }
  for (ZoneRecord* r : th->built)
    if (r->alive) r->primary = true;
  if (th->overall) n_ = th->n_param;
  // zones may have grown while the copy was being built
  for (ZoneRecord* r : th->built) {
    if (!r->alive || !r->primary || r->level >= cfg_.theta.h || r->owner == nullptr) continue;
    const i64 cap = level_cap(r->level);
    if (r->size > cap) {
      ++violations_;
      ensure_rebuild(r->owner);
    } else if (2 * r->size > cap) {
      ensure_rebuild(r->owner);
    }
  }
}

void TreeEngine::mark_dead(ZoneRecord* rec) {
  rec->alive = false;
  rec->primary = false;
  if (rec->thread != nullptr && !rec->thread->done) kill_thread(rec->thread);
  for (ZoneRecord* p : rec->p1.parts) mark_dead(p);
}

void TreeEngine::kill_thread(RecomputationThread* th) {
  if (th->done) return;
  th->done = true;
  if (th->target != nullptr && th->target->thread == th) th->target->thread = nullptr;
  for (ZoneRecord* r : th->built)
    if (r->alive && !r->primary) mark_dead(r);
}

void TreeEngine::ensure_rebuild(ZoneRecord* owner_rec) {
  DM_CHECK(owner_rec != nullptr && !owner_rec->is_base(base_), "rebuild needs a partition owner");
  if (owner_rec->thread != nullptr && !owner_rec->thread->done) return;
  spawn_thread(owner_rec, n_, 2, false, false);
}

void TreeEngine::check_limits(NodeId touched) {
  bool rescan = true;
  while (rescan) {
    rescan = false;
    for (ZoneRecord* r = primary_base(touched); r != nullptr && r->owner != nullptr; r = r->owner) {
      const i64 cap = level_cap(r->level);
      ledger_.step();
      if (r->size > cap) {
        // hard breach: rebuild the enclosing partition from current sizes
        ++violations_;
        ZoneRecord* ow = r->owner;
        if (ow->thread != nullptr && !ow->thread->done) kill_thread(ow->thread);
        run_to_done(spawn_thread(ow, n_, 2, false, false), nullptr);
        rescan = true;
        break;
      }
      if (2 * r->size > cap) ensure_rebuild(r->owner);
    }
  }
  if (tree_size_ > n_) {
    ++violations_;
    RecomputationThread* th = root_rec_->thread;
    if (th != nullptr && (th->done || !th->overall)) {
      if (!th->done) kill_thread(th);
      th = nullptr;
    }
    if (th == nullptr) th = spawn_thread(root_rec_, 2 * n_, 2, true, false);
    run_to_done(th, nullptr);
  } else if (2 * tree_size_ >= n_) {
    if (root_rec_->thread == nullptr || root_rec_->thread->done)
      spawn_thread(root_rec_, 2 * n_, 2, true, false);
  }
}

void TreeEngine::recomputation_tick(NodeId touched) {
  for (auto it = threads_.begin(); it != threads_.end();) {
    RecomputationThread* th = it->get();
    const bool dead_target = th->target != nullptr && !th->target->alive;
    if (th->done || dead_target) {
      if (!th->done) kill_thread(th);
      if (th->target != nullptr && th->target->thread == th) th->target->thread = nullptr;
      it = threads_.erase(it);
    } else {
      ++it;
    }
  }
  std::vector<RecomputationThread*> act;
  for (const auto& up : threads_) {
    RecomputationThread* th = up.get();
    ledger_.step();
    if (!th->done && zone_contains(t_, th->replacement->zone, touched)) act.push_back(th);
  }
  std::sort(act.begin(), act.end(), [](const RecomputationThread* x, const RecomputationThread* y) {
    if (x->replacement->level != y->replacement->level)
      return x->replacement->level < y->replacement->level;
    return x->seq < y->seq;
  });
  for (RecomputationThread* th : act)
    for (int r = 0; r < cfg_.rounds_per_change && !th->done; ++r) run_round(th, nullptr);
  ledger_.set_threads_live(live_threads());
}

// --- verification ------------------------------------------------------------

std::vector<std::string> TreeEngine::verify_tables(i64 max_faults) {
  WorkLedger::MuteGuard mute(ledger_);
  std::vector<std::string> faults;
  auto fault = [&](const std::string& where, const std::string& what) {
    if (static_cast<i64>(faults.size()) < max_faults) faults.push_back(where + ": " + what);
  };
  const std::vector<i32> rho = dta_states(t_, m_);

  std::vector<i32> cover(static_cast<size_t>(t_.size()), 0);
  for (const auto& up : arena_) {
    const ZoneRecord& r = *up;
    if (r.alive && r.primary && r.is_base(base_))
      for (NodeId x : r.members) cover[static_cast<size_t>(x)] += 1;
  }
  for (NodeId x = 0; x < static_cast<NodeId>(t_.size()); ++x)
    if (cover[static_cast<size_t>(x)] != 1)
      fault("node " + std::to_string(x),
            "covered by " + std::to_string(cover[static_cast<size_t>(x)]) +
                " operable base records");

  for (const auto& up : arena_) {
    ZoneRecord* rec = up.get();
    if (!rec->alive || !rec->filled) continue;
    const std::string where =
        "zone " + zone_to_string(rec->zone) + " level " + std::to_string(rec->level);
    const NodeId hole = rec->zone.complete() ? kNoNode : rec->zone.lower;

    if (rec->primary && rec->level < cfg_.theta.h && rec->size > level_cap(rec->level))
      fault(where, "size " + std::to_string(rec->size) + " over cap " +
                       std::to_string(level_cap(rec->level)));

    if (rec->is_base(base_)) {
      const std::vector<NodeId> want = zone_members(t_, rec->zone);
      if (want != rec->members) {
        fault(where, "stale member list");
        continue;
      }
      const i64 cnt = static_cast<i64>(want.size());
      if (rec->size != cnt) fault(where, "stale size");
      if (rec->tabs.stride != cnt) {
        fault(where, "stale table stride");
        continue;
      }
      // structural tables
      for (i64 i = 0; i < cnt; ++i) {
        const NodeId vn = rec->members[static_cast<size_t>(i)];
        const NodeId par = t_.parent(vn);
        u32 expect = u32(-1);
        if (par != kNoNode) {
          auto it = rec->local.find(par);
          if (it != rec->local.end()) expect = it->second;
        }
        if (rec->fn.parz[static_cast<size_t>(i)] != expect)
          fault(where, "parent index wrong at node " + std::to_string(vn));
        i64 sz = 0;
        for (i64 j = 0; j < cnt; ++j)
          if (t_.is_anc_or_self(vn, rec->members[static_cast<size_t>(j)])) ++sz;
        if (rec->fn.size3[static_cast<size_t>(i)] != sz)
          fault(where, "zone subtree size wrong at node " + std::to_string(vn));
      }
      for (i64 i = 0; i < cnt; ++i) {
        const NodeId vn = rec->members[static_cast<size_t>(i)];
        i64 acc = 0;
        for (i64 j = 0; j <= i; ++j) {
          const NodeId wn = rec->members[static_cast<size_t>(j)];
          if (t_.at(wn).parent == t_.at(vn).parent && t_.sib_index(wn) <= t_.sib_index(vn))
            acc += rec->fn.size3[static_cast<size_t>(j)];
        }
        if (rec->fn.pref3[static_cast<size_t>(i)] != acc)
          fault(where, "row prefix wrong at node " + std::to_string(vn));
      }
      // pair tables
      const size_t stride = static_cast<size_t>(cnt);
      for (i64 ia = 0; ia < cnt; ++ia) {
        const NodeId a = rec->members[static_cast<size_t>(ia)];
        for (i64 ib = 0; ib < cnt; ++ib) {
          const NodeId b = rec->members[static_cast<size_t>(ib)];
          const bool row_pair =
              t_.at(a).parent == t_.at(b).parent && t_.sib_index(a) <= t_.sib_index(b);
          bool h_stored = row_pair;
          if (row_pair && hole != kNoNode) {
            const NodeId anchor = row_anchor(hole, a);
            if (anchor != kNoNode && t_.at(anchor).parent == t_.at(a).parent &&
                t_.sib_index(a) <= t_.sib_index(anchor) && t_.sib_index(anchor) <= t_.sib_index(b))
              h_stored = false;
          }
          for (i32 p = 0; p < m_.hstates; ++p) {
            const u8 got =
                rec->tabs.hdense[(static_cast<size_t>(p) * stride + static_cast<size_t>(ia)) *
                                     stride +
                                 static_cast<size_t>(ib)];
            if (!h_stored) {
              if (got != kNoVal)
                fault(where, "unexpected horizontal entry " + std::to_string(a) + ".." +
                                 std::to_string(b));
            } else if (got != static_cast<u8>(oracle_row_run(t_, m_, rho, p, a, b))) {
              fault(where, "horizontal value wrong for " + std::to_string(a) + ".." +
                               std::to_string(b) + " at state " + std::to_string(p));
            }
          }
          bool v_stored = b != a && t_.is_strict_anc(b, a);
          if (v_stored && hole != kNoNode) {
            const NodeId w2 = t_.lca(hole, a);
            if (w2 != a && t_.depth(b) <= t_.depth(w2)) v_stored = false;
          }
          for (i32 q = 0; q < m_.states; ++q) {
            const u8 got =
                rec->tabs.vdense[(static_cast<size_t>(q) * stride + static_cast<size_t>(ia)) *
                                     stride +
                                 static_cast<size_t>(ib)];
            if (!v_stored) {
              if (got != kNoVal)
                fault(where,
                      "unexpected vertical entry " + std::to_string(a) + "->" + std::to_string(b));
            } else if (got != static_cast<u8>(oracle_lift_run(t_, m_, rho, q, a, b))) {
              fault(where, "vertical value wrong for " + std::to_string(a) + "->" +
                               std::to_string(b) + " at state " + std::to_string(q));
            }
          }
        }
      }
      continue;
    }

    // upper record: partition, keys, values, counters
    PartitionRecord& pr = rec->p1;
    const i64 k = pr.k();
    if (k == 0) {
      fault(where, "no parts");
      continue;
    }
    {
      std::vector<NodeId> uni;
      for (ZoneRecord* p : pr.parts) {
        if (!p->alive) fault(where, "dead part");
        const std::vector<NodeId> pm = zone_members(t_, p->zone);
        uni.insert(uni.end(), pm.begin(), pm.end());
      }
      std::vector<NodeId> all = zone_members(t_, rec->zone);
      std::sort(uni.begin(), uni.end());
      std::sort(all.begin(), all.end());
      if (uni != all) fault(where, "parts do not tile the zone");
    }
    if (rec->primary) {
      const double cap_parts = 10.0 * std::pow(static_cast<double>(n_), 1.0 / cfg_.theta.h);
      if (static_cast<double>(k) > cap_parts)
        fault(where, "part count " + std::to_string(k) + " over the budget");
    }
    {
      UpperKeys keys = derive_upper_keys(rec);
      if (keys.hkeys.size() != rec->tabs.hpairs.size())
        fault(where, "horizontal key set size mismatch");
      if (keys.vkeys.size() != rec->tabs.vpairs.size())
        fault(where, "vertical key set size mismatch");
      for (const auto& [a, b] : keys.hkeys) {
        auto it = rec->tabs.hpairs.find(SpecialPairTables::key(a, b));
        if (it == rec->tabs.hpairs.end()) {
          fault(where, "missing horizontal pair " + std::to_string(a) + ".." + std::to_string(b));
          continue;
        }
        for (i32 p = 0; p < m_.hstates; ++p)
          if (it->second[static_cast<size_t>(p)] !=
              static_cast<u8>(oracle_row_run(t_, m_, rho, p, a, b)))
            fault(where, "horizontal value wrong for " + std::to_string(a) + ".." +
                             std::to_string(b) + " at state " + std::to_string(p));
      }
      for (const auto& [a, b] : keys.vkeys) {
        auto it = rec->tabs.vpairs.find(SpecialPairTables::key(a, b));
        if (it == rec->tabs.vpairs.end()) {
          fault(where, "missing vertical pair " + std::to_string(a) + "->" + std::to_string(b));
          continue;
        }
        for (i32 q = 0; q < m_.states; ++q)
          if (it->second[static_cast<size_t>(q)] !=
              static_cast<u8>(oracle_lift_run(t_, m_, rho, q, a, b)))
            fault(where, "vertical value wrong for " + std::to_string(a) + "->" +
                             std::to_string(b) + " at state " + std::to_string(q));
      }
    }
    {
      const i32 d0 = t_.depth(rec->zone.left);
      auto part_of = [&](NodeId x) -> i32 {
        if (x == kNoNode) return -1;
        for (i64 i = 0; i < k; ++i)
          if (zone_contains(t_, pr.parts[static_cast<size_t>(i)]->zone, x))
            return static_cast<i32>(i);
        return -1;
      };
      std::vector<i32> topo;
      for (i64 i = 0; i < k; ++i) {
        ZoneRecord* p = pr.parts[static_cast<size_t>(i)];
        const bool top = t_.depth(p->zone.left) == d0;
        const i32 zp = top ? -1 : part_of(t_.parent(p->zone.left));
        if (pr.zparent[static_cast<size_t>(i)] != zp) fault(where, "forest parent stale");
        if (top) topo.push_back(static_cast<i32>(i));
        const i64 tops = t_.sib_index(p->zone.right) - t_.sib_index(p->zone.left) + 1;
        if (p->n_tops != tops) fault(where, "top count stale");
        const i64 zl = top ? t_.sib_index(p->zone.left) - t_.sib_index(rec->zone.left)
                           : t_.sib_index(p->zone.left);
        if (p->n_zleft != zl) fault(where, "left count stale");
        i64 zd = 0;
        if (p->zone.lower != kNoNode) {
          zd = t_.num_desc(p->zone.lower) - 1;
          if (hole != kNoNode && t_.is_anc_or_self(p->zone.lower, hole))
            zd -= t_.num_desc(hole) - 1;
        }
        if (p->n_zdesc != zd) fault(where, "descendant count stale");
      }
      std::sort(topo.begin(), topo.end(), [&](i32 x, i32 y) {
        return t_.sib_index(pr.parts[static_cast<size_t>(x)]->zone.left) <
               t_.sib_index(pr.parts[static_cast<size_t>(y)]->zone.left);
      });
      if (topo != pr.top_order) fault(where, "top order stale");
      for (i64 i = 0; i < k; ++i) {
        i32 r = static_cast<i32>(i);
        while (pr.zparent[static_cast<size_t>(r)] != -1) r = pr.zparent[static_cast<size_t>(r)];
        if (pr.troot[static_cast<size_t>(i)] != r) fault(where, "forest root stale");
      }
      for (i64 i = 0; i < k; ++i) {
        const Zone& zi = pr.parts[static_cast<size_t>(i)]->zone;
        for (i64 j = 0; j < k; ++j) {
          const Zone& zj = pr.parts[static_cast<size_t>(j)]->zone;
          const size_t id = static_cast<size_t>(pr.idx(i, j));
          const bool anc =
              i != j && zi.lower != kNoNode && t_.is_strict_anc(zi.lower, zj.left);
          if ((pr.zanc[id] != 0) != anc) fault(where, "lifted ancestry stale");
          const i32 acc = anc ? part_of(t_.anc_child(zi.lower, zj.left)) : -1;
          if (pr.zancchild[id] != acc) fault(where, "lifted branch child stale");
          const bool prec = i != j && t_.at(zi.left).parent == t_.at(zj.left).parent &&
                            t_.sib_index(zi.right) < t_.sib_index(zj.left);
          if ((pr.zprec[id] != 0) != prec) fault(where, "lifted order stale");
          if (pr.zlca[id] != part_of(t_.lca(zi.left, zj.left))) fault(where, "lifted meet stale");
        }
      }
      for (i64 a = 0; a < static_cast<i64>(topo.size()); ++a)
        for (i64 b = 0; b < static_cast<i64>(topo.size()); ++b) {
          const size_t id = static_cast<size_t>(
              pr.idx(topo[static_cast<size_t>(a)], topo[static_cast<size_t>(b)]));
          if (b < a) {
            continue;
          }
          const Zone& za = pr.parts[static_cast<size_t>(topo[static_cast<size_t>(a)])]->zone;
          const Zone& zb = pr.parts[static_cast<size_t>(topo[static_cast<size_t>(b)])]->zone;
          i64 val = t_.num_desc_range(za.left, zb.right);
          if (hole != kNoNode) {
            const NodeId hrow = row_anchor(hole, rec->zone.left);
            if (t_.sib_index(za.left) <= t_.sib_index(hrow) &&
                t_.sib_index(hrow) <= t_.sib_index(zb.right))
              val -= t_.num_desc(hole) - 1;
          }
          if (pr.zsize[id] != val) fault(where, "lifted span count stale");
        }
    }
  }
  return faults;
}

}  // namespace dynmem
