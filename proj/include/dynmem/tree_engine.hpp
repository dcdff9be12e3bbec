#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynmem/automata.hpp"
#include "dynmem/ledger.hpp"
#include "dynmem/partition.hpp"
#include "dynmem/tree.hpp"
#include "dynmem/zone.hpp"

namespace dynmem {

enum class EngineMode : char {
  kDynamic,      // 3-pruned hierarchy, insertions allowed, recomputation threads
  kRelabelOnly,  // full hierarchy down to level 1, fixed tree shape
};

struct EngineConfig {
  Theta theta;
  int rounds_per_change = 4;
  // Size budget base; zone size limits are n^(l/h). 0 derives the smallest
  // legal value (dynamic: max(4|t|, 2^h); relabel-only: max(|t|, 2^h)).
  i64 n = 0;
  EngineMode mode = EngineMode::kDynamic;
};

// Pair tables of one zone record. Base records store both tables densely by
// member index (0xFF = slot holds no value: not a stored pair, or the span
// depends on labels below the zone's connection hole). Higher records store
// sparse maps keyed by the node pair, one value byte per automaton state.
struct SpecialPairTables {
  static constexpr u8 kNoVal = 0xFF;
  static u64 key(NodeId a, NodeId b) {
    return (static_cast<u64>(static_cast<u32>(a)) << 32) | static_cast<u32>(b);
  }
  std::unordered_map<u64, std::vector<u8>> hpairs;  // (a,b) -> value per horizontal state
  std::unordered_map<u64, std::vector<u8>> vpairs;  // (desc,anc) -> value per bottom-up state
  std::vector<u8> hdense;  // [(p * stride + ia) * stride + ib]
  std::vector<u8> vdense;  // [(q * stride + idesc) * stride + ianc]
  i64 stride = 0;
};

// Structural tables of a base record: in-zone subtree sizes with sibling-row
// prefix sums (descendant counts over member row ranges in O(1) reads) and
// the in-zone parent index (u32(-1): parent outside the zone).
struct TreeFunctionTables {
  std::vector<i64> size3;
  std::vector<i64> pref3;
  std::vector<u32> parz;
};

struct ZoneRecord;

// A partition of a zone into next-lower-level zones, with the zone-lifted
// structure over the parts stored densely (k x k, row-major).
struct PartitionRecord {
  std::vector<ZoneRecord*> parts;
  std::vector<u8> zanc;        // part i strictly zone-above part j
  std::vector<u8> zprec;       // all tops of i left of all tops of j
  std::vector<i32> zlca;       // index of the lowest part zone-above both (-1 none)
  std::vector<i32> zancchild;  // child part of i towards j (-1 undefined)
  std::vector<i64> zsize;      // owner-zone nodes inside-or-below the part span i..j (-1 undefined)
  std::vector<i32> zparent;    // enclosing part in the zone forest (-1 = top row)
  std::vector<i32> troot;      // top-row ancestor part in the zone forest
  std::vector<i32> top_order;  // top-row parts, left to right

  i64 k() const { return static_cast<i64>(parts.size()); }
  i64 idx(i64 i, i64 j) const { return i * k() + j; }
};

struct RecomputationThread;

struct ZoneRecord {
  Zone zone;
  int level = 0;
  bool alive = true;
  bool primary = false;  // member of the operable hierarchy
  bool filled = false;   // tables populated
  i64 size = 0;          // current node count
  i64 seq = 0;           // creation sequence (deterministic ordering)
  ZoneRecord* owner = nullptr;
  i32 part_index = -1;
  // Counters relative to the owner zone.
  i64 n_tops = 0;
  i64 n_zleft = 0;
  i64 n_zdesc = 0;
  // Base records only.
  std::vector<NodeId> members;  // document order
  std::unordered_map<NodeId, u32> local;
  TreeFunctionTables fn;
  // Records above the base level only.
  PartitionRecord p1;
  RecomputationThread* thread = nullptr;  // rebuild of this record's partition
  SpecialPairTables tabs;

  bool is_base(int base_level) const { return level == base_level; }
};

// Per-node back references into the base records containing the node (the
// operable copy plus any in-progress ones). Dead references are pruned
// lazily on access.
struct FingerPrint {
  struct Ref {
    ZoneRecord* rec = nullptr;
    u32 idx = 0;
  };
  std::vector<Ref> refs;
};

// One in-flight rebuild: replaces target's partition subtree with a freshly
// partitioned and filled copy rooted at `replacement`. Runs one unit of work
// per round: a single partition step, one record's table fill, or the final
// swap. The overall variant doubles the size budget when it commits.
struct RecomputationThread {
  ZoneRecord* target = nullptr;
  ZoneRecord* replacement = nullptr;
  i64 n_param = 0;
  int m_div = 2;  // part size target = level cap / m_div (4 = strong start)
  bool overall = false;
  bool init_mode = false;  // fill from a precomputed state array (first build)
  i64 seq = 0;
  bool done = false;

  struct SplitTask {
    ZoneRecord* rec = nullptr;
    std::vector<Zone> todo;
    std::vector<Zone> parts;
    i64 m = 0;
  };
  std::deque<SplitTask> splits;
  bool split_done = false;
  std::vector<ZoneRecord*> built;  // creation (BFS) order
  std::vector<ZoneRecord*> fills;  // fill order: level ascending
  size_t fill_cursor = 0;
};

// Incremental evaluator for a deterministic bottom-up tree automaton under
// relabels and last-child insertions. Maintains a hierarchy of zone records
// with per-zone pair tables; change operations recompute exactly the stored
// values whose span contains the changed node, and queries stitch node
// states out of the tables without touching the rest of the tree.
class TreeEngine {
 public:
  TreeEngine(UnrankedTree t, Dta dta, EngineConfig cfg);
  TreeEngine(const TreeEngine&) = delete;
  TreeEngine& operator=(const TreeEngine&) = delete;
  ~TreeEngine();

  // Change operations.
  void relabel(NodeId v, i32 label);
  NodeId add_child(NodeId parent, i32 label);
  // Subtree acceptance at v. Charged at a fixed work envelope (a function of
  // the hierarchy height and the automaton size only).
  bool query(NodeId v);

  // Evaluation procedures over the stored tables (non-mutating).
  i32 eval_node_state(NodeId v);                  // bottom-up state of v
  i32 eval_row(i32 p, NodeId a, NodeId b);        // horizontal run over siblings a..b
  i32 eval_lift(i32 q, NodeId u, NodeId v);       // value at ancestor v when u's state := q
  // Post-relabel evaluators: read the current tables but treat v as if its
  // label were sigma. Used by relabel itself and usable standalone.
  i32 evaluate_state(NodeId v, i32 sigma, NodeId x);
  i32 evaluate_sequence(NodeId v, i32 sigma, i32 p, NodeId x, NodeId y);
  i32 evaluate_path(NodeId v, i32 sigma, i32 q, NodeId x, NodeId y);  // x strict anc of y
  // Structural evaluators over the stored tables.
  NodeId eval_child(NodeId v, i64 k);       // 0-based k-th child
  i64 eval_num_desc(NodeId u, NodeId v);    // subtree span count over siblings u..v
  // Runs rounds_per_change rounds of every live thread whose zone contains
  // the touched node. Called by relabel/add_child; public for drivers.
  void recomputation_tick(NodeId touched);

  // Introspection.
  const UnrankedTree& tree() const { return t_; }
  const Dta& dta() const { return m_; }
  const EngineConfig& config() const { return cfg_; }
  int base_level() const { return base_; }
  i64 size_budget() const { return n_; }
  i64 level_cap(int level) const;  // floor(n^(level/h))
  i64 violations() const { return violations_; }
  i64 live_threads() const;
  WorkLedger& ledger() { return ledger_; }
  const WorkLedger& ledger() const { return ledger_; }
  void for_each_record(const std::function<void(const ZoneRecord&)>& fn) const;
  const ZoneRecord* record_of(NodeId v, int level) const;  // operable chain

  // Checks every stored entry, counter and structural invariant against the
  // naive oracles. Returns human-readable fault lines (empty = clean).
  // Ledger-muted.
  std::vector<std::string> verify_tables(i64 max_faults = 16);

 private:
  friend class EngineTreeFns;

  // --- chain / navigation helpers ---
  ZoneRecord* primary_base(NodeId v);
  ZoneRecord* record_at_level(NodeId v, int level);
  ZoneRecord* meet_record(NodeId a, NodeId b);
  NodeId ancestor_at_depth(NodeId v, i32 depth);
  NodeId row_anchor(NodeId below, NodeId row_node);  // ancestor-or-self of `below` in row_node's row
  NodeId top_anchor(const ZoneRecord* rec, NodeId v);
  int max_lower_level(NodeId v);  // max level with v == lower(Z^level(v)); base-1 if none

  // --- table reads ---
  i32 read_h(ZoneRecord* rec, i32 p, NodeId a, NodeId b);
  i32 read_v(ZoneRecord* rec, i32 q, NodeId a, NodeId b);
  i32 row_in_zone(ZoneRecord* rec, i32 p, NodeId a, NodeId b);
  i32 lift_in_zone(ZoneRecord* rec, i32 q, NodeId a, NodeId b);
  i32 bridge_step(i32 q, NodeId child);
  i64 span_count(ZoneRecord* rec, NodeId a, NodeId b);

  // --- fills ---
  struct UpperKeys {
    std::vector<std::pair<NodeId, NodeId>> hkeys;
    std::vector<std::pair<NodeId, NodeId>> vkeys;
  };
  UpperKeys derive_upper_keys(ZoneRecord* rec);
  void fill_base(ZoneRecord* rec, const std::vector<i32>* init_rho, NodeId pend_node,
                 i32 pend_label);
  void fill_upper(ZoneRecord* rec, const std::vector<i32>* init_rho);

  // --- change recomputation ---
  void recompute_after_relabel(NodeId v, i32 sigma);
  i32 new_leaf_state_at(NodeId c, NodeId x);
  i32 addchild_h_value(NodeId c, i32 p, NodeId a, NodeId b, NodeId w);
  i32 addchild_v_value(NodeId c, i32 q, NodeId a, NodeId b);
  void recompute_upper_after_addchild(ZoneRecord* rec, NodeId c);
  void membership_insert(NodeId u, NodeId c, std::vector<ZoneRecord*>& base_sweeps,
                         std::vector<ZoneRecord*>& upper_recs);

  // --- threads ---
  ZoneRecord* new_record(const Zone& z, int level, ZoneRecord* owner, i32 part_index);
  RecomputationThread* spawn_thread(ZoneRecord* target, i64 n_param, int m_div, bool overall,
                                    bool init_mode);
  void run_round(RecomputationThread* th, const std::vector<i32>* init_rho);
  void run_to_done(RecomputationThread* th, const std::vector<i32>* init_rho);
  void commit_swap(RecomputationThread* th);
  void mark_dead(ZoneRecord* rec);
  void kill_thread(RecomputationThread* th);
  void ensure_rebuild(ZoneRecord* owner_rec);
  void check_limits(NodeId touched);
  i64 m_for(i64 n_param, int level, int m_div) const;

  UnrankedTree t_;
  Dta m_;
  EngineConfig cfg_;
  int base_ = 3;
  i64 n_ = 0;
  i64 tree_size_ = 0;
  i64 violations_ = 0;
  i64 seq_counter_ = 0;
  i64 query_envelope_ = 0;
  ZoneRecord* root_rec_ = nullptr;
  std::vector<std::unique_ptr<ZoneRecord>> arena_;
  std::vector<FingerPrint> prints_;
  std::vector<std::unique_ptr<RecomputationThread>> threads_;
  WorkLedger ledger_;
};

}  // namespace dynmem
