#pragma once

#include "dynmem/zone.hpp"

namespace dynmem {

// The structural queries the partition step needs. The naive implementation
// chases pointers; the tree engine plugs in its table-backed (and
// work-charged) evaluators.
class TreeFns {
 public:
  virtual ~TreeFns() = default;
  virtual i64 num_desc(NodeId v) = 0;
  virtual i64 num_desc_range(NodeId u, NodeId v) = 0;  // ordered sibling range
  virtual bool is_anc_or_self(NodeId u, NodeId v) = 0;
  virtual NodeId lca(NodeId u, NodeId v) = 0;
  virtual NodeId anc_child(NodeId u, NodeId v) = 0;  // child of u towards v
};

class NaiveTreeFns final : public TreeFns {
 public:
  explicit NaiveTreeFns(const UnrankedTree& t) : t_(t) {}
  i64 num_desc(NodeId v) override { return t_.num_desc(v); }
  i64 num_desc_range(NodeId u, NodeId v) override { return t_.num_desc_range(u, v); }
  bool is_anc_or_self(NodeId u, NodeId v) override { return t_.is_anc_or_self(u, v); }
  NodeId lca(NodeId u, NodeId v) override { return t_.lca(u, v); }
  NodeId anc_child(NodeId u, NodeId v) override { return t_.anc_child(u, v); }

 private:
  const UnrankedTree& t_;
};

// Zone size through the provider (top row total minus the part cut below the
// connection node).
i64 zone_size_fns(TreeFns& f, const Zone& z);

// Splits S (|S| > m, m >= 2) into at most five disjoint zones covering S, at
// least one of size in [ceil(m/2), m], every part smaller than S. Descends
// through nodes whose S-mass exceeds ceil(m/2), extracts the smallest
// qualifying sibling-prefix, then repairs the remainder around the two
// defective nodes (the row parent and the old connection node).
std::vector<Zone> partition_step(const UnrankedTree& t, TreeFns& f, const Zone& S, i64 m);

// Repeatedly splits oversized zones (first oversized in list order) until
// every part has at most m nodes.
std::vector<Zone> partition_zone(const UnrankedTree& t, TreeFns& f, const Zone& S, i64 m);

struct PartitionHierarchy {
  struct ZNode {
    Zone zone;
    i32 level = 0;
    std::vector<i32> children;  // indices into `nodes`; empty at base level
  };
  Theta theta;
  i64 n = 0;  // size budget base (>= tree size, clamped to >= 2^h)
  int base_level = 1;
  std::vector<ZNode> nodes;
  i32 root = 0;

  i64 level_budget(int level) const { return ipow_floor(n, level, theta.h); }
};

// Builds the full hierarchy top-down: each zone of level l > base is
// partitioned with m = floor(n^((l-1)/h)). With pruned3 the recursion stops
// at level 3.
PartitionHierarchy build_hierarchy(const UnrankedTree& t, TreeFns& f, Theta theta, bool pruned3);

// One zone per line, indented two spaces per level below the root.
std::string dump_hierarchy(const UnrankedTree& t, const PartitionHierarchy& H);

}  // namespace dynmem
