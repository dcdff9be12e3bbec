#pragma once

#include "dynmem/util.hpp"

namespace dynmem {

using NodeId = i32;
inline constexpr NodeId kNoNode = -1;

struct NodeRec {
  i32 label = 0;
  NodeId parent = kNoNode;
  NodeId lsib = kNoNode;    // previous sibling
  NodeId rsib = kNoNode;    // next sibling
  NodeId fchild = kNoNode;  // first child
  NodeId lchild = kNoNode;  // last child
  i32 nchildren = 0;
  i32 depth = 0;      // root has depth 0
  i32 sib_index = 0;  // 0-based position among siblings; stable (append-only)
  i64 subtree_size = 1;
};

// Rooted ordered unranked tree. Grow-only: nodes are never removed and ids
// are dense in creation order. New children are appended on the right.
class UnrankedTree {
 public:
  NodeId init_root(i32 label);
  NodeId add_last_child(NodeId parent, i32 label);
  void relabel(NodeId v, i32 label);

  i64 size() const { return static_cast<i64>(nodes_.size()); }
  NodeId root() const { return root_; }
  bool valid(NodeId v) const { return v >= 0 && v < static_cast<NodeId>(nodes_.size()); }
  const NodeRec& at(NodeId v) const;

  i32 label(NodeId v) const { return at(v).label; }
  NodeId parent(NodeId v) const { return at(v).parent; }
  NodeId fchild(NodeId v) const { return at(v).fchild; }
  NodeId lchild(NodeId v) const { return at(v).lchild; }
  NodeId lsib(NodeId v) const { return at(v).lsib; }
  NodeId rsib(NodeId v) const { return at(v).rsib; }
  i32 nchildren(NodeId v) const { return at(v).nchildren; }
  i32 depth(NodeId v) const { return at(v).depth; }
  i32 sib_index(NodeId v) const { return at(v).sib_index; }

  // Reference implementations of the structural predicates. All walk pointer
  // chains; none is asymptotically clever.
  bool is_anc_or_self(NodeId u, NodeId v) const;  // u on the root path of v
  bool is_strict_anc(NodeId u, NodeId v) const { return u != v && is_anc_or_self(u, v); }
  NodeId lca(NodeId u, NodeId v) const;
  // Child of u on the path towards v; requires u strict ancestor of v.
  NodeId anc_child(NodeId u, NodeId v) const;
  // Same parent and u at-or-left-of v.
  bool sib_before_eq(NodeId u, NodeId v) const;
  // 0-based k-th child.
  NodeId kth_child(NodeId u, i64 k) const;
  // Nodes in the subtree of v, including v.
  i64 num_desc(NodeId v) const { return at(v).subtree_size; }
  // Nodes in the subtrees of the sibling range u..v inclusive (u,v siblings,
  // u at-or-left-of v).
  i64 num_desc_range(NodeId u, NodeId v) const;

 private:
  std::vector<NodeRec> nodes_;
  NodeId root_ = kNoNode;
};

}  // namespace dynmem
