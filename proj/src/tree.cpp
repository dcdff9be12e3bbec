#include "dynmem/tree.hpp"

namespace dynmem {

const NodeRec& UnrankedTree::at(NodeId v) const {
  DM_CHECK(valid(v), "tree: bad node id");
  return nodes_[static_cast<size_t>(v)];
}

NodeId UnrankedTree::init_root(i32 label) {
  DM_CHECK(nodes_.empty(), "tree: init_root on non-empty tree");
  NodeRec r;
  r.label = label;
  nodes_.push_back(r);
  root_ = 0;
  return root_;
}

NodeId UnrankedTree::add_last_child(NodeId parent, i32 label) {
  DM_CHECK(valid(parent), "tree: add_last_child to bad parent");
  NodeId id = static_cast<NodeId>(nodes_.size());
  NodeRec r;
  r.label = label;
  r.parent = parent;
  NodeRec& p = nodes_[static_cast<size_t>(parent)];
  r.depth = p.depth + 1;
  r.sib_index = p.nchildren;
  r.lsib = p.lchild;
  nodes_.push_back(r);

  NodeRec& p2 = nodes_[static_cast<size_t>(parent)];
  if (p2.lchild != kNoNode) nodes_[static_cast<size_t>(p2.lchild)].rsib = id;
  if (p2.fchild == kNoNode) p2.fchild = id;
  p2.lchild = id;
  p2.nchildren += 1;
  for (NodeId a = parent; a != kNoNode; a = nodes_[static_cast<size_t>(a)].parent)
    nodes_[static_cast<size_t>(a)].subtree_size += 1;
  return id;
}

void UnrankedTree::relabel(NodeId v, i32 label) {
  DM_CHECK(valid(v), "tree: relabel bad node");
  nodes_[static_cast<size_t>(v)].label = label;
}

bool UnrankedTree::is_anc_or_self(NodeId u, NodeId v) const {
  const NodeRec& ur = at(u);
  NodeId w = v;
  while (at(w).depth > ur.depth) w = at(w).parent;
  return w == u;
}

NodeId UnrankedTree::lca(NodeId u, NodeId v) const {
  while (at(u).depth > at(v).depth) u = at(u).parent;
  while (at(v).depth > at(u).depth) v = at(v).parent;
  while (u != v) {
    u = at(u).parent;
    v = at(v).parent;
  }
  return u;
}

NodeId UnrankedTree::anc_child(NodeId u, NodeId v) const {
  DM_CHECK(is_strict_anc(u, v), "tree: anc_child needs strict ancestor");
  NodeId w = v;
  while (at(w).parent != u) w = at(w).parent;
  return w;
}

bool UnrankedTree::sib_before_eq(NodeId u, NodeId v) const {
  return at(u).parent == at(v).parent && at(u).parent != kNoNode &&
         at(u).sib_index <= at(v).sib_index;
}

NodeId UnrankedTree::kth_child(NodeId u, i64 k) const {
  DM_CHECK(k >= 0 && k < at(u).nchildren, "tree: kth_child out of range");
  NodeId c = at(u).fchild;
  for (i64 i = 0; i < k; ++i) c = at(c).rsib;
  return c;
}

i64 UnrankedTree::num_desc_range(NodeId u, NodeId v) const {
  DM_CHECK(u == v || sib_before_eq(u, v), "tree: num_desc_range needs ordered siblings");
  i64 total = 0;
  for (NodeId c = u;; c = at(c).rsib) {
    total += at(c).subtree_size;
    if (c == v) break;
  }
  return total;
}

}  // namespace dynmem
