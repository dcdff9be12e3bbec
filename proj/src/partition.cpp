#include "dynmem/partition.hpp"

#include <sstream>

namespace dynmem {

namespace {

// Descendants of x inside the zone whose connection node is `lower`
// (kNoNode = complete). x must be a zone member.
i64 mass_in_zone(TreeFns& f, NodeId x, NodeId lower) {
  i64 m = f.num_desc(x);
  if (lower != kNoNode && f.is_anc_or_self(x, lower)) m -= f.num_desc(lower) - 1;
  return m;
}

// Top of the row u..v that is ancestor-or-self of x, kNoNode if none.
NodeId row_anchor(const UnrankedTree& t, TreeFns& f, NodeId u, NodeId v, NodeId x) {
  if (x == kNoNode) return kNoNode;
  NodeId p = t.parent(u);
  NodeId cand;
  if (p == kNoNode) {
    cand = u;  // root row
  } else {
    if (x == p || !f.is_anc_or_self(p, x)) return kNoNode;
    cand = f.anc_child(p, x);
  }
  if (t.sib_index(cand) < t.sib_index(u) || t.sib_index(cand) > t.sib_index(v)) return kNoNode;
  return f.is_anc_or_self(cand, x) ? cand : kNoNode;
}

void push_if_nonempty(std::vector<Zone>& out, Zone z) {
  if (z.left == kNoNode) return;
  out.push_back(z);
}

}  // namespace

i64 zone_size_fns(TreeFns& f, const Zone& z) {
  i64 total = f.num_desc_range(z.left, z.right);
  if (z.lower != kNoNode) total -= f.num_desc(z.lower) - 1;
  return total;
}

std::vector<Zone> partition_step(const UnrankedTree& t, TreeFns& f, const Zone& S, i64 m) {
  DM_REQUIRE(m >= 2, "partition_step: m must be >= 2");
  check_zone(t, S);
  DM_REQUIRE(zone_size_fns(f, S) > m, "partition_step: zone not larger than m");
  const i64 half = (m + 1) / 2;  // ceil(m/2)
  auto mass = [&](NodeId x) { return mass_in_zone(f, x, S.lower); };
  auto large = [&](NodeId x) { return mass(x) > half; };

  // Descend through heavy nodes; each heavy node's children are zone members
  // (the connection node has mass 1 and is never heavy).
  NodeId u = S.left, v = S.right;
  NodeId w_prev = kNoNode;  // parent of the current row once we descended
  for (;;) {
    NodeId heavy = kNoNode;
    for (NodeId x = u;; x = t.rsib(x)) {
      if (large(x)) {
        heavy = x;
        break;
      }
      if (x == v) break;
    }
    if (heavy == kNoNode) break;
    w_prev = heavy;
    u = t.fchild(heavy);
    v = t.lchild(heavy);
    DM_CHECK(u != kNoNode, "partition_step: heavy node without children");
  }

  // Smallest sibling prefix u..xj with mass >= ceil(m/2); the row's nodes are
  // all light, so the prefix mass is also <= 2*ceil(m/2)-1 <= m.
  NodeId xj = kNoNode;
  i64 prefix = 0;
  for (NodeId x = u;; x = t.rsib(x)) {
    prefix += mass(x);
    if (prefix >= half) {
      xj = x;
      break;
    }
    if (x == v) break;
  }
  DM_CHECK(xj != kNoNode, "partition_step: no qualifying prefix");
  DM_CHECK(prefix <= m, "partition_step: prefix overshot m");

  std::vector<Zone> parts;
  auto sub_lower = [&](NodeId a, NodeId b) {
    // S.lower when it lies under the row range a..b
    return row_anchor(t, f, a, b, S.lower) != kNoNode ? S.lower : kNoNode;
  };
  push_if_nonempty(parts, Zone{u, xj, sub_lower(u, xj)});                       // S1 = D_j
  if (xj != v) push_if_nonempty(parts, Zone{t.rsib(xj), v, sub_lower(t.rsib(xj), v)});  // S2

  if (w_prev == kNoNode) return parts;  // D_k was the whole zone

  // S' = S minus the subtrees of the row u..v; w_prev lost all children.
  bool vs_in_rest = S.lower != kNoNode && row_anchor(t, f, u, v, S.lower) == kNoNode;
  if (!vs_in_rest) {
    parts.push_back(Zone{S.left, S.right, w_prev});
    return parts;
  }

  // Two defective nodes: w_prev and the old connection node.
  NodeId top_w = row_anchor(t, f, S.left, S.right, w_prev);
  NodeId top_vs = row_anchor(t, f, S.left, S.right, S.lower);
  DM_CHECK(top_w != kNoNode && top_vs != kNoNode, "partition_step: defects without tops");
  if (top_w != top_vs) {
    // Different components: the tree of w_prev, then the tops on each side.
    parts.push_back(Zone{top_w, top_w, w_prev});
    if (top_w != S.left)
      push_if_nonempty(parts,
                       Zone{S.left, t.lsib(top_w),
                            t.sib_index(top_vs) < t.sib_index(top_w) ? S.lower : kNoNode});
    if (top_w != S.right)
      push_if_nonempty(parts,
                       Zone{t.rsib(top_w), S.right,
                            t.sib_index(top_vs) > t.sib_index(top_w) ? S.lower : kNoNode});
    return parts;
  }

  // Same component: split below the lowest common ancestor z of the defects.
  NodeId z = f.lca(w_prev, S.lower);
  DM_CHECK(z != w_prev && z != S.lower, "partition_step: defects must hang below their lca");
  NodeId cw = f.anc_child(z, w_prev);
  NodeId cv = f.anc_child(z, S.lower);
  DM_CHECK(cw != cv, "partition_step: lca children must differ");
  bool w_first = t.sib_index(cw) < t.sib_index(cv);
  NodeId cmin = w_first ? cw : cv;
  parts.push_back(Zone{t.fchild(z), cmin, w_first ? w_prev : S.lower});
  parts.push_back(Zone{t.rsib(cmin), t.lchild(z), w_first ? S.lower : w_prev});
  parts.push_back(Zone{S.left, S.right, z});
  return parts;
}

std::vector<Zone> partition_zone(const UnrankedTree& t, TreeFns& f, const Zone& S, i64 m) {
  std::vector<Zone> parts{S};
  std::vector<i64> sizes{zone_size_fns(f, S)};
  for (;;) {
    size_t over = parts.size();
    for (size_t i = 0; i < parts.size(); ++i) {
      if (sizes[i] > m) {
        over = i;
        break;
      }
    }
    if (over == parts.size()) return parts;
    std::vector<Zone> split = partition_step(t, f, parts[over], m);
    std::vector<i64> split_sizes;
    split_sizes.reserve(split.size());
    for (const Zone& z : split) split_sizes.push_back(zone_size_fns(f, z));
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(over));
    sizes.erase(sizes.begin() + static_cast<std::ptrdiff_t>(over));
    parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(over), split.begin(), split.end());
    sizes.insert(sizes.begin() + static_cast<std::ptrdiff_t>(over), split_sizes.begin(),
                 split_sizes.end());
  }
}

PartitionHierarchy build_hierarchy(const UnrankedTree& t, TreeFns& f, Theta theta, bool pruned3) {
  theta.validate();
  DM_REQUIRE(theta.h >= 4, "build_hierarchy: the zone hierarchy needs h >= 4");
  PartitionHierarchy H;
  H.theta = theta;
  H.n = std::max<i64>(t.size(), ipow(2, theta.h));
  H.base_level = pruned3 ? 3 : 1;
  H.nodes.push_back({Zone{t.root(), t.root(), kNoNode}, theta.h, {}});
  H.root = 0;
  // Top-down, breadth-first in arena order.
  for (size_t i = 0; i < H.nodes.size(); ++i) {
    int level = H.nodes[i].level;
    if (level <= H.base_level) continue;
    i64 m = std::max<i64>(2, H.level_budget(level - 1));
    Zone zone = H.nodes[i].zone;
    std::vector<Zone> parts =
        zone_size_fns(f, zone) > m ? partition_zone(t, f, zone, m) : std::vector<Zone>{zone};
    for (const Zone& p : parts) {
      H.nodes[i].children.push_back(static_cast<i32>(H.nodes.size()));
      H.nodes.push_back({p, level - 1, {}});
    }
  }
  return H;
}

std::string dump_hierarchy(const UnrankedTree& t, const PartitionHierarchy& H) {
  std::ostringstream out;
  const char* kind_names[] = {"tree", "non-tree", "tree/open", "non-tree/open"};
  // Depth-first from the root so the text nests like the hierarchy.
  std::vector<i32> stack{H.root};
  while (!stack.empty()) {
    i32 i = stack.back();
    stack.pop_back();
    const auto& nd = H.nodes[static_cast<size_t>(i)];
    for (int k = H.theta.h; k > nd.level; --k) out << "  ";
    out << "L" << nd.level << " " << kind_names[static_cast<int>(nd.zone.kind())] << " "
        << zone_to_string(nd.zone) << " size=" << zone_size(t, nd.zone) << "\n";
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) stack.push_back(*it);
  }
  return out.str();
}

}  // namespace dynmem
