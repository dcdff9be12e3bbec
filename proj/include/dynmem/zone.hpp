#pragma once

#include "dynmem/tree.hpp"

namespace dynmem {

// theta = 1/h. Zone levels range over 1..h (3..h when 3-pruned). The string
// engines accept any h >= 2; the tree partition additionally needs h >= 4.
struct Theta {
  int h = 4;
  void validate() const { DM_REQUIRE(h >= 2, "theta: need h >= 2 (theta = 1/h)"); }
  double value() const { return 1.0 / h; }
};

enum class ZoneKind : char {
  kCompleteTree,
  kCompleteNonTree,
  kIncompleteTree,
  kIncompleteNonTree,
};

// A zone is the union of the subtrees of the sibling row left..right, minus
// the strict descendants of `lower`. `lower` (the vertical connection node)
// is itself a member; kNoNode means the zone is complete. With this shape
// every member except `lower` automatically has all of its children inside.
struct Zone {
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeId lower = kNoNode;

  bool complete() const { return lower == kNoNode; }
  bool tree() const { return left == right; }
  ZoneKind kind() const {
    if (tree()) return complete() ? ZoneKind::kCompleteTree : ZoneKind::kIncompleteTree;
    return complete() ? ZoneKind::kCompleteNonTree : ZoneKind::kIncompleteNonTree;
  }
  bool operator==(const Zone&) const = default;
};

// Structural checks and naive (pointer-chasing) zone helpers.
void check_zone(const UnrankedTree& t, const Zone& z);
bool zone_contains(const UnrankedTree& t, const Zone& z, NodeId v);
i64 zone_size(const UnrankedTree& t, const Zone& z);
// Members in document order (per top subtree, preorder).
std::vector<NodeId> zone_members(const UnrankedTree& t, const Zone& z);
// Top node of z that is ancestor-or-self of `lower`; the zone's "upper"
// boundary. Requires an incomplete zone.
NodeId zone_upper(const UnrankedTree& t, const Zone& z);
std::string zone_to_string(const Zone& z);

}  // namespace dynmem
