#include "dynmem/zone.hpp"

#include <sstream>

namespace dynmem {

void check_zone(const UnrankedTree& t, const Zone& z) {
  DM_REQUIRE(t.valid(z.left) && t.valid(z.right), "zone: bad boundary node");
  if (z.left != z.right)
    DM_REQUIRE(t.sib_before_eq(z.left, z.right), "zone: boundaries must be ordered siblings");
  if (z.lower != kNoNode) {
    DM_REQUIRE(t.valid(z.lower), "zone: bad lower node");
    bool under = false;
    for (NodeId x = z.left;; x = t.rsib(x)) {
      if (t.is_anc_or_self(x, z.lower)) {
        under = true;
        break;
      }
      if (x == z.right) break;
    }
    DM_REQUIRE(under, "zone: lower node must lie under the boundary row");
  }
}

bool zone_contains(const UnrankedTree& t, const Zone& z, NodeId v) {
  if (z.lower != kNoNode && z.lower != v && t.is_anc_or_self(z.lower, v)) return false;
  for (NodeId x = z.left;; x = t.rsib(x)) {
    if (t.is_anc_or_self(x, v)) return true;
    if (x == z.right) break;
  }
  return false;
}

i64 zone_size(const UnrankedTree& t, const Zone& z) {
  check_zone(t, z);
  i64 total = t.num_desc_range(z.left, z.right);
  if (z.lower != kNoNode) total -= t.num_desc(z.lower) - 1;
  return total;
}

std::vector<NodeId> zone_members(const UnrankedTree& t, const Zone& z) {
  std::vector<NodeId> out;
  std::vector<NodeId> stack;
  for (NodeId x = z.right;; x = t.lsib(x)) {
    stack.push_back(x);
    if (x == z.left) break;
  }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    out.push_back(v);
    if (v == z.lower) continue;
    for (NodeId c = t.lchild(v); c != kNoNode; c = t.lsib(c)) stack.push_back(c);
  }
  return out;
}

NodeId zone_upper(const UnrankedTree& t, const Zone& z) {
  DM_CHECK(z.lower != kNoNode, "zone_upper: complete zone");
  for (NodeId x = z.left;; x = t.rsib(x)) {
    if (t.is_anc_or_self(x, z.lower)) return x;
    if (x == z.right) break;
  }
  DM_CHECK(false, "zone_upper: lower not under the row");
  return kNoNode;
}

std::string zone_to_string(const Zone& z) {
  std::ostringstream out;
  out << "[" << z.left;
  if (z.right != z.left) out << ".." << z.right;
  if (z.lower != kNoNode) out << " /" << z.lower;
  out << "]";
  return out.str();
}

}  // namespace dynmem
