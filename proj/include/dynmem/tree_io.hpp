#pragma once

#include <iosfwd>
#include <unordered_map>

#include "dynmem/tree.hpp"

namespace dynmem {

// Line format, one node per line, parents before children, children in row
// order:
//
//   <id> <parent-id|-> <label>
//
// Blank lines and lines starting with '#' are skipped. Ids are arbitrary
// distinct non-negative integers; `-` marks the root (exactly one).
//
// If `intern_labels` is true unknown labels are added to `syms`, otherwise
// they are a validation error. `ext_ids` (optional) receives the external-id
// to node mapping.
UnrankedTree parse_tree(std::istream& in, SymbolTable& syms, bool intern_labels,
                        std::unordered_map<i64, NodeId>* ext_ids = nullptr);
UnrankedTree parse_tree_text(const std::string& text, SymbolTable& syms, bool intern_labels,
                             std::unordered_map<i64, NodeId>* ext_ids = nullptr);

// Emits nodes in id order with internal ids (a parse round-trip is the
// identity mapping).
std::string serialize_tree(const UnrankedTree& t, const SymbolTable& syms);

}  // namespace dynmem
