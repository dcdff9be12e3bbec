#include "dynmem/tree_io.hpp"

#include <sstream>

namespace dynmem {

UnrankedTree parse_tree(std::istream& in, SymbolTable& syms, bool intern_labels,
                        std::unordered_map<i64, NodeId>* ext_ids) {
  UnrankedTree t;
  std::unordered_map<i64, NodeId> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string id_tok, parent_tok, label_tok;
    if (!(ls >> id_tok)) continue;  // blank
    if (id_tok[0] == '#') continue;
    std::string where = "tree line " + std::to_string(lineno) + ": ";
    DM_REQUIRE(static_cast<bool>(ls >> parent_tok >> label_tok),
               where + "expected `<id> <parent|-> <label>`");
    std::string extra;
    DM_REQUIRE(!(ls >> extra), where + "trailing tokens");

    i64 ext;
    try {
      ext = std::stoll(id_tok);
    } catch (const std::exception&) {
      throw ValidationError(where + "bad id `" + id_tok + "`");
    }
    DM_REQUIRE(ext >= 0, where + "negative id");
    DM_REQUIRE(!ids.count(ext), where + "duplicate id " + std::to_string(ext));

    i32 label;
    if (intern_labels) {
      label = syms.intern(label_tok);
    } else {
      i32 found = syms.find(label_tok);
      DM_REQUIRE(found >= 0, where + "unknown label `" + label_tok + "`");
      label = found;
    }

    if (parent_tok == "-") {
      DM_REQUIRE(t.size() == 0, where + "second root");
      ids.emplace(ext, t.init_root(label));
    } else {
      i64 pext;
      try {
        pext = std::stoll(parent_tok);
      } catch (const std::exception&) {
        throw ValidationError(where + "bad parent id `" + parent_tok + "`");
      }
      auto it = ids.find(pext);
      DM_REQUIRE(it != ids.end(), where + "parent " + std::to_string(pext) + " not defined yet");
      ids.emplace(ext, t.add_last_child(it->second, label));
    }
  }
  DM_REQUIRE(t.size() > 0, "tree: no nodes");
  if (ext_ids) *ext_ids = std::move(ids);
  return t;
}

UnrankedTree parse_tree_text(const std::string& text, SymbolTable& syms, bool intern_labels,
                             std::unordered_map<i64, NodeId>* ext_ids) {
  std::istringstream in(text);
  return parse_tree(in, syms, intern_labels, ext_ids);
}

std::string serialize_tree(const UnrankedTree& t, const SymbolTable& syms) {
  std::ostringstream out;
  for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
    out << v << ' ';
    if (t.parent(v) == kNoNode)
      out << '-';
    else
      out << t.parent(v);
    out << ' ' << syms.name(t.label(v)) << '\n';
  }
  return out.str();
}

}  // namespace dynmem
