#include "dynmem/automata_io.hpp"

#include <fstream>

namespace dynmem {

using nlohmann::json;

namespace {

json table_to_names(const SymbolTable& t) {
  json arr = json::array();
  for (i32 i = 0; i < t.size(); ++i) arr.push_back(t.name(i));
  return arr;
}

void names_to_table(const json& arr, SymbolTable& t, const char* what) {
  DM_REQUIRE(arr.is_array() && !arr.empty(), std::string(what) + ": expected non-empty array");
  for (const auto& s : arr) {
    DM_REQUIRE(s.is_string(), std::string(what) + ": symbol must be a string");
    i32 before = t.size();
    i32 id = t.intern(s.get<std::string>());
    DM_REQUIRE(id == before, std::string(what) + ": duplicate symbol " + s.get<std::string>());
  }
}

json final_to_json(const std::vector<char>& f) {
  json arr = json::array();
  for (size_t q = 0; q < f.size(); ++q)
    if (f[q]) arr.push_back(q);
  return arr;
}

std::vector<char> final_from_json(const json& j, i32 states) {
  std::vector<char> f(static_cast<size_t>(states), 0);
  DM_REQUIRE(j.is_array(), "final: expected array of state ids");
  for (const auto& q : j) {
    DM_REQUIRE(q.is_number_integer(), "final: expected state id");
    i64 v = q.get<i64>();
    DM_REQUIRE(v >= 0 && v < states, "final: state id out of range");
    f[static_cast<size_t>(v)] = 1;
  }
  return f;
}

i32 get_count(const json& j, const char* key) {
  DM_REQUIRE(j.contains(key) && j[key].is_number_integer(), std::string(key) + ": expected integer");
  i64 v = j[key].get<i64>();
  DM_REQUIRE(v >= 1 && v <= 100000, std::string(key) + ": out of range");
  return static_cast<i32>(v);
}

i32 get_state(const json& v, i32 states, const char* what) {
  DM_REQUIRE(v.is_number_integer(), std::string(what) + ": expected state id");
  i64 q = v.get<i64>();
  DM_REQUIRE(q >= 0 && q < states, std::string(what) + ": state id out of range");
  return static_cast<i32>(q);
}

i32 get_symbol(const json& v, const SymbolTable& t, const char* what) {
  DM_REQUIRE(v.is_string(), std::string(what) + ": expected symbol string");
  return t.require(v.get<std::string>());
}

}  // namespace

json dta_to_json(const Dta& m) {
  json j;
  j["kind"] = "dta";
  j["alphabet"] = table_to_names(m.sigma);
  j["states"] = m.states;
  j["hstates"] = m.hstates;
  j["hstart"] = m.hstart;
  j["final"] = final_to_json(m.final_);
  json d = json::array();
  for (i32 p = 0; p < m.hstates; ++p)
    for (i32 c = 0; c < m.sigma.size(); ++c) d.push_back({p, m.sigma.name(c), m.apply(p, c)});
  j["delta"] = d;
  json h = json::array();
  for (i32 p = 0; p < m.hstates; ++p)
    for (i32 q = 0; q < m.states; ++q) h.push_back({p, q, m.hstep(p, q)});
  j["hdelta"] = h;
  return j;
}

Dta dta_from_json(const json& j) {
  Dta m;
  names_to_table(j.value("alphabet", json()), m.sigma, "alphabet");
  m.states = get_count(j, "states");
  m.hstates = get_count(j, "hstates");
  m.hstart = get_state(j.value("hstart", json()), m.hstates, "hstart");
  m.final_ = final_from_json(j.value("final", json::array()), m.states);

  m.delta.assign(static_cast<size_t>(m.hstates) * m.sigma.size(), -1);
  DM_REQUIRE(j.contains("delta") && j["delta"].is_array(), "delta: expected array");
  for (const auto& e : j["delta"]) {
    DM_REQUIRE(e.is_array() && e.size() == 3, "delta: expected [hstate, symbol, state]");
    i32 p = get_state(e[0], m.hstates, "delta");
    i32 c = get_symbol(e[1], m.sigma, "delta");
    size_t idx = static_cast<size_t>(p) * m.sigma.size() + c;
    DM_REQUIRE(m.delta[idx] == -1, "delta: duplicate entry");
    m.delta[idx] = get_state(e[2], m.states, "delta");
  }
  for (i32 q : m.delta) DM_REQUIRE(q != -1, "delta: must be total");

  m.hdelta.assign(static_cast<size_t>(m.hstates) * m.states, -1);
  DM_REQUIRE(j.contains("hdelta") && j["hdelta"].is_array(), "hdelta: expected array");
  for (const auto& e : j["hdelta"]) {
    DM_REQUIRE(e.is_array() && e.size() == 3, "hdelta: expected [hstate, state, hstate]");
    i32 p = get_state(e[0], m.hstates, "hdelta");
    i32 q = get_state(e[1], m.states, "hdelta");
    size_t idx = static_cast<size_t>(p) * m.states + q;
    DM_REQUIRE(m.hdelta[idx] == -1, "hdelta: duplicate entry");
    m.hdelta[idx] = get_state(e[2], m.hstates, "hdelta");
  }
  for (i32 p : m.hdelta) DM_REQUIRE(p != -1, "hdelta: must be total");
  m.validate();
  return m;
}

json rdpda_to_json(const Rdpda& m) {
  json j;
  j["kind"] = "rdpda";
  j["input"] = table_to_names(m.sigma);
  j["stack"] = table_to_names(m.gamma);
  j["states"] = m.states;
  j["start"] = m.start;
  j["init_stack"] = m.gamma.name(m.init_stack);
  j["final"] = final_to_json(m.final_);
  json d = json::array();
  for (i32 q = 0; q < m.states; ++q)
    for (i32 a = 0; a < m.sigma.size(); ++a)
      for (i32 g = 0; g < m.gamma.size(); ++g) {
        const Rdpda::Move* mv = m.move(q, a, g);
        if (!mv) continue;
        json push = json::array();
        for (i32 s : mv->push) push.push_back(m.gamma.name(s));
        d.push_back({q, m.sigma.name(a), m.gamma.name(g), mv->state, push});
      }
  j["delta"] = d;
  return j;
}

Rdpda rdpda_from_json(const json& j) {
  Rdpda m;
  names_to_table(j.value("input", json()), m.sigma, "input");
  names_to_table(j.value("stack", json()), m.gamma, "stack");
  m.states = get_count(j, "states");
  m.start = get_state(j.value("start", json()), m.states, "start");
  m.init_stack = get_symbol(j.value("init_stack", json()), m.gamma, "init_stack");
  m.final_ = final_from_json(j.value("final", json::array()), m.states);
  m.delta.assign(static_cast<size_t>(m.states) * m.sigma.size() * m.gamma.size(), std::nullopt);
  DM_REQUIRE(j.contains("delta") && j["delta"].is_array(), "delta: expected array");
  for (const auto& e : j["delta"]) {
    DM_REQUIRE(e.is_array() && e.size() == 5, "delta: expected [state, symbol, top, state, push]");
    i32 q = get_state(e[0], m.states, "delta");
    i32 a = get_symbol(e[1], m.sigma, "delta");
    i32 g = get_symbol(e[2], m.gamma, "delta");
    Rdpda::Move mv;
    mv.state = get_state(e[3], m.states, "delta");
    DM_REQUIRE(e[4].is_array(), "delta: push must be an array (top first)");
    for (const auto& s : e[4]) mv.push.push_back(get_symbol(s, m.gamma, "delta push"));
    size_t idx = (static_cast<size_t>(q) * m.sigma.size() + a) * m.gamma.size() + g;
    DM_REQUIRE(!m.delta[idx], "delta: duplicate entry");
    m.delta[idx] = std::move(mv);
  }
  m.validate();
  return m;
}

json vpa_to_json(const Vpa& m) {
  json j;
  j["kind"] = "vpa";
  json calls = json::array(), rets = json::array(), ints = json::array();
  for (i32 a = 0; a < m.sigma.size(); ++a) {
    if (m.is_call(a))
      calls.push_back(m.sigma.name(a));
    else if (m.is_return(a))
      rets.push_back(m.sigma.name(a));
    else
      ints.push_back(m.sigma.name(a));
  }
  j["calls"] = calls;
  j["returns"] = rets;
  j["internals"] = ints;
  j["stack"] = table_to_names(m.gamma);
  j["states"] = m.states;
  j["start"] = m.start;
  j["final"] = final_to_json(m.final_);
  json cd = json::array(), rd = json::array(), red = json::array(), id = json::array();
  for (i32 q = 0; q < m.states; ++q)
    for (i32 a = 0; a < m.sigma.size(); ++a) {
      if (const Vpa::CallMove* mv = m.call(q, a))
        cd.push_back({q, m.sigma.name(a), mv->state, m.gamma.name(mv->push)});
      for (i32 g = 0; g < m.gamma.size(); ++g)
        if (auto r = m.ret(q, a, g)) rd.push_back({q, m.sigma.name(a), m.gamma.name(g), *r});
      if (auto r = m.ret_empty(q, a)) red.push_back({q, m.sigma.name(a), *r});
      if (auto r = m.internal(q, a)) id.push_back({q, m.sigma.name(a), *r});
    }
  j["call_delta"] = cd;
  j["return_delta"] = rd;
  j["empty_return_delta"] = red;
  j["internal_delta"] = id;
  return j;
}

Vpa vpa_from_json(const json& j) {
  Vpa m;
  DM_REQUIRE(j.contains("calls") && j.contains("returns") && j.contains("internals"),
             "vpa: needs calls/returns/internals symbol lists");
  auto add = [&](const json& arr, SymKind k, const char* what) {
    DM_REQUIRE(arr.is_array(), std::string(what) + ": expected array");
    for (const auto& s : arr) {
      DM_REQUIRE(s.is_string(), std::string(what) + ": symbol must be a string");
      i32 before = m.sigma.size();
      i32 id = m.sigma.intern(s.get<std::string>());
      DM_REQUIRE(id == before, std::string(what) + ": duplicate symbol " + s.get<std::string>());
      m.kind.push_back(k);
    }
  };
  add(j["calls"], SymKind::kCall, "calls");
  add(j["returns"], SymKind::kReturn, "returns");
  add(j["internals"], SymKind::kInternal, "internals");
  DM_REQUIRE(m.sigma.size() >= 1, "vpa: empty alphabet");
  names_to_table(j.value("stack", json()), m.gamma, "stack");
  m.states = get_count(j, "states");
  m.start = get_state(j.value("start", json()), m.states, "start");
  m.final_ = final_from_json(j.value("final", json::array()), m.states);
  size_t qa = static_cast<size_t>(m.states) * m.sigma.size();
  m.call_delta.assign(qa, std::nullopt);
  m.ret_delta.assign(qa * m.gamma.size(), std::nullopt);
  m.ret_empty_delta.assign(qa, std::nullopt);
  m.int_delta.assign(qa, std::nullopt);
  auto qi = [&](i32 q, i32 a) { return static_cast<size_t>(q) * m.sigma.size() + a; };
  if (j.contains("call_delta"))
    for (const auto& e : j["call_delta"]) {
      DM_REQUIRE(e.is_array() && e.size() == 4, "call_delta: expected [state, symbol, state, push]");
      i32 q = get_state(e[0], m.states, "call_delta");
      i32 a = get_symbol(e[1], m.sigma, "call_delta");
      size_t idx = qi(q, a);
      DM_REQUIRE(!m.call_delta[idx], "call_delta: duplicate entry");
      m.call_delta[idx] =
          Vpa::CallMove{get_state(e[2], m.states, "call_delta"), get_symbol(e[3], m.gamma, "call_delta")};
    }
  if (j.contains("return_delta"))
    for (const auto& e : j["return_delta"]) {
      DM_REQUIRE(e.is_array() && e.size() == 4, "return_delta: expected [state, symbol, top, state]");
      i32 q = get_state(e[0], m.states, "return_delta");
      i32 a = get_symbol(e[1], m.sigma, "return_delta");
      i32 g = get_symbol(e[2], m.gamma, "return_delta");
      size_t idx = qi(q, a) * m.gamma.size() + g;
      DM_REQUIRE(!m.ret_delta[idx], "return_delta: duplicate entry");
      m.ret_delta[idx] = get_state(e[3], m.states, "return_delta");
    }
  if (j.contains("empty_return_delta"))
    for (const auto& e : j["empty_return_delta"]) {
      DM_REQUIRE(e.is_array() && e.size() == 3, "empty_return_delta: expected [state, symbol, state]");
      i32 q = get_state(e[0], m.states, "empty_return_delta");
      i32 a = get_symbol(e[1], m.sigma, "empty_return_delta");
      size_t idx = qi(q, a);
      DM_REQUIRE(!m.ret_empty_delta[idx], "empty_return_delta: duplicate entry");
      m.ret_empty_delta[idx] = get_state(e[2], m.states, "empty_return_delta");
    }
  if (j.contains("internal_delta"))
    for (const auto& e : j["internal_delta"]) {
      DM_REQUIRE(e.is_array() && e.size() == 3, "internal_delta: expected [state, symbol, state]");
      i32 q = get_state(e[0], m.states, "internal_delta");
      i32 a = get_symbol(e[1], m.sigma, "internal_delta");
      size_t idx = qi(q, a);
      DM_REQUIRE(!m.int_delta[idx], "internal_delta: duplicate entry");
      m.int_delta[idx] = get_state(e[2], m.states, "internal_delta");
    }
  m.validate();
  return m;
}

AnyAutomaton automaton_from_json(const json& j) {
  DM_REQUIRE(j.is_object() && j.contains("kind") && j["kind"].is_string(),
             "automaton: expected object with string `kind`");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "dta") return dta_from_json(j);
  if (kind == "rdpda") return rdpda_from_json(j);
  if (kind == "vpa") return vpa_from_json(j);
  throw ValidationError("automaton: unknown kind `" + kind + "`");
}

AnyAutomaton load_automaton_file(const std::string& path) {
  std::ifstream in(path);
  DM_REQUIRE(in.good(), "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return automaton_from_json(j);
}

}  // namespace dynmem
