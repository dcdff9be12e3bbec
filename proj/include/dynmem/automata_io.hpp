#pragma once

#include <variant>

#include <json.hpp>

#include "dynmem/automata.hpp"

namespace dynmem {

using AnyAutomaton = std::variant<Dta, Rdpda, Vpa>;

nlohmann::json dta_to_json(const Dta& m);
nlohmann::json rdpda_to_json(const Rdpda& m);
nlohmann::json vpa_to_json(const Vpa& m);

Dta dta_from_json(const nlohmann::json& j);
Rdpda rdpda_from_json(const nlohmann::json& j);
Vpa vpa_from_json(const nlohmann::json& j);

// Dispatches on the "kind" field ("dta" | "rdpda" | "vpa").
AnyAutomaton automaton_from_json(const nlohmann::json& j);
AnyAutomaton load_automaton_file(const std::string& path);

}  // namespace dynmem
