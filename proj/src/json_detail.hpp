#pragma once

// JSON mapping shared by the config and orbit documents.

#include <initializer_list>
#include <string>

#include "choreo/config.hpp"
#include "json.hpp"

namespace choreo::detail {

using nlohmann::json;

json parse_json(const std::string& text);

/// Rejects keys outside `allowed`; `pointer` is the JSON pointer of `obj`.
void check_keys(const json& obj, const std::string& pointer, std::initializer_list<const char*> allowed);
const json& require(const json& obj, const std::string& pointer, const char* key);

double get_number(const json& v, const std::string& pointer);
int get_int(const json& v, const std::string& pointer);
bool get_bool(const json& v, const std::string& pointer);
std::string get_string(const json& v, const std::string& pointer);

json config_to_json(const ConfigDocument& doc);
ConfigDocument config_from_json(const json& j, const std::string& pointer = "");

}  // namespace choreo::detail
