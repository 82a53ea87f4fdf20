#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pol/bts.hpp"
#include "pol/model.hpp"

namespace pol::detail {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text);
const Json& field(const Json& j, const char* name);
std::string str(const Json& j, const char* what);
std::vector<std::string> strings(const Json& j, const char* what);

Json relations_json(const std::vector<std::string>& agents, const std::vector<std::string>& ids,
                    const std::vector<std::vector<std::size_t>>& cls);
std::vector<std::vector<std::size_t>> read_partition(
    const Json& parts, const std::string& agent,
    const std::function<std::size_t(const std::string&)>& index);

Json model_json(const PolModel& m);
Json bts_json(const Bts& t);

}  // namespace pol::detail
