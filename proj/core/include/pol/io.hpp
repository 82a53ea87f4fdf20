#pragma once

// JSON readers and writers. Every document carries "schema": "polkit/1";
// readers accept documents without the tag and reject any other value.

#include <string>
#include <string_view>
#include <vector>

#include "pol/bts.hpp"
#include "pol/model.hpp"

namespace pol {

inline constexpr const char* kSchema = "polkit/1";

PolModel model_from_json(std::string_view text);
std::string model_to_json(const PolModel& m, int indent = 2);

// Labels must only mention closure members (NotABts otherwise).
Bts bts_from_json(std::string_view text);
std::string bts_to_json(const Bts& t, int indent = 2);

std::string read_file(const std::string& path);

}  // namespace pol
