#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace tabagent::agent {

struct ParsedStep {
  enum class Kind { Action, Final, Malformed };

  Kind kind = Kind::Malformed;
  std::string code;        // Action
  nlohmann::json answer;   // Final: the JSON object inside <answer>
  std::string raw;         // Malformed: the response as received
  std::optional<std::string> think_text;
};

// Total classification of a model response. A well-formed <answer> block
// holding a JSON object wins over a code block; anything else is Malformed.
ParsedStep parse_step(std::string_view response);

}  // namespace tabagent::agent
