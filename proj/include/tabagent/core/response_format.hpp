#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace tabagent {

// Tag grammar shared by the format reward and the agent's step parser:
//   <think>...</think> [ <answer>{json object}</answer> | ```lang\ncode``` ]
struct TaggedBlock {
  std::string content;
  std::size_t begin = 0;  // offset of the opening tag
  std::size_t end = 0;    // offset one past the closing tag
};

// First `<tag>...</tag>` at or after `from`. Nullopt when the opening tag is
// absent or is never closed.
std::optional<TaggedBlock> find_tag_block(std::string_view text,
                                          std::string_view tag,
                                          std::size_t from = 0);

// First fenced code block (``` with an optional language tag on the fence
// line) at or after `from`.
std::optional<TaggedBlock> find_code_block(std::string_view text,
                                           std::size_t from = 0);

// Offset where the post-reasoning part of a response begins: just past the
// first think block, or 0 when the response has none.
std::size_t after_think(std::string_view text);

// The parsed JSON object inside the first <answer> block after the
// reasoning, if that block exists and holds a JSON object.
std::optional<nlohmann::json> answer_object(std::string_view text);

// Flattens an answer payload to the string compared against gold answers:
// {"answer": "x"} -> "x"; numbers print as JSON; lists join with "|".
std::optional<std::string> answer_text(const nlohmann::json& payload);

}  // namespace tabagent
