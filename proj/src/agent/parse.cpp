#include "tabagent/agent/parse.hpp"

#include "tabagent/core/response_format.hpp"

namespace tabagent::agent {

ParsedStep parse_step(std::string_view response) {
  ParsedStep step;
  if (auto think = find_tag_block(response, "think")) step.think_text = think->content;

  if (auto answer = answer_object(response)) {
    step.kind = ParsedStep::Kind::Final;
    step.answer = std::move(*answer);
    return step;
  }
  if (auto code = find_code_block(response, after_think(response))) {
    step.kind = ParsedStep::Kind::Action;
    step.code = std::move(code->content);
    return step;
  }
  step.kind = ParsedStep::Kind::Malformed;
  step.raw = std::string(response);
  return step;
}

}  // namespace tabagent::agent
