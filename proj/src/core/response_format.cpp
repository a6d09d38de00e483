#include "tabagent/core/response_format.hpp"

namespace tabagent {

std::optional<TaggedBlock> find_tag_block(std::string_view text,
                                          std::string_view tag,
                                          std::size_t from) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  auto start = text.find(open, from);
  if (start == std::string_view::npos) return std::nullopt;
  auto body = start + open.size();
  auto stop = text.find(close, body);
  if (stop == std::string_view::npos) return std::nullopt;
  return TaggedBlock{std::string(text.substr(body, stop - body)), start,
                     stop + close.size()};
}

std::optional<TaggedBlock> find_code_block(std::string_view text,
                                           std::size_t from) {
  auto start = text.find("```", from);
  if (start == std::string_view::npos) return std::nullopt;
  auto line_end = text.find('\n', start + 3);
  if (line_end == std::string_view::npos) return std::nullopt;
  auto body = line_end + 1;
  auto stop = text.find("```", body);
  if (stop == std::string_view::npos) return std::nullopt;
  std::string code(text.substr(body, stop - body));
  while (!code.empty() && (code.back() == '\n' || code.back() == '\r'))
    code.pop_back();
  return TaggedBlock{std::move(code), start, stop + 3};
}

std::size_t after_think(std::string_view text) {
  auto think = find_tag_block(text, "think");
  return think ? think->end : 0;
}

std::optional<nlohmann::json> answer_object(std::string_view text) {
  auto block = find_tag_block(text, "answer", after_think(text));
  if (!block) return std::nullopt;
  auto parsed = nlohmann::json::parse(block->content, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

namespace {

std::optional<std::string> scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return std::string(v.get<bool>() ? "1" : "0");
  if (v.is_number()) return v.dump();
  return std::nullopt;
}

}  // namespace

std::optional<std::string> answer_text(const nlohmann::json& payload) {
  if (!payload.is_object()) return std::nullopt;
  auto it = payload.find("answer");
  if (it == payload.end()) return std::nullopt;
  if (it->is_array()) {
    std::string joined;
    for (std::size_t k = 0; k < it->size(); ++k) {
      auto s = scalar_text((*it)[k]);
      if (!s) return std::nullopt;
      if (k) joined += '|';
      joined += *s;
    }
    return joined;
  }
  return scalar_text(*it);
}

}  // namespace tabagent
