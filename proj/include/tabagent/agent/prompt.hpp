#pragma once

#include <string>
#include <string_view>

#include "tabagent/core/types.hpp"

namespace tabagent::agent {

std::string default_instruction_block();

struct PromptTemplate {
  std::string instruction_block = default_instruction_block();
  std::size_t max_table_bytes = 64 * 1024;
};

// Lossless pipe-delimited serialization: one "| a | b |" line for the header
// and one per row; '\', '|', CR and LF inside cells are backslash-escaped.
std::string serialize_table(const Table& table);
Table deserialize_table(std::string_view text);

struct RenderedPrompt {
  std::string system;  // instruction block
  std::string user;    // table task block
};

// Throws TableTooLarge when the serialized table exceeds max_table_bytes.
RenderedPrompt render_messages(const PromptTemplate& tmpl, const TableTask& task);

// Both blocks as one string, instruction block first.
std::string render_prompt(const PromptTemplate& tmpl, const TableTask& task);

}  // namespace tabagent::agent
