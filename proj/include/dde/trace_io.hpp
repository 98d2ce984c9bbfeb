#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dde/trace.hpp"

namespace dde {

using json = nlohmann::ordered_json;

// {duration_ms, channels: [[segment...], [segment...]]},
// segment = {start_ms, end_ms, units?, words?, events?}.
json trace_to_json(const ConversationTrace& trace);
ConversationTrace trace_from_json(const json& j);

std::string serialize_trace(const ConversationTrace& trace);
ConversationTrace parse_trace(const std::string& text);

// A .jsonl file holds one conversation per line; anything else holds one.
std::vector<ConversationTrace> read_traces(const std::filesystem::path& path);
ConversationTrace read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const ConversationTrace& trace);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Speaker parse_speaker(const std::string& name);

} // namespace dde
