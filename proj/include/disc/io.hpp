#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace disc {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest decimal string that round-trips the double (locale independent).
std::string fmt_double(double v);

std::uint64_t fnv1a64(const std::string& s);

// 16 lowercase hex chars of the FNV-1a hash of a canonical JSON dump.
std::string config_hash(const nlohmann::json& j);

// Write via temp file + rename so readers never observe partial content.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// CSV helpers. All numeric fields go through fmt_double.
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

} // namespace disc
