#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace battlemix::text {

std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, char sep);

std::optional<std::int64_t> to_int(std::string_view s);
std::optional<double> to_double(std::string_view s);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
/// Fixed-point rendering for human-facing reports.
std::string format_fixed(double v, int decimals);

/// Calls fn(line_no, line) for every line that is neither empty nor a `#`
/// comment. A trailing '\r' is not stripped: the formats are LF-only.
void for_each_record(std::string_view text,
                     const std::function<void(std::size_t, std::string_view)>& fn);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a; stable across platforms, used for stage checksums.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace battlemix::text
