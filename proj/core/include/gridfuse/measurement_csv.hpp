#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridfuse/timeseries.hpp"

namespace gridfuse {

inline constexpr std::string_view kMeasurementHeader = "task_id,bus_id,phase,quantity,timestamp_s,value";

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Splits a CSV record on commas. Quoting is not supported; fields are trimmed
/// of surrounding spaces and a trailing '\r'.
std::vector<std::string_view> split_csv(std::string_view line);

double parse_double(std::string_view field, const std::string& source, std::size_t line);

void write_measurements(std::ostream& os, std::span<const TimeSeriesTask> tasks);

/// Tasks are returned in order of first appearance. Rows of one task may come
/// in any order; they are sorted by timestamp and duplicates are rejected.
std::vector<TimeSeriesTask> read_measurements(std::istream& is, const std::string& source = "<stream>");
std::vector<TimeSeriesTask> read_measurements(const std::filesystem::path& path);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gridfuse
