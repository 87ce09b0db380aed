#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gplab/ensemble.hpp"

namespace gplab {

/// One JSON object per line with named fields and full provenance. Doubles
/// use the shortest representation that round-trips; NaN and infinities are
/// written as the strings "nan", "inf" and "-inf".
std::string to_json_line(const RunRecord& r);

/// Throws std::invalid_argument on malformed input.
RunRecord from_json_line(const std::string& line);

/// Appends records to `path` (created if missing).
void write_records(const std::string& path, const std::vector<RunRecord>& records);

struct ReadResult {
    std::vector<RunRecord> records;
    /// (1-based line number, reason) for every line that failed to parse.
    std::vector<std::pair<std::size_t, std::string>> bad_lines;
};

/// Reads every parseable line; an empty file yields no records and a
/// missing one throws std::runtime_error.
ReadResult read_records(const std::string& path);

}  // namespace gplab
