#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the line-oriented file formats.
namespace distsem::io {

std::vector<std::string_view> split(std::string_view line, char sep);

// Shortest round-trippable rendering (up to 17 significant digits).
std::string format_real(double v);

double parse_real(std::string_view s, std::size_t line);
std::uint64_t parse_count(std::string_view s, std::size_t line);

// Lines starting with "##" carry run manifests and are ignored by every reader.
inline bool is_manifest_line(std::string_view line) { return line.rfind("##", 0) == 0; }

// Strips a trailing '\r' so CRLF files parse the same as LF files.
bool next_line(std::istream& in, std::string& line);

}  // namespace distsem::io
