#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the readers. ASCII-only case folding; the
// lexicons and parse files are English.
namespace mea::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Strips a trailing '\r' so CRLF files read the same as LF files.
void chomp(std::string& line);

}  // namespace mea::text
