#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers and prompt builder.
namespace nfrbench::text {

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string to_lower(std::string_view s);
std::string collapse_spaces(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line. A trailing
/// newline does not produce an empty final line.
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Number of leading '#' characters of a markdown heading, 0 if the line
/// is not a heading ("#" must be followed by whitespace or end of line).
int heading_depth(std::string_view line);
/// Heading text without the '#' marks and surrounding whitespace.
std::string_view strip_heading_marks(std::string_view line);

std::string replace_all(std::string_view s, std::string_view from, std::string_view to);

/// Judge-style normalization: strips trailing whitespace from every line
/// and drops trailing empty lines.
std::string normalize_output(std::string_view s);

}  // namespace nfrbench::text
