#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kslab {

// Shortest decimal representation that round-trips the double exactly
// (std::to_chars); used for all CSV/config numbers so reruns diff clean.
std::string format_shortest(double x);
std::string format_shortest(long x);

// Fixed 17-significant-digit form for profile snapshots.
std::string format_sig17(double x);

// Strict double parse of a whole token; nullopt on trailing garbage.
std::optional<double> parse_double(const std::string& token);

std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_csv_line(const std::string& line);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace kslab
