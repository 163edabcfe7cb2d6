#pragma once

#include <map>
#include <string>
#include <vector>

namespace exitlab {

// Writes via a temp file + rename so interrupted runs never leave
// truncated outputs.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Flat "key = value" config text; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

// Minimal CSV support for the artifact's numeric tables: no quoting, fields
// must not contain commas.
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

std::string format_double(double x);  // shortest round-trippable decimal

}  // namespace exitlab
