#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rescoef {

/// Shortest decimal form with 17 significant digits; round-trips any double
/// exactly, which is what the CSV/JSON determinism contract relies on.
std::string format_g17(double x);

/// Parses a decimal float; throws IoError on garbage.
double parse_double(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory followed by a rename,
/// so partially written results are never observed.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of a table of doubles through their 17-digit decimal forms, so the
/// value is stable across platforms with IEEE doubles.
std::uint64_t hash_values(std::span<const double> values);

/// Hex string of a 64-bit hash, zero padded to 16 chars.
std::string hash_hex(std::uint64_t h);

/// Minimal CSV support for the numeric, comma-separated files this project
/// reads and writes. No quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view text);

}  // namespace rescoef
