#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ranklab {

// Shortest decimal form that round-trips a double. Locale-independent,
// used for every numeric value we write to disk so reruns are byte-identical.
std::string format_double(double x);

// Fixed-precision decimal form (for human-facing metric tables).
std::string format_fixed(double x, int digits);

// FNV-1a 64-bit hash, hex-encoded. Used for config hashes in manifests.
std::string fnv1a_hex(const std::string& data);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace ranklab
