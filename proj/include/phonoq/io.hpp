#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "phonoq/phase_space.hpp"

namespace phonoq::io {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form (17 significant digits, trimmed).
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(const json& j);

// CSV with '#'-prefixed JSON header lines, a column-name row, then data rows
// (re_alpha, im_alpha, value, shots, dark_counts).
std::string qsamples_to_csv(const QSamples& samples, const json& header);
QSamples qsamples_from_csv(const std::string& text, json* header_out = nullptr);

json matrix_to_json(const Mat& m);  // row-major [re, im] pairs
Mat matrix_from_json(const json& j);

// Write to a sibling temp file, then rename: readers never see partial files.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace phonoq::io
