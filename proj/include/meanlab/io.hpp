#pragma once

#include "meanlab/construction.hpp"
#include "meanlab/diagnostics.hpp"
#include "meanlab/entropy.hpp"
#include "meanlab/systems.hpp"
#include "meanlab/words.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>

namespace meanlab {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Word serialization

// One ASCII symbol per character, single line.
std::string word_to_text(const FiniteWord& w);
FiniteWord word_from_text(std::string_view text, std::uint8_t alphabet_size = 2);

// Run-length binary format: magic "MLW1", alphabet size (u8), then
// (symbol u8, count u64 little-endian) pairs.
std::string word_to_rle(const FiniteWord& w);
FiniteWord word_from_rle(std::string_view bytes);

// ---------------------------------------------------------------------------
// System descriptors (JSON documents; docs/systems.md has the schema)

ordered_json generator_to_json(const std::string& builtin_name);
PointGenerator generator_from_json(const ordered_json& j);
PointGenerator load_generator(const std::filesystem::path& path);

// Descriptor kinds "tent-stick" produce tent systems; everything else a
// symbolic system around the generator.
MetricSystem system_from_json(const ordered_json& j);
MetricSystem load_system(const std::filesystem::path& path);

// Schedules: {"base": <descriptor|builtin>, "gaps": [..], "levels": n}
ordered_json schedule_to_json(const Schedule& s, const ordered_json& base_descriptor);
Schedule schedule_from_json(const ordered_json& j);
Schedule load_schedule(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

ordered_json density_estimate_to_json(const DensityEstimate& e);
ordered_json validation_report_to_json(const ValidationReport& r);
ordered_json diagnostic_report_to_json(const DiagnosticReport& r);
std::string diagnostic_report_to_csv(const DiagnosticReport& r);
std::string claim_reports_to_csv(std::span<const ClaimReport> reports);
std::string complexity_curve_to_csv(const ComplexityCurve& curve);

// ---------------------------------------------------------------------------
// Files

// Temp file + rename; partial outputs never land under the final name.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace meanlab
