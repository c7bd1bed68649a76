#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "roam/pipeline.hpp"

namespace roam {

struct CurveDoc {
    int frame_index = 0;
    RotoCurve curve;
};

nlohmann::json curve_to_json(const CurveDoc& doc);
/// Checks the schema only; geometric validity is left to the caller. Throws InputError.
CurveDoc curve_from_json(const nlohmann::json& j);
CurveDoc read_curve_doc(const std::filesystem::path& path);
void write_curve_doc(const std::filesystem::path& path, const CurveDoc& doc);

std::string metrics_csv_header();
std::string metrics_csv_row(const FrameResult& r);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<FrameResult>& results);

nlohmann::json state_to_json(const TrackerState& state);
TrackerState state_from_json(const nlohmann::json& j);

/// Writes text through a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace roam
