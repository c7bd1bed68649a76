#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roam/geometry.hpp"
#include "roam/imagery.hpp"

namespace roam {

enum class SceneKind { deforming, large_displacement, occluder };

struct SceneSpec {
    SceneKind kind = SceneKind::deforming;
    std::uint64_t seed = 1;
    int width = 240;
    int height = 180;
    int frames = 30;
};

/// Textured blob over a textured background, with exact ground-truth masks.
struct SyntheticSequence {
    std::string name;
    SceneKind kind = SceneKind::deforming;
    std::vector<Frame> frames;
    std::vector<RegionMask> ground_truth;
    RotoCurve init_curve;  // polygon of the frame-0 object outline
};

const char* scene_kind_name(SceneKind k);
SyntheticSequence make_sequence(const SceneSpec& spec);

/// The benchmark suite: four deforming blobs, three large-displacement and three
/// occluder-crossing sequences.
std::vector<SceneSpec> benchmark_suite(std::uint64_t seed = 2024);

/// frames/00000.png..., gt/00000.png..., init_curve.json
void write_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq);

}  // namespace roam
