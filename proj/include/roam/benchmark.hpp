#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roam/pipeline.hpp"
#include "roam/synthetic.hpp"

namespace roam {

struct SequenceRun {
    std::string name;
    SceneKind kind = SceneKind::deforming;
    std::vector<FrameResult> results;
    double mean_iou = 0.0;  // over tracked frames (keyframe excluded)
};

SequenceRun run_sequence(const SyntheticSequence& seq, const RunConfig& cfg);

double mean_iou(const std::vector<SequenceRun>& runs);

struct AblationRow {
    std::string label;
    double mean_iou = 0.0;
    double median_ms = 0.0;
    int lost_frames = 0;
    std::vector<SequenceRun> runs;
};

/// One row per preset over the whole suite.
std::vector<AblationRow> run_ablation(const std::vector<SyntheticSequence>& suite, const RunConfig& overrides_base,
                                      const std::function<void(const std::string&)>& log = {});

/// Rigid, projection and no warp on the sequences of the given kind, starting from `base`.
std::vector<AblationRow> run_warp_comparison(const std::vector<SyntheticSequence>& suite, SceneKind kind,
                                             const RunConfig& base,
                                             const std::function<void(const std::string&)>& log = {});

std::string format_table(const std::vector<AblationRow>& rows);

}  // namespace roam
