#include "roam/benchmark.hpp"

#include <algorithm>
#include <cstdio>

namespace roam {

namespace {

AblationRow summarize(std::string label, std::vector<SequenceRun> runs)
{
    AblationRow row;
    row.label = std::move(label);
    row.mean_iou = mean_iou(runs);
    std::vector<double> ms;
    for (const auto& r : runs)
        for (std::size_t i = 1; i < r.results.size(); ++i) {
            ms.push_back(r.results[i].ms);
            row.lost_frames += r.results[i].flags.lost;
        }
    if (!ms.empty()) {
        std::nth_element(ms.begin(), ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2), ms.end());
        row.median_ms = ms[ms.size() / 2];
    }
    row.runs = std::move(runs);
    return row;
}

}  // namespace

SequenceRun run_sequence(const SyntheticSequence& seq, const RunConfig& cfg)
{
    SequenceRun run;
    run.name = seq.name;
    run.kind = seq.kind;
    TrackOptions opts;
    opts.ground_truth = &seq.ground_truth;
    run.results = track_sequence(seq.frames, seq.init_curve, cfg, opts);
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 1; i < run.results.size(); ++i)
        if (run.results[i].iou) {
            sum += *run.results[i].iou;
            ++n;
        }
    run.mean_iou = n ? sum / n : 0.0;
    return run;
}

double mean_iou(const std::vector<SequenceRun>& runs)
{
    double sum = 0.0;
    int n = 0;
    for (const auto& r : runs)
        for (std::size_t i = 1; i < r.results.size(); ++i)
            if (r.results[i].iou) {
                sum += *r.results[i].iou;
                ++n;
            }
    return n ? sum / n : 0.0;
}

std::vector<AblationRow> run_ablation(const std::vector<SyntheticSequence>& suite, const RunConfig& base,
                                      const std::function<void(const std::string&)>& log)
{
    std::vector<AblationRow> rows;
    for (Preset p : {Preset::baseline, Preset::lean, Preset::medium, Preset::full}) {
        RunConfig cfg = preset_config(p);
        cfg.seed = cfg.models.seed = base.seed;
        cfg.exec = base.exec;
        std::vector<SequenceRun> runs;
        for (const auto& seq : suite) {
            runs.push_back(run_sequence(seq, cfg));
            if (log) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%-8s %-28s iou %.3f", preset_name(p), seq.name.c_str(),
                              runs.back().mean_iou);
                log(buf);
            }
        }
        rows.push_back(summarize(preset_name(p), std::move(runs)));
    }
    return rows;
}

std::vector<AblationRow> run_warp_comparison(const std::vector<SyntheticSequence>& suite, SceneKind kind,
                                             const RunConfig& base,
                                             const std::function<void(const std::string&)>& log)
{
    std::vector<AblationRow> rows;
    for (WarpMode m : {WarpMode::rigid_ransac, WarpMode::node_projection, WarpMode::none}) {
        RunConfig cfg = base;
        cfg.warp = m;
        std::vector<SequenceRun> runs;
        for (const auto& seq : suite) {
            if (seq.kind != kind)
                continue;
            runs.push_back(run_sequence(seq, cfg));
            if (log) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "warp %-10s %-28s iou %.3f", warp_name(m), seq.name.c_str(),
                              runs.back().mean_iou);
                log(buf);
            }
        }
        rows.push_back(summarize(warp_name(m), std::move(runs)));
    }
    return rows;
}

std::string format_table(const std::vector<AblationRow>& rows)
{
    std::string out = "config        mean IoU   median ms   lost\n";
    for (const auto& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-12s  %8.3f   %9.1f   %4d\n", r.label.c_str(), r.mean_iou, r.median_ms,
                      r.lost_frames);
        out += buf;
    }
    return out;
}

}  // namespace roam
