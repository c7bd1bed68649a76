#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "roam/benchmark.hpp"
#include "roam/config.hpp"
#include "roam/io.hpp"
#include "roam/pipeline.hpp"
#include "roam/synthetic.hpp"
#include "service.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kTrackingLoss = 2;

httplib::Server* g_server = nullptr;

void on_signal(int)
{
    if (g_server)
        g_server->stop();
}

struct Common {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    bool serial = false;
};

roam::RunConfig make_config(const Common& c)
{
    roam::RunConfig cfg = c.config.empty() ? roam::preset_config(roam::Preset::full) : roam::load_config(c.config);
    if (!c.preset.empty()) {
        const auto seed = cfg.seed;
        cfg = roam::preset_config(roam::parse_preset(c.preset));
        cfg.seed = cfg.models.seed = seed;
    }
    if (c.seed)
        cfg.seed = cfg.models.seed = *c.seed;
    if (c.serial)
        cfg.exec = roam::Exec::serial;
    return cfg;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "flat JSON configuration file");
    app->add_option("--preset", c.preset, "baseline, lean, medium or full (overrides the config preset)");
    app->add_option("--seed", c.seed, "random seed");
    app->add_flag("--serial", c.serial, "use the serial kernels");
}

// GT masks named like the frames; frames without one get an empty mask.
std::vector<roam::RegionMask> load_ground_truth(const fs::path& dir, const std::vector<fs::path>& frame_files)
{
    std::vector<roam::RegionMask> gt(frame_files.size());
    for (std::size_t i = 0; i < frame_files.size(); ++i) {
        const fs::path p = dir / frame_files[i].filename().replace_extension(".png");
        if (fs::exists(p))
            gt[i] = roam::load_mask_png(p);
    }
    return gt;
}

int cmd_track(const fs::path& frames_dir, const fs::path& init_file, const fs::path& out_dir,
              const std::string& gt_dir, int start_frame, bool checkpoint, bool no_timing, const Common& common)
{
    const auto files = roam::list_frame_files(frames_dir);
    if (files.size() < 2)
        throw roam::InputError("need at least two frames in " + frames_dir.string());
    std::vector<roam::Frame> frames;
    for (const auto& f : files)
        frames.push_back(roam::load_frame(f));
    const roam::RunConfig cfg = make_config(common);
    const roam::CurveDoc init = roam::read_curve_doc(init_file);
    roam::validate_curve(init.curve, frames[0].width(), frames[0].height());
    const int start = start_frame >= 0 ? start_frame : init.frame_index;
    if (static_cast<std::size_t>(start) >= frames.size())
        throw roam::InputError("start frame out of range");

    std::vector<roam::RegionMask> gt;
    if (!gt_dir.empty())
        gt = load_ground_truth(gt_dir, files);

    fs::create_directories(out_dir / "curves");
    fs::create_directories(out_dir / "masks");
    if (checkpoint)
        fs::create_directories(out_dir / "checkpoints");

    roam::TrackOptions opts;
    opts.start_frame = start;
    opts.ground_truth = gt.empty() ? nullptr : &gt;
    opts.on_frame = [&](const roam::FrameResult& r, const roam::TrackerState& state) {
        const auto stem = files[static_cast<std::size_t>(r.frame_index)].stem().string();
        if (checkpoint)
            roam::write_text_file(out_dir / "checkpoints" / (stem + ".json"), roam::state_to_json(state).dump() + "\n");
        if (r.frame_index == start)
            return;
        roam::write_curve_doc(out_dir / "curves" / (stem + ".json"), {r.frame_index, r.curve});
        roam::save_mask_png(out_dir / "masks" / (stem + ".png"), r.mask);
        std::fprintf(stderr, "frame %d  E %.3f  iters %d%s\n", r.frame_index, r.energy.total, r.iterations,
                     r.flags.lost ? "  LOST" : "");
    };
    const auto results = roam::track_sequence(frames, init.curve, cfg, opts);
    std::vector<roam::FrameResult> tracked(results.begin() + 1, results.end());
    if (no_timing)
        for (auto& r : tracked)
            r.ms = 0.0;
    roam::write_metrics_csv(out_dir / "metrics.csv", tracked);

    int lost = 0;
    double iou = 0.0, acc = 0.0;
    int scored = 0;
    for (const auto& r : tracked) {
        lost += r.flags.lost;
        if (r.iou) {
            iou += *r.iou;
            acc += *r.accuracy;
            ++scored;
        }
    }
    json summary = {{"frames", tracked.size()},
                    {"start_frame", start},
                    {"lost_frames", lost},
                    {"config", roam::config_to_json(cfg)}};
    if (scored) {
        summary["mean_iou"] = iou / scored;
        summary["mean_accuracy"] = acc / scored;
    }
    roam::write_text_file(out_dir / "summary.json", summary.dump(1) + "\n");
    return lost ? kTrackingLoss : kOk;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const std::string& out_csv)
{
    const auto gts = roam::list_frame_files(gt_dir);
    if (gts.empty())
        throw roam::InputError("no ground-truth masks in " + gt_dir.string());
    std::vector<std::string> missing;
    for (const auto& g : gts)
        if (!fs::exists(pred_dir / g.filename()))
            missing.push_back(g.filename().string());
    if (!missing.empty()) {
        std::cerr << "missing predictions:";
        for (const auto& m : missing)
            std::cerr << ' ' << m;
        std::cerr << '\n';
        return kInputError;
    }
    std::string csv = "frame,iou,accuracy\n";
    double iou = 0.0, acc = 0.0;
    for (const auto& g : gts) {
        const auto m = roam::compute_metrics(roam::load_mask_png(pred_dir / g.filename()), roam::load_mask_png(g));
        char line[256];
        std::snprintf(line, sizeof line, "%s,%.6f,%.6f\n", g.stem().string().c_str(), m.iou, m.accuracy);
        csv += line;
        std::cout << line;
        iou += m.iou;
        acc += m.accuracy;
    }
    const double n = static_cast<double>(gts.size());
    std::printf("mean iou %.6f  mean accuracy %.6f\n", iou / n, acc / n);
    if (!out_csv.empty())
        roam::write_text_file(out_csv, csv);
    return kOk;
}

int cmd_bench(const Common& common, bool quick)
{
    roam::RunConfig base = make_config(common);
    auto specs = roam::benchmark_suite();
    std::vector<roam::SyntheticSequence> suite;
    for (auto& s : specs) {
        if (quick)
            s.frames = 10;
        suite.push_back(roam::make_sequence(s));
    }
    auto log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
    const auto rows = roam::run_ablation(suite, base, log);
    std::cout << roam::format_table(rows);
    // Medium has no topology proposals, which would re-detect the object and mask the warp's effect.
    roam::RunConfig warp_base = roam::preset_config(roam::Preset::medium);
    warp_base.seed = warp_base.models.seed = base.seed;
    warp_base.exec = base.exec;
    std::cout << "\nlarge-displacement set, warp variants (medium)\n"
              << roam::format_table(roam::run_warp_comparison(suite, roam::SceneKind::large_displacement, warp_base, log));
    return kOk;
}

int cmd_serve(int port, const std::string& host, const fs::path& frames_dir, const std::string& gt_dir,
              const Common& common)
{
    const auto files = roam::list_frame_files(frames_dir);
    std::vector<roam::Frame> frames;
    for (const auto& f : files)
        frames.push_back(roam::load_frame(f));
    std::vector<roam::RegionMask> gt;
    if (!gt_dir.empty())
        gt = load_ground_truth(gt_dir, files);
    roam::service::Service svc(std::move(frames), std::move(gt), make_config(common));
    httplib::Server server;
    svc.mount(server);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "cannot bind " << host << ':' << port << '\n';
        return kInputError;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving " << files.size() << " frames on http://" << host << ':' << port << '\n';
    server.listen_after_bind();
    g_server = nullptr;
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rotoscoping tracker"};
    app.require_subcommand(1);

    Common common;
    std::string frames_dir, init_file, out_dir, gt_dir, pred_dir, eval_csv, host = "127.0.0.1";
    int start_frame = -1, port = 8080;
    bool checkpoint = false, no_timing = false, quick = false;

    auto* track = app.add_subcommand("track", "propagate a curve through a frame directory");
    track->add_option("--frames", frames_dir, "frame directory")->required();
    track->add_option("--init", init_file, "initial curve document")->required();
    track->add_option("--out", out_dir, "output directory")->required();
    track->add_option("--gt", gt_dir, "ground-truth mask directory");
    track->add_option("--start-frame", start_frame, "keyframe index (default: the curve's frame_index)");
    track->add_flag("--checkpoint", checkpoint, "write the full tracker state per frame");
    track->add_flag("--no-timing", no_timing, "write 0 in the ms column so reruns are byte-comparable");
    add_common(track, common);

    auto* eval = app.add_subcommand("eval", "score predicted masks against ground truth");
    eval->add_option("--pred", pred_dir, "predicted mask directory")->required();
    eval->add_option("--gt", gt_dir, "ground-truth mask directory")->required();
    eval->add_option("--out", eval_csv, "CSV output path");

    auto* bench = app.add_subcommand("bench", "run the synthetic ablation suite");
    bench->add_flag("--quick", quick, "10 frames per sequence");
    add_common(bench, common);

    auto* serve = app.add_subcommand("serve", "serve tracking sessions over HTTP");
    serve->add_option("--port", port, "port");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--frames", frames_dir, "frame directory")->required();
    serve->add_option("--gt", gt_dir, "ground-truth mask directory");
    add_common(serve, common);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*track)
            return cmd_track(frames_dir, init_file, out_dir, gt_dir, start_frame, checkpoint, no_timing, common);
        if (*eval)
            return cmd_eval(pred_dir, gt_dir, eval_csv);
        if (*bench)
            return cmd_bench(common, quick);
        if (*serve)
            return cmd_serve(port, host, frames_dir, gt_dir, common);
    } catch (const roam::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
