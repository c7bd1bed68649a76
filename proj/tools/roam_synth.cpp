#include <iostream>

#include <CLI11.hpp>

#include "roam/synthetic.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Writes synthetic tracking sequences with ground truth"};
    std::string out, kind = "deforming";
    std::uint64_t seed = 1;
    int frames = 30, width = 240, height = 180;
    bool suite = false;
    app.add_option("--out", out, "output directory")->required();
    app.add_option("--kind", kind, "deforming, large_displacement or occluder");
    app.add_option("--seed", seed, "scene seed");
    app.add_option("--frames", frames, "frame count");
    app.add_option("--width", width);
    app.add_option("--height", height);
    app.add_flag("--suite", suite, "write the whole benchmark suite, one subdirectory per sequence");
    CLI11_PARSE(app, argc, argv);

    try {
        if (suite) {
            for (auto spec : roam::benchmark_suite(seed)) {
                spec.frames = frames;
                const auto seq = roam::make_sequence(spec);
                roam::write_sequence(std::filesystem::path(out) / seq.name, seq);
                std::cout << seq.name << '\n';
            }
            return 0;
        }
        roam::SceneSpec spec;
        if (kind == "deforming")
            spec.kind = roam::SceneKind::deforming;
        else if (kind == "large_displacement")
            spec.kind = roam::SceneKind::large_displacement;
        else if (kind == "occluder")
            spec.kind = roam::SceneKind::occluder;
        else {
            std::cerr << "unknown kind " << kind << '\n';
            return 1;
        }
        spec.seed = seed;
        spec.frames = frames;
        spec.width = width;
        spec.height = height;
        roam::write_sequence(out, roam::make_sequence(spec));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
