#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "doctest.h"
#include "roam/io.hpp"
#include "roam/synthetic.hpp"
#include "service.hpp"

using namespace roam;
using nlohmann::json;

namespace {

struct Fixture {
    SyntheticSequence seq;
    RunConfig cfg = preset_config(Preset::lean);
    std::unique_ptr<service::Service> svc;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    Fixture()
    {
        SceneSpec spec;
        spec.seed = 3;
        spec.frames = 6;
        seq = make_sequence(spec);
        svc = std::make_unique<service::Service>(seq.frames, seq.ground_truth, cfg);
        svc->mount(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Fixture()
    {
        server.stop();
        thread.join();
    }
    httplib::Client client() const
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60);
        return c;
    }
};

json body(const httplib::Result& r)
{
    REQUIRE(r);
    return json::parse(r->body);
}

void wait_idle(httplib::Client& c, const std::string& id)
{
    for (int i = 0; i < 600; ++i) {
        if (!body(c.Get("/sessions/" + id + "/progress"))["running"].get<bool>())
            return;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    FAIL("propagation did not finish");
}

}  // namespace

TEST_SUITE("service")
{
    TEST_CASE("static endpoints")
    {
        Fixture fx;
        auto c = fx.client();
        const json meta = body(c.Get("/meta"));
        CHECK(meta["frames"] == 6);
        CHECK(meta["width"] == 240);
        CHECK(meta["height"] == 180);
        const auto png = c.Get("/frames/0");
        REQUIRE(png);
        CHECK(png->status == 200);
        CHECK(png->body.substr(1, 3) == "PNG");
        CHECK(c.Get("/frames/99")->status == 404);
        CHECK(c.Get("/sessions/nope/progress")->status == 404);
    }

    TEST_CASE("session lifecycle and edits")
    {
        Fixture fx;
        auto c = fx.client();
        const json init = curve_to_json({0, fx.seq.init_curve});
        const auto created = c.Post("/sessions", json{{"init_curve", init}}.dump(), "application/json");
        REQUIRE(created);
        CHECK(created->status == 201);
        const json cj = json::parse(created->body);
        const std::string id = cj["session_id"];
        CHECK(cj["result"]["frame_index"] == 0);
        CHECK(cj["result"]["vertices"] == init["vertices"]);

        CHECK(c.Post("/sessions", R"({"nothing": 1})", "application/json")->status == 400);
        CHECK(c.Post("/sessions", "{bad json", "application/json")->status == 400);

        const auto prop = c.Post("/sessions/" + id + "/propagate", "{}", "application/json");
        REQUIRE(prop);
        CHECK(prop->status == 202);
        wait_idle(c, id);

        // The service must reproduce a direct library run.
        const auto direct = track_sequence(fx.seq.frames, fx.seq.init_curve, fx.cfg);
        for (int i = 1; i < 6; ++i) {
            const json r = body(c.Get("/sessions/" + id + "/results/" + std::to_string(i)));
            CHECK(curve_from_json(json{{"frame_index", r["frame_index"]}, {"vertices", r["vertices"]}}).curve == direct[i].curve);
            CHECK(r["iou"].is_number());
        }

        // Edit at frame 2 with the ground-truth outline, then propagate from there.
        const RotoCurve edited = *trace_boundary(fx.seq.ground_truth[2]);
        const auto ed = c.Post("/sessions/" + id + "/edit", json{{"frame", 2}, {"curve", {{"vertices", curve_to_json({2, edited})["vertices"]}}}}.dump(),
                               "application/json");
        REQUIRE(ed);
        CHECK(ed->status == 200);
        CHECK(c.Get("/sessions/" + id + "/results/3")->status == 404);
        c.Post("/sessions/" + id + "/propagate", json{{"from_frame", 2}}.dump(), "application/json");
        wait_idle(c, id);

        TrackOptions opts;
        opts.start_frame = 2;
        const auto fresh = track_sequence(fx.seq.frames, edited, fx.cfg, opts);
        for (int i = 3; i < 6; ++i) {
            const json r = body(c.Get("/sessions/" + id + "/results/" + std::to_string(i)));
            CHECK(curve_from_json(json{{"frame_index", r["frame_index"]}, {"vertices", r["vertices"]}}).curve ==
                  fresh[static_cast<std::size_t>(i - 2)].curve);
        }
        CHECK(body(c.Get("/sessions/" + id + "/results/1"))["vertices"] == json(curve_to_json({1, direct[1].curve})["vertices"]));

        const json progress = body(c.Get("/sessions/" + id + "/progress"));
        CHECK(progress["from_frame"] == 2);
        CHECK(progress["done"] == 3);
        CHECK(progress["available"].size() == 6);
    }

    TEST_CASE("bad requests")
    {
        Fixture fx;
        auto c = fx.client();
        const json outside = {{"frame_index", 0}, {"vertices", {{0, 0}, {500, 0}, {0, 40}}}};
        CHECK(c.Post("/sessions", json{{"init_curve", outside}}.dump(), "application/json")->status == 400);
        const json late = curve_to_json({9, fx.seq.init_curve});
        CHECK(c.Post("/sessions", json{{"init_curve", late}}.dump(), "application/json")->status == 400);
        CHECK(c.Post("/sessions/7/propagate", "{}", "application/json")->status == 404);
        const json init = curve_to_json({0, fx.seq.init_curve});
        const std::string id = body(c.Post("/sessions", json{{"init_curve", init}}.dump(), "application/json"))["session_id"];
        CHECK(c.Post("/sessions/" + id + "/propagate", R"({"from_frame": 4})", "application/json")->status == 409);
        CHECK(c.Get("/sessions/" + id + "/results/5")->status == 404);
    }
}
