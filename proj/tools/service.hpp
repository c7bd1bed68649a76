#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "roam/pipeline.hpp"

namespace roam::service {

/// Tracking sessions over one frame directory, exposed over HTTP.
class Service {
public:
    Service(std::vector<Frame> frames, std::vector<RegionMask> ground_truth, RunConfig base);
    ~Service();

    void mount(httplib::Server& server);

private:
    struct Stored {
        FrameResult result;
        std::shared_ptr<const TrackerState> state;
    };
    struct Session {
        RunConfig cfg;
        std::map<int, RotoCurve> anchors;  // frames initialized from a supplied curve
        std::map<int, Stored> frames;
        std::mutex mutex;
        std::thread job;
        std::atomic<bool> cancel{false};
        std::atomic<bool> running{false};
        int job_id = 0;
        int from_frame = 0;
        int done = 0;
        std::string error;
    };

    nlohmann::json result_json(const FrameResult& r) const;
    std::shared_ptr<Session> find(const std::string& id);
    void stop_job(Session& s);
    /// Re-initializes the session at `frame` from `curve` and drops every later result.
    FrameResult anchor(Session& s, int frame, const RotoCurve& curve);

    std::vector<Frame> frames_;
    std::vector<RegionMask> gt_;
    RunConfig base_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    int next_session_ = 1;
};

}  // namespace roam::service
