#include "service.hpp"

#include "roam/config.hpp"
#include "roam/io.hpp"

namespace roam::service {

namespace {

using json = nlohmann::json;

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message)
{
    reply(res, status, {{"error", message}});
}

}  // namespace

Service::Service(std::vector<Frame> frames, std::vector<RegionMask> ground_truth, RunConfig base)
    : frames_(std::move(frames)), gt_(std::move(ground_truth)), base_(base)
{
    if (frames_.empty())
        throw InputError("no frames to serve");
}

Service::~Service()
{
    std::lock_guard lock(mutex_);
    for (auto& [_, s] : sessions_)
        stop_job(*s);
}

json Service::result_json(const FrameResult& r) const
{
    json j = curve_to_json({r.frame_index, r.curve});
    j["energy"] = {{"total", r.energy.total},
                   {"e_curve", r.energy.e_curve},
                   {"e_land", r.energy.e_land},
                   {"e_joint", r.energy.e_joint}};
    j["iou"] = r.iou ? json(*r.iou) : json(nullptr);
    j["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
    j["iterations"] = r.iterations;
    j["lost"] = r.flags.lost;
    return j;
}

std::shared_ptr<Service::Session> Service::find(const std::string& id)
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void Service::stop_job(Session& s)
{
    s.cancel = true;
    if (s.job.joinable())
        s.job.join();
    s.cancel = false;
}

FrameResult Service::anchor(Session& s, int frame, const RotoCurve& curve)
{
    const Frame& f = frames_.at(static_cast<std::size_t>(frame));
    auto state = std::make_shared<TrackerState>(init_from_keyframe(f, curve, s.cfg, frame));
    FrameResult r = keyframe_result(*state, f, s.cfg);
    if (static_cast<std::size_t>(frame) < gt_.size() && !gt_[static_cast<std::size_t>(frame)].empty()) {
        const Metrics m = compute_metrics(r.mask, gt_[static_cast<std::size_t>(frame)]);
        r.iou = m.iou;
        r.accuracy = m.accuracy;
    }
    std::lock_guard lock(s.mutex);
    s.frames.erase(s.frames.lower_bound(frame), s.frames.end());
    s.anchors.erase(s.anchors.upper_bound(frame), s.anchors.end());
    s.anchors[frame] = curve;
    s.frames[frame] = {r, std::move(state)};
    return r;
}

void Service::mount(httplib::Server& server)
{
    server.Get("/meta", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200,
              {{"frames", frames_.size()},
               {"width", frames_[0].width()},
               {"height", frames_[0].height()},
               {"ground_truth", !gt_.empty()}});
    });

    server.Get(R"(/frames/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto i = std::stoul(req.matches[1].str());
        if (i >= frames_.size())
            return fail(res, 404, "no such frame");
        const auto png = encode_png(frames_[i]);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const json body = json::parse(req.body);
            if (!body.contains("init_curve"))
                return fail(res, 400, "init_curve is required");
            const CurveDoc doc = curve_from_json(body["init_curve"]);
            if (doc.frame_index < 0 || static_cast<std::size_t>(doc.frame_index) >= frames_.size())
                return fail(res, 400, "init_curve frame_index out of range");
            auto s = std::make_shared<Session>();
            s->cfg = base_;
            if (body.contains("config"))
                apply_overrides(s->cfg, body["config"]);
            const FrameResult r = anchor(*s, doc.frame_index, doc.curve);
            std::string id;
            {
                std::lock_guard lock(mutex_);
                id = std::to_string(next_session_++);
                sessions_[id] = s;
            }
            reply(res, 201, {{"session_id", id}, {"result", result_json(r)}});
        } catch (const json::exception& e) {
            fail(res, 400, std::string("malformed request: ") + e.what());
        } catch (const Error& e) {
            fail(res, 400, e.what());
        }
    });

    server.Post(R"(/sessions/([^/]+)/propagate)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = find(req.matches[1].str());
        if (!s)
            return fail(res, 404, "no such session");
        int from = 0;
        try {
            const json body = req.body.empty() ? json::object() : json::parse(req.body);
            if (body.contains("from_frame"))
                from = body["from_frame"].get<int>();
            else {
                std::lock_guard lock(s->mutex);
                from = s->anchors.rbegin()->first;
            }
        } catch (const json::exception& e) {
            return fail(res, 400, std::string("malformed request: ") + e.what());
        }
        stop_job(*s);
        std::shared_ptr<const TrackerState> start;
        {
            std::lock_guard lock(s->mutex);
            const auto it = s->frames.find(from);
            if (it == s->frames.end() || !it->second.state)
                return fail(res, 409, "no tracker state at from_frame");
            start = it->second.state;
            ++s->job_id;
            s->from_frame = from;
            s->done = 0;
            s->error.clear();
        }
        s->running = true;
        const int job = s->job_id;
        s->job = std::thread([this, s, start, from] {
            try {
                TrackerState state = *start;
                for (std::size_t i = static_cast<std::size_t>(from) + 1; i < frames_.size(); ++i) {
                    if (s->cancel)
                        break;
                    FrameResult r = step(state, frames_[i], s->cfg);
                    if (i < gt_.size() && !gt_[i].empty()) {
                        const Metrics m = compute_metrics(r.mask, gt_[i]);
                        r.iou = m.iou;
                        r.accuracy = m.accuracy;
                    }
                    std::lock_guard lock(s->mutex);
                    s->frames[static_cast<int>(i)] = {std::move(r), std::make_shared<TrackerState>(state)};
                    ++s->done;
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(s->mutex);
                s->error = e.what();
            }
            s->running = false;
        });
        reply(res, 202, {{"job_id", job}, {"from_frame", from}});
    });

    server.Get(R"(/sessions/([^/]+)/results/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = find(req.matches[1].str());
        if (!s)
            return fail(res, 404, "no such session");
        const int i = std::stoi(req.matches[2].str());
        std::lock_guard lock(s->mutex);
        const auto it = s->frames.find(i);
        if (it == s->frames.end())
            return fail(res, 404, "no result for this frame yet");
        reply(res, 200, result_json(it->second.result));
    });

    server.Post(R"(/sessions/([^/]+)/edit)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = find(req.matches[1].str());
        if (!s)
            return fail(res, 404, "no such session");
        try {
            const json body = json::parse(req.body);
            json curve_doc = body.contains("curve") ? body["curve"] : json::object();
            if (body.contains("frame"))
                curve_doc["frame_index"] = body["frame"];
            const CurveDoc doc = curve_from_json(curve_doc);
            if (static_cast<std::size_t>(doc.frame_index) >= frames_.size())
                return fail(res, 400, "frame out of range");
            stop_job(*s);
            reply(res, 200, {{"result", result_json(anchor(*s, doc.frame_index, doc.curve))}});
        } catch (const json::exception& e) {
            fail(res, 400, std::string("malformed request: ") + e.what());
        } catch (const Error& e) {
            fail(res, 400, e.what());
        }
    });

    server.Get(R"(/sessions/([^/]+)/progress)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto s = find(req.matches[1].str());
        if (!s)
            return fail(res, 404, "no such session");
        std::lock_guard lock(s->mutex);
        const int total = static_cast<int>(frames_.size()) - 1 - s->from_frame;
        json j = {{"job_id", s->job_id},
                  {"running", s->running.load()},
                  {"from_frame", s->from_frame},
                  {"done", s->done},
                  {"total", total},
                  {"available", json::array()}};
        for (const auto& [i, _] : s->frames)
            j["available"].push_back(i);
        if (!s->error.empty())
            j["error"] = s->error;
        reply(res, 200, j);
    });
}

}  // namespace roam::service
