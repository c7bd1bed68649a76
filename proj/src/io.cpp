#include "roam/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace roam {

namespace {

using json = nlohmann::json;

json plane_to_json(const Plane<double>& p)
{
    return {{"w", p.width()}, {"h", p.height()}, {"v", p.data()}};
}

Plane<double> plane_from_json(const json& j)
{
    Plane<double> p(j.at("w").get<int>(), j.at("h").get<int>());
    const auto v = j.at("v").get<std::vector<double>>();
    if (v.size() != p.size())
        throw InputError("checkpoint plane has the wrong size");
    p.data() = v;
    return p;
}

json gmm_to_json(const Gmm& g)
{
    return {{"weights", g.weights}, {"means", g.means}, {"variances", g.variances}};
}

Gmm gmm_from_json(const json& j)
{
    Gmm g;
    g.weights = j.at("weights").get<std::vector<double>>();
    g.means = j.at("means").get<std::vector<Color>>();
    g.variances = j.at("variances").get<std::vector<Color>>();
    if (g.means.size() != g.weights.size() || g.variances.size() != g.weights.size())
        throw InputError("checkpoint mixture is inconsistent");
    return g;
}

json model_to_json(const FgBgModel& m) { return {{"fg", gmm_to_json(m.fg)}, {"bg", gmm_to_json(m.bg)}}; }
FgBgModel model_from_json(const json& j) { return {gmm_from_json(j.at("fg")), gmm_from_json(j.at("bg"))}; }

json point(Point p) { return json::array({p.x, p.y}); }
Point point_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json vertices_json(const RotoCurve& c)
{
    json v = json::array();
    for (Point p : c.vertices())
        v.push_back(point(p));
    return v;
}

RotoCurve vertices_from(const json& v)
{
    if (!v.is_array())
        throw InputError("vertices must be an array");
    std::vector<Point> pts;
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
            throw InputError("each vertex must be an [x, y] integer pair");
        pts.push_back({p[0].get<int>(), p[1].get<int>()});
    }
    return RotoCurve(std::move(pts));
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

json curve_to_json(const CurveDoc& doc)
{
    return {{"frame_index", doc.frame_index}, {"vertices", vertices_json(doc.curve)}};
}

CurveDoc curve_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("vertices"))
        throw InputError("curve document needs a vertices field");
    for (const auto& [key, _] : j.items())
        if (key != "frame_index" && key != "vertices")
            throw InputError("unknown curve document field: " + key);
    CurveDoc doc;
    if (j.contains("frame_index")) {
        if (!j["frame_index"].is_number_integer() || j["frame_index"].get<long long>() < 0)
            throw InputError("frame_index must be a non-negative integer");
        doc.frame_index = j["frame_index"].get<int>();
    }
    doc.curve = vertices_from(j["vertices"]);
    return doc;
}

CurveDoc read_curve_doc(const std::filesystem::path& path)
{
    try {
        return curve_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw InputError("malformed curve file " + path.string() + ": " + e.what());
    }
}

void write_curve_doc(const std::filesystem::path& path, const CurveDoc& doc)
{
    write_text_file(path, curve_to_json(doc).dump(1) + "\n");
}

std::string metrics_csv_header() { return "frame,iou,accuracy,e_total,e_curve,e_land,e_joint,iters,ms"; }

std::string metrics_csv_row(const FrameResult& r)
{
    std::ostringstream s;
    s << r.frame_index << ',' << (r.iou ? fmt("%.6f", *r.iou) : "") << ','
      << (r.accuracy ? fmt("%.6f", *r.accuracy) : "") << ',' << fmt("%.6f", r.energy.total) << ','
      << fmt("%.6f", r.energy.e_curve) << ',' << fmt("%.6f", r.energy.e_land) << ','
      << fmt("%.6f", r.energy.e_joint) << ',' << r.iterations << ',' << fmt("%.3f", r.ms);
    return s.str();
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<FrameResult>& results)
{
    std::string text = metrics_csv_header() + "\n";
    for (const auto& r : results)
        text += metrics_csv_row(r) + "\n";
    write_text_file(path, text);
}

json state_to_json(const TrackerState& s)
{
    json lms = json::array();
    for (const auto& l : s.pool.landmarks) {
        json pairings = json::array();
        for (const auto& p : l.pairings)
            pairings.push_back({{"vertex", p.vertex}, {"mu", point(p.mu)}});
        lms.push_back({{"id", l.id},
                       {"position", point(l.position)},
                       {"prev_position", point(l.prev_position)},
                       {"psr", l.psr},
                       {"lost", l.lost},
                       {"filter",
                        {{"size", l.filter.size},
                         {"h", plane_to_json(l.filter.h)},
                         {"kernel", plane_to_json(l.filter.kernel)},
                         {"kernel_sum", l.filter.kernel_sum}}},
                       {"pairings", pairings}});
    }
    json locals = json::array();
    for (const auto& m : s.local_models)
        locals.push_back(model_to_json(m));
    const Weights& w = s.weights;
    return {
        {"frame_index", s.frame_index},
        {"curve", vertices_json(s.curve)},
        {"prev_curve", vertices_json(s.prev_curve)},
        {"weights",
         {{"mu", w.mu},
          {"lambda", w.lambda},
          {"w_loc", w.w_loc},
          {"w_glob", w.w_glob},
          {"w_land", w.w_land},
          {"w_joint", w.w_joint},
          {"support_w", w.support_w},
          {"pure_l2", w.pure_l2}}},
        {"flags",
         {{"lost", s.flags.lost},
          {"no_landmarks", s.flags.no_landmarks},
          {"dp_fallback", s.flags.dp_fallback},
          {"warp_failed", s.flags.warp_failed}}},
        {"global_model", model_to_json(s.global_model)},
        {"local_models", locals},
        {"pool",
         {{"prev_root", {s.pool.prev_root.x, s.pool.prev_root.y}},
          {"root_shift", point(s.pool.root_shift)},
          {"next_id", s.pool.next_id},
          {"landmarks", lms}}},
    };
}

TrackerState state_from_json(const json& j)
{
    try {
        TrackerState s;
        s.frame_index = j.at("frame_index").get<int>();
        s.curve = vertices_from(j.at("curve"));
        s.prev_curve = vertices_from(j.at("prev_curve"));
        const json& w = j.at("weights");
        s.weights.mu = w.at("mu").get<double>();
        s.weights.lambda = w.at("lambda").get<double>();
        s.weights.w_loc = w.at("w_loc").get<double>();
        s.weights.w_glob = w.at("w_glob").get<double>();
        s.weights.w_land = w.at("w_land").get<double>();
        s.weights.w_joint = w.at("w_joint").get<double>();
        s.weights.support_w = w.at("support_w").get<int>();
        s.weights.pure_l2 = w.at("pure_l2").get<bool>();
        const json& f = j.at("flags");
        s.flags.lost = f.at("lost").get<bool>();
        s.flags.no_landmarks = f.at("no_landmarks").get<bool>();
        s.flags.dp_fallback = f.at("dp_fallback").get<bool>();
        s.flags.warp_failed = f.at("warp_failed").get<bool>();
        s.global_model = model_from_json(j.at("global_model"));
        for (const auto& m : j.at("local_models"))
            s.local_models.push_back(model_from_json(m));
        const json& pool = j.at("pool");
        s.pool.prev_root = {pool.at("prev_root").at(0).get<double>(), pool.at("prev_root").at(1).get<double>()};
        s.pool.root_shift = point_from(pool.at("root_shift"));
        s.pool.next_id = pool.at("next_id").get<int>();
        for (const auto& lj : pool.at("landmarks")) {
            Landmark l;
            l.id = lj.at("id").get<int>();
            l.position = point_from(lj.at("position"));
            l.prev_position = point_from(lj.at("prev_position"));
            l.psr = lj.at("psr").get<double>();
            l.lost = lj.at("lost").get<bool>();
            const json& fj = lj.at("filter");
            l.filter.size = fj.at("size").get<int>();
            l.filter.h = plane_from_json(fj.at("h"));
            l.filter.kernel = plane_from_json(fj.at("kernel"));
            l.filter.kernel_sum = fj.at("kernel_sum").get<double>();
            for (const auto& pj : lj.at("pairings"))
                l.pairings.push_back({pj.at("vertex").get<int>(), point_from(pj.at("mu"))});
            s.pool.landmarks.push_back(std::move(l));
        }
        if (s.local_models.size() != s.curve.size())
            throw InputError("checkpoint local model count does not match the curve");
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed checkpoint: ") + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write " + path.string());
        out << text;
        if (!out)
            throw InputError("cannot write " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace roam
