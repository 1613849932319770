#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "featcurve/pipeline.hpp"
#include "featcurve/synthdata.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts unsupported");

namespace featcurve {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Curve (de)serialization
// ---------------------------------------------------------------------------

inline json to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

inline Point3 point_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline json curve_to_json(const ParametricCurve& c) {
    json j;
    j["kind"] = to_string(c.kind());
    j["closed"] = c.closed;
    switch (c.kind()) {
        case CurveKind::Line:
            j["a"] = to_json(c.line().a);
            j["b"] = to_json(c.line().b);
            break;
        case CurveKind::Circle: {
            const auto& cc = c.circle();
            j["n"] = to_json(cc.n);
            j["c"] = to_json(cc.c);
            j["r"] = cc.r;
            j["u"] = to_json(cc.u);
            j["arc_range"] = json::array({cc.arc_lo, cc.arc_hi});
            if (cc.provenance) {
                j["three_points"] = json::array({to_json(cc.provenance->p1),
                                                 to_json(cc.provenance->p2),
                                                 to_json(cc.provenance->p3)});
            }
            break;
        }
        case CurveKind::BSpline: {
            json ctrl = json::array();
            for (const auto& p : c.bspline().control) ctrl.push_back(to_json(p));
            j["control"] = ctrl;
            break;
        }
    }
    return j;
}

inline ParametricCurve curve_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "line") {
        return make_line(point_from_json(j.at("a")), point_from_json(j.at("b")));
    }
    if (kind == "circle") {
        CircleCanonical c;
        c.n = point_from_json(j.at("n"));
        c.c = point_from_json(j.at("c"));
        c.r = j.at("r").get<double>();
        c.u = point_from_json(j.at("u"));
        // repair only when the stored frame is off; exact data keeps its bits
        if (std::abs(c.n.norm() - 1.0) > 1e-12) c.n = c.n.normalized();
        if (std::abs(c.u.dot(c.n)) > 1e-12 || std::abs(c.u.norm() - 1.0) > 1e-12)
            c.u = (c.u - c.n * c.u.dot(c.n)).normalized();
        c.v = c.u.cross(c.n);
        c.arc_lo = j.at("arc_range").at(0).get<double>();
        c.arc_hi = j.at("arc_range").at(1).get<double>();
        if (j.contains("three_points")) {
            const auto& tp = j.at("three_points");
            c.provenance = CircleThreePoint{point_from_json(tp.at(0)), point_from_json(tp.at(1)),
                                            point_from_json(tp.at(2))};
        }
        return make_circle(c);
    }
    if (kind == "bspline") {
        CubicBSpline s;
        for (int i = 0; i < 4; ++i) s.control[i] = point_from_json(j.at("control").at(i));
        return make_bspline(s);
    }
    throw IoError("curve_from_json: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Scene bundle: PLY (points + labels), JSON (spec/curves/corners/ids),
// sidecar (ground-truth scores)
// ---------------------------------------------------------------------------

// label values in the PLY: 0 = off-feature, 1 = edge, 2 = corner (and edge)
inline void write_ply(const std::string& path, const std::vector<Point3>& pts,
                      const std::vector<std::uint8_t>& labels) {
    if (pts.size() != labels.size()) throw LengthMismatch("write_ply: label count mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_ply: cannot open " + path);
    f << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << pts.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar label\nend_header\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const float xyz[3] = {static_cast<float>(pts[i].x), static_cast<float>(pts[i].y),
                              static_cast<float>(pts[i].z)};
        f.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        f.write(reinterpret_cast<const char*>(&labels[i]), 1);
    }
    if (!f) throw IoError("write_ply: short write to " + path);
}

struct PlyData {
    std::vector<Point3> points;
    std::vector<std::uint8_t> labels;
};

inline PlyData read_ply(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_ply: cannot open " + path);
    std::string line;
    std::size_t count = 0;
    bool binary_le = false, ascii = false;
    struct Prop {
        std::string type, name;
    };
    std::vector<Prop> props;
    if (!std::getline(f, line) || line.rfind("ply", 0) != 0)
        throw IoError("read_ply: not a PLY file: " + path);
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            binary_le = fmt == "binary_little_endian";
            ascii = fmt == "ascii";
            if (!binary_le && !ascii) throw IoError("read_ply: unsupported format " + fmt);
        } else if (tok == "element") {
            std::string what;
            ss >> what >> count;
            if (what != "vertex") throw IoError("read_ply: only vertex elements supported");
        } else if (tok == "property") {
            Prop p;
            ss >> p.type >> p.name;
            props.push_back(p);
        } else if (tok == "end_header") {
            break;
        }
    }
    PlyData out;
    out.points.resize(count);
    out.labels.assign(count, 0);
    auto read_scalar = [&](const std::string& type) -> double {
        if (type == "float" || type == "float32") {
            float v;
            f.read(reinterpret_cast<char*>(&v), 4);
            return v;
        }
        if (type == "double" || type == "float64") {
            double v;
            f.read(reinterpret_cast<char*>(&v), 8);
            return v;
        }
        if (type == "uchar" || type == "uint8") {
            unsigned char v;
            f.read(reinterpret_cast<char*>(&v), 1);
            return v;
        }
        throw IoError("read_ply: unsupported property type " + type);
    };
    for (std::size_t i = 0; i < count; ++i) {
        for (const auto& p : props) {
            double v;
            if (ascii) {
                if (!(f >> v)) throw IoError("read_ply: truncated ascii data");
            } else {
                v = read_scalar(p.type);
            }
            if (p.name == "x") out.points[i].x = v;
            else if (p.name == "y") out.points[i].y = v;
            else if (p.name == "z") out.points[i].z = v;
            else if (p.name == "label") out.labels[i] = static_cast<std::uint8_t>(v);
        }
    }
    if (!f) throw IoError("read_ply: truncated data in " + path);
    return out;
}

// ---------------------------------------------------------------------------
// Score sidecar: 16-byte header then columnar little-endian float32
// (index, T_e, T_c, D_e xyz, D_c xyz)
// ---------------------------------------------------------------------------

inline void write_scores(const std::string& path, const PointScores& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_scores: cannot open " + path);
    const char magic[4] = {'F', 'C', 'S', 'C'};
    const std::uint32_t version = 1, n = static_cast<std::uint32_t>(s.size()), reserved = 0;
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&n), 4);
    f.write(reinterpret_cast<const char*>(&reserved), 4);
    std::vector<float> col(n);
    auto write_col = [&] { f.write(reinterpret_cast<const char*>(col.data()), 4 * n); };
    for (std::uint32_t i = 0; i < n; ++i) col[i] = static_cast<float>(i);
    write_col();
    for (std::uint32_t i = 0; i < n; ++i) col[i] = static_cast<float>(s.edge_prob[i]);
    write_col();
    for (std::uint32_t i = 0; i < n; ++i) col[i] = static_cast<float>(s.corner_prob[i]);
    write_col();
    std::vector<float> vec(3 * n);
    auto write_vec = [&](const std::vector<Vec3>& src) {
        for (std::uint32_t i = 0; i < n; ++i) {
            vec[3 * i] = static_cast<float>(src[i].x);
            vec[3 * i + 1] = static_cast<float>(src[i].y);
            vec[3 * i + 2] = static_cast<float>(src[i].z);
        }
        f.write(reinterpret_cast<const char*>(vec.data()), 12 * n);
    };
    write_vec(s.edge_offset);
    write_vec(s.corner_offset);
    if (!f) throw IoError("write_scores: short write to " + path);
}

inline PointScores read_scores(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_scores: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, n = 0, reserved = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&n), 4);
    f.read(reinterpret_cast<char*>(&reserved), 4);
    if (!f || std::string(magic, 4) != "FCSC")
        throw IoError("read_scores: bad magic in " + path);
    PointScores s;
    s.edge_prob.resize(n);
    s.corner_prob.resize(n);
    s.edge_offset.resize(n);
    s.corner_offset.resize(n);
    std::vector<float> col(n);
    auto read_col = [&] {
        f.read(reinterpret_cast<char*>(col.data()), 4 * n);
    };
    read_col();  // indices: positional, ignored on load
    read_col();
    for (std::uint32_t i = 0; i < n; ++i) s.edge_prob[i] = col[i];
    read_col();
    for (std::uint32_t i = 0; i < n; ++i) s.corner_prob[i] = col[i];
    std::vector<float> vec(3 * n);
    auto read_vec = [&](std::vector<Vec3>& dst) {
        f.read(reinterpret_cast<char*>(vec.data()), 12 * n);
        for (std::uint32_t i = 0; i < n; ++i)
            dst[i] = Vec3{vec[3 * i], vec[3 * i + 1], vec[3 * i + 2]};
    };
    read_vec(s.edge_offset);
    read_vec(s.corner_offset);
    if (!f) throw IoError("read_scores: truncated file " + path);
    return s;
}

// ---------------------------------------------------------------------------
// Similarity matrix dump: 16-byte header (magic, M) + row-major float32
// ---------------------------------------------------------------------------

inline void write_similarity(const std::string& path, const SimilarityMatrix& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_similarity: cannot open " + path);
    const char magic[4] = {'F', 'C', 'S', 'M'};
    const std::uint32_t m = static_cast<std::uint32_t>(s.m);
    const std::uint64_t reserved = 0;
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&m), 4);
    f.write(reinterpret_cast<const char*>(&reserved), 8);
    std::vector<float> row(s.m);
    for (std::size_t i = 0; i < s.m; ++i) {
        for (std::size_t j = 0; j < s.m; ++j) row[j] = static_cast<float>(s.at(i, j));
        f.write(reinterpret_cast<const char*>(row.data()), 4 * s.m);
    }
    if (!f) throw IoError("write_similarity: short write to " + path);
}

// ---------------------------------------------------------------------------
// Scene bundle
// ---------------------------------------------------------------------------

inline json scene_to_json(const SyntheticScene& scene) {
    json j;
    j["spec"] = {{"seed", scene.spec.seed},
                 {"n_points", scene.spec.n_points},
                 {"kind", to_string(scene.spec.kind)},
                 {"noise_x", scene.spec.noise_x},
                 {"budget",
                  {{"lines", scene.spec.budget.lines},
                   {"arcs", scene.spec.budget.arcs},
                   {"circles", scene.spec.budget.circles},
                   {"bsplines", scene.spec.budget.bsplines}}}};
    json curves = json::array();
    for (const auto& c : scene.curves) curves.push_back(curve_to_json(c));
    j["curves"] = curves;
    json corners = json::array();
    for (const auto& c : scene.corners) corners.push_back(to_json(c));
    j["corners"] = corners;
    j["point_curve_ids"] = scene.gt.curve_id;
    return j;
}

inline SolidKind solid_kind_from_string(const std::string& s) {
    if (s == "box_union") return SolidKind::BoxUnion;
    if (s == "cylinder_union") return SolidKind::CylinderUnion;
    if (s == "wireframe_only") return SolidKind::WireframeOnly;
    throw IoError("unknown solid kind '" + s + "'");
}

struct SceneBundle {
    PointCloud cloud;
    GroundTruthLabels gt;
    std::vector<ParametricCurve> curves;
    std::vector<Point3> corners;
};

inline void save_scene(const std::string& stem, const SyntheticScene& scene) {
    std::vector<std::uint8_t> labels(scene.cloud.size(), 0);
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        if (scene.gt.corner_label[i]) labels[i] = 2;
        else if (scene.gt.edge_label[i]) labels[i] = 1;
    }
    write_ply(stem + ".ply", scene.cloud.points(), labels);
    std::ofstream jf(stem + ".json");
    if (!jf) throw IoError("save_scene: cannot open " + stem + ".json");
    jf << scene_to_json(scene).dump(2) << "\n";
    write_scores(stem + ".scores", oracle_scorer(scene.gt));
}

inline SceneBundle load_scene(const std::string& stem) {
    const PlyData ply = read_ply(stem + ".ply");
    std::ifstream jf(stem + ".json");
    if (!jf) throw IoError("load_scene: cannot open " + stem + ".json");
    json j;
    jf >> j;
    const PointScores gt_scores = read_scores(stem + ".scores");
    if (gt_scores.size() != ply.points.size())
        throw IoError("load_scene: score/point count mismatch for " + stem);

    SceneBundle out;
    out.cloud = PointCloud(ply.points);
    const std::size_t n = ply.points.size();
    out.gt.edge_label.resize(n);
    out.gt.corner_label.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.gt.edge_label[i] = ply.labels[i] >= 1 ? 1 : 0;
        out.gt.corner_label[i] = ply.labels[i] == 2 ? 1 : 0;
    }
    out.gt.edge_offset = gt_scores.edge_offset;
    out.gt.corner_offset = gt_scores.corner_offset;
    out.gt.curve_id = j.at("point_curve_ids").get<std::vector<int>>();
    for (const auto& cj : j.at("curves")) out.curves.push_back(curve_from_json(cj));
    for (const auto& pj : j.at("corners")) out.corners.push_back(point_from_json(pj));
    return out;
}

// ---------------------------------------------------------------------------
// Curve set / proposal serialization
// ---------------------------------------------------------------------------

inline json open_proposal_to_json(const OpenProposal& p) {
    return json{{"corner_i", p.pair.i},
                {"corner_j", p.pair.j},
                {"c1", to_json(p.pair.c1)},
                {"c2", to_json(p.pair.c2)},
                {"members", p.members},
                {"type", to_string(p.type)},
                {"curve", curve_to_json(p.curve)},
                {"residual", p.fit_residual},
                {"coverage", p.coverage},
                {"support_gap", p.support_gap}};
}

inline OpenProposal open_proposal_from_json(const json& j) {
    OpenProposal p;
    p.pair.i = j.at("corner_i").get<int>();
    p.pair.j = j.at("corner_j").get<int>();
    p.pair.c1 = point_from_json(j.at("c1"));
    p.pair.c2 = point_from_json(j.at("c2"));
    p.pair.center = (p.pair.c1 + p.pair.c2) * 0.5;
    p.pair.radius = 0.5 * dist(p.pair.c1, p.pair.c2);
    p.members = j.at("members").get<std::vector<int>>();
    p.curve = curve_from_json(j.at("curve"));
    p.type = p.curve.kind();
    p.fit_residual = j.at("residual").get<double>();
    p.coverage = j.at("coverage").get<double>();
    p.support_gap = j.value("support_gap", 0.0);
    return p;
}

inline json closed_proposal_to_json(const ClosedProposal& p) {
    json anchors = json::array();
    json offsets = json::array();
    for (int k = 0; k < 3; ++k) {
        anchors.push_back(to_json(p.anchors[k]));
        offsets.push_back(to_json(p.offsets[k]));
    }
    return json{{"seed", p.seed},
                {"members", p.members},
                {"curve", curve_to_json(make_circle(p.circle))},
                {"gamma", p.confidence},
                {"residual", p.fit_residual},
                {"anchors", anchors},
                {"offsets", offsets}};
}

inline ClosedProposal closed_proposal_from_json(const json& j) {
    ClosedProposal p;
    p.seed = j.at("seed").get<int>();
    p.members = j.at("members").get<std::vector<int>>();
    p.circle = curve_from_json(j.at("curve")).circle();
    p.confidence = j.at("gamma").get<double>();
    p.fit_residual = j.at("residual").get<double>();
    for (int k = 0; k < 3; ++k) {
        p.anchors[k] = point_from_json(j.at("anchors").at(k));
        p.offsets[k] = point_from_json(j.at("offsets").at(k));
    }
    return p;
}

inline json curve_set_to_json(const CurveSet& cs, const std::vector<int>* detected_edges) {
    json open = json::array(), closed = json::array();
    for (const auto& p : cs.open) open.push_back(open_proposal_to_json(p));
    for (const auto& p : cs.closed) closed.push_back(closed_proposal_to_json(p));
    json j{{"open", open}, {"closed", closed}};
    if (detected_edges) j["detected_edges"] = *detected_edges;
    return j;
}

inline CurveSet curve_set_from_json(const json& j) {
    CurveSet cs;
    for (const auto& pj : j.at("open")) cs.open.push_back(open_proposal_from_json(pj));
    for (const auto& pj : j.at("closed")) cs.closed.push_back(closed_proposal_from_json(pj));
    return cs;
}

// ---------------------------------------------------------------------------
// OBJ polyline export
// ---------------------------------------------------------------------------

inline void write_obj_polylines(const std::string& path,
                                const std::vector<ParametricCurve>& curves,
                                int samples_per_curve = 64) {
    std::ofstream f(path);
    if (!f) throw IoError("write_obj_polylines: cannot open " + path);
    f << "# polyline export, " << curves.size() << " curves\n";
    std::size_t base = 1;
    for (const auto& c : curves) {
        const auto pts = sample_curve(c, samples_per_curve);
        for (const auto& p : pts) f << "v " << p.x << " " << p.y << " " << p.z << "\n";
        f << "l";
        for (std::size_t k = 0; k < pts.size(); ++k) f << " " << base + k;
        if (c.closed) f << " " << base;  // wrap closed loops
        f << "\n";
        base += pts.size();
    }
    if (!f) throw IoError("write_obj_polylines: short write to " + path);
}

// ---------------------------------------------------------------------------
// Pipeline configuration as flat dotted key/value text
// ---------------------------------------------------------------------------

inline bool apply_config_kv(PipelineConfig& cfg, const std::string& key,
                            const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_bool = [&] { return value == "1" || value == "true" || value == "on"; };
    if (key == "detection.tau_e") cfg.detection.tau_e = as_double();
    else if (key == "detection.tau_c") cfg.detection.tau_c = as_double();
    else if (key == "detection.delta_factor") cfg.detection.delta_factor = as_double();
    else if (key == "detection.lambda_e") cfg.detection.lambda_e = as_double();
    else if (key == "detection.lambda_c") cfg.detection.lambda_c = as_double();
    else if (key == "detection.focal_gamma") cfg.detection.focal_gamma = as_double();
    else if (key == "detection.focal_alpha") cfg.detection.focal_alpha = as_double();
    else if (key == "detection.apply_edge_offsets") cfg.detection.apply_edge_offsets = as_bool();
    else if (key == "detection.covariance_k") cfg.detection.covariance_k = as_int();
    else if (key == "proposals.radius_scale") cfg.proposals.radius_scale = as_double();
    else if (key == "proposals.sample_k") cfg.proposals.sample_k = as_int();
    else if (key == "proposals.segment_tol") cfg.proposals.segment_tol = as_double();
    else if (key == "proposals.em_iters") cfg.proposals.em_iters = as_int();
    else if (key == "proposals.w_m") cfg.proposals.w_m = as_double();
    else if (key == "proposals.w_c") cfg.proposals.w_c = as_double();
    else if (key == "proposals.w_p") cfg.proposals.w_p = as_double();
    else if (key == "proposals.min_coverage") cfg.proposals.min_coverage = as_double();
    else if (key == "proposals.corner_clearance") cfg.proposals.corner_clearance = as_double();
    else if (key == "proposals.min_member_fraction")
        cfg.proposals.min_member_fraction = as_double();
    else if (key == "proposals.max_support_gap") cfg.proposals.max_support_gap = as_double();
    else if (key == "proposals.curve_samples") cfg.proposals.curve_samples = as_int();
    else if (key == "proposals.fps_subsample") cfg.proposals.fps_subsample = as_bool();
    else if (key == "closed.k_margin") cfg.closed.k_margin = as_double();
    else if (key == "closed.s_bar") cfg.closed.s_bar = as_double();
    else if (key == "closed.min_members") cfg.closed.min_members = as_int();
    else if (key == "closed.feature_knn") cfg.closed.feature_knn = as_int();
    else if (key == "closed.oracle_features") cfg.closed.oracle_features = as_bool();
    else if (key == "selection.tau_o") cfg.selection.tau_o = as_double();
    else if (key == "selection.tau_gamma") cfg.selection.tau_gamma = as_double();
    else if (key == "selection.tau_iou") cfg.selection.tau_iou = as_double();
    else if (key == "scorer") {
        if (value == "oracle") cfg.scorer = ScorerKind::Oracle;
        else if (value == "covariance") cfg.scorer = ScorerKind::Covariance;
        else if (value == "sidecar") cfg.scorer = ScorerKind::Sidecar;
        else return false;
    } else if (key == "mode") {
        if (value == "open_only") cfg.mode = PipelineMode::OpenOnly;
        else if (value == "closed_only") cfg.mode = PipelineMode::ClosedOnly;
        else if (value == "combined") cfg.mode = PipelineMode::Combined;
        else return false;
    } else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "workers") cfg.workers = as_int();
    else return false;
    return true;
}

inline void load_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_config_file: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw IoError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!apply_config_kv(cfg, key, value))
            throw IoError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                          "'");
    }
}

inline std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream s;
    s.precision(17);
    s << "detection.tau_e=" << cfg.detection.tau_e << "\n"
      << "detection.tau_c=" << cfg.detection.tau_c << "\n"
      << "detection.delta_factor=" << cfg.detection.delta_factor << "\n"
      << "detection.lambda_e=" << cfg.detection.lambda_e << "\n"
      << "detection.lambda_c=" << cfg.detection.lambda_c << "\n"
      << "detection.focal_gamma=" << cfg.detection.focal_gamma << "\n"
      << "detection.focal_alpha=" << cfg.detection.focal_alpha << "\n"
      << "detection.apply_edge_offsets=" << (cfg.detection.apply_edge_offsets ? 1 : 0) << "\n"
      << "detection.covariance_k=" << cfg.detection.covariance_k << "\n"
      << "proposals.radius_scale=" << cfg.proposals.radius_scale << "\n"
      << "proposals.sample_k=" << cfg.proposals.sample_k << "\n"
      << "proposals.segment_tol=" << cfg.proposals.segment_tol << "\n"
      << "proposals.em_iters=" << cfg.proposals.em_iters << "\n"
      << "proposals.w_m=" << cfg.proposals.w_m << "\n"
      << "proposals.w_c=" << cfg.proposals.w_c << "\n"
      << "proposals.w_p=" << cfg.proposals.w_p << "\n"
      << "proposals.min_coverage=" << cfg.proposals.min_coverage << "\n"
      << "proposals.corner_clearance=" << cfg.proposals.corner_clearance << "\n"
      << "proposals.min_member_fraction=" << cfg.proposals.min_member_fraction << "\n"
      << "proposals.max_support_gap=" << cfg.proposals.max_support_gap << "\n"
      << "proposals.curve_samples=" << cfg.proposals.curve_samples << "\n"
      << "proposals.fps_subsample=" << (cfg.proposals.fps_subsample ? 1 : 0) << "\n"
      << "closed.k_margin=" << cfg.closed.k_margin << "\n"
      << "closed.s_bar=" << cfg.closed.s_bar << "\n"
      << "closed.min_members=" << cfg.closed.min_members << "\n"
      << "closed.feature_knn=" << cfg.closed.feature_knn << "\n"
      << "closed.oracle_features=" << (cfg.closed.oracle_features ? 1 : 0) << "\n"
      << "selection.tau_o=" << cfg.selection.tau_o << "\n"
      << "selection.tau_gamma=" << cfg.selection.tau_gamma << "\n"
      << "selection.tau_iou=" << cfg.selection.tau_iou << "\n"
      << "scorer=" << to_string(cfg.scorer) << "\n"
      << "mode=" << to_string(cfg.mode) << "\n"
      << "seed=" << cfg.seed << "\n"
      << "workers=" << cfg.workers << "\n";
    return s.str();
}

}  // namespace featcurve
