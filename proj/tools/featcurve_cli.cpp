// Command-line front end: synthetic scene generation, detection, proposal
// generation, selection, end-to-end runs, evaluation, and knob sweeps.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "featcurve/featcurve.hpp"
#include "featcurve/io.hpp"

namespace fs = std::filesystem;
using namespace featcurve;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;

struct CommonOptions {
    PipelineConfig cfg;
    std::string config_path;
    std::string scorer = "oracle";
    std::string mode = "combined";
    bool print_config = false;
};

void add_pipeline_flags(CLI::App* app, CommonOptions& opt) {
    auto& cfg = opt.cfg;
    app->add_option("--config", opt.config_path, "flat key=value config file");
    app->add_flag("--print-config", opt.print_config, "echo the resolved configuration");
    app->add_option("--tau-e", cfg.detection.tau_e, "edge probability threshold");
    app->add_option("--tau-c", cfg.detection.tau_c, "corner probability threshold");
    app->add_option("--delta-factor", cfg.detection.delta_factor,
                    "corner NMS distance as a fraction of the bbox diagonal");
    app->add_option("--lambda-e", cfg.detection.lambda_e, "edge offset regression weight");
    app->add_option("--lambda-c", cfg.detection.lambda_c, "corner offset regression weight");
    app->add_option("--focal-gamma", cfg.detection.focal_gamma, "focal loss gamma");
    app->add_option("--focal-alpha", cfg.detection.focal_alpha, "focal loss alpha");
    app->add_option("--apply-edge-offsets", cfg.detection.apply_edge_offsets,
                    "project edge points by D_e before proposals (0/1)");
    app->add_option("--covariance-k", cfg.detection.covariance_k,
                    "neighborhood size for the covariance scorer");
    app->add_option("--radius-scale", cfg.proposals.radius_scale,
                    "corner-pair sphere radius multiplier");
    app->add_option("--sample-k", cfg.proposals.sample_k, "sphere subsample cardinality");
    app->add_option("--segment-tol", cfg.proposals.segment_tol,
                    "segmentation tolerance as a fraction of the pair radius");
    app->add_option("--em-iters", cfg.proposals.em_iters, "fit/re-segment alternations");
    app->add_option("--w-m", cfg.proposals.w_m, "proposal mask loss weight");
    app->add_option("--w-c", cfg.proposals.w_c, "proposal type loss weight");
    app->add_option("--w-p", cfg.proposals.w_p, "proposal parameter loss weight");
    app->add_option("--min-coverage", cfg.proposals.min_coverage,
                    "minimum curve-bin coverage for an open proposal");
    app->add_option("--corner-clearance", cfg.proposals.corner_clearance,
                    "minimum curve distance to foreign corners, times pair radius");
    app->add_option("--k-margin", cfg.closed.k_margin, "similarity margin K");
    app->add_option("--s-bar", cfg.closed.s_bar, "similarity row threshold");
    app->add_option("--min-members", cfg.closed.min_members, "minimum closed cluster size");
    app->add_option("--feature-knn", cfg.closed.feature_knn,
                    "neighborhood for geometric features");
    app->add_option("--oracle-features", cfg.closed.oracle_features,
                    "use ground-truth curve ids as features (0/1)");
    app->add_option("--tau-o", cfg.selection.tau_o, "open overlap threshold");
    app->add_option("--tau-gamma", cfg.selection.tau_gamma, "closed confidence floor");
    app->add_option("--tau-iou", cfg.selection.tau_iou, "closed clustering IoU threshold");
    app->add_option("--scorer", opt.scorer, "oracle | covariance | sidecar");
    app->add_option("--mode", opt.mode, "open_only | closed_only | combined");
    app->add_option("--seed", cfg.seed, "seed for all randomized stages");
    app->add_option("--workers", cfg.workers, "worker threads for pair fitting");
}

// config file first, then flags override (flags already parsed into cfg, so
// the file is loaded up front from a pre-scan of argv)
void preload_config(int argc, char** argv, CommonOptions& opt) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            load_config_file(opt.cfg, argv[i + 1]);
            return;
        }
        if (a.rfind("--config=", 0) == 0) {
            load_config_file(opt.cfg, a.substr(9));
            return;
        }
    }
}

void finalize_common(CommonOptions& opt) {
    if (opt.scorer == "oracle") opt.cfg.scorer = ScorerKind::Oracle;
    else if (opt.scorer == "covariance") opt.cfg.scorer = ScorerKind::Covariance;
    else if (opt.scorer == "sidecar") opt.cfg.scorer = ScorerKind::Sidecar;
    else throw IoError("unknown scorer '" + opt.scorer + "'");
    if (opt.mode == "open_only") opt.cfg.mode = PipelineMode::OpenOnly;
    else if (opt.mode == "closed_only") opt.cfg.mode = PipelineMode::ClosedOnly;
    else if (opt.mode == "combined") opt.cfg.mode = PipelineMode::Combined;
    else throw IoError("unknown mode '" + opt.mode + "'");
    if (opt.print_config) std::cout << config_to_text(opt.cfg);
}

std::string require_stem(const std::string& in) {
    std::string stem = in;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".ply")
        stem = stem.substr(0, stem.size() - 4);
    if (!fs::exists(stem + ".ply")) throw IoError("input not found: " + stem + ".ply");
    if (!fs::exists(stem + ".json")) throw IoError("input not found: " + stem + ".json");
    if (!fs::exists(stem + ".scores")) throw IoError("input not found: " + stem + ".scores");
    return stem;
}

struct LoadedScene {
    SceneBundle bundle;
    std::vector<GtCurve> gt_curves;
};

LoadedScene load(const std::string& stem) {
    LoadedScene s;
    s.bundle = load_scene(stem);
    for (std::size_t i = 0; i < s.bundle.curves.size(); ++i)
        s.gt_curves.push_back({s.bundle.curves[i], static_cast<int>(i)});
    return s;
}

json report_to_json(const EvalReport& r, const CurveSet& cs) {
    return json{{"ecd", r.ecd},          {"iou", r.iou},
                {"precision", r.precision}, {"recall", r.recall},
                {"tp", r.tp},            {"fp", r.fp},
                {"fn", r.fn},            {"open_curves", cs.open.size()},
                {"closed_curves", cs.closed.size()}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open output " + path);
    f << text;
    if (!f) throw IoError("short write to " + path);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out, std::uint64_t seed, int n_points,
              const std::string& kind, int lines, int arcs, int circles, int bsplines,
              double noise_x, int subsample_to, bool use_fps) {
    SceneSpec spec;
    spec.seed = seed;
    spec.n_points = n_points;
    spec.kind = solid_kind_from_string(kind);
    spec.budget = {lines, arcs, circles, bsplines};
    spec.noise_x = noise_x;
    SyntheticScene scene = generate(spec);
    if (subsample_to > 0) scene = subsample(scene, subsample_to, use_fps);
    save_scene(out, scene);
    std::cout << "wrote " << out << ".ply/.json/.scores (" << scene.cloud.size()
              << " points, " << scene.curves.size() << " curves, " << scene.corners.size()
              << " corners)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

PointScores make_scores(const LoadedScene& s, const CommonOptions& opt,
                        const std::string& sidecar_path) {
    switch (opt.cfg.scorer) {
        case ScorerKind::Oracle: return oracle_scorer(s.bundle.gt);
        case ScorerKind::Covariance:
            return covariance_scorer(s.bundle.cloud, opt.cfg.detection.covariance_k);
        default:
            if (sidecar_path.empty()) throw IoError("sidecar scorer requires --sidecar");
            return read_scores(sidecar_path);
    }
}

int cmd_detect(const std::string& in, const CommonOptions& opt, const std::string& sidecar,
               const std::string& out_scores, const std::string& out_json) {
    const auto s = load(require_stem(in));
    const auto scores = make_scores(s, opt, sidecar);
    const auto det = threshold_points(s.bundle.cloud, scores, opt.cfg.detection);
    const auto corners =
        corner_nms(det, opt.cfg.detection.delta_factor * s.bundle.cloud.bbox_diagonal());
    if (!out_scores.empty()) write_scores(out_scores, scores);
    if (!out_json.empty()) {
        json j;
        j["edge_idx"] = det.edge_idx;
        json pos = json::array();
        for (const auto& p : det.edge_pos) pos.push_back(to_json(p));
        j["edge_pos"] = pos;
        j["corner_raw_idx"] = det.corner_idx;
        json cj = json::array();
        for (const auto& c : corners)
            cj.push_back({{"index", c.index}, {"position", to_json(c.position)},
                          {"prob", c.prob}});
        j["corners"] = cj;
        write_text(out_json, j.dump(2) + "\n");
    }
    std::cout << det.edge_idx.size() << " edge points, " << det.corner_idx.size()
              << " corner candidates, " << corners.size() << " corners after NMS\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// propose / select (stage-resumable artifacts)
// ---------------------------------------------------------------------------

struct Stages {
    DetectedPoints det;
    std::vector<Corner> corners;
    std::vector<OpenProposal> open_raw;
    std::vector<ClosedProposal> closed_raw;  // members are edge-local indices
    SimilarityMatrix similarity;
};

Stages run_stages(const LoadedScene& s, const CommonOptions& opt,
                  const std::string& sidecar) {
    Stages st;
    const auto scores = make_scores(s, opt, sidecar);
    const auto& cfg = opt.cfg;
    st.det = threshold_points(s.bundle.cloud, scores, cfg.detection);
    st.corners = corner_nms(st.det, cfg.detection.delta_factor * s.bundle.cloud.bbox_diagonal());

    std::vector<OpenProposal> open_kept;
    if (cfg.mode != PipelineMode::ClosedOnly && st.corners.size() >= 2) {
        st.open_raw = propose_open(st.det.edge_pos, st.det.edge_idx, st.corners,
                                   cfg.proposals, cfg.seed, cfg.workers);
        open_kept = select_open(st.open_raw, cfg.selection);
    }
    if (cfg.mode != PipelineMode::OpenOnly) {
        std::vector<std::uint8_t> eligible(st.det.edge_idx.size(), 1);
        const std::vector<std::uint8_t>* mask = nullptr;
        if (cfg.mode == PipelineMode::Combined && !open_kept.empty()) {
            std::vector<char> claimed(s.bundle.cloud.size(), 0);
            for (const auto& p : open_kept)
                for (int ci : p.members) claimed[ci] = 1;
            for (std::size_t k = 0; k < st.det.edge_idx.size(); ++k)
                eligible[k] = claimed[st.det.edge_idx[k]] ? 0 : 1;
            mask = &eligible;
        }
        const GroundTruthLabels* gt = cfg.closed.oracle_features ? &s.bundle.gt : nullptr;
        st.closed_raw = propose_closed(st.det.edge_pos, st.det.edge_idx, gt, opt.cfg, mask,
                                       s.bundle.cloud.bbox_diagonal(), &st.similarity);
    }
    return st;
}

json stages_to_json(const Stages& st) {
    json j;
    j["edge_idx"] = st.det.edge_idx;
    json pos = json::array();
    for (const auto& p : st.det.edge_pos) pos.push_back(to_json(p));
    j["edge_pos"] = pos;
    json cj = json::array();
    for (const auto& c : st.corners)
        cj.push_back({{"index", c.index}, {"position", to_json(c.position)}, {"prob", c.prob}});
    j["corners"] = cj;
    json open = json::array();
    for (const auto& p : st.open_raw) open.push_back(open_proposal_to_json(p));
    j["open"] = open;
    json closed = json::array();
    for (const auto& p : st.closed_raw) closed.push_back(closed_proposal_to_json(p));
    j["closed"] = closed;
    return j;
}

CurveSet select_stages(const json& j, const SelectionConfig& sel) {
    std::vector<OpenProposal> open_raw;
    for (const auto& pj : j.at("open")) open_raw.push_back(open_proposal_from_json(pj));
    std::vector<ClosedProposal> closed_raw;
    for (const auto& pj : j.at("closed")) closed_raw.push_back(closed_proposal_from_json(pj));
    std::vector<Point3> edge_pos;
    for (const auto& pj : j.at("edge_pos")) edge_pos.push_back(point_from_json(pj));
    const std::vector<int> edge_idx = j.at("edge_idx").get<std::vector<int>>();

    CurveSet cs;
    cs.open = select_open(open_raw, sel);
    cs.closed = select_closed(closed_raw, edge_pos, sel);
    for (auto& p : cs.closed) {
        for (auto& m : p.members) m = edge_idx[m];
        p.seed = edge_idx[p.seed];
    }
    return cs;
}

int cmd_propose(const std::string& in, const CommonOptions& opt, const std::string& sidecar,
                const std::string& out, const std::string& open_jsonl,
                const std::string& sim_path) {
    const auto s = load(require_stem(in));
    const auto st = run_stages(s, opt, sidecar);
    if (!out.empty()) write_text(out, stages_to_json(st).dump(2) + "\n");
    if (!open_jsonl.empty()) {
        std::ostringstream lines;
        for (const auto& p : st.open_raw) lines << open_proposal_to_json(p).dump() << "\n";
        write_text(open_jsonl, lines.str());
    }
    if (!sim_path.empty()) write_similarity(sim_path, st.similarity);
    std::cout << st.open_raw.size() << " open proposals, " << st.closed_raw.size()
              << " closed proposals\n";
    return kExitOk;
}

int cmd_select(const std::string& proposals_path, const CommonOptions& opt,
               const std::string& out) {
    std::ifstream f(proposals_path);
    if (!f) throw IoError("input not found: " + proposals_path);
    json j;
    f >> j;
    const CurveSet cs = select_stages(j, opt.cfg.selection);
    std::vector<int> detected = j.at("edge_idx").get<std::vector<int>>();
    write_text(out, curve_set_to_json(cs, &detected).dump(2) + "\n");
    std::cout << cs.open.size() << " open curves, " << cs.closed.size()
              << " closed curves selected\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

int cmd_pipeline(const std::string& in, const std::string& gt_in, const CommonOptions& opt,
                 const std::string& sidecar, const std::string& out,
                 const std::string& report_path, const std::string& obj_path,
                 const std::string& dump_dir) {
    std::string gt_stem = gt_in;
    if (!gt_stem.empty()) {
        if (gt_stem.size() > 5 && gt_stem.substr(gt_stem.size() - 5) == ".json")
            gt_stem = gt_stem.substr(0, gt_stem.size() - 5);
    }
    auto s = load(require_stem(gt_stem.empty() ? in : gt_stem));
    if (!gt_stem.empty()) {
        // the cloud comes from --in; labels/curves from --gt (indices must align)
        const PlyData ply = read_ply(in.size() > 4 && in.substr(in.size() - 4) == ".ply"
                                         ? in
                                         : in + ".ply");
        if (ply.points.size() != s.bundle.cloud.size())
            throw IoError("pipeline: --in and --gt point counts differ");
        s.bundle.cloud = PointCloud(ply.points);
    }
    std::optional<PointScores> external;
    if (opt.cfg.scorer == ScorerKind::Sidecar) {
        if (sidecar.empty()) throw IoError("sidecar scorer requires --sidecar");
        external = read_scores(sidecar);
    }
    const auto res = run_pipeline(s.bundle.cloud, &s.bundle.gt, &s.bundle.curves, opt.cfg,
                                  external ? &*external : nullptr);
    if (!out.empty())
        write_text(out, curve_set_to_json(res.curves, &res.artifacts.detected.edge_idx)
                                .dump(2) +
                            "\n");
    if (!report_path.empty() && res.report)
        write_text(report_path, report_to_json(*res.report, res.curves).dump(2) + "\n");
    if (!obj_path.empty()) write_obj_polylines(obj_path, res.curves.curves());
    if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        write_scores((fs::path(dump_dir) / "scores.fcs").string(), res.artifacts.scores);
        Stages st{res.artifacts.detected, res.artifacts.corners, res.artifacts.open_raw,
                  res.artifacts.closed_raw};
        write_text((fs::path(dump_dir) / "proposals.json").string(),
                   stages_to_json(st).dump(2) + "\n");
    }
    std::cout << res.curves.open.size() << " open curves, " << res.curves.closed.size()
              << " closed curves";
    if (res.report) std::cout << ", ecd " << res.report->ecd;
    std::cout << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& pred_path, const std::string& gt_stem,
             const std::string& out, const std::string& csv_path) {
    std::ifstream f(pred_path);
    if (!f) throw IoError("input not found: " + pred_path);
    json j;
    f >> j;
    const CurveSet cs = curve_set_from_json(j);
    const auto s = load(require_stem(gt_stem));

    EvalReport r;
    if (j.contains("detected_edges")) {
        r = edge_classification_metrics(j.at("detected_edges").get<std::vector<int>>(),
                                        s.bundle.gt.edge_indices());
    }
    const auto predicted = cs.curves();
    r.ecd = predicted.empty() ? std::numeric_limits<double>::infinity()
                              : edge_chamfer_distance(predicted, s.bundle.curves);
    const json rj = report_to_json(r, cs);
    if (!out.empty()) write_text(out, rj.dump(2) + "\n");
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "scene,ecd,iou,precision,recall\n"
            << fs::path(gt_stem).filename().string() << "," << r.ecd << "," << r.iou << ","
            << r.precision << "," << r.recall << "\n";
        write_text(csv_path, csv.str());
    }
    std::cout << rj.dump() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

// short knob names resolve against each config section in turn
std::string guess_knob_key(const std::string& knob) {
    PipelineConfig probe;
    for (const char* prefix : {"detection.", "proposals.", "closed.", "selection."}) {
        const std::string key = prefix + knob;
        try {
            if (apply_config_kv(probe, key, "1")) return key;
        } catch (...) {
        }
    }
    return knob;
}

int cmd_ablate(const std::string& knob, const std::string& values_csv,
               const std::string& suite, const CommonOptions& base,
               const std::string& out_csv, const std::string& out_summary) {
    std::vector<std::string> values;
    {
        std::stringstream ss(values_csv);
        std::string v;
        while (std::getline(ss, v, ',')) values.push_back(v);
    }
    if (values.empty()) throw IoError("ablate: no values given");

    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(suite)) {
        const auto p = entry.path();
        if (p.extension() == ".ply") stems.push_back(p.parent_path() / p.stem());
    }
    std::sort(stems.begin(), stems.end());
    if (stems.empty()) throw IoError("ablate: no .ply scenes under " + suite);

    std::ostringstream csv;
    csv << "scene,knob,value,ecd,iou,precision,recall,open_curves,closed_curves\n";
    struct Sums {
        double ecd = 0, iou = 0, precision = 0, recall = 0;
        int n = 0;
    };
    std::map<std::string, Sums> by_value;
    for (const auto& stem : stems) {
        // scenes regenerate from their stored spec so noise/density sweeps
        // transform the same underlying geometry
        std::ifstream jf(stem + ".json");
        if (!jf) throw IoError("ablate: missing " + stem + ".json");
        json sj;
        jf >> sj;
        SceneSpec spec;
        const auto& spj = sj.at("spec");
        spec.seed = spj.at("seed").get<std::uint64_t>();
        spec.n_points = spj.at("n_points").get<int>();
        spec.kind = solid_kind_from_string(spj.at("kind").get<std::string>());
        spec.noise_x = spj.at("noise_x").get<double>();
        spec.budget.lines = spj.at("budget").at("lines").get<int>();
        spec.budget.arcs = spj.at("budget").at("arcs").get<int>();
        spec.budget.circles = spj.at("budget").at("circles").get<int>();
        spec.budget.bsplines = spj.at("budget").at("bsplines").get<int>();

        for (const auto& value : values) {
            CommonOptions opt = base;
            SyntheticScene scene = generate(spec);
            if (knob == "noise_x") {
                scene = add_noise(scene, std::stod(value));
            } else if (knob == "density") {
                scene = subsample(scene, std::stoi(value));
            } else {
                const std::string key =
                    knob.find('.') != std::string::npos ? knob : guess_knob_key(knob);
                if (!apply_config_kv(opt.cfg, key, value))
                    throw IoError("ablate: unknown knob '" + knob + "'");
            }
            const auto res =
                run_pipeline(scene.cloud, &scene.gt, &scene.curves, opt.cfg, nullptr);
            const auto& r = *res.report;
            csv << fs::path(stem).filename().string() << "," << knob << "," << value << ","
                << r.ecd << "," << r.iou << "," << r.precision << "," << r.recall << ","
                << res.curves.open.size() << "," << res.curves.closed.size() << "\n";
            auto& sums = by_value[value];
            sums.ecd += r.ecd;
            sums.iou += r.iou;
            sums.precision += r.precision;
            sums.recall += r.recall;
            ++sums.n;
        }
    }
    write_text(out_csv, csv.str());
    if (!out_summary.empty()) {
        json summary;
        summary["knob"] = knob;
        json means = json::array();
        for (const auto& value : values) {
            const auto& s2 = by_value[value];
            means.push_back({{"value", value},
                             {"scenes", s2.n},
                             {"mean_ecd", s2.ecd / s2.n},
                             {"mean_iou", s2.iou / s2.n},
                             {"mean_precision", s2.precision / s2.n},
                             {"mean_recall", s2.recall / s2.n}});
        }
        summary["means"] = means;
        write_text(out_summary, summary.dump(2) + "\n");
    }
    std::cout << "wrote " << out_csv << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parametric feature-curve inference for 3D point clouds"};
    app.require_subcommand(1);

    CommonOptions opt;
    try {
        preload_config(argc, argv, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic ground-truth scene");
    std::string synth_out = "scene", synth_kind = "box_union";
    std::uint64_t synth_seed = 0;
    int synth_n = 8096, synth_lines = 0, synth_arcs = 0, synth_circles = 0,
        synth_bsplines = 0, synth_sub = 0;
    double synth_noise = 0.0;
    bool synth_fps = false;
    synth->add_option("--out", synth_out, "output stem (.ply/.json/.scores)")->required();
    synth->add_option("--seed", synth_seed, "generation seed");
    synth->add_option("--n-points", synth_n, "points to sample");
    synth->add_option("--kind", synth_kind, "box_union | cylinder_union | wireframe_only");
    synth->add_option("--lines", synth_lines, "line budget");
    synth->add_option("--arcs", synth_arcs, "arc budget");
    synth->add_option("--circles", synth_circles, "circle budget");
    synth->add_option("--bsplines", synth_bsplines, "bspline budget");
    synth->add_option("--noise-x", synth_noise, "normal noise scale X");
    synth->add_option("--subsample", synth_sub, "subsample to P points after generation");
    synth->add_flag("--fps", synth_fps, "subsample by farthest point sampling");

    // detect
    auto* detect = app.add_subcommand("detect", "score points and run corner NMS");
    std::string det_in, det_sidecar, det_out_scores, det_out_json;
    detect->add_option("--in", det_in, "scene stem")->required();
    detect->add_option("--sidecar", det_sidecar, "external score file");
    detect->add_option("--out-scores", det_out_scores, "write the scores sidecar");
    detect->add_option("--out", det_out_json, "write detection JSON");
    add_pipeline_flags(detect, opt);

    // propose
    auto* propose = app.add_subcommand("propose", "generate open and closed proposals");
    std::string prop_in, prop_sidecar, prop_out = "proposals.json", prop_jsonl, prop_sim;
    propose->add_option("--in", prop_in, "scene stem")->required();
    propose->add_option("--sidecar", prop_sidecar, "external score file");
    propose->add_option("--out", prop_out, "stage artifact JSON");
    propose->add_option("--open-jsonl", prop_jsonl, "open proposals as JSON lines");
    propose->add_option("--dump-similarity", prop_sim, "binary similarity matrix dump");
    add_pipeline_flags(propose, opt);

    // select
    auto* select = app.add_subcommand("select", "filter dumped proposals into curves");
    std::string sel_in, sel_out = "curves.json";
    select->add_option("--proposals", sel_in, "stage artifact JSON from propose")->required();
    select->add_option("--out", sel_out, "output curve JSON");
    add_pipeline_flags(select, opt);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run the full pipeline on a scene");
    std::string pipe_in, pipe_gt, pipe_sidecar, pipe_out, pipe_report, pipe_obj, pipe_dump;
    pipe->add_option("--in", pipe_in, "scene stem or .ply")->required();
    pipe->add_option("--gt", pipe_gt, "ground-truth stem (defaults to --in)");
    pipe->add_option("--sidecar", pipe_sidecar, "external score file");
    pipe->add_option("--out", pipe_out, "output curve JSON");
    pipe->add_option("--report", pipe_report, "metrics report JSON");
    pipe->add_option("--export-obj", pipe_obj, "polyline OBJ export");
    pipe->add_option("--dump-stages", pipe_dump, "directory for stage artifacts");
    add_pipeline_flags(pipe, opt);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a prediction against ground truth");
    std::string eval_pred, eval_gt, eval_out, eval_csv;
    eval->add_option("--pred", eval_pred, "prediction curve JSON")->required();
    eval->add_option("--gt", eval_gt, "ground-truth scene stem")->required();
    eval->add_option("--out", eval_out, "report JSON");
    eval->add_option("--csv", eval_csv, "report CSV");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "sweep a knob over a scene suite");
    std::string ab_knob, ab_values, ab_suite, ab_out = "ablation.csv", ab_summary;
    ablate->add_option("--knob", ab_knob, "config key, short name, noise_x, or density")
        ->required();
    ablate->add_option("--values", ab_values, "comma-separated values")->required();
    ablate->add_option("--suite", ab_suite, "directory of scene stems")->required();
    ablate->add_option("--out", ab_out, "output CSV");
    ablate->add_option("--summary", ab_summary, "JSON summary with per-value means");
    add_pipeline_flags(ablate, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        finalize_common(opt);
        if (synth->parsed())
            return cmd_synth(synth_out, synth_seed, synth_n, synth_kind, synth_lines,
                             synth_arcs, synth_circles, synth_bsplines, synth_noise,
                             synth_sub, synth_fps);
        if (detect->parsed())
            return cmd_detect(det_in, opt, det_sidecar, det_out_scores, det_out_json);
        if (propose->parsed())
            return cmd_propose(prop_in, opt, prop_sidecar, prop_out, prop_jsonl, prop_sim);
        if (select->parsed()) return cmd_select(sel_in, opt, sel_out);
        if (pipe->parsed())
            return cmd_pipeline(pipe_in, pipe_gt, opt, pipe_sidecar, pipe_out, pipe_report,
                                pipe_obj, pipe_dump);
        if (eval->parsed()) return cmd_eval(eval_pred, eval_gt, eval_out, eval_csv);
        if (ablate->parsed())
            return cmd_ablate(ab_knob, ab_values, ab_suite, opt, ab_out, ab_summary);
        std::cerr << "error: no subcommand\n";
        return kExitInput;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InfeasibleSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
}
