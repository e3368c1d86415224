// Command-line front end: track a sequence directory, evaluate predictions,
// generate synthetic sequences, and run the solver self-test. Prediction CSV
// goes to stdout; progress and warnings go to stderr.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stp/engine.hpp"
#include "stp/eval.hpp"
#include "stp/io.hpp"
#include "stp/params_io.hpp"
#include "stp/sequence.hpp"
#include "stp/synth.hpp"

#ifdef STP_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace {

using namespace stp;

#ifdef STP_HAVE_OPENCV
ImageU8 decode_with_opencv(const std::string& path) {
    const cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw LoadError("cannot decode image: " + path);
    ImageU8 im = ImageU8::make(m.cols, m.rows, 3);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const cv::Vec3b px = m.at<cv::Vec3b>(y, x);  // BGR
            im.at(x, y, 0) = px[2];
            im.at(x, y, 1) = px[1];
            im.at(x, y, 2) = px[0];
        }
    return im;
}
#endif

void draw_box(ImageU8& im, const Box& box, const uint8_t color[3]) {
    const int x0 = static_cast<int>(std::lround(box.x));
    const int y0 = static_cast<int>(std::lround(box.y));
    const int x1 = x0 + static_cast<int>(std::lround(box.w)) - 1;
    const int y1 = y0 + static_cast<int>(std::lround(box.h)) - 1;
    auto paint = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= im.width || y >= im.height) return;
        for (int c = 0; c < im.channels; ++c)
            im.at(x, y, c) = im.channels == 3 ? color[c] : color[1];
    };
    for (int t = 0; t < 2; ++t) {  // two-pixel border
        for (int x = x0; x <= x1; ++x) {
            paint(x, y0 + t);
            paint(x, y1 - t);
        }
        for (int y = y0; y <= y1; ++y) {
            paint(x0 + t, y);
            paint(x1 - t, y);
        }
    }
}

const uint8_t* state_color(char label) {
    static const uint8_t green[3] = {0, 200, 0};    // confident search
    static const uint8_t orange[3] = {255, 150, 0}; // re-vote
    static const uint8_t red[3] = {220, 0, 0};      // crisis
    switch (label) {
        case 'W': return orange;
        case 'C': return red;
        default: return green;  // S and U
    }
}

void write_trace(const std::vector<FrameRecord>& recs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    out << "frame,label,end,Mv,tv,moved,cx,cy,x,y,w,h,candidates,reliable,gold\n";
    char buf[256];
    for (const FrameRecord& r : recs) {
        std::snprintf(buf, sizeof(buf), "%d,%c,%s,%.4f,%.4f,%d,%d,%d,%.2f,%.2f,%.2f,%.2f,%d,%d,%d",
                      r.frame, r.label, to_string(r.end_state), r.m_v, r.t_v_eff, r.moved ? 1 : 0,
                      r.center_x, r.center_y, r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h,
                      r.n_candidate, r.n_reliable, r.n_gold);
        out << buf << "\n";
    }
}

int run_track(const std::string& seq_dir, const std::string& params_path,
              const std::string& ablation, const std::string& dump_dir,
              const std::string& trace_path) {
    const SequenceSpec spec = load_sequence(seq_dir);
    for (const std::string& w : spec.warnings) std::cerr << "warning: " << w << "\n";

    TrackerParams params;
    if (!params_path.empty()) params = load_params(params_path);
    if (!ablation.empty()) params.mode = parse_tracker_mode(ablation);

    namespace fs = std::filesystem;
    if (!dump_dir.empty()) fs::create_directories(dump_dir);
    auto dump = [&](size_t index, const ImageU8& frame, const FrameRecord& rec) {
        if (dump_dir.empty()) return;
        ImageU8 annotated = frame;
        draw_box(annotated, rec.bbox, state_color(rec.label));
        char name[32];
        std::snprintf(name, sizeof(name), "%04zu.ppm", index + 1);
        write_pnm((fs::path(dump_dir) / name).string(), annotated);
    };

    const ImageU8 first = load_image(spec.frame_paths[0]);
    Tracker tracker(first, spec.boxes[0], params);

    std::vector<FrameRecord> records;
    records.push_back(tracker.initial_record());
    dump(0, first, records.back());

    const auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 1; i < spec.frame_paths.size(); ++i) {
        const ImageU8 frame = load_image(spec.frame_paths[i]);
        records.push_back(tracker.step(frame));
        dump(i, frame, records.back());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<PredictionRow> rows;
    rows.reserve(records.size());
    for (const FrameRecord& r : records) rows.push_back(record_to_row(r));
    write_predictions(rows, std::cout);

    if (!trace_path.empty()) write_trace(records, trace_path);
    if (records.size() > 1)
        std::fprintf(stderr, "tracked %zu frames in %.2fs (%.1f fps after init)\n",
                     records.size(), seconds, (records.size() - 1) / std::max(seconds, 1e-9));
    return 0;
}

int run_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& curve_path) {
    const std::vector<PredictionRow> rows = read_predictions(pred_path);
    if (rows.empty()) throw UsageError("no prediction rows in " + pred_path);

    std::ifstream gt_in(gt_path);
    if (!gt_in) throw LoadError("cannot open " + gt_path);
    std::vector<Box> gt = detail::parse_box_lines(gt_in, gt_path);
    if (gt.empty()) throw LoadError(gt_path + ": no boxes");

    std::vector<Box> pred;
    for (const PredictionRow& r : rows) pred.push_back(r.box);
    const size_t n = std::min(pred.size(), gt.size());
    if (pred.size() != gt.size()) {
        std::cerr << "warning: " << pred.size() << " predictions vs " << gt.size()
                  << " ground-truth boxes; evaluating the overlap\n";
        pred.resize(n);
        gt.resize(n);
    }

    const EvalResult res = evaluate(pred, gt);
    double mean = 0.0;
    for (double e : res.errors) mean += e;
    mean /= static_cast<double>(res.errors.size());

    std::printf("frames: %zu\n", n);
    std::printf("mean center error: %.2f px\n", mean);
    for (int t : {5, 10, 20, 50}) std::printf("precision(%d) = %.3f\n", t, res.precision_at(t));

    if (!curve_path.empty()) write_precision_curve(res, curve_path);
    return 0;
}

int run_synth(const std::string& config_path, const std::string& out_dir) {
    const SynthConfig cfg = load_synth_config(config_path);
    const SynthSequence seq = generate_synthetic(cfg);
    write_sequence(seq, out_dir);
    int hidden = 0;
    for (uint8_t f : seq.occluded) hidden += f;
    std::printf("wrote %d frames (%dx%d, %d occluded) to %s\n", cfg.frames, cfg.width, cfg.height,
                hidden, out_dir.c_str());
    return 0;
}

// Small deterministic sweep over the solver identities; the full-depth runs
// live in the acceptance binary.
int run_selftest() {
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int failures = 0;
    auto report = [&](const char* what, double worst, double tol) {
        const bool ok = worst < tol;
        std::printf("[%s] %s (worst %.3e, tolerance %.0e)\n", ok ? "ok" : "fail", what, worst, tol);
        if (!ok) ++failures;
    };

    double worst_bank = 0, worst_weighted = 0, worst_cosine = 0, worst_forms = 0, worst_cal = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + trial * 3;
        const int k = n + 10 + trial * 7;
        const double lambda = trial % 2 ? 0.1 : 1.0;
        Eigen::MatrixXd D(n, k);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < k; ++c) D(r, c) = gauss(rng);

        const ClassifierBank bank = train_bank(D, lambda);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd direct = train_single_oracle(D, i, lambda);
            worst_bank = std::max(worst_bank,
                                  (bank.columns.col(i) - direct).norm() / direct.norm());

            const double w = 1.0 + (trial % 5);
            const Eigen::VectorXd weighted = train_weighted_oracle(D, i, lambda, w);
            const double q = weighted_scale_factor(D.row(i), direct, w);
            worst_weighted = std::max(worst_weighted,
                                      (weighted - q * direct).norm() / weighted.norm());
            worst_cosine = std::max(
                worst_cosine, std::abs(1.0 - weighted.dot(direct) /
                                                 (weighted.norm() * direct.norm())));

            Eigen::VectorXd col = bank.columns.col(i);
            if (calibrate_column(col, D.row(i)))
                worst_cal = std::max(worst_cal, std::abs(response(col, D.row(i)) - 1.0));
        }

        const Eigen::MatrixXd small_form =
            (D.transpose() * D + lambda * Eigen::MatrixXd::Identity(k, k)).inverse() *
            D.transpose();
        const Eigen::MatrixXd large_form =
            D.transpose() *
            (D * D.transpose() + lambda * Eigen::MatrixXd::Identity(n, n)).inverse();
        worst_forms = std::max(worst_forms, (small_form - large_form).cwiseAbs().maxCoeff());
    }

    report("bank columns match per-sample direct solves", worst_bank, 1e-8);
    report("weighted solves are rescaled unweighted solves", worst_weighted, 1e-8);
    report("weighting preserves classifier direction", worst_cosine, 1e-12);
    report("both closed forms of the solution agree", worst_forms, 1e-8);
    report("calibrated classifiers respond with 1 at home", worst_cal, 1e-9);
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef STP_HAVE_OPENCV
    stp::extra_image_decoder() = decode_with_opencv;
#endif

    CLI::App app{"society-of-parts tracker"};
    app.require_subcommand(1);

    std::string seq_dir, params_path, ablation, dump_dir, trace_path;
    CLI::App* track = app.add_subcommand("track", "track a sequence; prediction CSV on stdout");
    track->add_option("seq-dir", seq_dir, "sequence directory (img/ + ground-truth file)")
        ->required();
    track->add_option("--params", params_path, "key=value parameter file");
    track->add_option("--ablation", ablation, "tracker mode: s, sw or full")
        ->check(CLI::IsMember({"s", "sw", "full"}));
    track->add_option("--dump-frames", dump_dir, "write annotated frames to this directory");
    track->add_option("--trace", trace_path, "write the per-frame state trace CSV");

    std::string pred_path, gt_path, curve_path;
    CLI::App* eval_cmd = app.add_subcommand("eval", "precision of a prediction CSV against ground truth");
    eval_cmd->add_option("predictions", pred_path, "prediction CSV from `track`")->required();
    eval_cmd->add_option("groundtruth", gt_path, "ground-truth box file")->required();
    eval_cmd->add_option("--curve", curve_path, "write the full precision curve CSV");

    std::string synth_config, synth_out;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    synth->add_option("config", synth_config, "JSON generator config")->required();
    synth->add_option("out-dir", synth_out, "output sequence directory")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "verify the closed-form solver identities");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) return run_track(seq_dir, params_path, ablation, dump_dir, trace_path);
        if (eval_cmd->parsed()) return run_eval(pred_path, gt_path, curve_path);
        if (synth->parsed()) return run_synth(synth_config, synth_out);
        if (selftest->parsed()) return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
