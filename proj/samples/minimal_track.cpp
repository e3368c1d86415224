// Smallest end-to-end use of the library: generate a short synthetic
// sequence in memory, initialize the tracker from the first ground-truth
// box, and print one prediction row per frame.

#include <iostream>

#include <stp/stp.hpp>

int main() {
    stp::SynthConfig cfg;
    cfg.name = "demo";
    cfg.width = 160;
    cfg.height = 120;
    cfg.frames = 40;
    cfg.seed = 42;
    cfg.object_w = 40;
    cfg.object_h = 40;
    cfg.start_x = 12;
    cfg.start_y = 16;
    cfg.motion = {{1, 2.0, 1.0}, {25, -2.0, -1.0}};

    const stp::SynthSequence seq = stp::generate_synthetic(cfg);

    stp::TrackerParams params;  // defaults
    stp::Tracker tracker(seq.frames[0], seq.gt[0], params);

    std::vector<stp::PredictionRow> rows;
    rows.push_back(stp::record_to_row(tracker.initial_record()));
    for (size_t f = 1; f < seq.frames.size(); ++f)
        rows.push_back(stp::record_to_row(tracker.step(seq.frames[f])));

    stp::write_predictions(rows, std::cout);

    std::vector<stp::Box> predicted;
    for (const auto& r : rows) predicted.push_back(r.box);
    const stp::EvalResult eval = stp::evaluate(predicted, seq.gt);
    std::cerr << "precision(20px) = " << eval.precision_at(20) << "\n";
    return eval.precision_at(20) == 1.0 ? 0 : 1;
}
