#pragma once

// Center-error evaluation (precision at threshold, OTB protocol) and the
// prediction/curve CSV formats. Prediction rows are
// frame,x,y,w,h,state,Mv with fixed decimal places so that writing, parsing
// and re-writing a file reproduces it byte for byte.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stp/engine.hpp"
#include "stp/errors.hpp"
#include "stp/raster.hpp"

namespace stp {

struct PredictionRow {
    int frame = 0;
    Box box;
    char state = 'S';
    double m_v = 0.0;
};

struct EvalResult {
    std::vector<double> errors;      // center error per aligned frame
    std::vector<uint8_t> included;   // frames counted toward precision
    std::vector<double> precision;   // index t = precision at threshold t px, t in [0,50]
    double fps = 0.0;                // filled by the caller when measured

    double precision_at(int threshold) const {
        if (threshold < 0 || threshold >= static_cast<int>(precision.size()))
            throw UsageError("precision threshold out of range");
        return precision[static_cast<size_t>(threshold)];
    }
};

// `exclude` (optional) removes frames — e.g. fully occluded ones — from the
// precision denominator; their errors are still reported.
inline EvalResult evaluate(const std::vector<Box>& predictions, const std::vector<Box>& gt,
                           const std::vector<uint8_t>& exclude = {}) {
    if (predictions.size() != gt.size())
        throw UsageError("evaluate: prediction/ground-truth length mismatch");
    if (!exclude.empty() && exclude.size() != gt.size())
        throw UsageError("evaluate: exclusion flag length mismatch");
    EvalResult res;
    res.errors.reserve(predictions.size());
    res.included.reserve(predictions.size());
    for (size_t i = 0; i < predictions.size(); ++i) {
        const double dx = predictions[i].cx() - gt[i].cx();
        const double dy = predictions[i].cy() - gt[i].cy();
        res.errors.push_back(std::hypot(dx, dy));
        res.included.push_back(exclude.empty() || !exclude[i] ? 1 : 0);
    }
    res.precision.assign(51, 0.0);
    size_t denom = 0;
    for (uint8_t f : res.included) denom += f;
    for (int t = 0; t <= 50; ++t) {
        size_t hits = 0;
        for (size_t i = 0; i < res.errors.size(); ++i)
            if (res.included[i] && res.errors[i] <= t) ++hits;
        res.precision[static_cast<size_t>(t)] =
            denom ? static_cast<double>(hits) / static_cast<double>(denom) : 0.0;
    }
    return res;
}

inline std::string format_prediction_row(const PredictionRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%.2f,%.2f,%.2f,%.2f,%c,%.4f", r.frame, r.box.x, r.box.y,
                  r.box.w, r.box.h, r.state, r.m_v);
    return buf;
}

inline void write_predictions(const std::vector<PredictionRow>& rows, std::ostream& out) {
    out << "frame,x,y,w,h,state,Mv\n";
    for (const PredictionRow& r : rows) out << format_prediction_row(r) << "\n";
}

inline void write_predictions(const std::vector<PredictionRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    write_predictions(rows, out);
}

inline std::vector<PredictionRow> parse_predictions(std::istream& in) {
    std::vector<PredictionRow> rows;
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (first && line.rfind("frame,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        if (line.find_first_not_of(" \r\n") == std::string::npos) continue;
        PredictionRow r;
        char state = 0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%c,%lf", &r.frame, &r.box.x, &r.box.y,
                        &r.box.w, &r.box.h, &state, &r.m_v) != 7)
            throw LoadError("bad prediction row on line " + std::to_string(lineno));
        r.state = state;
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<PredictionRow> read_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path);
    return parse_predictions(in);
}

inline void write_precision_curve(const EvalResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    out << "threshold,precision\n";
    char buf[64];
    for (size_t t = 0; t < res.precision.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.4f", t, res.precision[t]);
        out << buf << "\n";
    }
}

inline PredictionRow record_to_row(const FrameRecord& rec) {
    PredictionRow r;
    r.frame = rec.frame;
    r.box = rec.bbox;
    r.state = rec.label;
    r.m_v = rec.m_v;
    return r;
}

}  // namespace stp
