#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace decof {

double accuracy(const ScoredSet& set, double threshold) {
    if (set.empty()) throw data_error("accuracy over an empty score set");
    int64_t correct = 0;
    for (const auto& s : set) {
        if (!std::isfinite(s.score)) throw data_error("non-finite score for " + s.video_id);
        const bool predicted_generated = s.score >= threshold;
        if (predicted_generated == (s.label == 1)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(set.size());
}

double average_precision(const ScoredSet& set) {
    if (set.empty()) throw data_error("average precision over an empty score set");
    ScoredSet sorted = set;
    std::sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.video_id < b.video_id;
    });
    int64_t positives = 0;
    double sum = 0.0;
    for (size_t rank = 0; rank < sorted.size(); ++rank) {
        if (sorted[rank].label == 1) {
            ++positives;
            sum += static_cast<double>(positives) / static_cast<double>(rank + 1);
        }
    }
    if (positives == 0) throw data_error("average precision needs at least one positive label");
    return sum / static_cast<double>(positives);
}

double aggregate_frames(const std::vector<double>& frame_scores) {
    if (frame_scores.empty()) throw data_error("aggregating an empty frame score list");
    double sum = 0.0;
    for (double s : frame_scores) sum += s;
    return sum / static_cast<double>(frame_scores.size());
}

} // namespace decof
