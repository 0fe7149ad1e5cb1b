#pragma once

#include <string>
#include <vector>

namespace decof {

struct Scored {
    double score = 0.0; // p(generated) in [0,1]
    int label = 0;      // 1 = generated, 0 = real
    std::string video_id;
    std::string generator;
};

using ScoredSet = std::vector<Scored>;

// Share of correct decisions at the threshold; a score exactly at the
// threshold classifies as generated.
double accuracy(const ScoredSet& set, double threshold = 0.5);

// Mean precision at the rank of each positive, ranked by descending score
// with ties broken by ascending video_id. Requires at least one positive.
double average_precision(const ScoredSet& set);

// Video-level score from frame-level scores: plain arithmetic mean.
double aggregate_frames(const std::vector<double>& frame_scores);

} // namespace decof
