#pragma once

#include <filesystem>
#include <vector>

#include "features.hpp"
#include "verifier.hpp"

namespace decof {

struct TrainConfig {
    double lr = 0.001;
    double momentum = 0.9;
    int64_t batch_size = 32;
    int64_t max_epochs = 100;
    int64_t early_stop_patience = 10;
    uint64_t seed = 0;
    double label_smoothing = 0.0;

    void validate() const;
};

struct LabeledSequence {
    FeatureSequence sequence;
    int label = 0; // 1 = generated
};

struct EpochStats {
    int64_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_acc = 0.0;
    double val_ap = 0.0;
};

struct TrainResult {
    VerifierParams params; // best-validation-accuracy snapshot
    std::vector<EpochStats> curves;
    int64_t best_epoch = 0;
    double best_val_acc = 0.0;
    double best_val_ap = 0.0;
};

// Seeded mini-batch SGD with momentum; keeps the parameters from the epoch
// with the best validation accuracy and stops once `early_stop_patience`
// epochs pass without improvement. Single-threaded and bitwise deterministic
// for a fixed (seed, config, data).
TrainResult train_verifier(const std::vector<LabeledSequence>& train,
                           const std::vector<LabeledSequence>& val, const VerifierConfig& vcfg,
                           const TrainConfig& tcfg);

void write_curves_csv(const std::filesystem::path& path, const std::vector<EpochStats>& curves);

} // namespace decof
