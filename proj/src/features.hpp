#pragma once

#include <filesystem>
#include <string>

#include "tensor.hpp"

namespace decof {

// Per-frame embeddings of one video as produced by a frozen encoder.
struct FeatureSequence {
    Tensor features; // [L, D]
    std::string video_id;
    std::string encoder_id;

    int64_t frames() const { return features.shape.empty() ? 0 : features.dim(0); }
    int64_t dim() const { return features.shape.size() < 2 ? 0 : features.dim(1); }
    void validate() const;
};

// Cache file: magic "DCFC", u32 version, JSON header
// {video_id, encoder_id, dtype:"f32le", shape:[L,D]}, then L*D f32le payload.
std::filesystem::path feature_cache_path(const std::filesystem::path& dir,
                                         const std::string& video_id);
std::filesystem::path write_feature_cache(const FeatureSequence& fs,
                                          const std::filesystem::path& dir);
FeatureSequence load_feature_cache(const std::filesystem::path& path);

} // namespace decof
