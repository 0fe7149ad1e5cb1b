#pragma once

#include <filesystem>
#include <string>

#include "verifier.hpp"

namespace decof {

// Trained model as stored on disk: magic "DCOF", u32 format version, JSON
// header (config, encoder id, tensor directory with name/shape/offset), then
// the concatenated f32le tensor payloads. Offsets are relative to the first
// payload byte.
struct Checkpoint {
    VerifierParams params;
    std::string encoder_id;
};

void save_checkpoint(const std::filesystem::path& path, const VerifierParams& params,
                     const std::string& encoder_id);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace decof
