#include "features.hpp"

#include <fstream>

#include <json.hpp>

#include "binfile.hpp"

namespace decof {

namespace {
constexpr char kMagic[4] = {'D', 'C', 'F', 'C'};
constexpr uint32_t kVersion = 1;
} // namespace

void FeatureSequence::validate() const {
    if (features.shape.size() != 2)
        throw data_error("feature sequence must be 2-D, got " + shape_str(features.shape));
    if (frames() < 1) throw data_error("feature sequence needs at least one frame");
    if (dim() < 1) throw data_error("feature sequence width must be >= 1");
    if (!features.all_finite())
        throw data_error("feature sequence for \"" + video_id + "\" contains non-finite values");
}

std::filesystem::path feature_cache_path(const std::filesystem::path& dir,
                                         const std::string& video_id) {
    return dir / (video_id + ".dcfc");
}

std::filesystem::path write_feature_cache(const FeatureSequence& fs,
                                          const std::filesystem::path& dir) {
    fs.validate();
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = feature_cache_path(dir, fs.video_id);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw runtime_error("cannot open " + path.string() + " for writing");

    nlohmann::json header;
    header["video_id"] = fs.video_id;
    header["encoder_id"] = fs.encoder_id;
    header["dtype"] = "f32le";
    header["shape"] = {fs.frames(), fs.dim()};

    write_bytes(out, kMagic, 4);
    write_u32le(out, kVersion);
    const std::string text = header.dump();
    write_bytes(out, text.data(), text.size());
    write_f32le(out, fs.features.ptr(), fs.features.data.size());
    out.flush();
    if (!out) throw runtime_error("write failed for " + path.string());
    return path;
}

FeatureSequence load_feature_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open feature cache " + path.string());
    const std::string what = "feature cache " + path.string();

    expect_magic(in, kMagic, what);
    const uint32_t version = read_u32le(in, what);
    if (version != kVersion)
        throw data_error(what + ": unsupported version " + std::to_string(version));

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(read_json_object_text(in, what));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(what + ": bad JSON header: " + e.what());
    }

    FeatureSequence fs;
    try {
        fs.video_id = header.at("video_id").get<std::string>();
        fs.encoder_id = header.at("encoder_id").get<std::string>();
        if (header.at("dtype").get<std::string>() != "f32le")
            throw data_error(what + ": unsupported dtype");
        const auto shape = header.at("shape");
        const int64_t l = shape.at(0).get<int64_t>();
        const int64_t d = shape.at(1).get<int64_t>();
        if (l < 1 || d < 1) throw data_error(what + ": invalid shape in header");
        fs.features = Tensor({l, d});
    } catch (const nlohmann::json::exception& e) {
        throw data_error(what + ": bad JSON header: " + e.what());
    }

    fs.features.data = read_f32le(in, fs.features.data.size(), what + " payload");
    // trailing bytes mean the header shape and the payload disagree
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0)
        throw data_error(what + ": payload longer than header shape " +
                         shape_str(fs.features.shape) + " implies");
    fs.validate();
    return fs;
}

} // namespace decof
