#include "checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "binfile.hpp"

namespace decof {

namespace {

constexpr char kMagic[4] = {'D', 'C', 'O', 'F'};
constexpr uint32_t kVersion = 1;

nlohmann::json config_to_json(const VerifierConfig& c) {
    return {
        {"seq_len", c.seq_len},   {"width", c.width},           {"layers", c.layers},
        {"heads", c.heads},       {"mlp_hidden", c.mlp_hidden}, {"dropout", c.dropout},
        {"head_hidden", c.head_hidden},
    };
}

VerifierConfig config_from_json(const nlohmann::json& j) {
    VerifierConfig c;
    c.seq_len = j.at("seq_len").get<int64_t>();
    c.width = j.at("width").get<int64_t>();
    c.layers = j.at("layers").get<int64_t>();
    c.heads = j.at("heads").get<int64_t>();
    c.mlp_hidden = j.at("mlp_hidden").get<int64_t>();
    c.dropout = j.at("dropout").get<double>();
    c.head_hidden = j.at("head_hidden").get<int64_t>();
    c.validate();
    return c;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const VerifierParams& params,
                     const std::string& encoder_id) {
    if (!params.all_finite()) throw runtime_error("refusing to save non-finite parameters");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw runtime_error("cannot open " + path.string() + " for writing");

    nlohmann::json tensors = nlohmann::json::array();
    int64_t offset = 0;
    params.for_each([&](const std::string& name, const Tensor& t) {
        tensors.push_back({{"name", name}, {"shape", t.shape}, {"offset", offset}});
        offset += t.numel() * 4;
    });
    nlohmann::json header = {
        {"format", "decof-checkpoint"},
        {"config", config_to_json(params.config)},
        {"encoder_id", encoder_id},
        {"tensors", tensors},
    };

    write_bytes(out, kMagic, 4);
    write_u32le(out, kVersion);
    const std::string text = header.dump();
    write_bytes(out, text.data(), text.size());
    params.for_each(
        [&](const std::string&, const Tensor& t) { write_f32le(out, t.ptr(), t.data.size()); });
    out.flush();
    if (!out) throw runtime_error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open checkpoint " + path.string());
    const std::string what = "checkpoint " + path.string();

    expect_magic(in, kMagic, what);
    const uint32_t version = read_u32le(in, what);
    if (version != kVersion)
        throw data_error(what + ": unsupported version " + std::to_string(version));

    nlohmann::json header;
    VerifierConfig config;
    Checkpoint ckpt;
    try {
        header = nlohmann::json::parse(read_json_object_text(in, what));
        config = config_from_json(header.at("config"));
        ckpt.encoder_id = header.value("encoder_id", "");
    } catch (const nlohmann::json::exception& e) {
        throw data_error(what + ": bad JSON header: " + e.what());
    }

    ckpt.params = zeros_like(VerifierParams{.config = config});
    ckpt.params.config = config;

    // the directory must list tensors in canonical order with consistent
    // shapes and contiguous offsets
    const auto& tensors = header.at("tensors");
    size_t index = 0;
    int64_t offset = 0;
    ckpt.params.for_each([&](const std::string& name, Tensor& t) {
        if (index >= tensors.size()) throw data_error(what + ": tensor directory too short");
        const auto& entry = tensors.at(index);
        if (entry.at("name").get<std::string>() != name)
            throw data_error(what + ": tensor " + std::to_string(index) + " expected \"" + name +
                             "\", found \"" + entry.at("name").get<std::string>() + "\"");
        const auto shape = entry.at("shape").get<std::vector<int64_t>>();
        if (shape != t.shape)
            throw data_error(what + ": tensor \"" + name + "\" shape " + shape_str(shape) +
                             " does not match config-implied " + shape_str(t.shape));
        if (entry.at("offset").get<int64_t>() != offset)
            throw data_error(what + ": tensor \"" + name + "\" offset mismatch");
        t.data = read_f32le(in, t.data.size(), what + " payload for " + name);
        offset += t.numel() * 4;
        ++index;
    });
    if (index != tensors.size()) throw data_error(what + ": tensor directory too long");
    if (!ckpt.params.all_finite()) throw data_error(what + ": non-finite parameter payload");
    return ckpt;
}

} // namespace decof
