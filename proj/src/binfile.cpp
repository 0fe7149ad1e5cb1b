#include "binfile.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "error.hpp"

namespace decof {

void write_bytes(std::ostream& out, const void* data, size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw runtime_error("binary write failed");
}

void write_u32le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    write_bytes(out, b, 4);
}

void write_f32le(std::ostream& out, const float* data, size_t n) {
    std::vector<unsigned char> buf(n * 4);
    for (size_t i = 0; i < n; ++i) {
        uint32_t bits;
        std::memcpy(&bits, &data[i], 4);
        buf[i * 4 + 0] = static_cast<unsigned char>(bits & 0xff);
        buf[i * 4 + 1] = static_cast<unsigned char>((bits >> 8) & 0xff);
        buf[i * 4 + 2] = static_cast<unsigned char>((bits >> 16) & 0xff);
        buf[i * 4 + 3] = static_cast<unsigned char>((bits >> 24) & 0xff);
    }
    if (!buf.empty()) write_bytes(out, buf.data(), buf.size());
}

void read_bytes(std::istream& in, void* data, size_t n, const std::string& what) {
    const long long at = static_cast<long long>(in.tellg());
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        throw data_error(what + ": truncated at byte offset " + std::to_string(at < 0 ? 0 : at) +
                         ", expected " + std::to_string(n) + " bytes, got " +
                         std::to_string(in.gcount()));
}

uint32_t read_u32le(std::istream& in, const std::string& what) {
    unsigned char b[4];
    read_bytes(in, b, 4, what);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

std::vector<float> read_f32le(std::istream& in, size_t n, const std::string& what) {
    std::vector<unsigned char> buf(n * 4);
    if (!buf.empty()) read_bytes(in, buf.data(), buf.size(), what);
    std::vector<float> out(n);
    for (size_t i = 0; i < n; ++i) {
        const uint32_t bits = static_cast<uint32_t>(buf[i * 4 + 0]) |
                              (static_cast<uint32_t>(buf[i * 4 + 1]) << 8) |
                              (static_cast<uint32_t>(buf[i * 4 + 2]) << 16) |
                              (static_cast<uint32_t>(buf[i * 4 + 3]) << 24);
        std::memcpy(&out[i], &bits, 4);
    }
    return out;
}

void expect_magic(std::istream& in, const char magic[4], const std::string& what) {
    char got[4];
    read_bytes(in, got, 4, what);
    if (std::memcmp(got, magic, 4) != 0)
        throw data_error(what + ": bad magic, expected \"" + std::string(magic, 4) + "\" got \"" +
                         std::string(got, 4) + "\"");
}

std::string read_json_object_text(std::istream& in, const std::string& what) {
    std::string text;
    int c = in.get();
    if (c != '{') throw data_error(what + ": JSON header must start with '{'");
    text.push_back('{');
    int depth = 1;
    bool in_string = false, escaped = false;
    while (depth > 0) {
        c = in.get();
        if (c == EOF) throw data_error(what + ": unterminated JSON header");
        text.push_back(static_cast<char>(c));
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
        } else {
            if (c == '"')
                in_string = true;
            else if (c == '{')
                ++depth;
            else if (c == '}')
                --depth;
        }
    }
    return text;
}

} // namespace decof
