#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace decof {

// Little-endian binary primitives shared by the container formats
// (checkpoints, feature caches, encoder weights): 4-byte magic, u32 version,
// one JSON header document, then raw f32le payloads.

void write_bytes(std::ostream& out, const void* data, size_t n);
void write_u32le(std::ostream& out, uint32_t v);
void write_f32le(std::ostream& out, const float* data, size_t n);

void read_bytes(std::istream& in, void* data, size_t n, const std::string& what);
uint32_t read_u32le(std::istream& in, const std::string& what);
std::vector<float> read_f32le(std::istream& in, size_t n, const std::string& what);

void expect_magic(std::istream& in, const char magic[4], const std::string& what);

// Reads exactly one JSON object by brace matching (string/escape aware), so a
// header needs no explicit length prefix.
std::string read_json_object_text(std::istream& in, const std::string& what);

} // namespace decof
