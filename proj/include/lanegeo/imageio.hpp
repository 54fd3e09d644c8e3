#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lanegeo/raster.hpp"

namespace lanegeo {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_png(const Raster& r);
Raster decode_png(const std::vector<std::uint8_t>& bytes);
Raster decode_jpeg(const std::vector<std::uint8_t>& bytes);
/// Dispatch on magic bytes (PNG or JPEG).
Raster decode_image(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Write via temp file + rename so concurrent writers never expose a torn file.
void atomic_write_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace lanegeo
