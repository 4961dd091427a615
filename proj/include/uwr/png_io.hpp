#pragma once

#include <filesystem>

#include "uwr/types.hpp"

namespace uwr {

// 8-bit RGB PNG. Reading coerces grayscale/palette/alpha inputs to RGB8;
// 16-bit inputs are rejected.
Image8 read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image8& image);

} // namespace uwr
