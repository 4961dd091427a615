#pragma once

#include <filesystem>

#include "uwr/types.hpp"

namespace uwr {

// Grayscale PFM ("Pf"), scale -1.0 (little-endian). Scanlines are stored
// bottom-to-top per the PFM convention; DepthMap rows are top-to-bottom.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const DepthMap& map);

} // namespace uwr
