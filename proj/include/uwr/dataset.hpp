#pragma once

#include <filesystem>
#include <vector>

#include "uwr/types.hpp"

namespace uwr {

// On-disk layout:
//   root/cameras.txt   CAMERA_ID PINHOLE WIDTH HEIGHT fx fy cx cy
//   root/images.txt    IMAGE_ID qw qx qy qz tx ty tz CAMERA_ID NAME  (world-to-camera)
//   root/images/NAME.png
//   root/depths/NAME.pfm
// Lines starting with '#' are comments; fields are whitespace-separated.
// NAME is a file stem without extension. Poses in images.txt are
// world-to-camera; the camera-to-world transform used for cross-view
// transfer is obtained by inversion after loading.
std::vector<PosedImage> load_dataset(const std::filesystem::path& root);
void write_dataset(const std::filesystem::path& root, const std::vector<PosedImage>& images);

} // namespace uwr
