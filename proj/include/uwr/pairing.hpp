#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "uwr/geometry.hpp"
#include "uwr/types.hpp"

namespace uwr {

struct PixelPair {
    std::uint32_t target_pixel; // v*W + u in the target
    std::uint32_t other_pixel;  // v*W + u in the candidate
};

// Flattened multi-view observations for one target image, sorted by target
// pixel index so the optimizer can walk per-pixel segments contiguously.
// Within a pixel, the self-observation comes first, then candidates in the
// order they were supplied.
struct ObservationSet {
    std::int64_t target_id = -1;
    int width = 0, height = 0;
    std::vector<std::uint32_t> pixel_index; // ascending
    std::vector<float> intensity;           // 3*N interleaved RGB in [0,1]
    std::vector<float> distance;            // N, meters
    std::vector<std::uint32_t> counts;      // W*H observations per pixel

    std::size_t size() const { return pixel_index.size(); }

    // Contiguous [begin, end) observation ranges per observed pixel.
    struct Segment {
        std::uint32_t pixel;
        std::size_t begin, end;
    };
    std::vector<Segment> segments() const;
};

// All mutually-consistent integer-cell pixel pairs between the two views.
// Both columns of the result are duplicate-free.
std::vector<PixelPair> pair_images(const PosedImage& target, const PosedImage& other);

// Assembles the observation set for one target: one self-observation per
// pixel with depth, plus one observation per successful pair against each
// candidate. A window of +/-n keeps only candidates with |id - target_id| <= n.
ObservationSet build_observations(const PosedImage& target,
                                  const std::vector<PosedImage>& candidates,
                                  std::optional<int> window = std::nullopt,
                                  DistanceMode mode = DistanceMode::kRange);

// Binary cache. Layout (little-endian): magic "UWROBS1\n", then int64
// target_id, int32 width, int32 height, uint64 count, then count uint32
// pixel indices, 3*count float intensities, count float distances.
// The counts array is reconstructed on load.
void save_observations(const std::filesystem::path& path, const ObservationSet& obs);
ObservationSet load_observations(const std::filesystem::path& path);

} // namespace uwr
