#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uwr/types.hpp"

namespace uwr {

// Float RGB image in [0,1]-ish (restored values may exceed the range).
struct FloatImage {
    int width = 0, height = 0;
    std::vector<float> values; // 3*W*H interleaved

    static FloatImage from_image8(const Image8& img);
};

using Mask = std::vector<std::uint8_t>; // W*H, nonzero = evaluate this pixel

// 10*log10(1 / MSE) over masked pixels, data range 1.0. Identical images
// give +infinity.
double psnr(const FloatImage& a, const FloatImage& b, const Mask& mask);

// Mean local SSIM over 11x11 Gaussian windows (sigma 1.5, K1=0.01, K2=0.03,
// data range 1.0) whose support lies fully inside the mask; channels are
// scored independently and averaged.
double ssim(const FloatImage& a, const FloatImage& b, const Mask& mask);

// CIEDE2000 color difference between two Lab triples (kL = kC = kH = 1).
double ciede2000(const Eigen::Vector3d& lab1, const Eigen::Vector3d& lab2);

// sRGB (D65 white, standard linearization) to CIE Lab.
Eigen::Vector3d srgb_to_lab(const Eigen::Vector3d& rgb);

struct ChartPatchRegion {
    int x = 0, y = 0, w = 0, h = 0;
    Eigen::Vector3d expected{0, 0, 0}; // reference RGB in [0,1]
};

struct ColorChartSpec {
    int chart_id = 0;
    std::vector<ChartPatchRegion> patches; // exactly 12
    double mean_distance = 0.0;            // meters, filled from the depth map

    void validate() const;
};

// Mean angle in RGB space between per-patch mean colors and their expected
// colors, in degrees. A zero-norm patch contributes 90 degrees.
double psi_bar(const FloatImage& img, const ColorChartSpec& chart);

// Mean CIEDE2000 between per-patch mean colors and expectations.
double chart_delta_e(const FloatImage& img, const ColorChartSpec& chart);

// HSV hue of the mean patch color, degrees in [0,360). Gray patches
// (zero saturation) return NaN.
double hue_of_patch(const FloatImage& img, int x, int y, int w, int h);

struct ChartFileEntry {
    std::string image_name;
    ColorChartSpec chart;
};

// charts.txt: per line, image name, chart id, then 12 x (x y w h Er Eg Eb).
std::vector<ChartFileEntry> read_charts(const std::filesystem::path& path);

} // namespace uwr
