#include "uwr/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "uwr/errors.hpp"
#include "uwr/log.hpp"

namespace uwr {

FloatImage FloatImage::from_image8(const Image8& img) {
    FloatImage out;
    out.width = img.width;
    out.height = img.height;
    out.values.resize(img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i)
        out.values[i] = static_cast<float>(img.values[i] / 255.0);
    return out;
}

namespace {

void check_same_shape(const FloatImage& a, const FloatImage& b, const Mask& mask) {
    if (a.width != b.width || a.height != b.height)
        throw DataError("metric inputs have different dimensions");
    if (mask.size() != static_cast<std::size_t>(a.width) * a.height)
        throw DataError("mask size does not match images");
}

} // namespace

double psnr(const FloatImage& a, const FloatImage& b, const Mask& mask) {
    check_same_shape(a, b, mask);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < mask.size(); ++p) {
        if (!mask[p]) continue;
        for (int c = 0; c < 3; ++c) {
            double d = static_cast<double>(a.values[p * 3 + c]) - b.values[p * 3 + c];
            sum += d * d;
        }
        ++n;
    }
    if (n == 0) throw DataError("psnr: empty mask");
    double mse = sum / (3.0 * n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const FloatImage& a, const FloatImage& b, const Mask& mask) {
    check_same_shape(a, b, mask);
    constexpr int kRadius = 5; // 11x11 window
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01, kC2 = 0.03 * 0.03;
    if (a.width < 2 * kRadius + 1 || a.height < 2 * kRadius + 1)
        throw DataError("ssim: image smaller than the 11x11 window");

    double weight[2 * kRadius + 1][2 * kRadius + 1];
    double wsum = 0.0;
    for (int dy = -kRadius; dy <= kRadius; ++dy)
        for (int dx = -kRadius; dx <= kRadius; ++dx) {
            double g = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            weight[dy + kRadius][dx + kRadius] = g;
            wsum += g;
        }
    for (auto& row : weight)
        for (double& g : row) g /= wsum;

    const int w = a.width, h = a.height;
    double total = 0.0;
    std::size_t windows = 0;
    for (int v = kRadius; v < h - kRadius; ++v) {
        for (int u = kRadius; u < w - kRadius; ++u) {
            bool ok = true;
            for (int dy = -kRadius; dy <= kRadius && ok; ++dy)
                for (int dx = -kRadius; dx <= kRadius; ++dx)
                    if (!mask[static_cast<std::size_t>(v + dy) * w + (u + dx)]) {
                        ok = false;
                        break;
                    }
            if (!ok) continue;
            for (int c = 0; c < 3; ++c) {
                double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
                for (int dy = -kRadius; dy <= kRadius; ++dy)
                    for (int dx = -kRadius; dx <= kRadius; ++dx) {
                        double g = weight[dy + kRadius][dx + kRadius];
                        std::size_t idx = (static_cast<std::size_t>(v + dy) * w + (u + dx)) * 3 + c;
                        double va = a.values[idx], vb = b.values[idx];
                        mu_a += g * va;
                        mu_b += g * vb;
                        aa += g * va * va;
                        bb += g * vb * vb;
                        ab += g * va * vb;
                    }
                double var_a = aa - mu_a * mu_a;
                double var_b = bb - mu_b * mu_b;
                double cov = ab - mu_a * mu_b;
                double s = ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
                           ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
                total += s;
            }
            ++windows;
        }
    }
    if (windows == 0) throw DataError("ssim: no window fits inside the mask");
    return total / (3.0 * windows);
}

double ciede2000(const Eigen::Vector3d& lab1, const Eigen::Vector3d& lab2) {
    const double deg = M_PI / 180.0;
    const double pow25_7 = 6103515625.0; // 25^7

    double l1 = lab1[0], a1 = lab1[1], b1 = lab1[2];
    double l2 = lab2[0], a2 = lab2[1], b2 = lab2[2];

    double c1 = std::hypot(a1, b1);
    double c2 = std::hypot(a2, b2);
    double c_bar = 0.5 * (c1 + c2);
    double c_bar7 = std::pow(c_bar, 7.0);
    double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + pow25_7)));

    double a1p = (1.0 + g) * a1, a2p = (1.0 + g) * a2;
    double c1p = std::hypot(a1p, b1), c2p = std::hypot(a2p, b2);

    auto hue_of = [&](double ap, double b) {
        if (ap == 0.0 && b == 0.0) return 0.0;
        double hdeg = std::atan2(b, ap) / deg;
        return hdeg < 0.0 ? hdeg + 360.0 : hdeg;
    };
    double h1p = hue_of(a1p, b1), h2p = hue_of(a2p, b2);

    double dl = l2 - l1;
    double dc = c2p - c1p;
    double dh_deg;
    if (c1p * c2p == 0.0)
        dh_deg = 0.0;
    else if (std::abs(h2p - h1p) <= 180.0)
        dh_deg = h2p - h1p;
    else if (h2p - h1p > 180.0)
        dh_deg = h2p - h1p - 360.0;
    else
        dh_deg = h2p - h1p + 360.0;
    double dh_big = 2.0 * std::sqrt(c1p * c2p) * std::sin(0.5 * dh_deg * deg);

    double l_bar = 0.5 * (l1 + l2);
    double cp_bar = 0.5 * (c1p + c2p);
    double h_bar;
    if (c1p * c2p == 0.0)
        h_bar = h1p + h2p;
    else if (std::abs(h1p - h2p) <= 180.0)
        h_bar = 0.5 * (h1p + h2p);
    else if (h1p + h2p < 360.0)
        h_bar = 0.5 * (h1p + h2p + 360.0);
    else
        h_bar = 0.5 * (h1p + h2p - 360.0);

    double t = 1.0 - 0.17 * std::cos((h_bar - 30.0) * deg) + 0.24 * std::cos(2.0 * h_bar * deg) +
               0.32 * std::cos((3.0 * h_bar + 6.0) * deg) -
               0.20 * std::cos((4.0 * h_bar - 63.0) * deg);
    double dtheta = 30.0 * std::exp(-std::pow((h_bar - 275.0) / 25.0, 2.0));
    double cp_bar7 = std::pow(cp_bar, 7.0);
    double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + pow25_7));
    double lm50 = (l_bar - 50.0) * (l_bar - 50.0);
    double sl = 1.0 + 0.015 * lm50 / std::sqrt(20.0 + lm50);
    double sc = 1.0 + 0.045 * cp_bar;
    double sh = 1.0 + 0.015 * cp_bar * t;
    double rt = -std::sin(2.0 * dtheta * deg) * rc;

    double tl = dl / sl, tc = dc / sc, th = dh_big / sh;
    return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

Eigen::Vector3d srgb_to_lab(const Eigen::Vector3d& rgb) {
    auto linearize = [](double v) {
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    };
    double r = linearize(rgb[0]), g = linearize(rgb[1]), b = linearize(rgb[2]);

    // sRGB to XYZ, D65 reference white.
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double xn = 0.95047, yn = 1.0, zn = 1.08883;

    auto f = [](double t) {
        const double delta = 6.0 / 29.0;
        return t > delta * delta * delta ? std::cbrt(t)
                                         : t / (3.0 * delta * delta) + 4.0 / 29.0;
    };
    double fx = f(x / xn), fy = f(y / yn), fz = f(z / zn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

void ColorChartSpec::validate() const {
    if (patches.size() != 12) throw DataError("color chart must have exactly 12 patches");
    for (const auto& p : patches)
        if (p.w <= 0 || p.h <= 0) throw DataError("color chart patch with empty region");
}

namespace {

Eigen::Vector3d patch_mean(const FloatImage& img, int x, int y, int w, int h) {
    if (w <= 0 || h <= 0 || x < 0 || y < 0 || x + w > img.width || y + h > img.height)
        throw DataError("chart patch region outside image");
    Eigen::Vector3d mean{0, 0, 0};
    for (int v = y; v < y + h; ++v)
        for (int u = x; u < x + w; ++u)
            for (int c = 0; c < 3; ++c)
                mean[c] += img.values[(static_cast<std::size_t>(v) * img.width + u) * 3 + c];
    return mean / (static_cast<double>(w) * h);
}

} // namespace

double psi_bar(const FloatImage& img, const ColorChartSpec& chart) {
    chart.validate();
    double total = 0.0;
    for (const auto& p : chart.patches) {
        Eigen::Vector3d mean = patch_mean(img, p.x, p.y, p.w, p.h);
        double nm = mean.norm() * p.expected.norm();
        if (nm == 0.0) {
            warn("psi_bar: zero-norm patch, scoring it at 90 degrees");
            total += M_PI / 2.0;
            continue;
        }
        double cosang = std::clamp(mean.dot(p.expected) / nm, -1.0, 1.0);
        total += std::acos(cosang);
    }
    return total / 12.0 * 180.0 / M_PI;
}

double chart_delta_e(const FloatImage& img, const ColorChartSpec& chart) {
    chart.validate();
    double total = 0.0;
    for (const auto& p : chart.patches) {
        Eigen::Vector3d mean = patch_mean(img, p.x, p.y, p.w, p.h).cwiseMax(0.0).cwiseMin(1.0);
        total += ciede2000(srgb_to_lab(mean), srgb_to_lab(p.expected));
    }
    return total / 12.0;
}

double hue_of_patch(const FloatImage& img, int x, int y, int w, int h) {
    Eigen::Vector3d m = patch_mean(img, x, y, w, h);
    double hi = m.maxCoeff(), lo = m.minCoeff();
    double delta = hi - lo;
    if (delta <= 0.0) return std::numeric_limits<double>::quiet_NaN(); // gray, hue undefined
    double hue;
    if (hi == m[0])
        hue = 60.0 * std::fmod((m[1] - m[2]) / delta, 6.0);
    else if (hi == m[1])
        hue = 60.0 * ((m[2] - m[0]) / delta + 2.0);
    else
        hue = 60.0 * ((m[0] - m[1]) / delta + 4.0);
    if (hue < 0.0) hue += 360.0;
    return hue;
}

std::vector<ChartFileEntry> read_charts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open charts file: " + path.string());
    std::vector<ChartFileEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        bool blank = true;
        for (char ch : line) {
            if (ch == '#') break;
            if (!std::isspace(static_cast<unsigned char>(ch))) {
                blank = false;
                break;
            }
        }
        if (blank) continue;
        std::istringstream ss(line);
        ChartFileEntry entry;
        if (!(ss >> entry.image_name >> entry.chart.chart_id))
            throw DataError("malformed charts line: " + line);
        for (int i = 0; i < 12; ++i) {
            ChartPatchRegion p;
            if (!(ss >> p.x >> p.y >> p.w >> p.h >> p.expected[0] >> p.expected[1] >>
                  p.expected[2]))
                throw DataError("charts line needs 12 patches: " + line);
            entry.chart.patches.push_back(p);
        }
        entry.chart.validate();
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace uwr
