#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "uwr/errors.hpp"

namespace uwr {

// World-to-camera rigid pose: X_cam = R(q) * X_world + t.
struct CameraPose {
    Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0}; // (w, x, y, z)
    Eigen::Vector3d translation{0.0, 0.0, 0.0};

    void normalize() {
        double n = rotation.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw DataError("camera pose quaternion has zero or non-finite norm");
        rotation.coeffs() /= n;
    }

    Eigen::Vector3d camera_center() const {
        return -(rotation.conjugate() * translation);
    }

    bool same_as(const CameraPose& o) const {
        return rotation.w() == o.rotation.w() && rotation.x() == o.rotation.x() &&
               rotation.y() == o.rotation.y() && rotation.z() == o.rotation.z() &&
               translation == o.translation;
    }
};

// Pinhole intrinsics. No distortion: inputs are undistorted upstream.
struct Intrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0))
            throw DataError("intrinsics: focal lengths must be positive");
        if (width <= 0 || height <= 0)
            throw DataError("intrinsics: image dimensions must be positive");
        if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
            throw DataError("intrinsics: principal point outside image");
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
        return k;
    }

    bool same_as(const Intrinsics& o) const {
        return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy &&
               width == o.width && height == o.height;
    }
};

// Per-pixel axial depth in meters. Non-finite or non-positive values mean
// "no depth" for that pixel.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<float> values; // row-major, top-to-bottom

    static constexpr float kMissing = 0.0f;

    float at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
    float& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }

    bool has_depth(int u, int v) const {
        if (u < 0 || v < 0 || u >= width || v >= height) return false;
        float d = at(u, v);
        return std::isfinite(d) && d > 0.0f;
    }
};

// 8-bit RGB image; intensities are value/255 in [0,1].
struct Image8 {
    int width = 0, height = 0;
    std::vector<std::uint8_t> values; // interleaved R,G,B, row-major

    std::uint8_t at(int u, int v, int c) const {
        return values[(static_cast<std::size_t>(v) * width + u) * 3 + c];
    }
    std::uint8_t& at(int u, int v, int c) {
        return values[(static_cast<std::size_t>(v) * width + u) * 3 + c];
    }
    double intensity(int u, int v, int c) const { return at(u, v, c) / 255.0; }
};

// One registered view: image + pose + intrinsics + depth, dimensions agreeing.
struct PosedImage {
    std::int64_t id = -1;
    std::string name; // file stem, e.g. "view_003"
    Image8 image;
    CameraPose pose;
    Intrinsics intrinsics;
    DepthMap depth;

    void validate() const {
        intrinsics.validate();
        if (image.width != intrinsics.width || image.height != intrinsics.height)
            throw DataError("image " + std::to_string(id) + ": image/intrinsics dimension mismatch");
        if (depth.width != image.width || depth.height != image.height)
            throw DataError("image " + std::to_string(id) + ": image/depth dimension mismatch");
        if (image.values.size() != static_cast<std::size_t>(image.width) * image.height * 3)
            throw DataError("image " + std::to_string(id) + ": bad image buffer size");
        if (depth.values.size() != static_cast<std::size_t>(depth.width) * depth.height)
            throw DataError("image " + std::to_string(id) + ": bad depth buffer size");
    }
};

} // namespace uwr
