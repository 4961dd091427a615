#pragma once

#include <optional>

#include "uwr/types.hpp"

namespace uwr {

// Rigid SE(3) transform, x -> R*x + t.
struct Transform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static Transform identity() { return {}; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    // this ∘ other: apply other first, then this.
    Transform compose(const Transform& other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }

    Transform inverse() const {
        Eigen::Matrix3d rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }
};

// Homogeneous pixel coordinates; w == 1 after normalization.
struct PixelHomogeneous {
    double u = 0.0, v = 0.0, w = 1.0;

    void normalize() {
        u /= w;
        v /= w;
        w = 1.0;
    }
};

Transform world_to_camera(const CameraPose& pose);

// K^-1 * d * x: camera-frame point whose third coordinate equals d exactly.
Eigen::Vector3d backproject(const PixelHomogeneous& x, double depth, const Intrinsics& k);

// Euclidean distance from the camera center to the observed point,
// ||K^-1 * d * x||. Always >= depth, with equality on the principal axis.
double range_of(const PixelHomogeneous& x, double depth, const Intrinsics& k);

// Which distance feeds the image formation model. Range (the full light
// path length) is the default; axial depth is available for comparison.
enum class DistanceMode { kRange, kDepth };

double observation_distance(const PixelHomogeneous& x, double depth, const Intrinsics& k,
                            DistanceMode mode);

struct Transfer {
    PixelHomogeneous pixel;      // normalized destination coordinates
    Eigen::Vector3d cam_point;   // point in the destination camera frame
};

// Precomputed source->destination relative transform for one image pair.
// When the two views share pose and intrinsics bit-for-bit the transfer is
// short-circuited to the exact identity, so self-pairing is float-noise free.
struct ViewPairTransfer {
    Transform src_to_dst;
    bool identical = false;

    ViewPairTransfer(const PosedImage& src, const PosedImage& dst);

    std::optional<Transfer> transfer(const PixelHomogeneous& x1, double depth1,
                                     const Intrinsics& src_k, const Intrinsics& dst_k,
                                     int dst_width, int dst_height) const;
};

// Projects the source pixel (which must have depth in src) into dst.
// Returns nothing when the point falls behind the destination camera or
// outside its image bounds. Missing source depth raises std::domain_error.
std::optional<Transfer> transfer_pixel(const PixelHomogeneous& x1, const PosedImage& src,
                                       const PosedImage& dst);

// Bidirectional consistency: transfer x1 into i2, take the integer cell it
// lands in, transfer that cell (with its own stored depth) back into i1, and
// require it to land in x1's integer cell. False on any failed step.
bool roundtrip_consistent(const PixelHomogeneous& x1, const PosedImage& i1, const PosedImage& i2);

} // namespace uwr
