#include "uwr/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace uwr {

Transform world_to_camera(const CameraPose& pose) {
    return {pose.rotation.toRotationMatrix(), pose.translation};
}

Eigen::Vector3d backproject(const PixelHomogeneous& x, double depth, const Intrinsics& k) {
    if (!(depth > 0.0))
        throw std::domain_error("backproject: depth must be positive");
    PixelHomogeneous xn = x;
    xn.normalize();
    return {(xn.u - k.cx) / k.fx * depth, (xn.v - k.cy) / k.fy * depth, depth};
}

double range_of(const PixelHomogeneous& x, double depth, const Intrinsics& k) {
    return backproject(x, depth, k).norm();
}

double observation_distance(const PixelHomogeneous& x, double depth, const Intrinsics& k,
                            DistanceMode mode) {
    if (mode == DistanceMode::kDepth) {
        if (!(depth > 0.0)) throw std::domain_error("observation_distance: depth must be positive");
        return depth;
    }
    return range_of(x, depth, k);
}

ViewPairTransfer::ViewPairTransfer(const PosedImage& src, const PosedImage& dst) {
    identical = src.pose.same_as(dst.pose) && src.intrinsics.same_as(dst.intrinsics);
    if (identical) {
        src_to_dst = Transform::identity();
    } else {
        src_to_dst = world_to_camera(dst.pose).compose(world_to_camera(src.pose).inverse());
    }
}

std::optional<Transfer> ViewPairTransfer::transfer(const PixelHomogeneous& x1, double depth1,
                                                   const Intrinsics& src_k,
                                                   const Intrinsics& dst_k, int dst_width,
                                                   int dst_height) const {
    if (identical) {
        PixelHomogeneous xn = x1;
        xn.normalize();
        return Transfer{xn, backproject(xn, depth1, src_k)};
    }
    Eigen::Vector3d p_dst = src_to_dst.apply(backproject(x1, depth1, src_k));
    if (!(p_dst.z() > 0.0)) return std::nullopt;
    PixelHomogeneous x2{dst_k.fx * p_dst.x() + dst_k.cx * p_dst.z(),
                        dst_k.fy * p_dst.y() + dst_k.cy * p_dst.z(), p_dst.z()};
    x2.normalize();
    int cu = static_cast<int>(std::floor(x2.u));
    int cv = static_cast<int>(std::floor(x2.v));
    if (cu < 0 || cv < 0 || cu >= dst_width || cv >= dst_height) return std::nullopt;
    return Transfer{x2, p_dst};
}

std::optional<Transfer> transfer_pixel(const PixelHomogeneous& x1, const PosedImage& src,
                                       const PosedImage& dst) {
    PixelHomogeneous xn = x1;
    xn.normalize();
    int su = static_cast<int>(std::floor(xn.u));
    int sv = static_cast<int>(std::floor(xn.v));
    if (!src.depth.has_depth(su, sv))
        throw std::domain_error("transfer_pixel: no depth at source pixel");
    double d1 = src.depth.at(su, sv);
    ViewPairTransfer pair(src, dst);
    return pair.transfer(xn, d1, src.intrinsics, dst.intrinsics, dst.image.width,
                         dst.image.height);
}

bool roundtrip_consistent(const PixelHomogeneous& x1, const PosedImage& i1, const PosedImage& i2) {
    PixelHomogeneous xn = x1;
    xn.normalize();
    int u1 = static_cast<int>(std::floor(xn.u));
    int v1 = static_cast<int>(std::floor(xn.v));
    if (!i1.depth.has_depth(u1, v1)) return false;

    ViewPairTransfer fwd(i1, i2);
    auto t12 = fwd.transfer(xn, i1.depth.at(u1, v1), i1.intrinsics, i2.intrinsics,
                            i2.image.width, i2.image.height);
    if (!t12) return false;

    int u2 = static_cast<int>(std::floor(t12->pixel.u));
    int v2 = static_cast<int>(std::floor(t12->pixel.v));
    if (!i2.depth.has_depth(u2, v2)) return false;

    ViewPairTransfer bwd(i2, i1);
    auto t21 = bwd.transfer(PixelHomogeneous{static_cast<double>(u2), static_cast<double>(v2), 1.0},
                            i2.depth.at(u2, v2), i2.intrinsics, i1.intrinsics, i1.image.width,
                            i1.image.height);
    if (!t21) return false;

    return static_cast<int>(std::floor(t21->pixel.u)) == u1 &&
           static_cast<int>(std::floor(t21->pixel.v)) == v1;
}

} // namespace uwr
