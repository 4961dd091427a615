#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uwr/types.hpp"
#include "uwr/uifm.hpp"

namespace uwr {

// Scene geometry: a relief of axis-aligned cells over the world XY plane.
// Cell (ix, iy) covers [x0 + ix*cell, x0 + (ix+1)*cell) x [y0 + iy*cell, ...)
// and its face sits at world z = surface_z[iy*nx + ix]. Cameras must lie at
// smaller z than every face and look towards +z.
struct HeightField {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;
    double cell = 0.01;
    std::vector<float> surface_z; // nx*ny
    std::vector<float> albedo;    // 3*nx*ny, RGB in [0,1]

    float z_at(int ix, int iy) const { return surface_z[static_cast<std::size_t>(iy) * nx + ix]; }
    const float* albedo_at(int ix, int iy) const {
        return &albedo[(static_cast<std::size_t>(iy) * nx + ix) * 3];
    }
    double min_surface_z() const;
};

// A known-color rectangle on the scene surface (world units), used by the
// chart preset to emit chart specs alongside the rendered views.
struct ChartPatch {
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
    Eigen::Vector3d color{0, 0, 0};
};

// Base plane plus one raised rectangular plateau; the closed-form occlusion
// oracle for the two_plane preset.
struct TwoPlaneGeometry {
    double base_z = 0.0, plateau_z = 0.0;
    double rx0 = 0.0, rx1 = 0.0, ry0 = 0.0, ry1 = 0.0; // plateau rect, half-open
    double gx0 = 0.0, gx1 = 0.0, gy0 = 0.0, gy1 = 0.0; // field extent
};

struct SceneSpec {
    std::string name = "scene";
    HeightField field;
    std::vector<CameraPose> trajectory;
    Intrinsics intrinsics;
    UifmParams params;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<ChartPatch> chart;
    std::optional<TwoPlaneGeometry> two_plane; // set by the two_plane preset

    void validate() const;
};

struct RayHit {
    bool hit = false;
    double t = 0.0; // axial depth along the pixel ray
    int ix = -1, iy = -1;
};

// Column walk (2D DDA) of the pixel ray against the height field. `origin`
// is the camera center, `dir` the world-frame ray with unit camera-frame z,
// so the returned t is the axial depth directly.
RayHit raycast_heightfield(const HeightField& field, const Eigen::Vector3d& origin,
                           const Eigen::Vector3d& dir);

// Closed-form first hit for base-plane + plateau scenes; independent of the
// DDA walk. Cameras must have identity rotation.
std::optional<double> two_plane_analytic_depth(const TwoPlaneGeometry& geom,
                                               const Eigen::Vector3d& camera_center,
                                               const Intrinsics& k, double u, double v);

struct RenderedView {
    PosedImage view;
    Image8 truth; // unattenuated albedo, quantized like the view
};

// Ray-casts one trajectory pose: I = forward(albedo, range) + N(0, sigma),
// clamped and quantized to 8 bits. Depth maps store axial depth; pixels
// whose ray misses the field get the missing-depth sentinel and black pixels.
RenderedView render_view(const SceneSpec& scene, int pose_index);

// Writes the ingest layout plus truth/NAME.png, truth/params.txt and, when
// the scene carries chart patches, charts.txt.
void export_scene(const SceneSpec& scene, const std::filesystem::path& root);

UifmParams read_truth_params(const std::filesystem::path& path);

struct PresetOptions {
    int views = -1; // -1 keeps the preset default
    int width = -1, height = -1;
    double noise_sigma = -1.0;
    std::optional<std::uint64_t> seed;
    std::optional<Eigen::Vector3d> attenuation, veiling, backscatter;
};

// Presets: "corridor" (dolly towards a textured wall, ranges 1-8 m),
// "two_plane" (occlusion scene), "flat_chart" (12-patch chart wall).
SceneSpec make_preset(const std::string& name, const PresetOptions& opt = {});

// Key = value scene description; see README for the accepted keys.
SceneSpec scene_from_file(const std::filesystem::path& path);

} // namespace uwr
