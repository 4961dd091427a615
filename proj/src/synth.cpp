#include "uwr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "uwr/dataset.hpp"
#include "uwr/errors.hpp"
#include "uwr/log.hpp"
#include "uwr/png_io.hpp"

namespace uwr {

namespace fs = std::filesystem;

double HeightField::min_surface_z() const {
    float m = std::numeric_limits<float>::infinity();
    for (float z : surface_z) m = std::min(m, z);
    return m;
}

void SceneSpec::validate() const {
    if (trajectory.empty()) throw DataError("scene: trajectory must be non-empty");
    if (noise_sigma < 0.0) throw DataError("scene: noise_sigma must be >= 0");
    if (field.nx <= 0 || field.ny <= 0) throw DataError("scene: empty height field");
    if (field.surface_z.size() != static_cast<std::size_t>(field.nx) * field.ny ||
        field.albedo.size() != 3 * static_cast<std::size_t>(field.nx) * field.ny)
        throw DataError("scene: field buffer sizes do not match dimensions");
    intrinsics.validate();
    for (float a : field.albedo)
        if (!(a >= 0.0f && a <= 1.0f)) throw DataError("scene: albedo outside [0,1]");
}

namespace {

// --------------------------------------------------------------------------
// Deterministic per-pixel noise streams.
// --------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform in (0, 1].
double stream_uniform(std::uint64_t base, std::uint64_t n) {
    return ((splitmix64(base + n) >> 11) + 1) * 0x1.0p-53;
}

// Three standard gaussians via Box-Muller, one stream per (seed, view, pixel).
void pixel_gaussians(std::uint64_t seed, std::uint64_t view, std::uint64_t pixel, double out[3]) {
    std::uint64_t base =
        splitmix64(splitmix64(splitmix64(seed) ^ view * 0x9e3779b97f4a7c15ull) ^ pixel);
    double u1 = stream_uniform(base, 0), u2 = stream_uniform(base, 1);
    double u3 = stream_uniform(base, 2), u4 = stream_uniform(base, 3);
    double r1 = std::sqrt(-2.0 * std::log(u1));
    double r2 = std::sqrt(-2.0 * std::log(u3));
    out[0] = r1 * std::cos(2.0 * M_PI * u2);
    out[1] = r1 * std::sin(2.0 * M_PI * u2);
    out[2] = r2 * std::cos(2.0 * M_PI * u4);
}

std::uint8_t quantize8(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0)); // round half away from zero
}

bool field_is_uniform(const HeightField& f) {
    for (float z : f.surface_z)
        if (z != f.surface_z[0]) return false;
    return true;
}

} // namespace

RayHit raycast_heightfield(const HeightField& field, const Eigen::Vector3d& o,
                           const Eigen::Vector3d& d) {
    RayHit miss;
    if (!(d.z() > 0.0)) return miss; // surfaces lie at larger z than any camera

    const double gx1 = field.x0 + field.nx * field.cell;
    const double gy1 = field.y0 + field.ny * field.cell;
    const double inf = std::numeric_limits<double>::infinity();

    // XY slab intersection of the grid footprint.
    double t_lo = 0.0, t_hi = inf;
    const double og[2] = {o.x(), o.y()};
    const double dg[2] = {d.x(), d.y()};
    const double lo[2] = {field.x0, field.y0};
    const double hi[2] = {gx1, gy1};
    for (int a = 0; a < 2; ++a) {
        if (dg[a] == 0.0) {
            if (og[a] < lo[a] || og[a] >= hi[a]) return miss;
        } else {
            double t0 = (lo[a] - og[a]) / dg[a];
            double t1 = (hi[a] - og[a]) / dg[a];
            if (t0 > t1) std::swap(t0, t1);
            t_lo = std::max(t_lo, t0);
            t_hi = std::min(t_hi, t1);
        }
    }
    if (t_hi <= t_lo) return miss;

    auto cell_of = [&](double w, double w0, int n) {
        return std::clamp(static_cast<int>(std::floor((w - w0) / field.cell)), 0, n - 1);
    };

    double t_cur = t_lo;
    int ix = cell_of(o.x() + t_cur * d.x(), field.x0, field.nx);
    int iy = cell_of(o.y() + t_cur * d.y(), field.y0, field.ny);
    const int step_x = d.x() > 0.0 ? 1 : (d.x() < 0.0 ? -1 : 0);
    const int step_y = d.y() > 0.0 ? 1 : (d.y() < 0.0 ? -1 : 0);

    for (;;) {
        // Next cell boundaries, computed fresh so hit parameters are
        // identical to direct plane intersections.
        double t_bx = inf, t_by = inf;
        if (step_x != 0)
            t_bx = (field.x0 + (ix + (step_x > 0 ? 1 : 0)) * field.cell - o.x()) / d.x();
        if (step_y != 0)
            t_by = (field.y0 + (iy + (step_y > 0 ? 1 : 0)) * field.cell - o.y()) / d.y();
        double t_exit = std::min(std::min(t_bx, t_by), t_hi);

        const double zc = field.z_at(ix, iy);
        const double z_in = o.z() + t_cur * d.z();
        if (z_in >= zc) return {true, t_cur, ix, iy}; // vertical face
        const double z_out = o.z() + t_exit * d.z();
        if (z_out >= zc) return {true, (zc - o.z()) / d.z(), ix, iy}; // cell top

        if (t_exit >= t_hi) return miss;
        t_cur = t_exit;
        if (t_bx <= t_by) {
            ix += step_x;
            if (ix < 0 || ix >= field.nx) return miss;
        }
        if (t_by <= t_bx) {
            iy += step_y;
            if (iy < 0 || iy >= field.ny) return miss;
        }
    }
}

std::optional<double> two_plane_analytic_depth(const TwoPlaneGeometry& g,
                                               const Eigen::Vector3d& c, const Intrinsics& k,
                                               double u, double v) {
    const double dx = (u - k.cx) / k.fx;
    const double dy = (v - k.cy) / k.fy; // dz == 1

    auto inside = [](double w, double lo, double hi) { return w >= lo && w < hi; };

    // Plateau top.
    const double t_plateau = g.plateau_z - c.z();
    if (t_plateau > 0.0) {
        double px = c.x() + t_plateau * dx, py = c.y() + t_plateau * dy;
        if (inside(px, g.rx0, g.rx1) && inside(py, g.ry0, g.ry1))
            return t_plateau;
    }

    // Plateau side: the ray enters the rect footprint at a height between the
    // two planes and strikes the cliff.
    double t_in = 0.0, t_out = std::numeric_limits<double>::infinity();
    bool in_rect = true;
    const double og[2] = {c.x(), c.y()};
    const double dg[2] = {dx, dy};
    const double lo[2] = {g.rx0, g.ry0};
    const double hi[2] = {g.rx1, g.ry1};
    for (int a = 0; a < 2; ++a) {
        if (dg[a] == 0.0) {
            if (og[a] < lo[a] || og[a] >= hi[a]) in_rect = false;
        } else {
            double t0 = (lo[a] - og[a]) / dg[a];
            double t1 = (hi[a] - og[a]) / dg[a];
            if (t0 > t1) std::swap(t0, t1);
            t_in = std::max(t_in, t0);
            t_out = std::min(t_out, t1);
        }
    }
    if (in_rect && t_in < t_out && t_in > 0.0) {
        double z_entry = c.z() + t_in; // dz == 1
        if (z_entry > g.plateau_z && z_entry < g.base_z) return t_in;
    }

    // Base plane.
    const double t_base = g.base_z - c.z();
    if (t_base <= 0.0) return std::nullopt;
    double bx = c.x() + t_base * dx, by = c.y() + t_base * dy;
    if (!inside(bx, g.gx0, g.gx1) || !inside(by, g.gy0, g.gy1)) return std::nullopt;
    if (inside(bx, g.rx0, g.rx1) && inside(by, g.ry0, g.ry1)) return std::nullopt; // under plateau
    return t_base;
}

RenderedView render_view(const SceneSpec& scene, int pose_index) {
    scene.validate();
    if (pose_index < 0 || pose_index >= static_cast<int>(scene.trajectory.size()))
        throw DataError("render_view: pose index out of range");

    const Intrinsics& k = scene.intrinsics;
    const CameraPose& pose = scene.trajectory[pose_index];
    const int w = k.width, h = k.height;

    RenderedView out;
    out.view.id = pose_index;
    char name[32];
    std::snprintf(name, sizeof(name), "view_%03d", pose_index);
    out.view.name = name;
    out.view.pose = pose;
    out.view.intrinsics = k;
    out.view.image.width = w;
    out.view.image.height = h;
    out.view.image.values.assign(static_cast<std::size_t>(w) * h * 3, 0);
    out.view.depth.width = w;
    out.view.depth.height = h;
    out.view.depth.values.assign(static_cast<std::size_t>(w) * h, DepthMap::kMissing);
    out.truth = out.view.image;

    const Eigen::Vector3d center = pose.camera_center();
    const Eigen::Matrix3d cam_to_world = pose.rotation.conjugate().toRotationMatrix();
    const bool uniform = field_is_uniform(scene.field);

    std::size_t hits = 0;
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
            Eigen::Vector3d dir_w = cam_to_world * dir_cam;

            RayHit hit;
            if (uniform) {
                // Flat relief: direct plane intersection, same math as the walk.
                if (dir_w.z() > 0.0) {
                    double t = (scene.field.z_at(0, 0) - center.z()) / dir_w.z();
                    if (t > 0.0) {
                        double px = center.x() + t * dir_w.x();
                        double py = center.y() + t * dir_w.y();
                        int ix = static_cast<int>(std::floor((px - scene.field.x0) / scene.field.cell));
                        int iy = static_cast<int>(std::floor((py - scene.field.y0) / scene.field.cell));
                        if (ix >= 0 && iy >= 0 && ix < scene.field.nx && iy < scene.field.ny)
                            hit =

                                {true, t, ix, iy};
                    }
                }
            } else {
                hit = raycast_heightfield(scene.field, center, dir_w);
            }
            if (!hit.hit) continue;
            ++hits;

            const std::size_t px_idx = static_cast<std::size_t>(v) * w + u;
            out.view.depth.values[px_idx] = static_cast<float>(hit.t);
            const double range = hit.t * dir_cam.norm();
            const float* alb = scene.field.albedo_at(hit.ix, hit.iy);

            double g[3] = {0.0, 0.0, 0.0};
            if (scene.noise_sigma > 0.0)
                pixel_gaussians(scene.seed, static_cast<std::uint64_t>(pose_index), px_idx, g);

            for (int c = 0; c < 3; ++c) {
                double val = uifm_forward(alb[c], range, scene.params, c) +
                             scene.noise_sigma * g[c];
                out.view.image.values[px_idx * 3 + c] = quantize8(val);
                out.truth.values[px_idx * 3 + c] = quantize8(alb[c]);
            }
        }
    }
    if (hits == 0)
        warn("render_view: pose " + std::to_string(pose_index) + " sees none of the scene");
    return out;
}

namespace {

void write_params_file(const fs::path& path, const UifmParams& p) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[160];
    std::snprintf(buf, sizeof(buf), "beta %.17g %.17g %.17g\n", p.attenuation[0],
                  p.attenuation[1], p.attenuation[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "B %.17g %.17g %.17g\n", p.veiling[0], p.veiling[1],
                  p.veiling[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "gamma %.17g %.17g %.17g\n", p.backscatter[0],
                  p.backscatter[1], p.backscatter[2]);
    out << buf;
    out << "mode " << (p.mode == ParamMode::kTied ? "tied" : "full") << "\n";
}

// Integer pixel rect of a world rect on a flat wall seen by an
// identity-rotation camera, shrunk by one pixel on each side.
struct PixelRect {
    int x, y, w, h;
};

std::optional<PixelRect> project_patch(const ChartPatch& p, const Eigen::Vector3d& center,
                                       const Intrinsics& k, double wall_z) {
    double depth = wall_z - center.z();
    if (!(depth > 0.0)) return std::nullopt;
    double u0 = k.fx * (p.x - center.x()) / depth + k.cx;
    double u1 = k.fx * (p.x + p.w - center.x()) / depth + k.cx;
    double v0 = k.fy * (p.y - center.y()) / depth + k.cy;
    double v1 = k.fy * (p.y + p.h - center.y()) / depth + k.cy;
    int xi = static_cast<int>(std::ceil(u0)) + 1;
    int xe = static_cast<int>(std::floor(u1)) - 2;
    int yi = static_cast<int>(std::ceil(v0)) + 1;
    int ye = static_cast<int>(std::floor(v1)) - 2;
    if (xe < xi || ye < yi) return std::nullopt;
    if (xi < 0 || yi < 0 || xe >= k.width || ye >= k.height) return std::nullopt;
    return PixelRect{xi, yi, xe - xi + 1, ye - yi + 1};
}

} // namespace

void export_scene(const SceneSpec& scene, const fs::path& root) {
    scene.validate();
    std::vector<RenderedView> rendered;
    rendered.reserve(scene.trajectory.size());
    for (int i = 0; i < static_cast<int>(scene.trajectory.size()); ++i)
        rendered.push_back(render_view(scene, i));

    std::vector<PosedImage> views;
    views.reserve(rendered.size());
    for (auto& r : rendered) views.push_back(r.view);
    write_dataset(root, views);

    std::error_code ec;
    fs::create_directories(root / "truth", ec);
    for (const auto& r : rendered) write_png(root / "truth" / (r.view.name + ".png"), r.truth);
    write_params_file(root / "truth" / "params.txt", scene.params);

    if (!scene.chart.empty()) {
        bool identity_rotation = true;
        for (const auto& pose : scene.trajectory)
            if (std::abs(pose.rotation.w() - 1.0) > 1e-12) identity_rotation = false;
        if (!identity_rotation) {
            warn("export_scene: chart emission requires identity rotations; skipping charts.txt");
            return;
        }
        double wall_z = scene.field.z_at(0, 0);
        std::ofstream out(root / "charts.txt");
        if (!out) throw DataError("cannot write " + (root / "charts.txt").string());
        out << "# NAME CHART_ID then 12 x (x y w h Er Eg Eb)\n";
        char buf[160];
        for (const auto& r : rendered) {
            std::vector<std::pair<PixelRect, Eigen::Vector3d>> rects;
            for (const auto& patch : scene.chart) {
                auto rect = project_patch(patch, r.view.pose.camera_center(),
                                          scene.intrinsics, wall_z);
                if (!rect) break;
                rects.emplace_back(*rect, patch.color);
            }
            if (rects.size() != scene.chart.size()) {
                warn("export_scene: chart not fully visible in " + r.view.name + "; skipped");
                continue;
            }
            out << r.view.name << " 0";
            for (const auto& [rect, color] : rects) {
                std::snprintf(buf, sizeof(buf), " %d %d %d %d %.17g %.17g %.17g", rect.x, rect.y,
                              rect.w, rect.h, color.x(), color.y(), color.z());
                out << buf;
            }
            out << "\n";
        }
    }
}

UifmParams read_truth_params(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open params file: " + path.string());
    UifmParams p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "beta")
            ss >> p.attenuation[0] >> p.attenuation[1] >> p.attenuation[2];
        else if (key == "B")
            ss >> p.veiling[0] >> p.veiling[1] >> p.veiling[2];
        else if (key == "gamma")
            ss >> p.backscatter[0] >> p.backscatter[1] >> p.backscatter[2];
        else if (key == "mode") {
            std::string m;
            ss >> m;
            p.mode = m == "tied" ? ParamMode::kTied : ParamMode::kFull;
        }
        if (!ss) throw DataError("malformed params file: " + path.string());
    }
    return p;
}

// --------------------------------------------------------------------------
// Presets
// --------------------------------------------------------------------------

namespace {

double plaid(double x, double y, int c) {
    static const double f1[3] = {2.31, 1.77, 2.93}, p1[3] = {0.4, 1.9, 3.1};
    static const double f2[3] = {3.13, 2.41, 1.63}, p2[3] = {1.1, 0.2, 2.3};
    static const double f3[3] = {0.71, 0.97, 0.53}, p3[3] = {2.0, 4.0, 0.9};
    double v = 0.5 + 0.23 * std::sin(f1[c] * x + p1[c]) + 0.17 * std::sin(f2[c] * y + p2[c]) +
               0.05 * std::sin(f3[c] * (x + y) + p3[c]);
    return std::clamp(v, 0.02, 0.98);
}

void build_flat_field(HeightField& f, double half_x, double half_y, double cell, double wall_z) {
    f.cell = cell;
    f.x0 = -half_x;
    f.y0 = -half_y;
    f.nx = static_cast<int>(std::ceil(2.0 * half_x / cell));
    f.ny = static_cast<int>(std::ceil(2.0 * half_y / cell));
    const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
    f.surface_z.assign(n, static_cast<float>(wall_z));
    f.albedo.resize(3 * n);
    for (int iy = 0; iy < f.ny; ++iy) {
        double y = f.y0 + (iy + 0.5) * cell;
        for (int ix = 0; ix < f.nx; ++ix) {
            double x = f.x0 + (ix + 0.5) * cell;
            for (int c = 0; c < 3; ++c)
                f.albedo[(static_cast<std::size_t>(iy) * f.nx + ix) * 3 + c] =
                    static_cast<float>(plaid(x, y, c));
        }
    }
}

CameraPose dolly_pose(double x, double y, double z) {
    CameraPose pose;
    pose.rotation = Eigen::Quaterniond::Identity();
    // world-to-camera translation for a camera centered at (x, y, z)
    pose.translation = Eigen::Vector3d(-x, -y, -z);
    return pose;
}

void apply_options(SceneSpec& scene, const PresetOptions& opt) {
    if (opt.noise_sigma >= 0.0) scene.noise_sigma = opt.noise_sigma;
    if (opt.seed) scene.seed = *opt.seed;
    if (opt.attenuation) scene.params.attenuation = *opt.attenuation;
    if (opt.veiling) scene.params.veiling = *opt.veiling;
    if (opt.backscatter) scene.params.backscatter = *opt.backscatter;
}

SceneSpec make_corridor(const PresetOptions& opt) {
    SceneSpec scene;
    scene.name = "corridor";
    int views = opt.views > 0 ? opt.views : 20;
    int w = opt.width > 0 ? opt.width : 160;
    int h = opt.height > 0 ? opt.height : 120;
    scene.intrinsics = {135.0, 135.0, w * 0.502, h * 0.5015, w, h};
    scene.params.attenuation = {0.5, 0.3, 0.15};
    scene.params.veiling = {0.10, 0.15, 0.25};
    scene.params.backscatter = {0.6, 0.4, 0.2};
    scene.noise_sigma = 0.01;
    scene.seed = 820317;

    const double wall_z = 8.437;
    const double far = 8.0, near = 1.0;
    for (int i = 0; i < views; ++i) {
        double s = views > 1 ? static_cast<double>(i) / (views - 1) : 0.0;
        double dist = far * std::pow(near / far, s); // geometric spacing, 8 -> 1 m
        double jx = 0.021 * std::sin(2.399 * i + 0.7);
        double jy = 0.017 * std::cos(1.931 * i + 0.3);
        scene.trajectory.push_back(dolly_pose(jx, jy, wall_z - dist));
    }

    double half_x = far * (std::max(scene.intrinsics.cx, w - scene.intrinsics.cx) + 1.0) / 135.0 + 0.15;
    double half_y = far * (std::max(scene.intrinsics.cy, h - scene.intrinsics.cy) + 1.0) / 135.0 + 0.15;
    build_flat_field(scene.field, half_x, half_y, 0.0093, wall_z);
    apply_options(scene, opt);
    return scene;
}

SceneSpec make_two_plane(const PresetOptions& opt) {
    SceneSpec scene;
    scene.name = "two_plane";
    int w = opt.width > 0 ? opt.width : 128;
    int h = opt.height > 0 ? opt.height : 96;
    scene.intrinsics = {118.0, 118.0, w * 0.5018, h * 0.5011, w, h};
    scene.params.attenuation = {0.3, 0.25, 0.2};
    scene.params.veiling = {0.12, 0.14, 0.2};
    scene.params.backscatter = {0.35, 0.3, 0.25};
    scene.noise_sigma = 0.0;
    scene.seed = 77;

    scene.trajectory.push_back(dolly_pose(0.0137, -0.0071, 0.0));
    scene.trajectory.push_back(dolly_pose(0.4923, 0.0111, 0.031));
    scene.trajectory.push_back(dolly_pose(-0.5217, -0.0167, -0.0234));
    if (opt.views > 0 && opt.views < static_cast<int>(scene.trajectory.size()))
        scene.trajectory.resize(opt.views);

    const double base_z = 4.203, plateau_z = 2.087;
    const double cell = 0.007;
    HeightField& f = scene.field;
    f.cell = cell;
    f.x0 = -2.9995;
    f.y0 = -2.2497;
    f.nx = static_cast<int>(std::ceil(2.0 * 2.9995 / cell));
    f.ny = static_cast<int>(std::ceil(2.0 * 2.2497 / cell));
    const int kx0 = 355, kx1 = 471, ky0 = 270, ky1 = 353;
    const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
    f.surface_z.assign(n, static_cast<float>(base_z));
    f.albedo.resize(3 * n);
    for (int iy = 0; iy < f.ny; ++iy) {
        double y = f.y0 + (iy + 0.5) * cell;
        for (int ix = 0; ix < f.nx; ++ix) {
            double x = f.x0 + (ix + 0.5) * cell;
            std::size_t idx = static_cast<std::size_t>(iy) * f.nx + ix;
            if (ix >= kx0 && ix < kx1 && iy >= ky0 && iy < ky1)
                f.surface_z[idx] = static_cast<float>(plateau_z);
            for (int c = 0; c < 3; ++c)
                f.albedo[idx * 3 + c] = static_cast<float>(plaid(x, y, c));
        }
    }

    TwoPlaneGeometry geom;
    geom.base_z = base_z;
    geom.plateau_z = plateau_z;
    geom.rx0 = f.x0 + kx0 * cell;
    geom.rx1 = f.x0 + kx1 * cell;
    geom.ry0 = f.y0 + ky0 * cell;
    geom.ry1 = f.y0 + ky1 * cell;
    geom.gx0 = f.x0;
    geom.gx1 = f.x0 + f.nx * cell;
    geom.gy0 = f.y0;
    geom.gy1 = f.y0 + f.ny * cell;
    scene.two_plane = geom;
    apply_options(scene, opt);
    return scene;
}

SceneSpec make_flat_chart(const PresetOptions& opt) {
    SceneSpec scene;
    scene.name = "flat_chart";
    int views = opt.views > 0 ? opt.views : 8;
    int w = opt.width > 0 ? opt.width : 128;
    int h = opt.height > 0 ? opt.height : 96;
    scene.intrinsics = {110.0, 110.0, w * 0.5032, h * 0.5024, w, h};
    scene.params.attenuation = {0.5, 0.3, 0.15};
    scene.params.veiling = {0.10, 0.15, 0.25};
    scene.params.backscatter = {0.6, 0.4, 0.2};
    scene.noise_sigma = 0.005;
    scene.seed = 411;

    const double wall_z = 6.913;
    const double far = 6.0, near = 1.0;
    for (int i = 0; i < views; ++i) {
        double s = views > 1 ? static_cast<double>(i) / (views - 1) : 0.0;
        double dist = far * std::pow(near / far, s);
        double jx = 0.008 * std::sin(2.173 * i + 0.5);
        double jy = 0.008 * std::cos(1.733 * i + 1.2);
        scene.trajectory.push_back(dolly_pose(jx, jy, wall_z - dist));
    }

    double half_x = far * (std::max(scene.intrinsics.cx, w - scene.intrinsics.cx) + 1.0) / 110.0 + 0.12;
    double half_y = far * (std::max(scene.intrinsics.cy, h - scene.intrinsics.cy) + 1.0) / 110.0 + 0.12;
    build_flat_field(scene.field, half_x, half_y, 0.0085, wall_z);

    // 4x3 grid of known-color patches around the image center.
    static const double colors[12][3] = {
        {0.45, 0.32, 0.27}, {0.76, 0.58, 0.50}, {0.37, 0.48, 0.61}, {0.34, 0.42, 0.26},
        {0.52, 0.50, 0.69}, {0.40, 0.74, 0.67}, {0.85, 0.49, 0.16}, {0.28, 0.36, 0.64},
        {0.76, 0.33, 0.38}, {0.36, 0.24, 0.42}, {0.62, 0.73, 0.25}, {0.88, 0.63, 0.16}};
    const double patch = 0.225, gap = 0.03;
    const double block_w = 4 * patch + 3 * gap, block_h = 3 * patch + 2 * gap;
    const double ox = 0.012 - block_w / 2.0, oy = -0.009 - block_h / 2.0;
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 4; ++col) {
            ChartPatch p;
            p.x = ox + col * (patch + gap);
            p.y = oy + row * (patch + gap);
            p.w = patch;
            p.h = patch;
            p.color = Eigen::Vector3d(colors[row * 4 + col]);
            scene.chart.push_back(p);
        }
    }
    // Stamp the patches into the albedo; cell centers decide membership.
    HeightField& f = scene.field;
    for (int iy = 0; iy < f.ny; ++iy) {
        double y = f.y0 + (iy + 0.5) * f.cell;
        for (int ix = 0; ix < f.nx; ++ix) {
            double x = f.x0 + (ix + 0.5) * f.cell;
            for (const auto& p : scene.chart) {
                if (x >= p.x && x < p.x + p.w && y >= p.y && y < p.y + p.h) {
                    std::size_t idx = (static_cast<std::size_t>(iy) * f.nx + ix) * 3;
                    for (int c = 0; c < 3; ++c)
                        f.albedo[idx + c] = static_cast<float>(p.color[c]);
                    break;
                }
            }
        }
    }
    apply_options(scene, opt);
    return scene;
}

} // namespace

SceneSpec make_preset(const std::string& name, const PresetOptions& opt) {
    if (name == "corridor") return make_corridor(opt);
    if (name == "two_plane") return make_two_plane(opt);
    if (name == "flat_chart") return make_flat_chart(opt);
    throw DataError("unknown preset '" + name + "' (corridor, two_plane, flat_chart)");
}

SceneSpec scene_from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scene file: " + path.string());
    std::string preset;
    PresetOptions opt;
    // Per-component coefficient overrides, applied on top of preset defaults.
    std::optional<double> att[3], veil[3], back[3];

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
            if (blank) continue;
            throw DataError("scene file line " + std::to_string(lineno) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "preset") preset = value;
            else if (key == "views") opt.views = std::stoi(value);
            else if (key == "width") opt.width = std::stoi(value);
            else if (key == "height") opt.height = std::stoi(value);
            else if (key == "noise_sigma") opt.noise_sigma = std::stod(value);
            else if (key == "seed") opt.seed = std::stoull(value);
            else if (key == "beta_r") att[0] = std::stod(value);
            else if (key == "beta_g") att[1] = std::stod(value);
            else if (key == "beta_b") att[2] = std::stod(value);
            else if (key == "B_r") veil[0] = std::stod(value);
            else if (key == "B_g") veil[1] = std::stod(value);
            else if (key == "B_b") veil[2] = std::stod(value);
            else if (key == "gamma_r") back[0] = std::stod(value);
            else if (key == "gamma_g") back[1] = std::stod(value);
            else if (key == "gamma_b") back[2] = std::stod(value);
            else throw DataError("scene file: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw DataError("scene file line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    if (preset.empty()) throw DataError("scene file must set 'preset ='");
    SceneSpec scene = make_preset(preset, opt);
    for (int c = 0; c < 3; ++c) {
        if (att[c]) scene.params.attenuation[c] = *att[c];
        if (veil[c]) scene.params.veiling[c] = *veil[c];
        if (back[c]) scene.params.backscatter[c] = *back[c];
    }
    return scene;
}

} // namespace uwr
