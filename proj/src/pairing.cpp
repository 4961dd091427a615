#include "uwr/pairing.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "uwr/errors.hpp"
#include "uwr/parallel.hpp"

namespace uwr {

std::vector<ObservationSet::Segment> ObservationSet::segments() const {
    std::vector<Segment> segs;
    std::size_t n = pixel_index.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && pixel_index[j] == pixel_index[i]) ++j;
        segs.push_back({pixel_index[i], i, j});
        i = j;
    }
    return segs;
}

std::vector<PixelPair> pair_images(const PosedImage& target, const PosedImage& other) {
    target.validate();
    other.validate();

    const int w1 = target.image.width, h1 = target.image.height;
    const int w2 = other.image.width, h2 = other.image.height;
    ViewPairTransfer fwd(target, other);
    ViewPairTransfer bwd(other, target);

    std::vector<PixelPair> pairs;
    for (int v1 = 0; v1 < h1; ++v1) {
        for (int u1 = 0; u1 < w1; ++u1) {
            if (!target.depth.has_depth(u1, v1)) continue;
            auto t12 = fwd.transfer({static_cast<double>(u1), static_cast<double>(v1), 1.0},
                                    target.depth.at(u1, v1), target.intrinsics, other.intrinsics,
                                    w2, h2);
            if (!t12) continue;
            int u2 = static_cast<int>(std::floor(t12->pixel.u));
            int v2 = static_cast<int>(std::floor(t12->pixel.v));
            if (!other.depth.has_depth(u2, v2)) continue;
            auto t21 = bwd.transfer({static_cast<double>(u2), static_cast<double>(v2), 1.0},
                                    other.depth.at(u2, v2), other.intrinsics, target.intrinsics,
                                    w1, h1);
            if (!t21) continue;
            if (static_cast<int>(std::floor(t21->pixel.u)) != u1 ||
                static_cast<int>(std::floor(t21->pixel.v)) != v1)
                continue;
            pairs.push_back({static_cast<std::uint32_t>(v1) * w1 + u1,
                             static_cast<std::uint32_t>(v2) * w2 + u2});
        }
    }
    return pairs;
}

ObservationSet build_observations(const PosedImage& target,
                                  const std::vector<PosedImage>& candidates,
                                  std::optional<int> window, DistanceMode mode) {
    target.validate();
    const int w = target.image.width, h = target.image.height;
    const std::size_t n_px = static_cast<std::size_t>(w) * h;

    ObservationSet obs;
    obs.target_id = target.id;
    obs.width = w;
    obs.height = h;
    obs.counts.assign(n_px, 0);

    // Self-observations seed every pixel with depth.
    std::size_t masked = 0;
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (target.depth.has_depth(u, v)) {
                obs.counts[static_cast<std::size_t>(v) * w + u] = 1;
                ++masked;
            }
    if (masked == 0) throw DataError("nothing to restore: target " + std::to_string(target.id) +
                                     " has no depth anywhere");

    // Admitted candidates, in the order supplied.
    std::vector<const PosedImage*> admitted;
    for (const auto& cand : candidates) {
        if (cand.id == target.id) continue;
        if (window && std::llabs(cand.id - target.id) > *window) continue;
        admitted.push_back(&cand);
    }

    // Pair against every candidate; candidates are independent so they run in
    // parallel, and the merge below walks them in supplied order.
    std::vector<std::vector<PixelPair>> pair_lists(admitted.size());
    parallel_for_index(admitted.size(),
                       [&](std::size_t i) { pair_lists[i] = pair_images(target, *admitted[i]); });

    for (const auto& pairs : pair_lists)
        for (const auto& p : pairs) ++obs.counts[p.target_pixel];

    // Offsets per pixel, observations placed self-first then candidate order.
    std::size_t total = 0;
    std::vector<std::size_t> offset(n_px, 0);
    for (std::size_t p = 0; p < n_px; ++p) {
        offset[p] = total;
        total += obs.counts[p];
    }
    obs.pixel_index.resize(total);
    obs.intensity.resize(total * 3);
    obs.distance.resize(total);

    std::vector<std::size_t> cursor = offset;
    auto emit = [&](std::uint32_t target_px, const PosedImage& view, int u, int v) {
        double d = view.depth.at(u, v);
        double z = observation_distance({static_cast<double>(u), static_cast<double>(v), 1.0}, d,
                                        view.intrinsics, mode);
        std::size_t slot = cursor[target_px]++;
        obs.pixel_index[slot] = target_px;
        obs.distance[slot] = static_cast<float>(z);
        for (int c = 0; c < 3; ++c)
            obs.intensity[slot * 3 + c] = static_cast<float>(view.intensity(u, v, c));
    };

    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (target.depth.has_depth(u, v))
                emit(static_cast<std::uint32_t>(v) * w + u, target, u, v);

    for (std::size_t i = 0; i < admitted.size(); ++i) {
        const PosedImage& cand = *admitted[i];
        for (const auto& p : pair_lists[i])
            emit(p.target_pixel, cand, static_cast<int>(p.other_pixel % cand.image.width),
                 static_cast<int>(p.other_pixel / cand.image.width));
    }
    return obs;
}

namespace {
constexpr char kCacheMagic[8] = {'U', 'W', 'R', 'O', 'B', 'S', '1', '\n'};
}

void save_observations(const std::filesystem::path& path, const ObservationSet& obs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write observation cache: " + path.string());
    out.write(kCacheMagic, sizeof(kCacheMagic));
    std::int64_t tid = obs.target_id;
    std::int32_t w = obs.width, h = obs.height;
    std::uint64_t n = obs.size();
    out.write(reinterpret_cast<const char*>(&tid), 8);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(obs.pixel_index.data()), 4 * n);
    out.write(reinterpret_cast<const char*>(obs.intensity.data()), 12 * n);
    out.write(reinterpret_cast<const char*>(obs.distance.data()), 4 * n);
    if (!out) throw DataError("I/O error writing observation cache: " + path.string());
}

ObservationSet load_observations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open observation cache: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCacheMagic, 8) != 0)
        throw DataError("not an observation cache: " + path.string());
    ObservationSet obs;
    std::int64_t tid;
    std::int32_t w, h;
    std::uint64_t n;
    in.read(reinterpret_cast<char*>(&tid), 8);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in || w <= 0 || h <= 0) throw DataError("corrupt observation cache: " + path.string());
    obs.target_id = tid;
    obs.width = w;
    obs.height = h;
    obs.pixel_index.resize(n);
    obs.intensity.resize(n * 3);
    obs.distance.resize(n);
    in.read(reinterpret_cast<char*>(obs.pixel_index.data()), 4 * n);
    in.read(reinterpret_cast<char*>(obs.intensity.data()), 12 * n);
    in.read(reinterpret_cast<char*>(obs.distance.data()), 4 * n);
    if (!in) throw DataError("truncated observation cache: " + path.string());
    obs.counts.assign(static_cast<std::size_t>(w) * h, 0);
    for (auto p : obs.pixel_index) {
        if (p >= obs.counts.size()) throw DataError("corrupt observation cache: " + path.string());
        ++obs.counts[p];
    }
    return obs;
}

} // namespace uwr
