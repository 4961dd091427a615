#include "uwr/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "uwr/pfm.hpp"
#include "uwr/png_io.hpp"

namespace uwr {

namespace fs = std::filesystem;

namespace {

bool is_comment_or_blank(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

std::map<std::int64_t, Intrinsics> read_cameras(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing cameras file: " + path.string());
    std::map<std::int64_t, Intrinsics> cameras;
    std::string line;
    while (std::getline(in, line)) {
        if (is_comment_or_blank(line)) continue;
        std::istringstream ss(line);
        std::int64_t cam_id;
        std::string model;
        Intrinsics k;
        if (!(ss >> cam_id >> model >> k.width >> k.height >> k.fx >> k.fy >> k.cx >> k.cy))
            throw DataError("malformed camera record in " + path.string() + ": " + line);
        if (model != "PINHOLE")
            throw DataError("unsupported camera model '" + model + "' (only PINHOLE)");
        k.validate();
        if (!cameras.emplace(cam_id, k).second)
            throw DataError("duplicate camera id " + std::to_string(cam_id));
    }
    return cameras;
}

} // namespace

std::vector<PosedImage> load_dataset(const fs::path& root) {
    auto cameras = read_cameras(root / "cameras.txt");

    fs::path images_txt = root / "images.txt";
    std::ifstream in(images_txt);
    if (!in) throw DataError("missing images file: " + images_txt.string());

    std::vector<PosedImage> result;
    std::unordered_set<std::int64_t> seen_ids;
    std::string line;
    while (std::getline(in, line)) {
        if (is_comment_or_blank(line)) continue;
        std::istringstream ss(line);
        PosedImage img;
        double qw, qx, qy, qz;
        std::int64_t cam_id;
        if (!(ss >> img.id >> qw >> qx >> qy >> qz >> img.pose.translation.x() >>
              img.pose.translation.y() >> img.pose.translation.z() >> cam_id >> img.name))
            throw DataError("malformed image record in " + images_txt.string() + ": " + line);
        if (!seen_ids.insert(img.id).second)
            throw DataError("duplicate image id " + std::to_string(img.id));
        img.pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
        try {
            img.pose.normalize();
        } catch (const DataError&) {
            throw DataError("image " + std::to_string(img.id) + ": unnormalizable quaternion");
        }

        auto cam = cameras.find(cam_id);
        if (cam == cameras.end())
            throw DataError("image " + std::to_string(img.id) + " references unknown camera " +
                            std::to_string(cam_id));
        img.intrinsics = cam->second;

        fs::path png_path = root / "images" / (img.name + ".png");
        if (!fs::exists(png_path)) throw DataError("missing image file: " + png_path.string());
        img.image = read_png(png_path);

        fs::path pfm_path = root / "depths" / (img.name + ".pfm");
        if (!fs::exists(pfm_path)) throw DataError("missing depth file: " + pfm_path.string());
        img.depth = read_pfm(pfm_path);

        img.validate();
        result.push_back(std::move(img));
    }

    std::sort(result.begin(), result.end(),
              [](const PosedImage& a, const PosedImage& b) { return a.id < b.id; });
    return result;
}

void write_dataset(const fs::path& root, const std::vector<PosedImage>& images) {
    std::error_code ec;
    fs::create_directories(root / "images", ec);
    fs::create_directories(root / "depths", ec);

    // One camera record per distinct intrinsics, in first-use order.
    std::vector<Intrinsics> cameras;
    auto camera_id_for = [&](const Intrinsics& k) -> std::size_t {
        for (std::size_t i = 0; i < cameras.size(); ++i)
            if (cameras[i].same_as(k)) return i + 1;
        cameras.push_back(k);
        return cameras.size();
    };

    std::ofstream images_out(root / "images.txt");
    if (!images_out) throw DataError("cannot write " + (root / "images.txt").string());
    images_out << "# IMAGE_ID qw qx qy qz tx ty tz CAMERA_ID NAME (world-to-camera)\n";

    char buf[512];
    for (const auto& img : images) {
        img.validate();
        std::size_t cam_id = camera_id_for(img.intrinsics);
        std::string name = img.name.empty() ? "view_" + std::to_string(img.id) : img.name;
        std::snprintf(buf, sizeof(buf),
                      "%" PRId64 " %.17g %.17g %.17g %.17g %.17g %.17g %.17g %zu %s\n", img.id,
                      img.pose.rotation.w(), img.pose.rotation.x(), img.pose.rotation.y(),
                      img.pose.rotation.z(), img.pose.translation.x(), img.pose.translation.y(),
                      img.pose.translation.z(), cam_id, name.c_str());
        images_out << buf;
        write_png(root / "images" / (name + ".png"), img.image);
        write_pfm(root / "depths" / (name + ".pfm"), img.depth);
    }
    images_out.close();
    if (!images_out) throw DataError("I/O error writing " + (root / "images.txt").string());

    std::ofstream cameras_out(root / "cameras.txt");
    if (!cameras_out) throw DataError("cannot write " + (root / "cameras.txt").string());
    cameras_out << "# CAMERA_ID PINHOLE WIDTH HEIGHT fx fy cx cy\n";
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        const Intrinsics& k = cameras[i];
        std::snprintf(buf, sizeof(buf), "%zu PINHOLE %d %d %.17g %.17g %.17g %.17g\n", i + 1,
                      k.width, k.height, k.fx, k.fy, k.cx, k.cy);
        cameras_out << buf;
    }
    cameras_out.close();
    if (!cameras_out) throw DataError("I/O error writing " + (root / "cameras.txt").string());
}

} // namespace uwr
