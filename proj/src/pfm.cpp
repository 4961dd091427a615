#include "uwr/pfm.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace uwr {

namespace {

// Reads one whitespace-delimited token, skipping comments is not part of the
// PFM grammar; the header is exactly three tokens.
std::string next_token(std::istream& in) {
    std::string tok;
    in >> tok;
    return tok;
}

} // namespace

DepthMap read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open PFM file: " + path.string());

    std::string magic = next_token(in);
    if (magic != "Pf")
        throw DataError("not a grayscale PFM file (" + path.string() + "): magic '" + magic + "'");

    int width = 0, height = 0;
    double scale = 0.0;
    if (!(in >> width >> height >> scale))
        throw DataError("malformed PFM header: " + path.string());
    if (width <= 0 || height <= 0)
        throw DataError("PFM dimensions must be positive: " + path.string());
    if (scale >= 0.0)
        throw DataError("big-endian PFM not supported: " + path.string());

    // Single whitespace byte separates header from raster.
    in.get();

    DepthMap map;
    map.width = width;
    map.height = height;
    map.values.resize(static_cast<std::size_t>(width) * height);

    std::vector<float> row(width);
    for (int v = height - 1; v >= 0; --v) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(width) * 4);
        if (!in) throw DataError("truncated PFM raster: " + path.string());
        std::memcpy(&map.values[static_cast<std::size_t>(v) * width], row.data(),
                    static_cast<std::size_t>(width) * 4);
    }
    return map;
}

void write_pfm(const std::filesystem::path& path, const DepthMap& map) {
    if (map.width <= 0 || map.height <= 0)
        throw DataError("write_pfm: empty depth map");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write PFM file: " + path.string());

    char header[64];
    int n = std::snprintf(header, sizeof(header), "Pf\n%d %d\n-1.0\n", map.width, map.height);
    out.write(header, n);

    for (int v = map.height - 1; v >= 0; --v) {
        out.write(reinterpret_cast<const char*>(&map.values[static_cast<std::size_t>(v) * map.width]),
                  static_cast<std::streamsize>(map.width) * 4);
    }
    if (!out) throw DataError("I/O error writing PFM file: " + path.string());
}

} // namespace uwr
