#include "placerec/pgm_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace placerec {

namespace fs = std::filesystem;

void write_pgm16(const fs::path& path, const DepthFrame& frame) {
    frame.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path.string());
    os << "P5\n" << frame.width << " " << frame.height << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(frame.width) * 2);
    for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
            const uint16_t d = frame.at(u, v);
            row[2 * u] = static_cast<unsigned char>(d >> 8);
            row[2 * u + 1] = static_cast<unsigned char>(d & 0xff);
        }
        os.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!os) throw Error("write failed: " + path.string());
}

namespace {

int read_pnm_token(std::istream& is, const fs::path& path) {
    // skips whitespace and '#' comments, then reads one integer
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = is.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    if (c == EOF) throw ParseError("truncated PGM header: " + path.string());
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = is.get();
    }
    if (!any) throw ParseError("malformed PGM header: " + path.string());
    return value;
}

}  // namespace

DepthFrame read_pgm16(const fs::path& path, const CameraIntrinsics& k) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open: " + path.string());
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '5') throw ParseError("not a binary PGM (P5): " + path.string());

    DepthFrame f;
    f.width = read_pnm_token(is, path);
    f.height = read_pnm_token(is, path);
    const int maxval = read_pnm_token(is, path);
    if (maxval != 65535)
        throw ParseError("expected 16-bit PGM (maxval 65535), got maxval " +
                         std::to_string(maxval) + ": " + path.string());
    if (f.width <= 0 || f.height <= 0) throw ParseError("bad PGM dimensions: " + path.string());

    f.intrinsics = k;
    f.depth.resize(static_cast<size_t>(f.width) * f.height);
    std::vector<unsigned char> raw(f.depth.size() * 2);
    is.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (static_cast<size_t>(is.gcount()) != raw.size())
        throw ParseError("truncated PGM pixel data: " + path.string());
    for (size_t i = 0; i < f.depth.size(); ++i)
        f.depth[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    return f;
}

std::vector<fs::path> list_sequence_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        if (e.path().extension() == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string frame_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%06d.pgm", index);
    return buf;
}

}  // namespace placerec
