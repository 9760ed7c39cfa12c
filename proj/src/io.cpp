/**********
 *   Copyright 2026 The polarbm3d authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include "pbm3d/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "pbm3d/error.hpp"

namespace pbm3d {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "float map I/O assumes a little-endian host");

// ------------------------------------------------------------ raw helpers

std::ifstream open_input(const fs::path& path) {
    if (!fs::exists(path)) throw MissingFileError("no such file: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    return in;
}

// PNM-style header token: skips whitespace and '#' comments
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    if (tok.empty()) throw IoError("truncated header");
    return tok;
}

int parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("bad ") + what + " in header: " + s);
    }
}

// PFM convention: rows stored bottom-to-top, negative scale = little-endian
template <typename F>
Plane load_float_map(std::istream& in, const fs::path& path) {
    const int w = parse_int(next_token(in), "width");
    const int h = parse_int(next_token(in), "height");
    const std::string scale = next_token(in);
    if (w < 1 || h < 1) throw IoError("bad dimensions in " + path.string());
    if (scale.empty() || scale[0] != '-')
        throw UnsupportedFormatError("big-endian float map not supported: " + path.string());
    Plane p(w, h);
    std::vector<F> rowbuf(static_cast<size_t>(w));
    for (int r = h - 1; r >= 0; --r) {
        in.read(reinterpret_cast<char*>(rowbuf.data()), static_cast<std::streamsize>(sizeof(F)) * w);
        if (!in) throw IoError("truncated pixel data: " + path.string());
        for (int c = 0; c < w; ++c) p.at(r, c) = static_cast<double>(rowbuf[c]);
    }
    return p;
}

Plane load_pgm(std::istream& in, const fs::path& path) {
    const int w = parse_int(next_token(in), "width");
    const int h = parse_int(next_token(in), "height");
    const int maxval = parse_int(next_token(in), "maxval");
    if (w < 1 || h < 1) throw IoError("bad dimensions in " + path.string());
    if (maxval != 255 && maxval != 65535)
        throw UnsupportedFormatError("PGM maxval must be 255 or 65535: " + path.string());
    Plane p(w, h);
    const double inv = 1.0 / maxval;
    if (maxval == 255) {
        std::vector<uint8_t> buf(static_cast<size_t>(w) * h);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in) throw IoError("truncated pixel data: " + path.string());
        for (size_t k = 0; k < buf.size(); ++k) p.data[k] = buf[k] * inv;
    } else {
        std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in) throw IoError("truncated pixel data: " + path.string());
        for (size_t k = 0; k < p.data.size(); ++k) {
            const unsigned v = (static_cast<unsigned>(buf[2 * k]) << 8) | buf[2 * k + 1];
            p.data[k] = v * inv;  // PGM 16-bit is big-endian
        }
    }
    return p;
}

template <typename F>
void save_float_map(const Plane& p, const fs::path& path, const char* magic) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    out << magic << "\n" << p.width << " " << p.height << "\n-1.0\n";
    std::vector<F> rowbuf(static_cast<size_t>(p.width));
    for (int r = p.height - 1; r >= 0; --r) {
        for (int c = 0; c < p.width; ++c) rowbuf[c] = static_cast<F>(p.at(r, c));
        out.write(reinterpret_cast<const char*>(rowbuf.data()),
                  static_cast<std::streamsize>(sizeof(F)) * p.width);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void save_pgm(const Plane& p, const fs::path& path, int maxval, bool clip) {
    for (double v : p.data) {
        if (!clip && (v < 0.0 || v > 1.0))
            throw RangeError("sample outside [0,1]; pass clip=true for integer formats");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    out << "P5\n" << p.width << " " << p.height << "\n" << maxval << "\n";
    if (maxval == 255) {
        std::vector<uint8_t> buf(p.data.size());
        for (size_t k = 0; k < p.data.size(); ++k) {
            const double v = std::clamp(p.data[k], 0.0, 1.0);
            buf[k] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<uint8_t> buf(p.data.size() * 2);
        for (size_t k = 0; k < p.data.size(); ++k) {
            const double v = std::clamp(p.data[k], 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::lround(v * 65535.0));
            buf[2 * k] = static_cast<uint8_t>(q >> 8);
            buf[2 * k + 1] = static_cast<uint8_t>(q & 0xFF);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

PlaneFormat parse_plane_format(const std::string& name) {
    if (name == "pfm64" || name == "pfm") return PlaneFormat::Pfm64;
    if (name == "pfm32") return PlaneFormat::Pfm32;
    if (name == "pgm8") return PlaneFormat::Pgm8;
    if (name == "pgm16") return PlaneFormat::Pgm16;
    throw LookupError("unknown plane format: " + name);
}

std::string plane_format_extension(PlaneFormat f) {
    switch (f) {
        case PlaneFormat::Pfm64:
        case PlaneFormat::Pfm32: return ".pfm";
        case PlaneFormat::Pgm8:
        case PlaneFormat::Pgm16: return ".pgm";
    }
    return ".pfm";
}

Plane load_plane(const fs::path& path) {
    std::ifstream in = open_input(path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in) throw IoError("truncated header: " + path.string());
    if (m0 == 'P' && m1 == 'f') return load_float_map<float>(in, path);
    if (m0 == 'P' && m1 == 'd') return load_float_map<double>(in, path);
    if (m0 == 'P' && m1 == '5') return load_pgm(in, path);
    if (m0 == 'P' && m1 == 'F')
        throw UnsupportedFormatError("color float maps not supported: " + path.string());
    throw UnsupportedFormatError("unrecognized image format: " + path.string());
}

void save_plane(const Plane& p, const fs::path& path, PlaneFormat format, bool clip) {
    if (p.width < 1 || p.height < 1) throw StructuralError("save_plane: empty plane");
    switch (format) {
        case PlaneFormat::Pfm64: save_float_map<double>(p, path, "Pd"); return;
        case PlaneFormat::Pfm32: save_float_map<float>(p, path, "Pf"); return;
        case PlaneFormat::Pgm8: save_pgm(p, path, 255, clip); return;
        case PlaneFormat::Pgm16: save_pgm(p, path, 65535, clip); return;
    }
}

// ------------------------------------------------------------- manifests

DatasetManifest DatasetManifest::load(const fs::path& path) {
    std::ifstream in = open_input(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    DatasetManifest man;
    std::set<std::string> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string head;
        is >> head;
        if (head.empty()) continue;
        if (head != "entry")
            throw ValidationError("manifest " + path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'entry'");
        ManifestEntry e;
        std::string token;
        while (is >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos)
                throw ValidationError("manifest " + path.string() + ":" + std::to_string(lineno) +
                                      ": bad token " + token);
            const std::string key = token.substr(0, eq);
            const std::string val = token.substr(eq + 1);
            if (key == "id") e.id = val;
            else if (key == "i0") e.path_i0 = base / val;
            else if (key == "i45") e.path_i45 = base / val;
            else if (key == "i90") e.path_i90 = base / val;
            else if (key == "truth_i0") e.truth_i0 = base / val;
            else if (key == "truth_i45") e.truth_i45 = base / val;
            else if (key == "truth_i90") e.truth_i90 = base / val;
            else if (key == "sigma") e.sigma = std::stod(val);
            else
                throw ValidationError("manifest " + path.string() + ":" + std::to_string(lineno) +
                                      ": unknown key " + key);
        }
        if (e.id.empty() || e.path_i0.empty() || e.path_i45.empty() || e.path_i90.empty())
            throw ValidationError("manifest " + path.string() + ":" + std::to_string(lineno) +
                                  ": entry needs id, i0, i45, i90");
        if (!ids.insert(e.id).second)
            throw ValidationError("manifest " + path.string() + ": duplicate id " + e.id);
        man.entries.push_back(std::move(e));
    }
    return man;
}

void DatasetManifest::save(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write: " + path.string());
    out << "# polarbm3d dataset manifest\n";
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto rel = [&](const fs::path& p) { return fs::relative(p, base).generic_string(); };
    for (const ManifestEntry& e : entries) {
        out << "entry id=" << e.id << " i0=" << rel(e.path_i0) << " i45=" << rel(e.path_i45)
            << " i90=" << rel(e.path_i90);
        if (e.has_truth())
            out << " truth_i0=" << rel(*e.truth_i0) << " truth_i45=" << rel(*e.truth_i45)
                << " truth_i90=" << rel(*e.truth_i90);
        if (e.sigma) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", *e.sigma);
            out << " sigma=" << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

const ManifestEntry& DatasetManifest::find(const std::string& id) const {
    for (const ManifestEntry& e : entries)
        if (e.id == id) return e;
    throw LookupError("no manifest entry with id " + id);
}

CameraImage load_triple(const fs::path& p0, const fs::path& p45, const fs::path& p90) {
    Plane a = load_plane(p0);
    Plane b = load_plane(p45);
    Plane c = load_plane(p90);
    if (!a.same_shape(b) || !a.same_shape(c))
        throw StructuralError("triple planes have different dimensions");
    return CameraImage::create(std::move(a), std::move(b), std::move(c));
}

CameraImage load_triple(const ManifestEntry& entry) {
    return load_triple(entry.path_i0, entry.path_i45, entry.path_i90);
}

std::vector<fs::path> save_triple(const CameraImage& img, const fs::path& prefix,
                                  PlaneFormat format, bool clip) {
    img.validate();
    const std::string ext = plane_format_extension(format);
    fs::path dir = prefix.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    std::vector<fs::path> paths = {fs::path(prefix.string() + "_i0" + ext),
                                   fs::path(prefix.string() + "_i45" + ext),
                                   fs::path(prefix.string() + "_i90" + ext)};
    save_plane(img.i0, paths[0], format, clip);
    save_plane(img.i45, paths[1], format, clip);
    save_plane(img.i90, paths[2], format, clip);
    return paths;
}

CameraImage average_frames(const std::vector<CameraImage>& frames) {
    if (frames.empty()) throw StructuralError("average_frames: no frames");
    const int w = frames[0].width(), h = frames[0].height();
    for (const CameraImage& f : frames) {
        f.validate();
        if (f.width() != w || f.height() != h)
            throw StructuralError("average_frames: frame dimensions differ");
    }
    CameraImage out{Plane(w, h, 0.0), Plane(w, h, 0.0), Plane(w, h, 0.0)};
    for (const CameraImage& f : frames)
        for (int p = 0; p < 3; ++p)
            for (size_t k = 0; k < out.plane(p).data.size(); ++k)
                out.plane(p).data[k] += f.plane(p).data[k];
    const double inv = 1.0 / static_cast<double>(frames.size());
    for (int p = 0; p < 3; ++p)
        for (double& v : out.plane(p).data) v *= inv;
    return out;
}

void save_matrix(const Mat3& m, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write: " + path.string());
    char buf[40];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            out << buf << (c == 2 ? "\n" : " ");
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Mat3 load_matrix(const fs::path& path) {
    std::ifstream in = open_input(path);
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (!(in >> m(r, c))) throw IoError("matrix file needs 9 numbers: " + path.string());
    return m;
}

}  // namespace pbm3d
