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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pbm3d/error.hpp"
#include "pbm3d/fixtures.hpp"
#include "pbm3d/io.hpp"
#include "pbm3d/noise.hpp"

using namespace pbm3d;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pbm3d_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

Plane random_plane(int w, int h, uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Plane p(w, h);
    Rng rng(seed, 0);
    for (double& v : p.data) v = lo + (hi - lo) * rng.next_double();
    return p;
}

}  // namespace

TEST_CASE("pfm64 roundtrip is bit-exact for doubles, in and out of range") {
    TempDir tmp;
    Plane p = random_plane(23, 17, 5, -0.3, 1.4);
    p.at(0, 0) = 1.2;
    p.at(1, 1) = -0.25;
    const fs::path f = tmp.path / "x.pfm";
    save_plane(p, f, PlaneFormat::Pfm64);
    const Plane back = load_plane(f);
    REQUIRE(back.width == p.width);
    REQUIRE(back.height == p.height);
    CHECK(back.data == p.data);
}

TEST_CASE("pfm32 roundtrips float-representable data bit-exactly") {
    TempDir tmp;
    Plane p(9, 7);
    Rng rng(6, 0);
    for (double& v : p.data) v = static_cast<double>(static_cast<float>(rng.next_double()));
    const fs::path f = tmp.path / "x32.pfm";
    save_plane(p, f, PlaneFormat::Pfm32);
    CHECK(load_plane(f).data == p.data);
}

TEST_CASE("pgm full-scale and zero map to 1.0 and 0.0") {
    TempDir tmp;
    Plane ones(4, 4, 1.0);
    save_plane(ones, tmp.path / "ones16.pgm", PlaneFormat::Pgm16);
    Plane back = load_plane(tmp.path / "ones16.pgm");
    for (double v : back.data) CHECK(v == 1.0);

    Plane zeros(4, 4, 0.0);
    save_plane(zeros, tmp.path / "zeros8.pgm", PlaneFormat::Pgm8);
    back = load_plane(tmp.path / "zeros8.pgm");
    for (double v : back.data) CHECK(v == 0.0);

    // quantization roundtrip: 8-bit values survive a save/load cycle
    Plane quant(16, 1);
    for (int c = 0; c < 16; ++c) quant.at(0, c) = (c * 17) / 255.0;
    save_plane(quant, tmp.path / "q.pgm", PlaneFormat::Pgm8);
    back = load_plane(tmp.path / "q.pgm");
    for (int c = 0; c < 16; ++c) CHECK(back.at(0, c) == doctest::Approx(quant.at(0, c)).epsilon(1e-12));
}

TEST_CASE("integer saves: clip semantics") {
    TempDir tmp;
    Plane p(2, 2, 0.5);
    p.at(0, 0) = 1.2;
    CHECK_THROWS_AS(save_plane(p, tmp.path / "no.pgm", PlaneFormat::Pgm8, false), RangeError);
    save_plane(p, tmp.path / "yes.pgm", PlaneFormat::Pgm8, true);
    const Plane back = load_plane(tmp.path / "yes.pgm");
    CHECK(back.at(0, 0) == 1.0);  // 255 after clipping
}

TEST_CASE("distinct errors: missing file, unsupported format") {
    TempDir tmp;
    CHECK_THROWS_AS(load_plane(tmp.path / "absent.pfm"), MissingFileError);
    std::ofstream(tmp.path / "bad.img") << "JUNKDATA";
    CHECK_THROWS_AS(load_plane(tmp.path / "bad.img"), UnsupportedFormatError);
}

TEST_CASE("load_triple: dimension mismatch is structural") {
    TempDir tmp;
    save_plane(Plane(4, 4, 0.1), tmp.path / "a.pfm", PlaneFormat::Pfm64);
    save_plane(Plane(4, 4, 0.2), tmp.path / "b.pfm", PlaneFormat::Pfm64);
    save_plane(Plane(5, 4, 0.3), tmp.path / "c.pfm", PlaneFormat::Pfm64);
    CHECK_THROWS_AS(load_triple(tmp.path / "a.pfm", tmp.path / "b.pfm", tmp.path / "c.pfm"),
                    StructuralError);
}

TEST_CASE("save_triple / manifest / load_triple cycle") {
    TempDir tmp;
    const CameraImage img = make_fixture(FixtureKind::UniformDop, 32, 3);
    const auto paths = save_triple(img, tmp.path / "set" / "img1", PlaneFormat::Pfm64);
    REQUIRE(paths.size() == 3);

    DatasetManifest man;
    ManifestEntry e;
    e.id = "img1";
    e.path_i0 = paths[0];
    e.path_i45 = paths[1];
    e.path_i90 = paths[2];
    e.sigma = 0.026;
    man.entries.push_back(e);
    man.save(tmp.path / "set" / "manifest.txt");

    const DatasetManifest loaded = DatasetManifest::load(tmp.path / "set" / "manifest.txt");
    REQUIRE(loaded.entries.size() == 1);
    CHECK(loaded.entries[0].id == "img1");
    REQUIRE(loaded.entries[0].sigma.has_value());
    CHECK(*loaded.entries[0].sigma == doctest::Approx(0.026));

    const CameraImage back = load_triple(loaded.entries[0]);
    CHECK(back.i0.data == img.i0.data);
    CHECK(back.i45.data == img.i45.data);
    CHECK(back.i90.data == img.i90.data);

    CHECK_THROWS_AS(loaded.find("nope"), LookupError);
}

TEST_CASE("manifest rejects duplicate ids and malformed lines") {
    TempDir tmp;
    {
        std::ofstream out(tmp.path / "dup.txt");
        out << "entry id=a i0=a0.pfm i45=a45.pfm i90=a90.pfm\n";
        out << "entry id=a i0=b0.pfm i45=b45.pfm i90=b90.pfm\n";
    }
    CHECK_THROWS_AS(DatasetManifest::load(tmp.path / "dup.txt"), ValidationError);
    {
        std::ofstream out(tmp.path / "bad.txt");
        out << "record id=a\n";
    }
    CHECK_THROWS_AS(DatasetManifest::load(tmp.path / "bad.txt"), ValidationError);
}

TEST_CASE("average_frames: identity cases and errors") {
    const CameraImage img = make_fixture(FixtureKind::Textured, 32, 4);
    CHECK(average_frames({img}).i0.data == img.i0.data);

    const CameraImage avg = average_frames({img, img, img});
    for (size_t k = 0; k < img.i0.data.size(); ++k)
        CHECK(avg.i0.data[k] == doctest::Approx(img.i0.data[k]).epsilon(1e-15));

    CHECK_THROWS_AS(average_frames({}), StructuralError);
    const CameraImage other = make_fixture(FixtureKind::Textured, 64, 4);
    CHECK_THROWS_AS(average_frames({img, other}), StructuralError);
}

TEST_CASE("average_frames: sqrt-k noise reduction law") {
    const CameraImage truth = make_fixture(FixtureKind::Textured, 128, 6);
    std::vector<CameraImage> frames;
    for (uint64_t s = 0; s < 16; ++s) frames.push_back(add_noise(truth, {0.08, 1000 + s}));
    const CameraImage avg = average_frames(frames);
    double acc = 0.0;
    size_t n = 0;
    for (int p = 0; p < 3; ++p)
        for (size_t k = 0; k < truth.plane(p).data.size(); ++k) {
            const double d = avg.plane(p).data[k] - truth.plane(p).data[k];
            acc += d * d;
            ++n;
        }
    const double residual_std = std::sqrt(acc / static_cast<double>(n));
    CHECK(residual_std == doctest::Approx(0.02).epsilon(0.10));
}

TEST_CASE("averaging commutes with the stokes conversion") {
    const CameraImage a = make_fixture(FixtureKind::Textured, 32, 7);
    const CameraImage b = make_fixture(FixtureKind::Textured, 32, 8);
    const StokesImage s_avg = stokes_from_camera(average_frames({a, b}));
    const StokesImage sa = stokes_from_camera(a);
    const StokesImage sb = stokes_from_camera(b);
    for (int p = 0; p < 3; ++p)
        for (size_t k = 0; k < s_avg.plane(p).data.size(); ++k)
            CHECK(s_avg.plane(p).data[k] ==
                  doctest::Approx(0.5 * (sa.plane(p).data[k] + sb.plane(p).data[k]))
                      .epsilon(1e-12));
}

TEST_CASE("fixtures: unpolarized has dop 0, uniform-dop recovers its reference tile") {
    const CameraImage unpol = make_fixture(FixtureKind::Unpolarized, 64, 9);
    const PolarizationMaps maps = compute_dop(stokes_from_camera(unpol));
    for (size_t k = 0; k < maps.dop.data.size(); ++k)
        if (maps.mask[k]) CHECK(maps.dop.data[k] < 1e-12);

    const CameraImage uni = make_fixture(FixtureKind::UniformDop, 64, 9);
    const StokesImage s = stokes_from_camera(uni);
    // tile (0,0) occupies the top-left quarter: dop 0.5 at aop 0
    CHECK(s.s1.at(2, 2) / s.s0.at(2, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.s2.at(2, 2) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_fixture(FixtureKind::Textured, 16, 0), ValidationError);
    CHECK_THROWS_AS(parse_fixture_kind("mystery"), LookupError);
}

TEST_CASE("fixtures are deterministic per (kind, size, seed)") {
    const CameraImage a = make_fixture(FixtureKind::Textured, 48, 11);
    const CameraImage b = make_fixture(FixtureKind::Textured, 48, 11);
    CHECK(a.i0.data == b.i0.data);
    CHECK(a.i45.data == b.i45.data);
    const CameraImage c = make_fixture(FixtureKind::Textured, 48, 12);
    CHECK(a.i0.data != c.i0.data);
}

TEST_CASE("matrix files roundtrip at full precision") {
    TempDir tmp;
    Mat3 m;
    m.m = {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {0.5, 0.0, -0.5}, {0.25, -0.5, 0.25}}};
    save_matrix(m, tmp.path / "t.mat");
    const Mat3 back = load_matrix(tmp.path / "t.mat");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(back(r, c) == m(r, c));
    CHECK_THROWS_AS(load_matrix(tmp.path / "missing.mat"), MissingFileError);
    std::ofstream(tmp.path / "short.mat") << "1 2 3\n4 5\n";
    CHECK_THROWS_AS(load_matrix(tmp.path / "short.mat"), IoError);
}
