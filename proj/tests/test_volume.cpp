#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "t1q/nifti.hpp"
#include "t1q/rng.hpp"
#include "t1q/volume.hpp"

using namespace t1q;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "t1q_test_volume";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Random volume whose values are exactly representable in float32, so a
// float32 round trip must be bit-exact.
Volume3D random_f32_volume(std::array<int, 3> dims, std::uint64_t seed) {
    Volume3D v(dims);
    RngStream rng(seed);
    for (std::int64_t i = 0; i < v.size(); ++i)
        v.data[i] = static_cast<Real>(static_cast<float>(rng.next_uniform(-100.0, 100.0)));
    return v;
}

}  // namespace

TEST_CASE("linear index <-> (i,j,k) is a bijection on a 5x6x7 grid") {
    Volume3D v({5, 6, 7});
    std::int64_t lin = 0;
    for (int k = 0; k < 7; ++k)
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 5; ++i, ++lin) {
                CHECK(v.index(i, j, k) == lin);
                auto ijk = v.decode(lin);
                CHECK(ijk == std::array<int, 3>{i, j, k});
            }
}

TEST_CASE("nifti write/read round trip is bit-exact for float32") {
    auto path = (tmp_dir() / "rt.nii").string();
    Volume3D v = random_f32_volume({4, 4, 4}, 7);
    v.spacing = {1.0, 1.25, 2.0};
    v.affine(0, 0) = 1.0;
    v.affine(1, 1) = 1.25;
    v.affine(2, 2) = 2.0;
    v.affine(0, 3) = -12.5;
    write_nifti(v, path);
    Volume3D r = read_nifti(path);
    CHECK(r.dims == v.dims);
    CHECK(r.spacing.isApprox(v.spacing));
    CHECK(r.affine.isApprox(v.affine));
    REQUIRE(r.data.size() == v.data.size());
    for (std::int64_t i = 0; i < v.size(); ++i) CHECK(r.data[i] == v.data[i]);
}

TEST_CASE("nifti rejects the two-file magic") {
    auto path = (tmp_dir() / "magic.nii").string();
    Volume3D v({2, 2, 2}, 1.0);
    NiftiHeader h = make_nifti_header(v.dims, v.spacing, v.affine, NiftiDtype::Float32);
    h.magic[0] = 'n';
    h.magic[1] = 'i';
    h.magic[2] = '1';
    h.magic[3] = '\0';
    std::vector<float> payload(8, 1.0f);
    write_nifti_raw(h, payload.data(), payload.size() * 4, path);
    CHECK_THROWS_WITH_AS(read_nifti(path), doctest::Contains("magic"), Error);
}

TEST_CASE("nifti applies scl_slope/scl_inter on int16 payloads") {
    // slope*x + inter = 2*5 + 1 = 11
    auto path = (tmp_dir() / "scaled.nii").string();
    NiftiHeader h = make_nifti_header({1, 1, 1}, {1, 1, 1}, Eigen::Matrix4d::Identity(),
                                      NiftiDtype::Int16);
    h.scl_slope = 2.0f;
    h.scl_inter = 1.0f;
    std::int16_t raw = 5;
    write_nifti_raw(h, &raw, 2, path);
    Volume3D v = read_nifti(path);
    CHECK(v.data[0] == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("nifti unsupported datatype and truncated payload are distinct errors") {
    auto path = (tmp_dir() / "bad.nii").string();
    NiftiHeader h = make_nifti_header({2, 1, 1}, {1, 1, 1}, Eigen::Matrix4d::Identity(),
                                      NiftiDtype::Float32);
    h.datatype = 128;  // RGB, unsupported
    float payload[2] = {0, 0};
    write_nifti_raw(h, payload, 8, path);
    CHECK_THROWS_WITH_AS(read_nifti(path), doctest::Contains("datatype"), Error);

    h.datatype = static_cast<std::int16_t>(NiftiDtype::Float32);
    write_nifti_raw(h, payload, 4, path);  // half the voxels missing
    CHECK_THROWS_WITH_AS(read_nifti(path), doctest::Contains("payload"), Error);

    h.vox_offset = 100;
    write_nifti_raw(h, payload, 8, path);
    CHECK_THROWS_WITH_AS(read_nifti(path), doctest::Contains("vox_offset"), Error);
}

TEST_CASE("nifti write rejects non-finite data unless allowed") {
    auto path = (tmp_dir() / "nan.nii").string();
    Volume3D v({2, 1, 1}, 0.0);
    v.data[0] = std::numeric_limits<Real>::quiet_NaN();
    CHECK_THROWS_AS(write_nifti(v, path), Error);
    write_nifti(v, path, NiftiDtype::Float32, /*allow_nonfinite=*/true);
    CHECK_THROWS_AS(read_nifti(path), Error);
    Volume3D r = read_nifti(path, /*allow_nonfinite=*/true);
    CHECK(std::isnan(r.data[0]));
}

TEST_CASE("a 1x1x1 float32 file is exactly 348 + 4 + 4 bytes") {
    auto path = (tmp_dir() / "tiny.nii").string();
    Volume3D v({1, 1, 1}, 0.5);
    write_nifti(v, path);
    CHECK(fs::file_size(path) == 356);
    CHECK(read_nifti(path).data[0] == Real(0.5));
}

TEST_CASE("label volume round trip keeps unlabeled voxels") {
    auto path = (tmp_dir() / "lab.nii").string();
    SparseLabelVolume lab({3, 3, 3}, kUnlabeled);
    lab.at(0, 0, 0) = 0;
    lab.at(1, 1, 1) = 13;
    lab.at(2, 2, 2) = 5;
    write_label_nifti(lab, path);
    SparseLabelVolume r = read_label_nifti(path);
    CHECK(r.labels == lab.labels);

    // out-of-range label values are rejected on load
    NiftiHeader h = make_nifti_header({1, 1, 1}, {1, 1, 1}, Eigen::Matrix4d::Identity(),
                                      NiftiDtype::UInt8);
    std::uint8_t bad = 77;
    write_nifti_raw(h, &bad, 1, path);
    CHECK_THROWS_WITH_AS(read_label_nifti(path), doctest::Contains("label value"), Error);
}

TEST_CASE("crop: identity, ramp oracle, and out-of-bounds") {
    Volume3D v({4, 4, 4});
    for (std::int64_t i = 0; i < v.size(); ++i) v.data[i] = static_cast<Real>(i);

    Volume3D full = crop(v, {0, 0, 0}, {4, 4, 4});
    CHECK((full.data == v.data).all());
    CHECK(full.affine.isApprox(v.affine));

    Volume3D sub = crop(v, {1, 2, 1}, {2, 2, 2});
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                CHECK(sub.at(i, j, k) == Real(v.index(1 + i, 2 + j, 1 + k)));

    CHECK_THROWS_WITH_AS(crop(v, {3, 0, 0}, {2, 2, 2}), doctest::Contains("axis x"), Error);
    CHECK_THROWS_WITH_AS(crop(v, {0, 0, 3}, {1, 1, 2}), doctest::Contains("axis z"), Error);
}

TEST_CASE("crop preserves world positions of retained voxels") {
    RngStream rng(11);
    Volume3D v({6, 5, 4});
    v.affine << 1.0, 0.1, 0.0, -3.0,
                0.0, 1.2, 0.0, 10.0,
                0.0, 0.0, 2.0, 5.0,
                0.0, 0.0, 0.0, 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::array<int, 3> origin{int(rng.next_below(4)), int(rng.next_below(3)), int(rng.next_below(2))};
        std::array<int, 3> size{int(1 + rng.next_below(std::uint64_t(6 - origin[0]))),
                                int(1 + rng.next_below(std::uint64_t(5 - origin[1]))),
                                int(1 + rng.next_below(std::uint64_t(4 - origin[2])))};
        Volume3D sub = crop(v, origin, size);
        for (int k = 0; k < size[2]; ++k)
            for (int j = 0; j < size[1]; ++j)
                for (int i = 0; i < size[0]; ++i) {
                    Eigen::Vector4d local(i, j, k, 1.0);
                    Eigen::Vector4d global(origin[0] + i, origin[1] + j, origin[2] + k, 1.0);
                    CHECK((sub.affine * local - v.affine * global).norm() < 1e-12);
                }
    }
}

TEST_CASE("flip_lr is an involution and reverses the x axis") {
    Volume3D two({2, 1, 1});
    two.data[0] = 3.0;
    two.data[1] = 9.0;
    Volume3D flipped = flip_lr(two);
    CHECK(flipped.data[0] == Real(9.0));
    CHECK(flipped.data[1] == Real(3.0));

    Volume3D v = random_f32_volume({5, 4, 3}, 21);
    Volume3D vv = flip_lr(flip_lr(v));
    CHECK((vv.data == v.data).all());

    SparseLabelVolume lab({3, 3, 3}, 0);
    RngStream rng(5);
    for (auto& l : lab.labels) l = static_cast<std::uint8_t>(rng.next_below(14));
    SparseLabelVolume ll = flip_lr(flip_lr(lab));
    CHECK(ll.labels == lab.labels);
}

TEST_CASE("paired image/label flip keeps per-voxel correspondence") {
    // enumerate all voxels of a 3x3x3 grid
    Volume3D img({3, 3, 3});
    SparseLabelVolume lab({3, 3, 3}, 0);
    for (std::int64_t i = 0; i < img.size(); ++i) {
        img.data[i] = static_cast<Real>(i);
        lab.labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i % 14);
    }
    Volume3D fimg = flip_lr(img);
    SparseLabelVolume flab = flip_lr(lab);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                const auto lin = img.index(2 - i, j, k);
                CHECK(fimg.at(i, j, k) == img.data[lin]);
                CHECK(flab.at(i, j, k) == lab.labels[static_cast<std::size_t>(lin)]);
            }
}

TEST_CASE("volume validate enforces invariants") {
    Volume3D v({2, 2, 2}, 1.0);
    v.spacing[1] = 0.0;
    CHECK_THROWS_WITH_AS(v.validate(), doctest::Contains("spacing"), Error);
    v.spacing[1] = 1.0;
    v.data.resize(3);
    CHECK_THROWS_WITH_AS(v.validate(), doctest::Contains("length"), Error);
}
