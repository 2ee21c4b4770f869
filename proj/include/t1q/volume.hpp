// Dense 3D scalar volumes and sparse label volumes.
//
// Axis convention: dims = (nx, ny, nz), linear index i + nx*(j + ny*k),
// x fastest. This matches the NIfTI payload order, so file I/O never
// transposes. Axis 0 (x) is the designated left-right axis.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "t1q/core.hpp"

namespace t1q {

inline constexpr std::uint8_t kUnlabeled = 255;

// The 13 delineated nuclei, label values 1..13 in this order; 0 is background.
inline const std::array<std::string, 13>& nucleus_names() {
    static const std::array<std::string, 13> names = {
        "AN", "CM", "LD", "LP", "MD", "PuA", "PuL",
        "VA", "VLA", "VLP", "VPL", "VPM", "CL"};
    return names;
}

template <typename Scalar>
struct VolumeT {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    std::array<int, 3> dims{0, 0, 0};
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};
    Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
    Array data;

    VolumeT() = default;
    VolumeT(std::array<int, 3> d, Scalar fill = Scalar(0),
            Eigen::Vector3d sp = Eigen::Vector3d(1, 1, 1))
        : dims(d), spacing(sp) {
        if (d[0] <= 0 || d[1] <= 0 || d[2] <= 0) throw Error("volume dims must be positive");
        data = Array::Constant(size(), fill);
        affine = Eigen::Matrix4d::Identity();
        affine(0, 0) = sp[0];
        affine(1, 1) = sp[1];
        affine(2, 2) = sp[2];
    }

    std::int64_t size() const {
        return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
    }
    std::int64_t index(int i, int j, int k) const {
        return i + static_cast<std::int64_t>(dims[0]) * (j + static_cast<std::int64_t>(dims[1]) * k);
    }
    std::array<int, 3> decode(std::int64_t lin) const {
        const int i = static_cast<int>(lin % dims[0]);
        lin /= dims[0];
        const int j = static_cast<int>(lin % dims[1]);
        const int k = static_cast<int>(lin / dims[1]);
        return {i, j, k};
    }
    Scalar& at(int i, int j, int k) { return data[index(i, j, k)]; }
    Scalar at(int i, int j, int k) const { return data[index(i, j, k)]; }

    bool same_grid(const VolumeT& o) const { return dims == o.dims; }

    void validate(bool allow_nonfinite = false) const {
        if (data.size() != size()) throw Error("volume data length does not match dims");
        if (!(spacing.array() > 0).all()) throw Error("volume spacing must be strictly positive");
        if (!allow_nonfinite && !data.isFinite().all())
            throw Error("volume contains non-finite intensities");
    }
};

using Volume3D = VolumeT<Real>;

// Per-voxel labels: 0 = background, 1..13 = nuclei, 255 = unlabeled.
struct SparseLabelVolume {
    std::array<int, 3> dims{0, 0, 0};
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};
    Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
    std::vector<std::uint8_t> labels;

    SparseLabelVolume() = default;
    explicit SparseLabelVolume(std::array<int, 3> d, std::uint8_t fill = kUnlabeled,
                               Eigen::Vector3d sp = Eigen::Vector3d(1, 1, 1))
        : dims(d), spacing(sp) {
        if (d[0] <= 0 || d[1] <= 0 || d[2] <= 0) throw Error("label dims must be positive");
        labels.assign(static_cast<std::size_t>(size()), fill);
        affine = Eigen::Matrix4d::Identity();
        affine(0, 0) = sp[0];
        affine(1, 1) = sp[1];
        affine(2, 2) = sp[2];
    }

    std::int64_t size() const {
        return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
    }
    std::int64_t index(int i, int j, int k) const {
        return i + static_cast<std::int64_t>(dims[0]) * (j + static_cast<std::int64_t>(dims[1]) * k);
    }
    std::uint8_t& at(int i, int j, int k) { return labels[static_cast<std::size_t>(index(i, j, k))]; }
    std::uint8_t at(int i, int j, int k) const { return labels[static_cast<std::size_t>(index(i, j, k))]; }

    void validate() const {
        if (static_cast<std::int64_t>(labels.size()) != size())
            throw Error("label data length does not match dims");
        for (std::uint8_t v : labels)
            if (v != kUnlabeled && v > 13)
                throw Error("label value out of range: " + std::to_string(int(v)));
    }
};

namespace detail {

inline void check_crop(const std::array<int, 3>& dims, const std::array<int, 3>& origin,
                       const std::array<int, 3>& size) {
    static const char* axis_name[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (size[a] <= 0) throw Error(std::string("crop size must be positive on axis ") + axis_name[a]);
        if (origin[a] < 0 || origin[a] + size[a] > dims[a])
            throw Error(std::string("crop out of bounds on axis ") + axis_name[a]);
    }
}

// World position of retained voxels is unchanged: local (0,0,0) maps to the
// world point of the old origin voxel.
inline Eigen::Matrix4d crop_affine(const Eigen::Matrix4d& affine, const std::array<int, 3>& origin) {
    Eigen::Matrix4d out = affine;
    Eigen::Vector4d o(origin[0], origin[1], origin[2], 1.0);
    out.col(3) = affine * o;
    return out;
}

}  // namespace detail

template <typename Scalar>
VolumeT<Scalar> crop(const VolumeT<Scalar>& vol, std::array<int, 3> origin, std::array<int, 3> size) {
    detail::check_crop(vol.dims, origin, size);
    VolumeT<Scalar> out(size, Scalar(0), vol.spacing);
    out.affine = detail::crop_affine(vol.affine, origin);
    for (int k = 0; k < size[2]; ++k)
        for (int j = 0; j < size[1]; ++j)
            for (int i = 0; i < size[0]; ++i)
                out.at(i, j, k) = vol.at(origin[0] + i, origin[1] + j, origin[2] + k);
    return out;
}

inline SparseLabelVolume crop(const SparseLabelVolume& vol, std::array<int, 3> origin,
                              std::array<int, 3> size) {
    detail::check_crop(vol.dims, origin, size);
    SparseLabelVolume out(size, kUnlabeled, vol.spacing);
    out.affine = detail::crop_affine(vol.affine, origin);
    for (int k = 0; k < size[2]; ++k)
        for (int j = 0; j < size[1]; ++j)
            for (int i = 0; i < size[0]; ++i)
                out.at(i, j, k) = vol.at(origin[0] + i, origin[1] + j, origin[2] + k);
    return out;
}

// Reverses the left-right (x) axis. Grid metadata is kept as-is, so the
// operation is an exact involution.
template <typename Scalar>
VolumeT<Scalar> flip_lr(const VolumeT<Scalar>& vol) {
    VolumeT<Scalar> out = vol;
    const int nx = vol.dims[0];
    for (int k = 0; k < vol.dims[2]; ++k)
        for (int j = 0; j < vol.dims[1]; ++j)
            for (int i = 0; i < nx; ++i)
                out.at(i, j, k) = vol.at(nx - 1 - i, j, k);
    return out;
}

inline SparseLabelVolume flip_lr(const SparseLabelVolume& vol) {
    SparseLabelVolume out = vol;
    const int nx = vol.dims[0];
    for (int k = 0; k < vol.dims[2]; ++k)
        for (int j = 0; j < vol.dims[1]; ++j)
            for (int i = 0; i < nx; ++i)
                out.at(i, j, k) = vol.at(nx - 1 - i, j, k);
    return out;
}

}  // namespace t1q
