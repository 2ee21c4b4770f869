#include "t1q/nifti.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace t1q {

namespace {

int dtype_bytes(std::int16_t code) {
    switch (static_cast<NiftiDtype>(code)) {
        case NiftiDtype::UInt8: return 1;
        case NiftiDtype::Int16: return 2;
        case NiftiDtype::Float32: return 4;
        case NiftiDtype::Float64: return 8;
    }
    return 0;
}

Eigen::Matrix4d affine_from_header(const NiftiHeader& h) {
    Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
    if (h.sform_code > 0) {
        for (int c = 0; c < 4; ++c) {
            a(0, c) = h.srow_x[c];
            a(1, c) = h.srow_y[c];
            a(2, c) = h.srow_z[c];
        }
    } else {
        a(0, 0) = h.pixdim[1];
        a(1, 1) = h.pixdim[2];
        a(2, 2) = h.pixdim[3];
    }
    return a;
}

struct RawFile {
    NiftiHeader hdr;
    std::vector<char> payload;
    std::int64_t nvox = 0;
};

RawFile read_raw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("nifti: cannot open file: " + path);
    RawFile raw;
    f.read(reinterpret_cast<char*>(&raw.hdr), sizeof(NiftiHeader));
    if (f.gcount() != sizeof(NiftiHeader)) throw Error("nifti: truncated header in " + path);
    const NiftiHeader& h = raw.hdr;
    if (h.sizeof_hdr != 348)
        throw Error("nifti: bad sizeof_hdr (" + std::to_string(h.sizeof_hdr) + ") in " + path);
    if (std::memcmp(h.magic, "n+1", 4) != 0) {
        if (std::memcmp(h.magic, "ni1", 4) == 0)
            throw Error("nifti: unsupported magic \"ni1\" (two-file form) in " + path);
        throw Error("nifti: unsupported magic in " + path);
    }
    if (dtype_bytes(h.datatype) == 0)
        throw Error("nifti: unsupported datatype code " + std::to_string(h.datatype) + " in " + path);
    if (h.dim[0] < 1 || h.dim[0] > 7) throw Error("nifti: bad dim[0] in " + path);
    if (h.dim[0] >= 4 && h.dim[4] > 1) throw Error("nifti: multi-frame file (dim[4] > 1) not supported: " + path);
    for (int a = 1; a <= std::min<int>(h.dim[0], 3); ++a)
        if (h.dim[a] <= 0) throw Error("nifti: non-positive dim[" + std::to_string(a) + "] in " + path);
    for (int a = 1; a <= 3; ++a) {
        const float p = a <= h.dim[0] ? h.pixdim[a] : 1.0f;
        if (!(p > 0)) throw Error("nifti: non-positive pixdim[" + std::to_string(a) + "] in " + path);
    }
    if (h.vox_offset < 352.0f) throw Error("nifti: vox_offset below 352 in " + path);

    raw.nvox = 1;
    for (int a = 1; a <= std::min<int>(h.dim[0], 3); ++a) raw.nvox *= h.dim[a];
    const std::size_t need = static_cast<std::size_t>(raw.nvox) * dtype_bytes(h.datatype);
    f.seekg(static_cast<std::streamoff>(h.vox_offset), std::ios::beg);
    raw.payload.resize(need);
    f.read(raw.payload.data(), static_cast<std::streamsize>(need));
    if (static_cast<std::size_t>(f.gcount()) != need)
        throw Error("nifti: truncated payload in " + path);
    return raw;
}

std::array<int, 3> dims_of(const NiftiHeader& h) {
    std::array<int, 3> d{1, 1, 1};
    for (int a = 1; a <= std::min<int>(h.dim[0], 3); ++a) d[a - 1] = h.dim[a];
    return d;
}

}  // namespace

NiftiHeader make_nifti_header(const std::array<int, 3>& dims, const Eigen::Vector3d& spacing,
                              const Eigen::Matrix4d& affine, NiftiDtype dtype) {
    NiftiHeader h;
    h.dim[0] = 3;
    h.dim[1] = static_cast<std::int16_t>(dims[0]);
    h.dim[2] = static_cast<std::int16_t>(dims[1]);
    h.dim[3] = static_cast<std::int16_t>(dims[2]);
    h.datatype = static_cast<std::int16_t>(dtype);
    h.bitpix = static_cast<std::int16_t>(8 * dtype_bytes(h.datatype));
    h.pixdim[0] = 1;
    h.pixdim[1] = static_cast<float>(spacing[0]);
    h.pixdim[2] = static_cast<float>(spacing[1]);
    h.pixdim[3] = static_cast<float>(spacing[2]);
    h.vox_offset = 352;
    h.sform_code = 1;
    for (int c = 0; c < 4; ++c) {
        h.srow_x[c] = static_cast<float>(affine(0, c));
        h.srow_y[c] = static_cast<float>(affine(1, c));
        h.srow_z[c] = static_cast<float>(affine(2, c));
    }
    return h;
}

void write_nifti_raw(const NiftiHeader& hdr, const void* payload, std::size_t payload_bytes,
                     const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("nifti: cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(&hdr), sizeof(NiftiHeader));
    const char extender[4] = {0, 0, 0, 0};
    f.write(extender, 4);
    f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
    if (!f) throw Error("nifti: write failed: " + path);
}

NiftiHeader read_nifti_header(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("nifti: cannot open file: " + path);
    NiftiHeader h;
    f.read(reinterpret_cast<char*>(&h), sizeof(NiftiHeader));
    if (f.gcount() != sizeof(NiftiHeader)) throw Error("nifti: truncated header in " + path);
    return h;
}

Volume3D read_nifti(const std::string& path, bool allow_nonfinite) {
    RawFile raw = read_raw(path);
    const NiftiHeader& h = raw.hdr;
    Volume3D vol(dims_of(h), Real(0),
                 Eigen::Vector3d(h.pixdim[1], h.pixdim[2], h.pixdim[3]));
    vol.affine = affine_from_header(h);

    const std::int64_t n = raw.nvox;
    const char* p = raw.payload.data();
    switch (static_cast<NiftiDtype>(h.datatype)) {
        case NiftiDtype::UInt8:
            for (std::int64_t v = 0; v < n; ++v)
                vol.data[v] = static_cast<Real>(reinterpret_cast<const std::uint8_t*>(p)[v]);
            break;
        case NiftiDtype::Int16: {
            std::int16_t s;
            for (std::int64_t v = 0; v < n; ++v) {
                std::memcpy(&s, p + 2 * v, 2);
                vol.data[v] = static_cast<Real>(s);
            }
            break;
        }
        case NiftiDtype::Float32: {
            float s;
            for (std::int64_t v = 0; v < n; ++v) {
                std::memcpy(&s, p + 4 * v, 4);
                vol.data[v] = static_cast<Real>(s);
            }
            break;
        }
        case NiftiDtype::Float64: {
            double s;
            for (std::int64_t v = 0; v < n; ++v) {
                std::memcpy(&s, p + 8 * v, 8);
                vol.data[v] = static_cast<Real>(s);
            }
            break;
        }
    }
    if (h.scl_slope != 0.0f)
        vol.data = vol.data * static_cast<Real>(h.scl_slope) + static_cast<Real>(h.scl_inter);
    vol.validate(allow_nonfinite);
    return vol;
}

void write_nifti(const Volume3D& vol, const std::string& path, NiftiDtype dtype,
                 bool allow_nonfinite) {
    vol.validate(allow_nonfinite);
    NiftiHeader h = make_nifti_header(vol.dims, vol.spacing, vol.affine, dtype);
    const std::int64_t n = vol.size();
    std::vector<char> payload(static_cast<std::size_t>(n) * dtype_bytes(h.datatype));
    char* p = payload.data();
    switch (dtype) {
        case NiftiDtype::UInt8:
            for (std::int64_t v = 0; v < n; ++v) {
                const double x = std::llround(static_cast<double>(vol.data[v]));
                if (x < 0 || x > 255) throw Error("nifti: value out of uint8 range");
                reinterpret_cast<std::uint8_t*>(p)[v] = static_cast<std::uint8_t>(x);
            }
            break;
        case NiftiDtype::Int16:
            for (std::int64_t v = 0; v < n; ++v) {
                const double x = std::llround(static_cast<double>(vol.data[v]));
                if (x < -32768 || x > 32767) throw Error("nifti: value out of int16 range");
                const std::int16_t s = static_cast<std::int16_t>(x);
                std::memcpy(p + 2 * v, &s, 2);
            }
            break;
        case NiftiDtype::Float32:
            for (std::int64_t v = 0; v < n; ++v) {
                const float s = static_cast<float>(vol.data[v]);
                std::memcpy(p + 4 * v, &s, 4);
            }
            break;
        case NiftiDtype::Float64:
            for (std::int64_t v = 0; v < n; ++v) {
                const double s = static_cast<double>(vol.data[v]);
                std::memcpy(p + 8 * v, &s, 8);
            }
            break;
    }
    write_nifti_raw(h, payload.data(), payload.size(), path);
}

SparseLabelVolume read_label_nifti(const std::string& path) {
    RawFile raw = read_raw(path);
    const NiftiHeader& h = raw.hdr;
    if (static_cast<NiftiDtype>(h.datatype) != NiftiDtype::UInt8)
        throw Error("nifti: label files must be uint8, got datatype " +
                    std::to_string(h.datatype) + " in " + path);
    if (h.scl_slope != 0.0f && h.scl_slope != 1.0f)
        throw Error("nifti: scaled (scl_slope) label file not supported: " + path);
    SparseLabelVolume lab(dims_of(h), kUnlabeled,
                          Eigen::Vector3d(h.pixdim[1], h.pixdim[2], h.pixdim[3]));
    lab.affine = affine_from_header(h);
    std::memcpy(lab.labels.data(), raw.payload.data(), lab.labels.size());
    lab.validate();
    return lab;
}

void write_label_nifti(const SparseLabelVolume& vol, const std::string& path) {
    vol.validate();
    NiftiHeader h = make_nifti_header(vol.dims, vol.spacing, vol.affine, NiftiDtype::UInt8);
    write_nifti_raw(h, vol.labels.data(), vol.labels.size(), path);
}

}  // namespace t1q
