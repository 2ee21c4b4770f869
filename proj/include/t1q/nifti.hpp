// Minimal single-file NIfTI-1 reader/writer.
//
// Supports uncompressed ".nii", little-endian, magic "n+1", datatypes
// uint8 / int16 / float32 / float64, single frame. Label volumes are
// uint8 with 255 = unlabeled.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "t1q/volume.hpp"

namespace t1q {

// On-disk layout of the 348-byte NIfTI-1 header.
struct NiftiHeader {
    std::int32_t sizeof_hdr = 348;
    char data_type[10] = {};
    char db_name[18] = {};
    std::int32_t extents = 0;
    std::int16_t session_error = 0;
    char regular = 'r';
    char dim_info = 0;
    std::int16_t dim[8] = {3, 1, 1, 1, 1, 1, 1, 1};
    float intent_p1 = 0, intent_p2 = 0, intent_p3 = 0;
    std::int16_t intent_code = 0;
    std::int16_t datatype = 16;
    std::int16_t bitpix = 32;
    std::int16_t slice_start = 0;
    float pixdim[8] = {1, 1, 1, 1, 0, 0, 0, 0};
    float vox_offset = 352;
    float scl_slope = 0;
    float scl_inter = 0;
    std::int16_t slice_end = 0;
    char slice_code = 0;
    char xyzt_units = 10;  // mm | sec
    float cal_max = 0, cal_min = 0;
    float slice_duration = 0, toffset = 0;
    std::int32_t glmax = 0, glmin = 0;
    char descrip[80] = {};
    char aux_file[24] = {};
    std::int16_t qform_code = 0;
    std::int16_t sform_code = 1;
    float quatern_b = 0, quatern_c = 0, quatern_d = 0;
    float qoffset_x = 0, qoffset_y = 0, qoffset_z = 0;
    float srow_x[4] = {1, 0, 0, 0};
    float srow_y[4] = {0, 1, 0, 0};
    float srow_z[4] = {0, 0, 1, 0};
    char intent_name[16] = {};
    char magic[4] = {'n', '+', '1', '\0'};
};
static_assert(sizeof(NiftiHeader) == 348, "NiftiHeader must match the on-disk layout");

enum class NiftiDtype : std::int16_t {
    UInt8 = 2,
    Int16 = 4,
    Float32 = 16,
    Float64 = 64,
};

NiftiHeader make_nifti_header(const std::array<int, 3>& dims, const Eigen::Vector3d& spacing,
                              const Eigen::Matrix4d& affine, NiftiDtype dtype);

// Low-level write: header, 4-byte extender, raw payload. The caller is
// responsible for payload/datatype consistency.
void write_nifti_raw(const NiftiHeader& hdr, const void* payload, std::size_t payload_bytes,
                     const std::string& path);

NiftiHeader read_nifti_header(const std::string& path);

Volume3D read_nifti(const std::string& path, bool allow_nonfinite = false);
void write_nifti(const Volume3D& vol, const std::string& path,
                 NiftiDtype dtype = NiftiDtype::Float32, bool allow_nonfinite = false);

SparseLabelVolume read_label_nifti(const std::string& path);
void write_label_nifti(const SparseLabelVolume& vol, const std::string& path);

}  // namespace t1q
