// Synthetic test object: labeled geometric regions with known (PD, T1),
// forward-synthesized MPRAGE/FGATIR with optional noise, and eroded
// sparse labels.
#pragma once

#include <string>
#include <vector>

#include "t1q/relax.hpp"
#include "t1q/rng.hpp"
#include "t1q/volume.hpp"

namespace t1q {

struct PhantomRegion {
    enum class Shape { Sphere, Box };
    Shape shape = Shape::Sphere;
    // sphere: center (voxel coords) + radius; box: origin + size
    std::array<double, 3> center{0, 0, 0};
    double radius = 0;
    std::array<int, 3> origin{0, 0, 0};
    std::array<int, 3> size{0, 0, 0};
    int label = 1;  // 1..13
    double pd = 800;
    double t1 = 1200;
};

struct PhantomSpec {
    std::array<int, 3> dims{32, 32, 32};
    Eigen::Vector3d spacing{1, 1, 1};
    double bg_pd = 700;
    double bg_t1 = 577;  // background nulls in the FGATIR channel
    double noise_sigma = 0;
    int erosion_radius = 1;
    AcqParams acq;
    std::vector<PhantomRegion> regions;

    void validate(double t1_min = 50, double t1_max = 10000) const;
};

struct Phantom {
    Volume3D mprage;
    Volume3D fgatir;
    Volume3D pd;  // ground truth
    Volume3D t1;  // ground truth
    SparseLabelVolume labels;
    Volume3D wm_mask;  // background voxels
};

// 13 spheres with volumes proportional to the nuclei's typical share of the
// thalamus, distinct T1 per nucleus.
PhantomSpec default_phantom_spec(std::array<int, 3> dims = {32, 32, 32});

// Overlapping regions resolve last-writer-wins. Deterministic in seed.
Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed);

// Randomly perturbs region/background PD and T1 by up to +-rel_jitter,
// for generating distinct subjects from one spec.
PhantomSpec jitter_phantom_spec(const PhantomSpec& spec, double rel_jitter, RngStream& rng);

std::string phantom_spec_to_json(const PhantomSpec& spec);
PhantomSpec phantom_spec_from_json(const std::string& text);

}  // namespace t1q
