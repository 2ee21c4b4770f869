// Inversion-recovery signal model and per-voxel (PD, T1) fitting.
//
// Signal model: I = PD * f(TI, T1) with f = 1 - 2*exp(-TI/T1) + exp(-TR/T1),
// the signed (real-valued) long-TR inversion-recovery equation. The fit
// inverts an (MPRAGE, FGATIR) pair acquired at two inversion times by
// root-finding on the cross-multiplied residual
//   h(T1) = i2 * f(ti1, T1) - i1 * f(ti2, T1),
// which avoids dividing by f near the FGATIR null.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "t1q/volume.hpp"

namespace t1q {

struct AcqParams {
    double ti1 = 1400.0;  // MPRAGE inversion time, ms
    double ti2 = 400.0;   // FGATIR inversion time, ms
    double tr = 4000.0;   // repetition time, ms

    void validate() const {
        if (!(0 < ti2 && ti2 < ti1 && ti1 < tr))
            throw Error("acquisition params must satisfy 0 < ti2 < ti1 < tr");
    }
};

enum class FitStatus : std::uint8_t {
    Ok = 0,
    OutOfBracket = 1,
    Degenerate = 2,
    Ambiguous = 3,
};

struct FitResult {
    double pd = 0.0;
    double t1 = 0.0;
    FitStatus status = FitStatus::Degenerate;
};

struct FitOptions {
    double t1_min = 50.0;     // ms
    double t1_max = 10000.0;  // ms
    bool magnitude = false;   // restore FGATIR polarity from magnitude inputs
    int threads = 1;

    void validate() const {
        if (!(t1_min > 0 && t1_max > t1_min)) throw Error("invalid T1 bracket");
    }
};

struct QuantMaps {
    Volume3D pd;
    Volume3D t1;
    std::vector<FitStatus> status;

    std::int64_t size() const { return pd.size(); }
    // status encoded as a uint8 image, for persisting alongside the maps
    Volume3D status_volume() const;
    static std::vector<FitStatus> status_from_volume(const Volume3D& v);
};

enum class ChannelKind : std::uint8_t { Synthesized = 0, Acquired = 1, Map = 2 };

struct ChannelMeta {
    ChannelKind kind = ChannelKind::Synthesized;
    double ti = std::numeric_limits<double>::quiet_NaN();  // ms; NaN for maps
    std::string name;  // e.g. "TI0740", "MPRAGE", "T1", "PD"

    bool operator==(const ChannelMeta& o) const {
        const bool ti_eq = (std::isnan(ti) && std::isnan(o.ti)) || ti == o.ti;
        return kind == o.kind && ti_eq && name == o.name;
    }
};

// Ordered multi-channel input; all channels share one grid.
struct ChannelStack {
    std::vector<Volume3D> channels;
    std::vector<ChannelMeta> meta;

    int num_channels() const { return static_cast<int>(channels.size()); }
    const std::array<int, 3>& dims() const {
        if (channels.empty()) throw Error("empty channel stack");
        return channels.front().dims;
    }
    void push(Volume3D vol, ChannelMeta m);
    void validate() const;
};

// ---- signal model ----

// f(TI, T1) for fixed TR; strictly increasing in TI.
inline double ir_factor(double t1, double ti, double tr) {
    if (!(t1 > 0)) throw std::domain_error("ir_factor: t1 must be positive");
    if (!(ti > 0 && ti < tr)) throw std::domain_error("ir_factor: requires 0 < ti < tr");
    return 1.0 - 2.0 * std::exp(-ti / t1) + std::exp(-tr / t1);
}

inline double ir_signal(double pd, double t1, double ti, double tr) {
    return pd * ir_factor(t1, ti, tr);
}

// Inversion time that nulls tissue of the given T1, by bracketed bisection
// on f over (0, tr); |f| at the result is below 1e-9.
double null_ti(double t1, double tr);

// ---- fitting ----

FitResult fit_pd_t1(double i1, double i2, const AcqParams& acq, const FitOptions& opt = {});

QuantMaps fit_maps(const Volume3D& mprage, const Volume3D& fgatir, const AcqParams& acq,
                   const FitOptions& opt = {}, const Volume3D* mask = nullptr);

// ---- synthesis ----

Volume3D synthesize_ti(const QuantMaps& maps, double ti, double tr);

ChannelStack synthesize_series(const QuantMaps& maps, double ti_start = 400.0,
                               double ti_end = 1400.0, double step = 20.0, double tr = 4000.0);

// Which channels to assemble, in stack order: synthesized TI images
// (ascending), then quantitative maps (PD, T1), then acquired images
// (MPRAGE, FGATIR).
struct StackRequest {
    std::vector<double> tis;
    bool pd = false;
    bool t1 = false;
    bool mprage = false;
    bool fgatir = false;
};

// Named input configurations: "config1".."config9" and "stage1".
StackRequest stack_preset(const std::string& name);

ChannelStack build_input_stack(const QuantMaps* maps, const Volume3D* mprage,
                               const Volume3D* fgatir, const StackRequest& req,
                               double tr = 4000.0);

// vol / mean(vol over mask); mask is any volume, nonzero = inside.
Volume3D wm_mean_normalize(const Volume3D& vol, const Volume3D& wm_mask);
double masked_mean(const Volume3D& vol, const Volume3D& mask);

namespace detail {

// f(ti1, .) and f(ti2, .) tabulated on a uniform T1 grid (1 ms default),
// shared across voxels of a map fit.
struct FitGrid {
    AcqParams acq;
    Eigen::ArrayXd t1s, f1, f2;
    static FitGrid build(const AcqParams& acq, double t1_min, double t1_max, double step = 1.0);
};

// Scans h over the grid; refines each sign change by bisection on the exact
// residual. Returns up to two roots (two means "multiple").
int scan_roots(const FitGrid& grid, double i1, double i2, std::array<double, 2>& roots);

FitResult fit_with_grid(const FitGrid& grid, double i1, double i2, bool magnitude);

}  // namespace detail

}  // namespace t1q
