#include "t1q/relax.hpp"

#include <algorithm>
#include <cmath>

#include "t1q/core.hpp"

namespace t1q {

Volume3D QuantMaps::status_volume() const {
    Volume3D v(pd.dims, Real(0), pd.spacing);
    v.affine = pd.affine;
    for (std::int64_t i = 0; i < v.size(); ++i)
        v.data[i] = static_cast<Real>(static_cast<std::uint8_t>(status[static_cast<std::size_t>(i)]));
    return v;
}

std::vector<FitStatus> QuantMaps::status_from_volume(const Volume3D& v) {
    std::vector<FitStatus> s(static_cast<std::size_t>(v.size()));
    for (std::int64_t i = 0; i < v.size(); ++i) {
        const int code = static_cast<int>(std::llround(static_cast<double>(v.data[i])));
        if (code < 0 || code > 3) throw Error("invalid fit status code " + std::to_string(code));
        s[static_cast<std::size_t>(i)] = static_cast<FitStatus>(code);
    }
    return s;
}

void ChannelStack::push(Volume3D vol, ChannelMeta m) {
    if (!channels.empty() && vol.dims != channels.front().dims)
        throw Error("channel dims mismatch for channel \"" + m.name + "\"");
    channels.push_back(std::move(vol));
    meta.push_back(std::move(m));
}

void ChannelStack::validate() const {
    if (channels.size() != meta.size()) throw Error("channel/meta count mismatch");
    for (const auto& c : channels) {
        if (c.dims != channels.front().dims) throw Error("channel dims mismatch");
        c.validate();
    }
}

double null_ti(double t1, double tr) {
    if (!(t1 > 0)) throw std::domain_error("null_ti: t1 must be positive");
    if (!(tr > t1)) throw std::domain_error("null_ti: requires tr > t1");
    // f is strictly increasing in TI; bracket with endpoints just inside (0, tr).
    double lo = tr * 1e-12, hi = tr * (1.0 - 1e-12);
    double flo = ir_factor(t1, lo, tr);
    double fhi = ir_factor(t1, hi, tr);
    if (flo > 0 || fhi < 0) throw Error("null_ti: no sign change in (0, tr)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ir_factor(t1, mid, tr);
        if (std::abs(fm) < 1e-12 || hi - lo < 1e-9) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

FitGrid FitGrid::build(const AcqParams& acq, double t1_min, double t1_max, double step) {
    acq.validate();
    if (!(t1_min > 0 && t1_max > t1_min && step > 0)) throw Error("invalid fit grid");
    const auto n = static_cast<std::int64_t>(std::floor((t1_max - t1_min) / step)) + 1;
    FitGrid g;
    g.acq = acq;
    g.t1s.resize(n);
    g.f1.resize(n);
    g.f2.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double t1 = (i + 1 == n) ? t1_max : t1_min + static_cast<double>(i) * step;
        g.t1s[i] = t1;
        g.f1[i] = ir_factor(t1, acq.ti1, acq.tr);
        g.f2[i] = ir_factor(t1, acq.ti2, acq.tr);
    }
    return g;
}

namespace {

inline double residual(double i1, double i2, const AcqParams& acq, double t1) {
    return i2 * ir_factor(t1, acq.ti1, acq.tr) - i1 * ir_factor(t1, acq.ti2, acq.tr);
}

double bisect_root(double i1, double i2, const AcqParams& acq, double lo, double hi) {
    double flo = residual(i1, i2, acq, lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval at double resolution
        const double fm = residual(i1, i2, acq, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

int scan_roots(const FitGrid& grid, double i1, double i2, std::array<double, 2>& roots) {
    const std::int64_t n = grid.t1s.size();
    int count = 0;
    auto record = [&](double r) {
        if (count < 2) roots[static_cast<std::size_t>(count)] = r;
        ++count;
    };
    double prev = i2 * grid.f1[0] - i1 * grid.f2[0];
    if (prev == 0.0) record(grid.t1s[0]);
    for (std::int64_t g = 1; g < n && count < 2; ++g) {
        const double cur = i2 * grid.f1[g] - i1 * grid.f2[g];
        if (cur == 0.0) {
            record(grid.t1s[g]);
        } else if (prev != 0.0 && (cur < 0) != (prev < 0)) {
            record(bisect_root(i1, i2, grid.acq, grid.t1s[g - 1], grid.t1s[g]));
        }
        prev = cur;
    }
    return count;
}

FitResult fit_with_grid(const FitGrid& grid, double i1, double i2, bool magnitude) {
    FitResult out;
    if (!(std::isfinite(i1) && std::isfinite(i2))) {
        out.status = FitStatus::Degenerate;
        return out;
    }
    if (i1 == 0.0 && i2 == 0.0) {
        out.status = FitStatus::Degenerate;
        return out;
    }

    auto solve_signed = [&](double s2) -> std::pair<int, double> {
        std::array<double, 2> roots{0, 0};
        const int count = scan_roots(grid, i1, s2, roots);
        return {count, roots[0]};
    };

    double i2_used = i2;
    double root = 0.0;
    int count = 0;
    if (magnitude && i2 != 0.0) {
        // Magnitude inputs lose the FGATIR sign; accept a sign only if it is
        // the unique one admitting a unique in-bracket root.
        const auto pos = solve_signed(std::abs(i2));
        const auto neg = solve_signed(-std::abs(i2));
        const bool pos_ok = pos.first == 1;
        const bool neg_ok = neg.first == 1;
        if (pos_ok == neg_ok) {
            out.status = FitStatus::Ambiguous;
            return out;
        }
        i2_used = pos_ok ? std::abs(i2) : -std::abs(i2);
        root = pos_ok ? pos.second : neg.second;
        count = 1;
    } else {
        const auto r = solve_signed(i2);
        count = r.first;
        root = r.second;
    }

    if (count == 0) {
        out.status = FitStatus::OutOfBracket;
        return out;
    }
    if (count > 1) {
        out.status = FitStatus::Ambiguous;
        return out;
    }

    const double f1 = ir_factor(root, grid.acq.ti1, grid.acq.tr);
    const double f2 = ir_factor(root, grid.acq.ti2, grid.acq.tr);
    const double pd = std::abs(f1) >= std::abs(f2) ? i1 / f1 : i2_used / f2;
    if (!(pd >= 0.0) || !std::isfinite(pd)) {
        out.status = FitStatus::Degenerate;  // anti-physical pair
        return out;
    }
    out.pd = pd;
    out.t1 = root;
    out.status = FitStatus::Ok;
    return out;
}

}  // namespace detail

FitResult fit_pd_t1(double i1, double i2, const AcqParams& acq, const FitOptions& opt) {
    opt.validate();
    const auto grid = detail::FitGrid::build(acq, opt.t1_min, opt.t1_max);
    return detail::fit_with_grid(grid, i1, i2, opt.magnitude);
}

QuantMaps fit_maps(const Volume3D& mprage, const Volume3D& fgatir, const AcqParams& acq,
                   const FitOptions& opt, const Volume3D* mask) {
    opt.validate();
    if (mprage.dims != fgatir.dims) throw Error("fit_maps: MPRAGE/FGATIR dims mismatch");
    if (mask && mask->dims != mprage.dims) throw Error("fit_maps: mask dims mismatch");
    const auto grid = detail::FitGrid::build(acq, opt.t1_min, opt.t1_max);

    QuantMaps maps;
    maps.pd = Volume3D(mprage.dims, Real(0), mprage.spacing);
    maps.pd.affine = mprage.affine;
    maps.t1 = maps.pd;
    maps.status.assign(static_cast<std::size_t>(mprage.size()), FitStatus::Degenerate);

    parallel_for(mprage.size(), opt.threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t v = b; v < e; ++v) {
            if (mask && (*mask).data[v] == Real(0)) continue;  // stays Degenerate
            const FitResult r = detail::fit_with_grid(
                grid, static_cast<double>(mprage.data[v]), static_cast<double>(fgatir.data[v]),
                opt.magnitude);
            maps.pd.data[v] = static_cast<Real>(r.pd);
            maps.t1.data[v] = static_cast<Real>(r.t1);
            maps.status[static_cast<std::size_t>(v)] = r.status;
        }
    });
    return maps;
}

Volume3D synthesize_ti(const QuantMaps& maps, double ti, double tr) {
    if (!(ti > 0 && ti < tr)) throw Error("synthesize_ti: TI out of range (0, TR)");
    Volume3D out(maps.pd.dims, Real(0), maps.pd.spacing);
    out.affine = maps.pd.affine;
    for (std::int64_t v = 0; v < out.size(); ++v) {
        if (maps.status[static_cast<std::size_t>(v)] != FitStatus::Ok) continue;
        out.data[v] = static_cast<Real>(
            ir_signal(static_cast<double>(maps.pd.data[v]), static_cast<double>(maps.t1.data[v]), ti, tr));
    }
    return out;
}

ChannelStack synthesize_series(const QuantMaps& maps, double ti_start, double ti_end, double step,
                               double tr) {
    if (!(step > 0) || ti_end < ti_start) throw Error("synthesize_series: degenerate TI range");
    const auto count = static_cast<int>(std::floor((ti_end - ti_start) / step + 1e-9)) + 1;
    ChannelStack stack;
    for (int i = 0; i < count; ++i) {
        const double ti = ti_start + static_cast<double>(i) * step;
        char name[16];
        std::snprintf(name, sizeof(name), "TI%04d", static_cast<int>(std::lround(ti)));
        stack.push(synthesize_ti(maps, ti, tr), {ChannelKind::Synthesized, ti, name});
    }
    return stack;
}

StackRequest stack_preset(const std::string& name) {
    StackRequest req;
    auto tis_range = [] {
        std::vector<double> t;
        for (double ti = 400; ti <= 1400; ti += 20) t.push_back(ti);
        return t;
    };
    if (name == "config1") {
        req.mprage = true;
    } else if (name == "config2") {
        req.fgatir = true;
    } else if (name == "config3") {
        req.mprage = req.fgatir = true;
    } else if (name == "config4") {
        req.pd = req.t1 = true;
    } else if (name == "config5") {
        req.t1 = true;
    } else if (name == "config6") {
        req.tis = tis_range();
    } else if (name == "config7") {
        req.tis = {720};
    } else if (name == "config8") {
        req.tis = {740, 760};
    } else if (name == "config9") {
        req.tis = {720, 740, 760, 780};
    } else if (name == "stage1") {
        req.tis = tis_range();
        req.mprage = req.fgatir = true;
    } else {
        throw Error("unknown input configuration preset: " + name);
    }
    return req;
}

ChannelStack build_input_stack(const QuantMaps* maps, const Volume3D* mprage,
                               const Volume3D* fgatir, const StackRequest& req, double tr) {
    ChannelStack stack;
    if (!req.tis.empty() || req.pd || req.t1) {
        if (!maps) throw Error("input stack requests map-derived channels but no maps given");
    }
    for (double ti : req.tis) {
        char name[16];
        std::snprintf(name, sizeof(name), "TI%04d", static_cast<int>(std::lround(ti)));
        stack.push(synthesize_ti(*maps, ti, tr), {ChannelKind::Synthesized, ti, name});
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (req.pd) stack.push(maps->pd, {ChannelKind::Map, nan, "PD"});
    if (req.t1) stack.push(maps->t1, {ChannelKind::Map, nan, "T1"});
    if (req.mprage) {
        if (!mprage) throw Error("input stack requests MPRAGE but none given");
        stack.push(*mprage, {ChannelKind::Acquired, 1400.0, "MPRAGE"});
    }
    if (req.fgatir) {
        if (!fgatir) throw Error("input stack requests FGATIR but none given");
        stack.push(*fgatir, {ChannelKind::Acquired, 400.0, "FGATIR"});
    }
    if (stack.channels.empty()) throw Error("input stack request selects no channels");
    return stack;
}

double masked_mean(const Volume3D& vol, const Volume3D& mask) {
    if (vol.dims != mask.dims) throw Error("mask dims mismatch");
    double sum = 0.0;
    std::int64_t n = 0;
    for (std::int64_t v = 0; v < vol.size(); ++v) {
        if (mask.data[v] != Real(0)) {
            sum += static_cast<double>(vol.data[v]);
            ++n;
        }
    }
    if (n == 0) throw Error("mask is empty");
    return sum / static_cast<double>(n);
}

Volume3D wm_mean_normalize(const Volume3D& vol, const Volume3D& wm_mask) {
    const double mean = masked_mean(vol, wm_mask);
    if (mean == 0.0) throw Error("white-matter mean is zero; cannot normalize");
    Volume3D out = vol;
    out.data /= static_cast<Real>(mean);
    return out;
}

}  // namespace t1q
