#include "twomode/depth.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "twomode/bounds.hpp"

namespace twomode {

namespace {

double column_value(const BoundTable& table, double spin_s, bool planar) {
    return planar ? interpolate_zeta2(table, spin_s)
                  : interpolate_c_tilde(table, spin_s);
}

std::int64_t column_top(const BoundTable& table, bool planar) {
    std::int64_t top = 0;
    for (const auto& e : table.entries) {
        if (planar && !e.has_zeta2) continue;
        top = std::max<std::int64_t>(top, std::llround(e.two_s));
    }
    return top;
}

DepthResult make_base(DepthKind kind, double e_hz, double r) {
    DepthResult res;
    res.kind = kind;
    res.e_hz = e_hz;
    res.r = r;
    return res;
}

// Largest half-integer s0 on [1/2, top/2] whose tabulated (or monotone
// interpolated) bound stays strictly above the measured ratio. The caller
// guarantees the bound at s0 = 1/2 exceeds the ratio.
DepthResult search_column(DepthResult res, double ratio,
                          const BoundTable& table, bool planar) {
    const std::int64_t top = column_top(table, planar);
    if (top < 1) {
        throw std::invalid_argument("depth: bound table has no usable column");
    }
    std::int64_t lo = 1;
    std::int64_t hi = top;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo + 1) / 2;
        if (column_value(table, static_cast<double>(mid) / 2.0, planar) >
            ratio) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    res.certified = true;
    res.s0 = static_cast<double>(lo) / 2.0;
    res.n_lower_bound = lo;
    res.margin = column_value(table, res.s0, planar) - ratio;
    return res;
}

double checked_ratio(double e_hz, double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("depth: contrast r must be positive");
    }
    if (!(e_hz >= 0.0)) {
        throw std::invalid_argument("depth: e_hz must be non-negative");
    }
    return e_hz / r;
}

}  // namespace

DepthResult infer_depth_entanglement(double e_hz, double r,
                                     const BoundTable& table) {
    DepthResult res = make_base(DepthKind::entanglement, e_hz, r);
    const double ratio = checked_ratio(e_hz, r);
    if (ratio >= 1.0) return res;
    if (ratio >= column_value(table, 0.5, false)) {
        // Below the separable ceiling but above every tabulated bound:
        // only the minimal one-particle statement holds.
        res.certified = true;
        res.s0 = 0.5;
        res.n_lower_bound = 1;
        res.margin = 1.0 - ratio;
        return res;
    }
    return search_column(res, ratio, table, false);
}

DepthResult infer_depth_steering(double e_hz, double r,
                                 const BoundTable& table) {
    DepthResult res = make_base(DepthKind::steering, e_hz, r);
    const double ratio = checked_ratio(e_hz, r);
    if (!(e_hz < 0.5) || !(ratio < 0.5)) return res;
    return search_column(res, ratio, table, false);
}

DepthResult infer_depth_pqs(double e_hz_planar, double r_parallel,
                            const BoundTable& table) {
    DepthResult res = make_base(DepthKind::steering_pqs, e_hz_planar,
                                r_parallel);
    const double ratio = checked_ratio(e_hz_planar, r_parallel);
    if (!(ratio < 0.5)) return res;
    return search_column(res, ratio, table, true);
}

}  // namespace twomode
