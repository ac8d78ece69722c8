#pragma once

#include <cstdint>

#include "twomode/bounds.hpp"

namespace twomode {

enum class DepthKind { entanglement, steering, steering_pqs };

// Certified lower bound on the size of a collective-spin block consistent
// with the measured pair (e_hz, r): n_lower_bound = 2*s0 particles.
// certified == false means the inputs pass no gate; all other fields are
// then zero except the echoed inputs.
struct DepthResult {
    bool certified = false;
    double s0 = 0.0;
    std::int64_t n_lower_bound = 0;
    DepthKind kind = DepthKind::entanglement;
    double margin = 0.0;  // bound value at s0 minus e_hz/r; > 0 when certified
    double e_hz = 0.0;    // inputs echoed
    double r = 0.0;
};

// Largest s0 with c_tilde(s0) > e_hz/r, searched over integer 2*s0 on the
// table. Gate: e_hz/r < 1. For e_hz/r in [1/2, 1) only the minimal depth
// s0 = 1/2 (n = 1) is certified, margin = 1 - e_hz/r.
DepthResult infer_depth_entanglement(double e_hz, double r, const BoundTable& table);

// Same search with the steering gates e_hz < 1/2 and e_hz/r < 1/2.
DepthResult infer_depth_steering(double e_hz, double r, const BoundTable& table);

// Same search against the zeta2 column: largest s0 with
// zeta2(s0) > e_hz_planar/r_parallel. zeta2 <= 1/2 everywhere, so ratios
// >= 1/2 certify nothing.
DepthResult infer_depth_pqs(double e_hz_planar, double r_parallel, const BoundTable& table);

}  // namespace twomode
