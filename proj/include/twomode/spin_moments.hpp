#pragma once

#include <complex>
#include <cstdint>

#include "twomode/fock_state.hpp"

namespace twomode {

// Collective spin components built from the two modes:
//   S_x = (a^+ b + a b^+)/2, S_y = (a^+ b - a b^+)/(2i), S_z = (n_a - n_b)/2.
// Total spin S = N/2 is fixed, so second_xx+second_yy+second_zz = S(S+1).
struct SpinMoments {
    std::int64_t n_total = 0;

    double mean_sx = 0.0;
    double mean_sy = 0.0;
    double mean_sz = 0.0;
    double second_xx = 0.0;  // <S_x^2>
    double second_yy = 0.0;  // <S_y^2>
    double second_zz = 0.0;  // <S_z^2>
    double anti_xy = 0.0;    // <{S_x,S_y}>/2
    double anti_xz = 0.0;    // <{S_x,S_z}>/2
    double anti_yz = 0.0;    // <{S_y,S_z}>/2

    std::complex<double> f_value;  // 2i<{S_y,S_z}>, the yz anisotropy term
    double c_value = 0.0;          // <S_z^2> - <S_y^2>

    std::complex<double> mean_ab;  // <a^+ b>
    double mean_na = 0.0;          // <a^+ a>
    double mean_nanb = 0.0;        // <a^+ a b^+ b>
};

enum class Axis { x, y, z };

// Every moment as a single O(N) pass over adjacent amplitude products.
SpinMoments moments_from_state(const TwoModeState& state);

// (Delta S_i)^2 = <S_i^2> - <S_i>^2. Clamps tiny negative rounding residue
// to zero; residue below -1e-9 throws ConsistencyError.
double variance(const SpinMoments& m, Axis axis);

// Test oracle: builds the full (N+1)x(N+1) operator matrices and evaluates
// each field by direct matrix-vector algebra. Independent of the sum path.
// Rejects N > 50.
SpinMoments dense_oracle_moments(const TwoModeState& state);

}  // namespace twomode
