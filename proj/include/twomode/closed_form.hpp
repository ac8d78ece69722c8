#pragma once

#include <complex>
#include <cstdint>

#include "twomode/fock_state.hpp"

namespace twomode {

// Analytic moments of the evolved splitter state. Everything depends on
// (chi, k_const, t) only through phi = 2*chi*(1-K)*t:
//   <S_x>    = (N/2) cos^{N-1}(phi)
//   <S_y^2>  = (1/8)[N^2+N - N(N-1) cos^{N-2}(2 phi)]
//   <S_z^2>  = N/4
//   F        = i N(N-1) cos^{N-2}(phi) sin(phi)
//   C        = -(1/8)[N^2-N - N(N-1) cos^{N-2}(2 phi)]
struct ClosedFormMoments {
    std::int64_t n_total = 0;
    double chi = 1.0;
    double k_const = -1.0;
    double time = 0.0;

    double mean_sx = 0.0;
    double second_yy = 0.0;
    double second_zz = 0.0;
    std::complex<double> f_value;
    double c_value = 0.0;

    // Largest discarded real/imaginary residue from the complex-arithmetic
    // evaluation path; must stay below 1e-8.
    double residual = 0.0;
};

// O(1) evaluation; N >= 2 required where an N-2 exponent appears (N = 1 is
// allowed and fills the quadratic moments with their exact small-N values).
ClosedFormMoments closed_form_moments(const ModelParams& params);

// Field-by-field comparison of the analytic path against the Fock-basis sum
// path at one parameter point.
struct CrosscheckReport {
    double dev_mean_sx = 0.0;
    double dev_second_yy = 0.0;
    double dev_second_zz = 0.0;
    double dev_f_abs = 0.0;
    double dev_c_value = 0.0;
    double worst = 0.0;
    bool pass = false;
};

CrosscheckReport crosscheck(const ModelParams& params, double tolerance);

}  // namespace twomode
