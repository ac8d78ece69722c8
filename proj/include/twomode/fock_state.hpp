#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace twomode {

// N bosons shared by two modes a and b. amplitudes[r] is the coefficient of
// the basis ket with r bosons in mode b and N-r in mode a.
struct TwoModeState {
    std::int64_t n_total = 0;
    std::vector<std::complex<double>> amplitudes;

    double norm_sq() const;
};

// Evolution parameters: phase_exponent(r) = chi*[(N-r)^2 + r^2 + 2*K*r*(N-r)],
// applied for a duration `time`.
struct ModelParams {
    std::int64_t n_total = 0;
    double chi = 1.0;
    double k_const = -1.0;
    double time = 0.0;

    void validate() const;  // throws std::invalid_argument
};

// 50/50 splitter acting on N bosons in one mode: amplitudes
// sqrt(N!) / sqrt(2^N r! (N-r)!), built in log space so any N up to ~1e5
// works without overflow. Rejects n_total = 0.
TwoModeState beam_splitter_state(std::int64_t n_total);

// chi*[(N-r)^2 + r^2 + 2*K*r*(N-r)]. Uses exact integer arithmetic whenever
// chi and k_const are integer-valued.
double phase_exponent(const ModelParams& params, std::int64_t r);

// Multiplies each amplitude by exp(-i*phase_exponent(r)*t). The product
// Omega*t is reduced mod 2pi with a compensated two-term scheme, keeping the
// phase error ~1e-15 even when Omega*t ~ 1e8.
TwoModeState evolve(const TwoModeState& state, const ModelParams& params);

// (omega*t) mod 2pi, result in [-pi, pi], computed so the absolute error
// stays at rounding level for |omega*t| up to ~1e14.
double reduce_mod_two_pi(double omega, double t);

}  // namespace twomode
