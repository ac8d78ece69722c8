#pragma once

#include <cstdint>

#include "twomode/spin_moments.hpp"

namespace twomode {

// All certification scalars derived from one SpinMoments record.
// e_hz uses the xy variance pair, e_hz_t the xz pair, e_hz_theta the pair
// (x, theta) where S_theta = S_y cos(theta) + S_z sin(theta).
struct CriteriaReport {
    std::int64_t n_total = 0;
    double theta = 0.0;          // angle the report was evaluated at
    double var_theta = 0.0;      // (Delta S_theta)^2 at that angle

    double e_hz = 0.0;           // [(dSx)^2+(dSy)^2] / (N/2)
    double e_hz_t = 0.0;         // [(dSx)^2+(dSz)^2] / (N/2)
    double e_hz_theta = 0.0;     // [(dSx)^2+(dS_theta)^2] / (N/2)

    double xi2 = 0.0;            // (dS_theta)^2 / (|<S_x>|/2)
    double xi2_bar = 0.0;        // N (dS_theta)^2 / <S_x>^2
    double e_ratio = 0.0;        // |<a^+ b>|^2 / <a^+ a b^+ b>

    double bloch_r = 0.0;        // |<S>| / (N/2)
    double r_parallel = 0.0;     // sqrt(<S_x>^2+<S_y>^2) / (N/2)

    bool entangled = false;      // min(e_hz, e_hz_t, e_hz_theta) < 1
    bool steer_b_by_a = false;   // e_hz_theta < 1/2 + <S_z^theta>/N
    bool steer_a_by_b = false;   // e_hz_theta < 1/2 - <S_z^theta>/N
};

// Angle minimizing (Delta S_theta)^2, i.e. the small eigenvalue of the
// (S_y, S_z) covariance block. theta in (-pi/2, pi/2]; isotropic covariance
// returns theta = 0. Also equals
//   (1/2)(<S_y^2>+<S_z^2>) - sqrt(4 C^2 + |F|^2)/4   when <S_y>=<S_z>=0.
struct OptimalAngle {
    double theta = 0.0;
    double var_min = 0.0;
};
OptimalAngle optimal_angle(const SpinMoments& m);

// Report at the variance-minimizing angle.
CriteriaReport evaluate_criteria(const SpinMoments& m);
// Report at a caller-chosen angle.
CriteriaReport evaluate_criteria(const SpinMoments& m, double theta);

// Means and variances of the rotated triple
//   S_x^t = S_x,  S_y^t = S_z sin(theta) + S_y cos(theta),
//   S_z^t = S_z cos(theta) - S_y sin(theta).
struct RotatedSpins {
    double mean_x = 0.0, mean_y = 0.0, mean_z = 0.0;
    double var_x = 0.0, var_y = 0.0, var_z = 0.0;
};
RotatedSpins rotated_spins(const SpinMoments& m, double theta);

// Fringe observable M = 2 S_x cos(phi) + 2 S_y sin(phi).
struct InterferometerOutput {
    double mean_m = 0.0;
    double var_m = 0.0;
};
InterferometerOutput interferometer_output(const SpinMoments& m, double phi);

}  // namespace twomode
