#include "twomode/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twomode/errors.hpp"

namespace twomode {

namespace {

struct YzCovariance {
    double var_y = 0.0;
    double var_z = 0.0;
    double cov = 0.0;
};

YzCovariance yz_covariance(const SpinMoments& m) {
    YzCovariance c;
    c.var_y = variance(m, Axis::y);
    c.var_z = variance(m, Axis::z);
    c.cov = m.anti_yz - m.mean_sy * m.mean_sz;
    return c;
}

}  // namespace

OptimalAngle optimal_angle(const SpinMoments& m) {
    const auto c = yz_covariance(m);
    const double avg = 0.5 * (c.var_y + c.var_z);
    const double diff = 0.5 * (c.var_z - c.var_y);
    const double rad = std::hypot(diff, c.cov);

    OptimalAngle out;
    const double nd = static_cast<double>(m.n_total);
    const double iso_tol = 1e-12 * std::max(1.0, nd * (nd + 2.0) / 4.0);
    if (rad <= iso_tol) {
        out.theta = 0.0;
        out.var_min = avg;
        return out;
    }
    // var(theta) = avg - diff cos(2 theta) + cov sin(2 theta); minimum at
    // 2 theta = atan2(-cov, diff), giving avg - sqrt(diff^2 + cov^2).
    out.theta = 0.5 * std::atan2(-c.cov, diff);
    out.var_min = avg - rad;
    if (out.var_min < 0.0) out.var_min = 0.0;  // rounding at pure squeezing
    return out;
}

RotatedSpins rotated_spins(const SpinMoments& m, double theta) {
    const double s = std::sin(theta);
    const double co = std::cos(theta);
    const auto c = yz_covariance(m);

    RotatedSpins out;
    out.mean_x = m.mean_sx;
    out.mean_y = m.mean_sz * s + m.mean_sy * co;
    out.mean_z = m.mean_sz * co - m.mean_sy * s;
    out.var_x = variance(m, Axis::x);
    out.var_y = c.var_z * s * s + c.var_y * co * co + 2.0 * s * co * c.cov;
    out.var_z = c.var_z * co * co + c.var_y * s * s - 2.0 * s * co * c.cov;
    if (out.var_y < 0.0) out.var_y = 0.0;
    if (out.var_z < 0.0) out.var_z = 0.0;
    return out;
}

InterferometerOutput interferometer_output(const SpinMoments& m, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double var_x = variance(m, Axis::x);
    const double var_y = variance(m, Axis::y);
    const double cov_xy = m.anti_xy - m.mean_sx * m.mean_sy;

    InterferometerOutput out;
    out.mean_m = 2.0 * (m.mean_sx * c + m.mean_sy * s);
    out.var_m = 4.0 * (c * c * var_x + s * s * var_y + 2.0 * c * s * cov_xy);
    if (out.var_m < 0.0) out.var_m = 0.0;
    return out;
}

CriteriaReport evaluate_criteria(const SpinMoments& m, double theta) {
    if (m.n_total < 1) {
        throw std::invalid_argument("evaluate_criteria: n_total must be >= 1");
    }
    const double nd = static_cast<double>(m.n_total);
    const double half_n = nd / 2.0;

    const double var_x = variance(m, Axis::x);
    const double var_y = variance(m, Axis::y);
    const double var_z = variance(m, Axis::z);
    const auto rot = rotated_spins(m, theta);

    CriteriaReport rep;
    rep.n_total = m.n_total;
    rep.theta = theta;
    rep.var_theta = rot.var_y;

    rep.e_hz = (var_x + var_y) / half_n;
    rep.e_hz_t = (var_x + var_z) / half_n;
    rep.e_hz_theta = (var_x + rot.var_y) / half_n;

    rep.xi2 = rot.var_y / (std::abs(m.mean_sx) / 2.0);
    rep.xi2_bar = nd * rot.var_y / (m.mean_sx * m.mean_sx);
    rep.e_ratio = std::norm(m.mean_ab) / m.mean_nanb;

    rep.bloch_r = std::sqrt(m.mean_sx * m.mean_sx + m.mean_sy * m.mean_sy +
                            m.mean_sz * m.mean_sz) /
                  half_n;
    rep.r_parallel =
        std::sqrt(m.mean_sx * m.mean_sx + m.mean_sy * m.mean_sy) / half_n;

    const double sz_theta = rot.mean_z;
    rep.steer_b_by_a = rep.e_hz_theta < 0.5 + sz_theta / nd;
    rep.steer_a_by_b = rep.e_hz_theta < 0.5 - sz_theta / nd;
    rep.entangled =
        std::min({rep.e_hz, rep.e_hz_t, rep.e_hz_theta}) < 1.0;
    return rep;
}

CriteriaReport evaluate_criteria(const SpinMoments& m) {
    if (m.n_total < 1) {
        throw std::invalid_argument("evaluate_criteria: n_total must be >= 1");
    }
    return evaluate_criteria(m, optimal_angle(m).theta);
}

}  // namespace twomode
