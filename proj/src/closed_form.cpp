#include "twomode/closed_form.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <algorithm>

#include "twomode/errors.hpp"
#include "twomode/spin_moments.hpp"

namespace twomode {

namespace {

using cplx = std::complex<double>;

// Neumaier-compensated accumulator that also captures the fma tail of each
// product, so a sum of products that cancels algebraically comes out as an
// exact zero instead of O(ulp * |terms|) noise.
class ProductSum {
  public:
    void add(double a, double b) {
        const double p = a * b;
        const double tail = std::fma(a, b, -p);
        accumulate(p);
        accumulate(tail);
    }
    double value() const { return hi_ + lo_; }

  private:
    void accumulate(double x) {
        const double t = hi_ + x;
        if (std::abs(hi_) >= std::abs(x)) {
            lo_ += (hi_ - t) + x;
        } else {
            lo_ += (x - t) + hi_;
        }
        hi_ = t;
    }
    double hi_ = 0.0;
    double lo_ = 0.0;
};

// sign(cos)^m * exp(m * ln|cos|): stable for m up to 1e4 and clean underflow
// to zero instead of pow() surprises near |cos| = 0.
double cos_power(double reduced_angle, std::int64_t m) {
    if (m == 0) return 1.0;
    const double c = std::cos(reduced_angle);
    const double ac = std::abs(c);
    if (ac == 0.0) return 0.0;
    const double mag = std::exp(static_cast<double>(m) * std::log(ac));
    const bool negative = (c < 0.0) && (m % 2 != 0);
    return negative ? -mag : mag;
}

}  // namespace

ClosedFormMoments closed_form_moments(const ModelParams& params) {
    params.validate();
    const std::int64_t n = params.n_total;
    const double nd = static_cast<double>(n);
    const double k = params.k_const;
    const double tau = params.chi * params.time;  // chi only enters as chi*t

    // All moments depend on time through phi = 2*chi*(1-K)*t.
    const double phi = reduce_mod_two_pi(2.0 * (1.0 - k) * params.chi, params.time);
    const double two_phi = reduce_mod_two_pi(4.0 * (1.0 - k) * params.chi, params.time);

    // The raw expressions carry exponential prefactors e^{i Theta} whose
    // exponents cancel term by term. The cancellation is reproduced here
    // (rather than assumed) and its leftover feeds the residual check.
    ProductSum theta_sx;  // -2(K(N-1)-N-1) + 2N(K-1) - 2(K+1)
    theta_sx.add(-2.0 * k, nd - 1.0);
    theta_sx.add(2.0, nd);
    theta_sx.add(2.0, 1.0);
    theta_sx.add(2.0 * k, nd);
    theta_sx.add(-2.0, nd);
    theta_sx.add(-2.0 * k, 1.0);
    theta_sx.add(-2.0, 1.0);

    ProductSum theta_yy;  // 4(-K(N-2)+N+2) + 4N(K-1) - 8(K+1)
    theta_yy.add(-4.0 * k, nd - 2.0);
    theta_yy.add(4.0, nd);
    theta_yy.add(8.0, 1.0);
    theta_yy.add(4.0 * k, nd);
    theta_yy.add(-4.0, nd);
    theta_yy.add(-8.0 * k, 1.0);
    theta_yy.add(-8.0, 1.0);

    ProductSum theta_f;  // (K+1)[2 - 2(N-1) + 2N - 4]
    const double k1 = k + 1.0;
    theta_f.add(2.0, k1);
    theta_f.add(-2.0 * k1, nd - 1.0);
    theta_f.add(2.0 * k1, nd);
    theta_f.add(-4.0, k1);

    const double th_sx = reduce_mod_two_pi(theta_sx.value(), tau);
    const double th_yy = reduce_mod_two_pi(theta_yy.value(), tau);
    const double th_f = reduce_mod_two_pi(theta_f.value(), tau);

    ClosedFormMoments out;
    out.n_total = n;
    out.chi = params.chi;
    out.k_const = k;
    out.time = params.time;
    out.second_zz = nd / 4.0;

    double residual = 0.0;

    // <S_x> = (N/2) cos^{N-1}(phi) e^{i Theta_sx}
    {
        const double mag = 0.5 * nd * cos_power(phi, n - 1);
        out.mean_sx = mag * std::cos(th_sx);
        residual = std::max(residual, std::abs(mag * std::sin(th_sx)));
    }

    // ratio = N(N-1) cos^{N-2}(2 phi) e^{i Theta_yy} feeds both <S_y^2> and C.
    // F = i N(N-1) cos^{N-2}(phi) sin(phi) e^{i Theta_f}.
    if (n >= 2) {
        const double nn1 = nd * (nd - 1.0);
        const double ratio = nn1 * cos_power(two_phi, n - 2);
        const double kept = ratio * std::cos(th_yy);
        residual = std::max(residual, std::abs(ratio * std::sin(th_yy)));
        out.second_yy = (nd * nd + nd - kept) / 8.0;
        out.c_value = -(nd * nd - nd - kept) / 8.0;

        const double f_mag = nn1 * cos_power(phi, n - 2) * std::sin(phi);
        out.f_value = cplx(0.0, f_mag * std::cos(th_f));
        residual = std::max(residual, std::abs(f_mag * std::sin(th_f)));
    } else {
        // N = 1: the N(N-1) prefactors vanish identically.
        out.second_yy = (nd * nd + nd) / 8.0;
        out.c_value = -(nd * nd - nd) / 8.0;
        out.f_value = cplx(0.0, 0.0);
    }

    out.residual = residual;
    if (residual > 1e-8) {
        throw ConsistencyError(
            "closed_form_moments: discarded phase residual exceeds 1e-8");
    }
    return out;
}

CrosscheckReport crosscheck(const ModelParams& params, double tolerance) {
    const auto cf = closed_form_moments(params);
    const auto sm =
        moments_from_state(evolve(beam_splitter_state(params.n_total), params));

    const double nd = static_cast<double>(params.n_total);
    const double s1 = nd / 2.0;                 // first-moment scale
    const double s2 = nd * (nd + 2.0) / 4.0;    // S(S+1) scale

    auto rel = [](double a, double b, double scale) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale});
    };

    CrosscheckReport r;
    r.dev_mean_sx = rel(cf.mean_sx, sm.mean_sx, s1);
    r.dev_second_yy = rel(cf.second_yy, sm.second_yy, s2);
    r.dev_second_zz = rel(cf.second_zz, sm.second_zz, s2);
    r.dev_f_abs = rel(std::abs(cf.f_value), std::abs(sm.f_value), 4.0 * s2);
    r.dev_c_value = rel(cf.c_value, sm.c_value, s2);
    r.worst = std::max({r.dev_mean_sx, r.dev_second_yy, r.dev_second_zz,
                        r.dev_f_abs, r.dev_c_value});
    r.pass = r.worst <= tolerance;
    return r;
}

}  // namespace twomode
