#include "twomode/spin_moments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "twomode/errors.hpp"

namespace twomode {

namespace {

using cplx = std::complex<double>;

void require_valid(const TwoModeState& state) {
    if (state.n_total < 1) {
        throw std::invalid_argument("state: n_total must be >= 1");
    }
    if (state.amplitudes.size() != static_cast<std::size_t>(state.n_total) + 1) {
        throw std::invalid_argument("state: amplitude count must be n_total + 1");
    }
}

}  // namespace

SpinMoments moments_from_state(const TwoModeState& state) {
    require_valid(state);
    const std::int64_t n = state.n_total;
    const auto& psi = state.amplitudes;

    // One pass accumulating:
    //   p_r   = |psi_r|^2                          (diagonal moments)
    //   w_k   = conj(psi_k) psi_{k+1} sqrt((k+1)(N-k))      -> <a^+ b> ladder
    //   q2    = <a^+2 b^2> from the k,k+2 products
    //   z_sum = sum w_k (N-2k-1) = <(a^+ b) S_z + S_z (a^+ b)>
    double mean_na = 0.0;
    double mean_nanb = 0.0;
    double mean_sz = 0.0;
    double second_zz = 0.0;
    cplx mean_ab = 0.0;
    cplx z_sum = 0.0;
    cplx q2 = 0.0;

    for (std::int64_t k = 0; k <= n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const double nk = static_cast<double>(k);
        const double nd = static_cast<double>(n);
        const double p = std::norm(psi[uk]);

        mean_na += p * (nd - nk);
        mean_nanb += p * nk * (nd - nk);
        mean_sz += p * 0.5 * (nd - 2.0 * nk);
        second_zz += p * 0.25 * (nd - 2.0 * nk) * (nd - 2.0 * nk);

        if (k + 1 <= n) {
            const cplx w = std::conj(psi[uk]) * psi[uk + 1] *
                           std::sqrt((nk + 1.0) * (nd - nk));
            mean_ab += w;
            z_sum += w * (nd - 2.0 * nk - 1.0);
        }
        if (k + 2 <= n) {
            q2 += std::conj(psi[uk]) * psi[uk + 2] *
                  std::sqrt((nk + 1.0) * (nk + 2.0) * (nd - nk) * (nd - nk - 1.0));
        }
    }

    SpinMoments m;
    m.n_total = n;
    m.mean_ab = mean_ab;
    m.mean_na = mean_na;
    m.mean_nanb = mean_nanb;

    m.mean_sx = mean_ab.real();
    m.mean_sy = mean_ab.imag();
    m.mean_sz = mean_sz;

    const double nd = static_cast<double>(n);
    m.second_xx = 0.25 * (nd + 2.0 * mean_nanb + 2.0 * q2.real());
    m.second_yy = 0.25 * (nd + 2.0 * mean_nanb - 2.0 * q2.real());
    m.second_zz = second_zz;

    m.anti_xy = 0.5 * q2.imag();
    m.anti_xz = 0.5 * z_sum.real();
    m.anti_yz = 0.5 * z_sum.imag();

    m.f_value = cplx(0.0, 2.0 * z_sum.imag());
    m.c_value = m.second_zz - m.second_yy;
    return m;
}

double variance(const SpinMoments& m, Axis axis) {
    double second = 0.0;
    double mean = 0.0;
    switch (axis) {
        case Axis::x:
            second = m.second_xx;
            mean = m.mean_sx;
            break;
        case Axis::y:
            second = m.second_yy;
            mean = m.mean_sy;
            break;
        case Axis::z:
            second = m.second_zz;
            mean = m.mean_sz;
            break;
    }
    const double var = second - mean * mean;
    if (var < 0.0) {
        const double tol = 1e-9 * std::max(1.0, std::abs(second));
        if (var < -tol) {
            throw ConsistencyError("variance: negative beyond rounding residue");
        }
        return 0.0;
    }
    return var;
}

SpinMoments dense_oracle_moments(const TwoModeState& state) {
    require_valid(state);
    const std::int64_t n = state.n_total;
    if (n > 50) {
        throw std::invalid_argument("dense_oracle_moments: oracle capped at N = 50");
    }
    const auto dim = static_cast<std::size_t>(n) + 1;
    const auto& psi = state.amplitudes;
    const double nd = static_cast<double>(n);

    // Basis index r = bosons in mode b; |r> = |n_a = N-r, n_b = r>.
    // a^+ b |r> = sqrt(r (N-r+1)) |r-1>,  b^+ a |r> = sqrt((r+1)(N-r)) |r+1>.
    auto apply = [&](const std::vector<cplx>& v, char op) {
        std::vector<cplx> out(dim, cplx(0.0, 0.0));
        for (std::size_t r = 0; r < dim; ++r) {
            const double rd = static_cast<double>(r);
            switch (op) {
                case 'x':  // (a^+ b + b^+ a)/2
                    if (r >= 1) out[r - 1] += 0.5 * std::sqrt(rd * (nd - rd + 1.0)) * v[r];
                    if (r + 1 < dim) out[r + 1] += 0.5 * std::sqrt((rd + 1.0) * (nd - rd)) * v[r];
                    break;
                case 'y':  // (a^+ b - b^+ a)/(2i)
                    if (r >= 1) out[r - 1] += cplx(0.0, -0.5) * std::sqrt(rd * (nd - rd + 1.0)) * v[r];
                    if (r + 1 < dim) out[r + 1] += cplx(0.0, 0.5) * std::sqrt((rd + 1.0) * (nd - rd)) * v[r];
                    break;
                case 'z':  // (n_a - n_b)/2
                    out[r] = 0.5 * (nd - 2.0 * rd) * v[r];
                    break;
                default:
                    throw std::logic_error("dense_oracle_moments: unknown operator");
            }
        }
        return out;
    };
    auto dot = [&](const std::vector<cplx>& u, const std::vector<cplx>& v) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < dim; ++i) acc += std::conj(u[i]) * v[i];
        return acc;
    };

    const std::vector<cplx> base(psi.begin(), psi.end());
    const auto xs = apply(base, 'x');
    const auto ys = apply(base, 'y');
    const auto zs = apply(base, 'z');

    SpinMoments m;
    m.n_total = n;
    m.mean_sx = dot(base, xs).real();
    m.mean_sy = dot(base, ys).real();
    m.mean_sz = dot(base, zs).real();
    m.second_xx = dot(xs, xs).real();
    m.second_yy = dot(ys, ys).real();
    m.second_zz = dot(zs, zs).real();
    // For Hermitian P, Q: <{P,Q}> = 2 Re <P psi | Q psi>.
    m.anti_xy = dot(xs, ys).real();
    m.anti_xz = dot(xs, zs).real();
    m.anti_yz = dot(ys, zs).real();
    m.f_value = cplx(0.0, 2.0) * (2.0 * m.anti_yz);
    m.c_value = m.second_zz - m.second_yy;
    m.mean_ab = cplx(m.mean_sx, m.mean_sy);

    double mean_na = 0.0;
    double mean_nanb = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        const double rd = static_cast<double>(r);
        const double p = std::norm(psi[r]);
        mean_na += p * (nd - rd);
        mean_nanb += p * rd * (nd - rd);
    }
    m.mean_na = mean_na;
    m.mean_nanb = mean_nanb;
    return m;
}

}  // namespace twomode
