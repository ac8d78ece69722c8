#include "twomode/fock_state.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twomode {

namespace {

// 2pi split for compensated reduction: TWO_PI_HI is the nearest double,
// TWO_PI_LO the next correction term.
constexpr double TWO_PI_HI = 6.283185307179586476925286766559;
constexpr double TWO_PI_LO = 2.4492935982947063544e-16;
constexpr double INV_TWO_PI = 0.15915494309189533576888376337251;

bool integer_valued(double x) {
    return std::isfinite(x) && std::nearbyint(x) == x && std::abs(x) < 9.0e15;
}

}  // namespace

double TwoModeState::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
}

void ModelParams::validate() const {
    if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
    if (!std::isfinite(chi)) throw std::invalid_argument("chi must be finite");
    if (!std::isfinite(k_const)) throw std::invalid_argument("k_const must be finite");
    if (!std::isfinite(time)) throw std::invalid_argument("time must be finite");
}

TwoModeState beam_splitter_state(std::int64_t n_total) {
    if (n_total < 1)
        throw std::invalid_argument("beam_splitter_state: n_total must be >= 1");
    const double n = static_cast<double>(n_total);
    const double ln_norm = std::lgamma(n + 1.0) - n * std::numbers::ln2_v<double>;
    TwoModeState state;
    state.n_total = n_total;
    state.amplitudes.resize(static_cast<std::size_t>(n_total) + 1);
    for (std::int64_t r = 0; r <= n_total; ++r) {
        const double lr = std::lgamma(static_cast<double>(r) + 1.0);
        const double lnr = std::lgamma(static_cast<double>(n_total - r) + 1.0);
        state.amplitudes[static_cast<std::size_t>(r)] =
            std::exp(0.5 * (ln_norm - lr - lnr));
    }
    return state;
}

double phase_exponent(const ModelParams& params, std::int64_t r) {
    params.validate();
    if (r < 0 || r > params.n_total)
        throw std::invalid_argument("phase_exponent: r out of range [0, N]");
    const std::int64_t n = params.n_total;
    if (integer_valued(params.chi) && integer_valued(params.k_const)) {
        const __int128 na = n - r;
        const __int128 nb = r;
        const __int128 k = static_cast<__int128>(std::llround(params.k_const));
        const __int128 chi = static_cast<__int128>(std::llround(params.chi));
        const __int128 omega = chi * (na * na + nb * nb + 2 * k * nb * na);
        return static_cast<double>(omega);
    }
    const double na = static_cast<double>(n - r);
    const double nb = static_cast<double>(r);
    return params.chi * (na * na + nb * nb + 2.0 * params.k_const * nb * na);
}

double reduce_mod_two_pi(double omega, double t) {
    const double p = omega * t;
    const double e = std::fma(omega, t, -p);  // exact tail of the product
    const double k = std::nearbyint(p * INV_TWO_PI);
    double r = std::fma(-k, TWO_PI_HI, p);
    r = std::fma(-k, TWO_PI_LO, r);
    r += e;
    if (r > std::numbers::pi) {
        r -= TWO_PI_HI;
        r -= TWO_PI_LO;
    } else if (r < -std::numbers::pi) {
        r += TWO_PI_HI;
        r += TWO_PI_LO;
    }
    return r;
}

TwoModeState evolve(const TwoModeState& state, const ModelParams& params) {
    params.validate();
    if (state.n_total != params.n_total)
        throw std::invalid_argument("evolve: state and params disagree on N");
    if (state.amplitudes.size() != static_cast<std::size_t>(state.n_total) + 1)
        throw std::invalid_argument("evolve: malformed state");
    if (std::abs(state.norm_sq() - 1.0) > 1e-8)
        throw std::invalid_argument("evolve: state not normalized");

    TwoModeState out;
    out.n_total = state.n_total;
    out.amplitudes.resize(state.amplitudes.size());
    for (std::int64_t r = 0; r <= state.n_total; ++r) {
        const double omega = phase_exponent(params, r);
        const double phase = reduce_mod_two_pi(omega, params.time);
        out.amplitudes[static_cast<std::size_t>(r)] =
            state.amplitudes[static_cast<std::size_t>(r)] * std::polar(1.0, -phase);
    }
    return out;
}

}  // namespace twomode
