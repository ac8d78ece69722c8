#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "twomode/fock_state.hpp"

using namespace twomode;
using cplx = std::complex<double>;

namespace {

// Oracle: the same amplitudes from raw factorials, valid up to N = 20.
std::vector<double> splitter_amplitudes_factorial(int n) {
    auto fact = [](int m) {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return f;
    };
    std::vector<double> amps(n + 1);
    for (int r = 0; r <= n; ++r)
        amps[r] = std::sqrt(fact(n) / (std::pow(2.0, n) * fact(r) * fact(n - r)));
    return amps;
}

}  // namespace

TEST_CASE("splitter state matches factorial construction up to N=20") {
    for (int n = 1; n <= 20; ++n) {
        auto oracle = splitter_amplitudes_factorial(n);
        auto state = beam_splitter_state(n);
        REQUIRE(state.amplitudes.size() == static_cast<std::size_t>(n + 1));
        for (int r = 0; r <= n; ++r) {
            CHECK(state.amplitudes[r].imag() == 0.0);
            CHECK(state.amplitudes[r].real() ==
                  doctest::Approx(oracle[r]).epsilon(1e-13));
        }
    }
}

TEST_CASE("splitter state fixed values") {
    auto s2 = beam_splitter_state(2);
    CHECK(s2.amplitudes[0].real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s2.amplitudes[1].real() == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(s2.amplitudes[2].real() == doctest::Approx(0.5).epsilon(1e-12));

    auto s1 = beam_splitter_state(1);
    CHECK(s1.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(s1.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("splitter state is normalized for small and large N") {
    for (long long n : {1LL, 2LL, 7LL, 50LL, 1000LL, 100000LL}) {
        auto state = beam_splitter_state(n);
        // Amplitude exponents are log-gamma differences of magnitude
        // ~n log n, so the achievable relative accuracy of the norm
        // degrades linearly in n (measured: 5.1e-11 at n = 1e5).
        CHECK(std::abs(state.norm_sq() - 1.0) < 1e-12 + 2e-15 * double(n));
    }
}

TEST_CASE("splitter state rejects N=0") {
    CHECK_THROWS_AS((void)beam_splitter_state(0), std::invalid_argument);
    CHECK_THROWS_AS((void)beam_splitter_state(-3), std::invalid_argument);
}

TEST_CASE("phase exponent fixed values") {
    CHECK(phase_exponent({4, 1.0, -1.0, 0.0}, 1) == 4.0);
    CHECK(phase_exponent({2, 1.0, -1.0, 0.0}, 1) == 0.0);
    CHECK(phase_exponent({3, 1.0, -1.0, 0.0}, 0) == 9.0);
    CHECK(phase_exponent({3, 1.0, 7.3, 0.0}, 0) == 9.0);  // only (N-r)^2 survives at r=0
}

TEST_CASE("phase exponent integer path is exact at large N") {
    // K=-1 collapses to (N-2r)^2; both routes must give the same integer.
    ModelParams p{100000, 1.0, -1.0, 0.0};
    for (long long r : {0LL, 333LL, 49999LL, 50000LL, 100000LL}) {
        long long d = p.n_total - 2 * r;
        CHECK(phase_exponent(p, r) == static_cast<double>(d * d));
    }
    // General integer K.
    ModelParams q{100000, 3.0, 2.0, 0.0};
    long long r = 12345, n = q.n_total;
    long long omega = 3 * ((n - r) * (n - r) + r * r + 2 * 2 * r * (n - r));
    CHECK(phase_exponent(q, r) == static_cast<double>(omega));
}

TEST_CASE("phase exponent non-integer parameters") {
    ModelParams p{5, 0.5, -0.25, 0.0};
    long long r = 2, n = 5;
    double expected = 0.5 * ((n - r) * (n - r) + r * r + 2.0 * (-0.25) * r * (n - r));
    CHECK(phase_exponent(p, r) == doctest::Approx(expected).epsilon(1e-15));
    CHECK_THROWS_AS((void)phase_exponent(p, -1), std::invalid_argument);
    CHECK_THROWS_AS((void)phase_exponent(p, 6), std::invalid_argument);
}

TEST_CASE("evolve matches direct complex multiplication at N=2") {
    ModelParams p{2, 1.0, -1.0, 0.1};
    auto state = evolve(beam_splitter_state(2), p);
    const cplx i(0.0, 1.0);
    cplx e0 = 0.5 * std::exp(-i * 0.4);
    CHECK(std::abs(state.amplitudes[0] - e0) < 1e-15);
    CHECK(std::abs(state.amplitudes[1] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(state.amplitudes[2] - e0) < 1e-15);
}

TEST_CASE("evolve at t=0 is the identity") {
    auto base = beam_splitter_state(40);
    auto out = evolve(base, {40, 1.0, -1.0, 0.0});
    for (std::size_t r = 0; r < base.amplitudes.size(); ++r)
        CHECK(out.amplitudes[r] == base.amplitudes[r]);
}

TEST_CASE("evolve preserves normalization") {
    for (double t : {0.05, 0.77, 13.2}) {
        for (double k : {-1.0, 0.0, 0.4}) {
            auto out = evolve(beam_splitter_state(1000), {1000, 1.0, k, t});
            CHECK(std::abs(out.norm_sq() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("integer phase exponents revive the state after 2pi") {
    for (long long n : {100LL, 1000LL}) {
        for (double k : {-1.0, 0.0}) {
            double t0 = 0.3;
            auto a = evolve(beam_splitter_state(n), {n, 1.0, k, t0});
            auto b = evolve(beam_splitter_state(n), {n, 1.0, k, t0 + 2.0 * M_PI});
            double worst = 0.0;
            for (std::size_t r = 0; r < a.amplitudes.size(); ++r)
                worst = std::max(worst, std::abs(a.amplitudes[r] - b.amplitudes[r]));
            CHECK(worst < 1e-9);
        }
    }
}

TEST_CASE("compensated phase reduction against long double oracle") {
    // Up to |omega*t| ~ 1e7 the 80-bit oracle itself is good to ~1e-12.
    std::vector<std::pair<double, double>> cases = {
        {1.0, 0.1},      {123456.0, 9.75},  {9999999.0, 0.999},
        {31622.77, 316}, {1.0e6, 3.14159},  {777.0, 1e-4},
    };
    const long double two_pi_l = 6.283185307179586476925286766559L;
    for (auto [omega, t] : cases) {
        long double p = static_cast<long double>(omega) * static_cast<long double>(t);
        long double m = std::fmod(p, two_pi_l);
        if (m > two_pi_l / 2) m -= two_pi_l;
        if (m < -two_pi_l / 2) m += two_pi_l;
        double got = reduce_mod_two_pi(omega, t);
        CHECK(std::abs(static_cast<long double>(got) - m) < 1e-11L);
        CHECK(std::abs(got) <= M_PI + 1e-12);
    }
}

TEST_CASE("phase reduction error stays small where naive fmod degrades") {
    // Integer multiples of 2pi shifted by a known offset: exact answer is the
    // offset. Here omega*t ~ 1e8, the regime where cancellation kills a naive
    // double product.
    double omega = 1.0e8;
    double t = 2.0 * M_PI;  // omega * 2pi mod 2pi == omega * (2pi - fl(2pi)) term
    // Build the exact residue with long double:
    const long double two_pi_l = 6.283185307179586476925286766559L;
    long double p = static_cast<long double>(omega) * static_cast<long double>(t);
    long double m = std::fmod(p, two_pi_l);
    if (m > two_pi_l / 2) m -= two_pi_l;
    double got = reduce_mod_two_pi(omega, t);
    CHECK(std::abs(static_cast<long double>(got) - m) < 1e-9L);
}

TEST_CASE("model params validation") {
    CHECK_THROWS_AS(ModelParams({0, 1.0, -1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({5, std::nan(""), -1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({5, 1.0, -1.0, std::numeric_limits<double>::infinity()}).validate(),
                    std::invalid_argument);
    CHECK_NOTHROW(ModelParams({5, 1.0, -1.0, 2.5}).validate());
}
