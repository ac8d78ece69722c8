#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twomode {

struct SolverSettings {
    int mu_grid_points = 21;   // coarse scan of mu in [0, S]
    double fp_tol = 1e-10;     // fixed-point tolerance on mu = <S_x>
    int max_iterations = 500;
    double eta_tol = 1e-10;    // ratio-iteration tolerance for zeta2
};

// Ground state of H = S(S+1) - S_z^2 - c*S_x on the spin-s representation;
// real symmetric tridiagonal in the S_z basis.
struct GroundState {
    double eigenvalue = 0.0;
    double mean_sx = 0.0;
    std::vector<double> vec;  // real coefficients, m = -s..s
};
GroundState planar_ground_state(double spin_s, double c);

// Minimum of <S_x^2 + S_y^2> - <S_x>^2 - <S_y>^2 over pure spin-s states.
// Stationary states are ground states of H(mu) at mu = <S_x>; solved by a
// coarse mu scan plus damped fixed-point iteration.
struct CsSolution {
    double value = 0.0;
    double mu = 0.0;       // <S_x> of the minimizer
    int iterations = 0;
    double residual = 0.0; // ||H psi - lambda psi||
    std::vector<double> state;
};
CsSolution solve_c_s_detailed(double spin_s, const SolverSettings& settings = {});
double solve_c_s(double spin_s, const SolverSettings& settings = {});

// Minimum of [<S_x^2+S_y^2> - <S_x>^2 - <S_y>^2] / <S_x> over pure spin-s
// states with in-plane mean spin (WLOG along x). Fractional objective solved
// by ratio iteration: minimize numerator - eta*denominator, update eta to the
// achieved ratio, repeat; eta stays inside [0, 1/2].
struct Zeta2Solution {
    double value = 0.0;
    double mu = 0.0;
    int outer_iterations = 0;
};
Zeta2Solution solve_zeta2_detailed(double spin_s, const SolverSettings& settings = {});
double solve_zeta2(double spin_s, const SolverSettings& settings = {});

struct BoundEntry {
    double two_s = 0.0;
    double c_s = 0.0;
    double c_tilde = 0.0;  // c_s / spin_s
    double zeta2 = 0.0;
    bool has_zeta2 = false;
};

struct BoundTable {
    std::vector<BoundEntry> entries;  // sorted by two_s, strictly increasing
    std::string provenance;           // settings echo, no timestamp
};

// Exact solves at every integer 2S <= dense_two_s_max, then logarithmically
// spaced 2S values (rounded to integers) above, up to two_s_max.
struct TableSettings {
    double two_s_max = 10000.0;
    double dense_two_s_max = 100.0;
    int cs_per_decade = 96;
    int zeta_per_decade = 24;
    bool with_zeta = true;
    SolverSettings solver;
};
BoundTable build_bound_table(const TableSettings& settings = {});

// Monotone (PCHIP) interpolation in log-log space; exact at table nodes,
// never increasing with S, throws std::out_of_range outside the table.
double interpolate_c_tilde(const BoundTable& table, double spin_s);
double interpolate_zeta2(const BoundTable& table, double spin_s);

// Least-squares slope of log c_s vs log spin_s over [s_lo, s_hi]; the
// one-argument form uses the table's top decade. Requires >= 2 entries in
// range spanning at least a factor 10 overall in the table.
double asymptotic_check(const BoundTable& table);
double asymptotic_check(const BoundTable& table, double s_lo, double s_hi);

// CSV columns: two_s,c_s,c_tilde,zeta2 (zeta2 empty when absent).
void save_bound_table_csv(const BoundTable& table, std::ostream& out);
BoundTable load_bound_table_csv(std::istream& in);

}  // namespace twomode
