#include "twomode/bounds.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twomode/errors.hpp"

namespace twomode {

namespace {

std::int64_t checked_two_s(double spin_s) {
    const double two_s = 2.0 * spin_s;
    const double rounded = std::nearbyint(two_s);
    if (!(rounded >= 1.0) || std::abs(two_s - rounded) > 1e-9) {
        throw std::invalid_argument(
            "spin must be a positive integer or half-integer");
    }
    return static_cast<std::int64_t>(rounded);
}

double ground_mean_sx(double s, const std::vector<double>& vec) {
    double mx = 0.0;
    for (std::size_t i = 0; i + 1 < vec.size(); ++i) {
        const double m = -s + static_cast<double>(i);
        mx += vec[i] * vec[i + 1] * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    return mx;
}

struct GridPoint {
    double g = 0.0;        // lambda_min + mu^2
    double mu = 0.0;
    double mean_sx = 0.0;  // <S_x> of the ground state
    GroundState state;
};

GridPoint eval_g(double s, double mu, double eta) {
    GridPoint p;
    p.mu = mu;
    p.state = planar_ground_state(s, 2.0 * mu + eta);
    p.g = p.state.eigenvalue + mu * mu;
    p.mean_sx = p.state.mean_sx;
    return p;
}

struct InnerMinimum {
    double value = 0.0;
    double mu = 0.0;
    double mean_sx = 0.0;
    int iterations = 0;
    GroundState state;
};

// min over mu in [0, S] of lambda_min(H(2 mu + eta)) + mu^2: coarse grid,
// then damped fixed-point iteration mu <- <S_x>(mu) from the best bracket.
InnerMinimum minimize_g(double s, double eta, const SolverSettings& settings) {
    const int grid_n = std::max(settings.mu_grid_points, 2);
    GridPoint best = eval_g(s, 0.0, eta);
    for (int i = 1; i < grid_n; ++i) {
        GridPoint p = eval_g(s, s * i / (grid_n - 1.0), eta);
        if (p.g < best.g) best = p;
    }

    GridPoint current = best;
    int used = 0;
    const double scale = std::max(1.0, s);
    for (; used < settings.max_iterations; ++used) {
        double mu_next = std::clamp(current.mean_sx, 0.0, s);
        if (std::abs(mu_next - current.mu) < settings.fp_tol * scale) break;
        GridPoint p = eval_g(s, mu_next, eta);
        // Damp toward the current point if the step overshoots.
        int damping = 0;
        while (p.g > current.g + 1e-13 * std::max(1.0, std::abs(current.g)) &&
               damping < 60) {
            mu_next = 0.5 * (mu_next + current.mu);
            p = eval_g(s, mu_next, eta);
            ++damping;
        }
        const bool stalled =
            std::abs(p.mu - current.mu) < settings.fp_tol * scale;
        current = p;
        if (current.g < best.g) best = current;
        if (stalled) break;
    }
    if (current.g < best.g) best = current;

    InnerMinimum out;
    out.value = best.g;
    out.mu = best.mu;
    out.mean_sx = best.mean_sx;
    out.iterations = used;
    out.state = std::move(best.state);
    return out;
}

double eigen_residual(double s, double c, double lambda,
                      const std::vector<double>& vec) {
    std::vector<double> hv(vec.size(), 0.0);
    for (std::size_t i = 0; i < vec.size(); ++i) {
        const double m = -s + static_cast<double>(i);
        hv[i] += (s * (s + 1.0) - m * m) * vec[i];
        if (i + 1 < vec.size()) {
            const double g = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
            hv[i] += -0.5 * c * g * vec[i + 1];
            hv[i + 1] += -0.5 * c * g * vec[i];
        }
    }
    double resid2 = 0.0;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        const double r = hv[i] - lambda * vec[i];
        resid2 += r * r;
    }
    return std::sqrt(resid2);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

GroundState planar_ground_state(double spin_s, double c) {
    const std::int64_t two_s = checked_two_s(spin_s);
    const double s = static_cast<double>(two_s) / 2.0;
    const auto n = static_cast<lapack_int>(two_s + 1);

    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> off(static_cast<std::size_t>(n), 0.0);
    for (lapack_int i = 0; i < n; ++i) {
        const double m = -s + i;
        diag[static_cast<std::size_t>(i)] = s * (s + 1.0) - m * m;
        if (i + 1 < n) {
            off[static_cast<std::size_t>(i)] =
                -0.5 * c * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
        }
    }

    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    std::vector<lapack_int> isuppz(2, 0);
    lapack_int found = 0;
    const double abstol = LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, 1,
        abstol, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != 1) {
        throw SolverError("planar_ground_state: tridiagonal eigensolve failed");
    }

    GroundState out;
    out.eigenvalue = w[0];
    out.vec.assign(z.begin(), z.end());
    // Fix the overall sign so the dominant component is positive.
    double peak = 0.0;
    for (double v : out.vec) {
        if (std::abs(v) > std::abs(peak)) peak = v;
    }
    if (peak < 0.0) {
        for (double& v : out.vec) v = -v;
    }
    out.mean_sx = ground_mean_sx(s, out.vec);
    return out;
}

CsSolution solve_c_s_detailed(double spin_s, const SolverSettings& settings) {
    const double s = static_cast<double>(checked_two_s(spin_s)) / 2.0;
    InnerMinimum inner = minimize_g(s, 0.0, settings);

    CsSolution sol;
    sol.value = inner.value;
    sol.mu = inner.mu;
    sol.iterations = inner.iterations;
    sol.state = std::move(inner.state.vec);
    sol.residual = eigen_residual(s, 2.0 * sol.mu, inner.state.eigenvalue,
                                  sol.state);
    return sol;
}

double solve_c_s(double spin_s, const SolverSettings& settings) {
    return solve_c_s_detailed(spin_s, settings).value;
}

Zeta2Solution solve_zeta2_detailed(double spin_s,
                                   const SolverSettings& settings) {
    const double s = static_cast<double>(checked_two_s(spin_s)) / 2.0;

    // Ratio iteration on eta: minimize numerator - eta * denominator, then
    // move eta to the achieved ratio. Starts at the proven ceiling 1/2 and
    // decreases monotonically to the fixed point.
    double eta = 0.5;
    Zeta2Solution sol;
    for (int outer = 0; outer < 200; ++outer) {
        InnerMinimum inner = minimize_g(s, eta, settings);
        sol.outer_iterations = outer + 1;
        sol.mu = inner.mean_sx;
        if (!(inner.mean_sx > 1e-12)) {
            throw SolverError(
                "solve_zeta2: degenerate in-plane mean in ratio iteration");
        }
        const double eta_next =
            std::clamp(eta + inner.value / inner.mean_sx, 0.0, 0.5);
        const bool done = std::abs(eta_next - eta) < settings.eta_tol;
        eta = eta_next;
        if (done) {
            sol.value = eta;
            return sol;
        }
    }
    sol.value = eta;  // iteration cap: report the bracketing value
    return sol;
}

double solve_zeta2(double spin_s, const SolverSettings& settings) {
    return solve_zeta2_detailed(spin_s, settings).value;
}

BoundTable build_bound_table(const TableSettings& settings) {
    const auto dense_max = static_cast<std::int64_t>(
        std::nearbyint(std::min(settings.dense_two_s_max, settings.two_s_max)));
    const auto top = static_cast<std::int64_t>(std::nearbyint(settings.two_s_max));
    if (top < 1) {
        throw std::invalid_argument("build_bound_table: two_s_max must be >= 1");
    }

    auto log_grid = [&](int per_decade) {
        std::set<std::int64_t> grid;
        if (top <= dense_max || per_decade < 1) return grid;
        const double start = std::log10(static_cast<double>(std::max<std::int64_t>(dense_max, 1)));
        for (int k = 1;; ++k) {
            const double value = std::pow(10.0, start + static_cast<double>(k) / per_decade);
            auto two_s = static_cast<std::int64_t>(std::nearbyint(value));
            if (two_s <= dense_max) continue;
            if (two_s >= top) break;
            grid.insert(two_s);
        }
        grid.insert(top);
        return grid;
    };

    std::set<std::int64_t> cs_grid;
    for (std::int64_t two_s = 1; two_s <= dense_max; ++two_s) {
        cs_grid.insert(two_s);
    }
    for (std::int64_t two_s : log_grid(settings.cs_per_decade)) {
        cs_grid.insert(two_s);
    }

    std::set<std::int64_t> zeta_grid;
    if (settings.with_zeta) {
        for (std::int64_t two_s = 1; two_s <= dense_max; ++two_s) {
            zeta_grid.insert(two_s);
        }
        for (std::int64_t two_s : log_grid(settings.zeta_per_decade)) {
            zeta_grid.insert(two_s);
            cs_grid.insert(two_s);
        }
    }

    BoundTable table;
    table.entries.reserve(cs_grid.size());
    for (std::int64_t two_s : cs_grid) {
        const double s = static_cast<double>(two_s) / 2.0;
        BoundEntry entry;
        entry.two_s = static_cast<double>(two_s);
        entry.c_s = solve_c_s(s, settings.solver);
        entry.c_tilde = entry.c_s / s;
        if (zeta_grid.count(two_s) != 0) {
            entry.zeta2 = solve_zeta2(s, settings.solver);
            entry.has_zeta2 = true;
        }
        table.entries.push_back(entry);
    }

    std::ostringstream prov;
    prov << "two_s_max=" << top << " dense_two_s_max=" << dense_max
         << " cs_per_decade=" << settings.cs_per_decade
         << " zeta_per_decade=" << settings.zeta_per_decade
         << " with_zeta=" << (settings.with_zeta ? 1 : 0)
         << " mu_grid_points=" << settings.solver.mu_grid_points
         << " fp_tol=" << settings.solver.fp_tol
         << " max_iterations=" << settings.solver.max_iterations
         << " eta_tol=" << settings.solver.eta_tol;
    table.provenance = prov.str();
    return table;
}

namespace {

// Shape-preserving cubic (PCHIP) in log-log coordinates, evaluated locally:
// the slope at a node only needs its two neighboring secants.
class LogLogInterpolant {
  public:
    LogLogInterpolant(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {}

    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (n == 1) return y_[0];
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - x_.begin());
        if (hi == 0) hi = 1;
        if (hi == n) hi = n - 1;
        const std::size_t lo = hi - 1;

        const double h = x_[hi] - x_[lo];
        const double t = (x - x_[lo]) / h;
        const double d_lo = node_slope(lo);
        const double d_hi = node_slope(hi);
        const double y_lo = y_[lo];
        const double y_hi = y_[hi];

        const double t2 = t * t;
        const double t3 = t2 * t;
        return y_lo * (2.0 * t3 - 3.0 * t2 + 1.0) +
               h * d_lo * (t3 - 2.0 * t2 + t) +
               y_hi * (-2.0 * t3 + 3.0 * t2) + h * d_hi * (t3 - t2);
    }

  private:
    double secant(std::size_t i) const {
        return (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }

    double node_slope(std::size_t i) const {
        const std::size_t n = x_.size();
        if (i == 0 || i == n - 1) {
            // One-sided three-point estimate with the monotonicity clamps.
            const std::size_t a = (i == 0) ? 0 : n - 3;
            const double h0 = x_[a + 1] - x_[a];
            const double h1 = x_[a + 2] - x_[a + 1];
            const double d0 = secant(a);
            const double d1 = secant(a + 1);
            double m = (i == 0)
                           ? ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
                           : ((2.0 * h1 + h0) * d1 - h1 * d0) / (h1 + h0);
            const double d_edge = (i == 0) ? d0 : d1;
            if (m * d_edge <= 0.0) {
                m = 0.0;
            } else if (std::abs(m) > 3.0 * std::abs(d_edge)) {
                m = 3.0 * d_edge;
            }
            return m;
        }
        const double d0 = secant(i - 1);
        const double d1 = secant(i);
        if (d0 * d1 <= 0.0) return 0.0;
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double w0 = 2.0 * h1 + h0;
        const double w1 = h1 + 2.0 * h0;
        return (w0 + w1) / (w0 / d0 + w1 / d1);
    }

    std::vector<double> x_;
    std::vector<double> y_;
};

double interpolate_column(const BoundTable& table, double spin_s, bool zeta) {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> raw_two_s;
    std::vector<double> raw_value;
    for (const auto& e : table.entries) {
        if (zeta && !e.has_zeta2) continue;
        const double value = zeta ? e.zeta2 : e.c_tilde;
        xs.push_back(std::log(e.two_s / 2.0));
        ys.push_back(std::log(value));
        raw_two_s.push_back(e.two_s);
        raw_value.push_back(value);
    }
    if (xs.empty()) {
        throw std::invalid_argument(zeta
                                        ? "interpolate_zeta2: no zeta2 entries"
                                        : "interpolate_c_tilde: empty table");
    }
    const double two_s = 2.0 * spin_s;
    for (std::size_t i = 0; i < raw_two_s.size(); ++i) {
        if (std::abs(two_s - raw_two_s[i]) < 1e-9) return raw_value[i];
    }
    if (two_s < raw_two_s.front() || two_s > raw_two_s.back()) {
        throw std::out_of_range("bound-table interpolation outside table range");
    }
    return std::exp(LogLogInterpolant(std::move(xs), std::move(ys))(
        std::log(spin_s)));
}

}  // namespace

double interpolate_c_tilde(const BoundTable& table, double spin_s) {
    return interpolate_column(table, spin_s, false);
}

double interpolate_zeta2(const BoundTable& table, double spin_s) {
    return interpolate_column(table, spin_s, true);
}

double asymptotic_check(const BoundTable& table, double s_lo, double s_hi) {
    if (table.entries.size() < 2) {
        throw std::invalid_argument("asymptotic_check: table too small");
    }
    const double span =
        table.entries.back().two_s / table.entries.front().two_s;
    if (span < 10.0 - 1e-9) {
        throw std::invalid_argument(
            "asymptotic_check: table spans less than one decade");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& e : table.entries) {
        const double s = e.two_s / 2.0;
        if (s < s_lo * (1.0 - 1e-12) || s > s_hi * (1.0 + 1e-12)) continue;
        const double x = std::log(s);
        const double y = std::log(e.c_s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) {
        throw std::invalid_argument(
            "asymptotic_check: fewer than two entries in the fit window");
    }
    const double denom = count * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) {
        throw std::invalid_argument("asymptotic_check: degenerate fit window");
    }
    return (count * sxy - sx * sy) / denom;
}

double asymptotic_check(const BoundTable& table) {
    if (table.entries.empty()) {
        throw std::invalid_argument("asymptotic_check: empty table");
    }
    const double s_hi = table.entries.back().two_s / 2.0;
    return asymptotic_check(table, s_hi / 10.0, s_hi);
}

void save_bound_table_csv(const BoundTable& table, std::ostream& out) {
    out << "# provenance: " << table.provenance << "\n";
    out << "two_s,c_s,c_tilde,zeta2\n";
    for (const auto& e : table.entries) {
        out << format_double(e.two_s) << ',' << format_double(e.c_s) << ','
            << format_double(e.c_tilde) << ',';
        if (e.has_zeta2) out << format_double(e.zeta2);
        out << "\n";
    }
}

BoundTable load_bound_table_csv(std::istream& in) {
    BoundTable table;
    std::string line;
    const std::string prov_prefix = "# provenance: ";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind(prov_prefix, 0) == 0) {
            table.provenance = line.substr(prov_prefix.size());
            continue;
        }
        if (line[0] == '#' || line.rfind("two_s", 0) == 0) continue;

        std::array<std::string, 4> fields;
        std::size_t field = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size() && field < 4; ++i) {
            if (i == line.size() || line[i] == ',') {
                fields[field++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (field < 3) {
            throw std::invalid_argument("load_bound_table_csv: malformed row");
        }
        BoundEntry e;
        e.two_s = std::stod(fields[0]);
        e.c_s = std::stod(fields[1]);
        e.c_tilde = std::stod(fields[2]);
        if (!fields[3].empty()) {
            e.zeta2 = std::stod(fields[3]);
            e.has_zeta2 = true;
        }
        table.entries.push_back(e);
    }
    return table;
}

}  // namespace twomode
