#include "twomode/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "twomode/criteria.hpp"
#include "twomode/depth.hpp"
#include "twomode/errors.hpp"
#include "twomode/fock_state.hpp"
#include "twomode/spin_moments.hpp"

namespace twomode {

namespace {

int resolve_workers(int workers, std::size_t jobs) {
    if (workers <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = hw > 0 ? static_cast<int>(hw) : 1;
    }
    const auto cap = static_cast<std::size_t>(workers);
    return static_cast<int>(std::max<std::size_t>(1, std::min(cap, jobs)));
}

// Evaluates out[i] = eval(i) for i in [0, jobs) on a strided worker pool.
// Each index writes its own slot, so the result is identical for any worker
// count; exceptions are rethrown for the lowest failing index.
template <typename Eval>
void parallel_index_map(std::size_t jobs, int workers, const Eval& eval) {
    const int used = resolve_workers(workers, jobs);
    if (used <= 1 || jobs <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) eval(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
    std::vector<std::size_t> error_index(static_cast<std::size_t>(used), jobs);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(used));
    for (int w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < jobs;
                 i += static_cast<std::size_t>(used)) {
                try {
                    eval(i);
                } catch (...) {
                    if (i < error_index[static_cast<std::size_t>(w)]) {
                        error_index[static_cast<std::size_t>(w)] = i;
                        errors[static_cast<std::size_t>(w)] =
                            std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    std::size_t first = jobs;
    std::exception_ptr to_throw;
    for (std::size_t w = 0; w < errors.size(); ++w) {
        if (errors[w] && error_index[w] < first) {
            first = error_index[w];
            to_throw = errors[w];
        }
    }
    if (to_throw) std::rethrow_exception(to_throw);
}

ModelParams make_params(std::int64_t n, double chi, double k_const, double t) {
    ModelParams params;
    params.n_total = n;
    params.chi = chi;
    params.k_const = k_const;
    params.time = t;
    return params;
}

}  // namespace

Objective objective_from_name(const std::string& name) {
    if (name == "xi2_bar") return Objective::xi2_bar;
    if (name == "e_hz_theta") return Objective::e_hz_theta;
    if (name == "e_hz") return Objective::e_hz;
    if (name == "e_hz_t") return Objective::e_hz_t;
    throw std::invalid_argument("unknown objective: " + name);
}

const char* objective_name(Objective obj) {
    switch (obj) {
        case Objective::xi2_bar: return "xi2_bar";
        case Objective::e_hz_theta: return "e_hz_theta";
        case Objective::e_hz: return "e_hz";
        case Objective::e_hz_t: return "e_hz_t";
    }
    throw std::invalid_argument("unknown objective enum value");
}

double objective_value(const SweepRow& row, Objective obj) {
    switch (obj) {
        case Objective::xi2_bar: return row.xi2_bar;
        case Objective::e_hz_theta: return row.e_hz_theta;
        case Objective::e_hz: return row.e_hz;
        case Objective::e_hz_t: return row.e_hz_t;
    }
    throw std::invalid_argument("unknown objective enum value");
}

SweepRow evaluate_point(const ModelParams& params) {
    const TwoModeState state = evolve(beam_splitter_state(params.n_total), params);
    const SpinMoments m = moments_from_state(state);
    const CriteriaReport report = evaluate_criteria(m);

    SweepRow row;
    row.t = params.time;
    row.theta = report.theta;
    row.var_sx = variance(m, Axis::x);
    row.var_sy = variance(m, Axis::y);
    row.var_sz = variance(m, Axis::z);
    row.var_stheta = report.var_theta;
    row.mean_sx = m.mean_sx;
    row.e_hz = report.e_hz;
    row.e_hz_t = report.e_hz_t;
    row.e_hz_theta = report.e_hz_theta;
    row.xi2 = report.xi2;
    row.xi2_bar = report.xi2_bar;
    row.r = report.bloch_r;
    row.r_parallel = report.r_parallel;
    return row;
}

SweepResult scan_time(std::int64_t n, double chi, double k_const,
                      const std::vector<double>& t_grid, Objective obj,
                      int workers) {
    if (t_grid.empty()) {
        throw std::invalid_argument("scan_time: empty time grid");
    }
    make_params(n, chi, k_const, t_grid.front()).validate();

    SweepResult result;
    result.rows.resize(t_grid.size());
    parallel_index_map(t_grid.size(), workers, [&](std::size_t i) {
        result.rows[i] = evaluate_point(make_params(n, chi, k_const, t_grid[i]));
    });

    result.best_index = 0;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        if (objective_value(result.rows[i], obj) <
            objective_value(result.rows[result.best_index], obj)) {
            result.best_index = i;
        }
    }

    std::ostringstream desc;
    desc.precision(17);
    desc << "n=" << n << " chi=" << chi << " k=" << k_const
         << " objective=" << objective_name(obj)
         << " points=" << t_grid.size() << " t_min=" << t_grid.front()
         << " t_max=" << t_grid.back();
    result.grid_desc = desc.str();
    return result;
}

OptimumRecord optimize_over_t(std::int64_t n, double chi, double k_const,
                              Objective obj, const OptimizeSettings& settings,
                              int workers) {
    if (settings.coarse_points < 2) {
        throw std::invalid_argument("optimize_over_t: need >= 2 coarse points");
    }
    if (!(settings.t_tol > 0.0)) {
        throw std::invalid_argument("optimize_over_t: t_tol must be positive");
    }
    double t_scan = settings.t_scan;
    if (t_scan <= 0.0) {
        const double rate = std::abs(2.0 * chi * (1.0 - k_const));
        if (!(rate > 0.0)) {
            throw std::invalid_argument(
                "optimize_over_t: twisting rate vanishes, pass an explicit "
                "t_scan");
        }
        t_scan = std::numbers::pi / rate;
    }

    // Coarse pass: uniform points resolve broad structure, and a geometric
    // tail into small t resolves valleys whose location shrinks as a power
    // of the particle number (larger systems squeeze much earlier than any
    // fixed uniform spacing can see).
    std::vector<double> grid;
    grid.reserve(2 * static_cast<std::size_t>(settings.coarse_points));
    for (int i = 1; i <= settings.coarse_points; ++i) {
        grid.push_back(t_scan * i / settings.coarse_points);
    }
    constexpr double kLogDecades = 8.0;
    for (int i = 1; i <= settings.coarse_points; ++i) {
        grid.push_back(t_scan *
                       std::pow(10.0, -kLogDecades * i / settings.coarse_points));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const SweepResult coarse = scan_time(n, chi, k_const, grid, obj, workers);

    auto value_at = [&](double t) {
        return objective_value(evaluate_point(make_params(n, chi, k_const, t)),
                               obj);
    };

    const std::size_t best_i = coarse.best_index;
    double best_t = grid[best_i];
    double best_f = objective_value(coarse.rows[best_i], obj);
    auto consider = [&](double t, double f) {
        if (f < best_f) {
            best_f = f;
            best_t = t;
        }
    };

    OptimumRecord record;
    record.bracketed = false;
    if (best_i > 0 && best_i + 1 < grid.size()) {
        double a = grid[best_i - 1];
        double b = grid[best_i + 1];
        double fa = objective_value(coarse.rows[best_i - 1], obj);
        double fb = objective_value(coarse.rows[best_i + 1], obj);
        record.bracketed = fa > best_f && fb > best_f;

        // Non-convex bracket: shrink around the running argmin on uniform
        // sub-grids until it turns convex or the window hits the tolerance.
        while (!(fa > best_f && fb > best_f) && b - a > settings.t_tol) {
            constexpr int kSub = 12;
            double xs[kSub + 1];
            double fs[kSub + 1];
            int arg = 0;
            for (int j = 0; j <= kSub; ++j) {
                xs[j] = a + (b - a) * j / kSub;
                fs[j] = value_at(xs[j]);
                consider(xs[j], fs[j]);
                if (fs[j] < fs[arg]) arg = j;
            }
            const int lo = std::max(arg - 1, 0);
            const int hi = std::min(arg + 1, kSub);
            a = xs[lo];
            b = xs[hi];
            fa = fs[lo];
            fb = fs[hi];
        }

        if (b - a > settings.t_tol) {
            constexpr double invphi = 0.6180339887498949;
            double c = b - invphi * (b - a);
            double d = a + invphi * (b - a);
            double fc = value_at(c);
            double fd = value_at(d);
            consider(c, fc);
            consider(d, fd);
            while (b - a > settings.t_tol) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - invphi * (b - a);
                    fc = value_at(c);
                    consider(c, fc);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + invphi * (b - a);
                    fd = value_at(d);
                    consider(d, fd);
                }
            }
        }
    }

    record.row = evaluate_point(make_params(n, chi, k_const, best_t));
    record.t = best_t;
    record.theta = record.row.theta;
    record.value = objective_value(record.row, obj);
    return record;
}

std::vector<TableOneRow> table_one(const std::vector<std::int64_t>& n_list,
                                   double chi, double k_const,
                                   const BoundTable& table,
                                   const OptimizeSettings& settings,
                                   int workers) {
    std::vector<TableOneRow> rows;
    rows.reserve(n_list.size());
    for (std::int64_t n : n_list) {
        TableOneRow row;
        row.n = n;
        try {
            const OptimumRecord opt = optimize_over_t(
                n, chi, k_const, Objective::e_hz_theta, settings, workers);
            row.t_opt = opt.t;
            row.theta_opt = opt.theta;
            row.e_hz_theta = opt.row.e_hz_theta;
            row.r = opt.row.r;
            if (!(row.r > 0.0)) {
                throw ConsistencyError("table_one: vanishing contrast r");
            }
            row.ratio = row.e_hz_theta / row.r;
            const DepthResult depth =
                infer_depth_steering(row.e_hz_theta, row.r, table);
            row.certified = depth.certified;
            row.s0 = depth.s0;
            row.n_lower_bound = depth.n_lower_bound;
            if (depth.certified) {
                row.c_tilde_at_s0 = interpolate_c_tilde(table, depth.s0);
            }
            row.ok = true;
        } catch (const std::exception& err) {
            row.ok = false;
            row.error = err.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace twomode
