#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "twomode/bounds.hpp"
#include "twomode/criteria.hpp"

namespace twomode {

enum class Objective { xi2_bar, e_hz_theta, e_hz, e_hz_t };

Objective objective_from_name(const std::string& name);  // throws on unknown
const char* objective_name(Objective obj);

// One evaluated time point; field order matches the CSV header
// t,theta,var_sx,var_sy,var_sz,var_stheta,mean_sx,e_hz,e_hz_t,e_hz_theta,
// xi2,xi2_bar,r,r_parallel.
struct SweepRow {
    double t = 0.0;
    double theta = 0.0;
    double var_sx = 0.0;
    double var_sy = 0.0;
    double var_sz = 0.0;
    double var_stheta = 0.0;
    double mean_sx = 0.0;
    double e_hz = 0.0;
    double e_hz_t = 0.0;
    double e_hz_theta = 0.0;
    double xi2 = 0.0;
    double xi2_bar = 0.0;
    double r = 0.0;
    double r_parallel = 0.0;
};

double objective_value(const SweepRow& row, Objective obj);

// Splitter state evolved to params.time, criteria at the optimal angle.
SweepRow evaluate_point(const ModelParams& params);

struct SweepResult {
    std::string grid_desc;
    std::vector<SweepRow> rows;   // grid order
    std::size_t best_index = 0;   // argmin of the objective over rows
};

// Rows are computed in parallel but reduced in index order, so output is
// identical for any worker count. workers = 0 means hardware concurrency.
SweepResult scan_time(std::int64_t n, double chi, double k_const,
                      const std::vector<double>& t_grid, Objective obj,
                      int workers = 0);

struct OptimizeSettings {
    double t_scan = 0.0;      // 0 = auto: pi / |2 chi (1-K)|, i.e. pi/4 at K=-1, chi=1
    int coarse_points = 2000;
    double t_tol = 1e-8;
};

struct OptimumRecord {
    double t = 0.0;
    double theta = 0.0;
    double value = 0.0;
    SweepRow row;             // full row at the optimum
    bool bracketed = false;   // coarse minimum was interior and convex
};

// Coarse grid on (0, t_scan], then golden-section refinement of the
// bracketing interval down to t_tol; falls back to grid refinement when the
// bracket is not locally convex.
OptimumRecord optimize_over_t(std::int64_t n, double chi, double k_const,
                              Objective obj, const OptimizeSettings& settings = {},
                              int workers = 0);

struct TableOneRow {
    std::int64_t n = 0;
    double t_opt = 0.0;
    double theta_opt = 0.0;
    double e_hz_theta = 0.0;
    double r = 0.0;
    double ratio = 0.0;        // e_hz_theta / r
    bool certified = false;
    double s0 = 0.0;
    std::int64_t n_lower_bound = 0;
    double c_tilde_at_s0 = 0.0;
    bool ok = false;
    std::string error;
};

// Per N: minimize e_hz_theta over t, report the ratio at that optimum and
// the steering depth it certifies. Failed rows carry their error message and
// do not abort the remaining rows.
std::vector<TableOneRow> table_one(const std::vector<std::int64_t>& n_list,
                                   double chi, double k_const,
                                   const BoundTable& table,
                                   const OptimizeSettings& settings = {},
                                   int workers = 0);

}  // namespace twomode
