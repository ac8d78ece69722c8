#include "twomode/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "twomode/bounds.hpp"
#include "twomode/closed_form.hpp"
#include "twomode/criteria.hpp"
#include "twomode/depth.hpp"
#include "twomode/errors.hpp"
#include "twomode/fock_state.hpp"
#include "twomode/run.hpp"
#include "twomode/spin_moments.hpp"
#include "twomode/sweep.hpp"

namespace twomode {

namespace {

constexpr const char* kVersion = "1.0.0";

using nlohmann::json;

std::string provenance_line(int argc, const char* const* argv) {
    std::ostringstream os;
    os << "twomode " << kVersion << " |";
    for (int i = 1; i < argc; ++i) os << ' ' << argv[i];
    return os.str();
}

// All output is buffered in memory and moved into place in one rename, so a
// failed run never leaves a partial file behind.
void write_atomic(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::invalid_argument("cannot open output path: " + path);
        }
        out << payload;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing output: " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("failed moving output into place: " + path);
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string sanitize_csv(std::string text) {
    for (char& c : text) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

json wrap(const std::string& prov, json result) {
    return json{{"provenance", prov}, {"result", std::move(result)}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json row_to_json(const SweepRow& r) {
    return json{{"t", r.t},
                {"theta", r.theta},
                {"var_sx", r.var_sx},
                {"var_sy", r.var_sy},
                {"var_sz", r.var_sz},
                {"var_stheta", r.var_stheta},
                {"mean_sx", r.mean_sx},
                {"e_hz", r.e_hz},
                {"e_hz_t", r.e_hz_t},
                {"e_hz_theta", r.e_hz_theta},
                {"xi2", r.xi2},
                {"xi2_bar", r.xi2_bar},
                {"r", r.r},
                {"r_parallel", r.r_parallel}};
}

constexpr const char* kScanHeader =
    "t,theta,var_sx,var_sy,var_sz,var_stheta,mean_sx,e_hz,e_hz_t,e_hz_theta,"
    "xi2,xi2_bar,r,r_parallel";

std::string row_to_csv(const SweepRow& r) {
    std::ostringstream os;
    os << fmt(r.t) << ',' << fmt(r.theta) << ',' << fmt(r.var_sx) << ','
       << fmt(r.var_sy) << ',' << fmt(r.var_sz) << ',' << fmt(r.var_stheta)
       << ',' << fmt(r.mean_sx) << ',' << fmt(r.e_hz) << ',' << fmt(r.e_hz_t)
       << ',' << fmt(r.e_hz_theta) << ',' << fmt(r.xi2) << ','
       << fmt(r.xi2_bar) << ',' << fmt(r.r) << ',' << fmt(r.r_parallel);
    return os.str();
}

double auto_window(double chi, double k_const) {
    const double rate = std::abs(2.0 * chi * (1.0 - k_const));
    if (!(rate > 0.0)) {
        throw std::invalid_argument(
            "twisting rate vanishes; pass an explicit time window");
    }
    return std::numbers::pi / rate;
}

BoundTable load_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot read bounds table: " + path);
    }
    BoundTable table = load_bound_table_csv(in);
    if (table.entries.empty()) {
        throw std::invalid_argument("bounds table is empty: " + path);
    }
    return table;
}

struct EvolveConfig {
    std::int64_t n = 0;
    double chi = 1.0;
    double k = -1.0;
    double t = 0.0;
    std::string out;
};

std::string run_evolve(const EvolveConfig& cfg, const std::string& prov) {
    ModelParams params;
    params.n_total = cfg.n;
    params.chi = cfg.chi;
    params.k_const = cfg.k;
    params.time = cfg.t;
    params.validate();

    const TwoModeState state = evolve(beam_splitter_state(cfg.n), params);
    const SpinMoments m = moments_from_state(state);

    json amps = json::array();
    for (const auto& a : state.amplitudes) {
        amps.push_back(json::array({a.real(), a.imag()}));
    }
    json moments{{"mean_sx", m.mean_sx},
                 {"mean_sy", m.mean_sy},
                 {"mean_sz", m.mean_sz},
                 {"second_xx", m.second_xx},
                 {"second_yy", m.second_yy},
                 {"second_zz", m.second_zz},
                 {"anti_xy", m.anti_xy},
                 {"anti_xz", m.anti_xz},
                 {"anti_yz", m.anti_yz},
                 {"c_value", m.c_value},
                 {"f_value", json::array({m.f_value.real(), m.f_value.imag()})},
                 {"mean_ab", json::array({m.mean_ab.real(), m.mean_ab.imag()})},
                 {"mean_na", m.mean_na},
                 {"mean_nanb", m.mean_nanb}};
    json result{{"n_total", state.n_total},
                {"chi", cfg.chi},
                {"k", cfg.k},
                {"time", cfg.t},
                {"amplitudes", std::move(amps)},
                {"moments", std::move(moments)}};
    return dump(wrap(prov, std::move(result)));
}

struct ScanConfig {
    std::int64_t n = 0;
    double chi = 1.0;
    double k = -1.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int t_points = 200;
    std::string objective = "e_hz_theta";
    int workers = 0;
    std::string format = "csv";
    std::string out;
};

std::string run_scan(const ScanConfig& cfg, const std::string& prov) {
    if (cfg.t_points < 1) {
        throw std::invalid_argument("scan: --t-points must be >= 1");
    }
    const double t_max = cfg.t_max > 0.0 ? cfg.t_max
                                         : auto_window(cfg.chi, cfg.k);
    std::vector<double> grid(static_cast<std::size_t>(cfg.t_points));
    if (cfg.t_points == 1) {
        grid[0] = cfg.t_min;
    } else {
        for (int i = 0; i < cfg.t_points; ++i) {
            grid[static_cast<std::size_t>(i)] =
                cfg.t_min + (t_max - cfg.t_min) * i / (cfg.t_points - 1.0);
        }
    }
    const Objective obj = objective_from_name(cfg.objective);
    const SweepResult result =
        scan_time(cfg.n, cfg.chi, cfg.k, grid, obj, cfg.workers);

    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& row : result.rows) rows.push_back(row_to_json(row));
        return dump(wrap(prov, json{{"grid_desc", result.grid_desc},
                                    {"best_index", result.best_index},
                                    {"rows", std::move(rows)}}));
    }
    if (cfg.format != "csv") {
        throw std::invalid_argument("scan: unknown format " + cfg.format);
    }
    std::ostringstream os;
    os << "# provenance: " << prov << "\n" << kScanHeader << "\n";
    for (const auto& row : result.rows) os << row_to_csv(row) << "\n";
    return os.str();
}

struct OptimizeConfig {
    std::int64_t n = 0;
    double chi = 1.0;
    double k = -1.0;
    std::string objective = "e_hz_theta";
    OptimizeSettings settings;
    int workers = 0;
    std::string out;
};

std::string run_optimize(const OptimizeConfig& cfg, const std::string& prov) {
    const Objective obj = objective_from_name(cfg.objective);
    const OptimumRecord record = optimize_over_t(cfg.n, cfg.chi, cfg.k, obj,
                                                 cfg.settings, cfg.workers);
    json result{{"t", record.t},
                {"theta", record.theta},
                {"value", record.value},
                {"objective", cfg.objective},
                {"bracketed", record.bracketed},
                {"row", row_to_json(record.row)}};
    return dump(wrap(prov, std::move(result)));
}

struct BoundsConfig {
    std::int64_t two_s_max = 10000;
    std::int64_t dense_max = 100;
    int cs_per_decade = 96;
    int zeta_per_decade = 24;
    bool no_zeta = false;
    std::string out;
};

std::string run_bounds(const BoundsConfig& cfg, const std::string& prov) {
    TableSettings settings;
    settings.two_s_max = static_cast<double>(cfg.two_s_max);
    settings.dense_two_s_max = static_cast<double>(cfg.dense_max);
    settings.cs_per_decade = cfg.cs_per_decade;
    settings.zeta_per_decade = cfg.zeta_per_decade;
    settings.with_zeta = !cfg.no_zeta;
    BoundTable table = build_bound_table(settings);
    table.provenance = prov + " | " + table.provenance;
    std::ostringstream os;
    save_bound_table_csv(table, os);
    return os.str();
}

struct DepthConfig {
    double ehz = 0.0;
    double r = 1.0;
    std::string kind = "steering";
    std::string table_path;
    std::string out;
};

std::string run_depth(const DepthConfig& cfg, const std::string& prov) {
    const BoundTable table = load_table_file(cfg.table_path);
    DepthResult res;
    if (cfg.kind == "entanglement") {
        res = infer_depth_entanglement(cfg.ehz, cfg.r, table);
    } else if (cfg.kind == "steering") {
        res = infer_depth_steering(cfg.ehz, cfg.r, table);
    } else if (cfg.kind == "pqs") {
        res = infer_depth_pqs(cfg.ehz, cfg.r, table);
    } else {
        throw std::invalid_argument("depth: unknown kind " + cfg.kind);
    }
    json result{{"certified", res.certified},
                {"s0", res.s0},
                {"n_lower_bound", res.n_lower_bound},
                {"kind", cfg.kind},
                {"margin", res.margin},
                {"e_hz", res.e_hz},
                {"r", res.r}};
    return dump(wrap(prov, std::move(result)));
}

struct TableOneConfig {
    std::vector<std::int64_t> n_list;
    double chi = 1.0;
    double k = -1.0;
    std::string table_path;
    OptimizeSettings settings;
    int workers = 0;
    std::string format = "csv";
    std::string out;
};

std::string run_table_one(const TableOneConfig& cfg, const std::string& prov) {
    if (cfg.n_list.empty()) {
        throw std::invalid_argument("table1: empty --n list");
    }
    BoundTable table;
    if (!cfg.table_path.empty()) {
        table = load_table_file(cfg.table_path);
    } else {
        TableSettings settings;
        const std::int64_t top =
            *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
        if (top < 1) {
            throw std::invalid_argument("table1: need a positive particle count");
        }
        settings.two_s_max = static_cast<double>(top);
        settings.dense_two_s_max =
            std::min<double>(100.0, settings.two_s_max);
        settings.with_zeta = false;
        table = build_bound_table(settings);
    }

    const auto rows = table_one(cfg.n_list, cfg.chi, cfg.k, table,
                                cfg.settings, cfg.workers);

    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            arr.push_back(json{{"n", row.n},
                               {"t_opt", row.t_opt},
                               {"theta_opt", row.theta_opt},
                               {"e_hz_theta", row.e_hz_theta},
                               {"r", row.r},
                               {"ratio", row.ratio},
                               {"certified", row.certified},
                               {"s0", row.s0},
                               {"n_lower_bound", row.n_lower_bound},
                               {"c_tilde_at_s0", row.c_tilde_at_s0},
                               {"ok", row.ok},
                               {"error", row.error}});
        }
        return dump(wrap(prov, json{{"rows", std::move(arr)}}));
    }
    if (cfg.format != "csv") {
        throw std::invalid_argument("table1: unknown format " + cfg.format);
    }
    std::ostringstream os;
    os << "# provenance: " << prov << "\n";
    os << "n,t_opt,theta_opt,e_hz_theta,r,ratio,certified,s0,n_lower_bound,"
          "c_tilde_at_s0,ok,error\n";
    for (const auto& row : rows) {
        os << row.n << ',' << fmt(row.t_opt) << ',' << fmt(row.theta_opt)
           << ',' << fmt(row.e_hz_theta) << ',' << fmt(row.r) << ','
           << fmt(row.ratio) << ',' << (row.certified ? 1 : 0) << ','
           << fmt(row.s0) << ',' << row.n_lower_bound << ','
           << fmt(row.c_tilde_at_s0) << ',' << (row.ok ? 1 : 0) << ','
           << sanitize_csv(row.error) << "\n";
    }
    return os.str();
}

struct CrosscheckConfig {
    std::int64_t n = 0;
    double chi = 1.0;
    double k = -1.0;
    int t_points = 100;
    double t_max = 0.0;
    double tolerance = 1e-9;
    std::string out;
};

std::string run_crosscheck(const CrosscheckConfig& cfg,
                           const std::string& prov) {
    if (cfg.t_points < 1) {
        throw std::invalid_argument("crosscheck: --t-points must be >= 1");
    }
    if (!(cfg.tolerance > 0.0)) {
        throw std::invalid_argument("crosscheck: tolerance must be positive");
    }
    double t_max = cfg.t_max;
    if (t_max <= 0.0) {
        if (!(std::abs(cfg.chi) > 0.0)) {
            throw std::invalid_argument(
                "crosscheck: chi = 0 freezes the dynamics; pass --t-max");
        }
        t_max = 2.0 * std::numbers::pi / std::abs(cfg.chi);
    }

    ModelParams params;
    params.n_total = cfg.n;
    params.chi = cfg.chi;
    params.k_const = cfg.k;
    params.validate();

    double worst = 0.0;
    double dev_mean_sx = 0.0, dev_second_yy = 0.0, dev_second_zz = 0.0;
    double dev_f_abs = 0.0, dev_c_value = 0.0;
    for (int i = 1; i <= cfg.t_points; ++i) {
        params.time = t_max * i / cfg.t_points;
        const CrosscheckReport report = crosscheck(params, cfg.tolerance);
        worst = std::max(worst, report.worst);
        dev_mean_sx = std::max(dev_mean_sx, report.dev_mean_sx);
        dev_second_yy = std::max(dev_second_yy, report.dev_second_yy);
        dev_second_zz = std::max(dev_second_zz, report.dev_second_zz);
        dev_f_abs = std::max(dev_f_abs, report.dev_f_abs);
        dev_c_value = std::max(dev_c_value, report.dev_c_value);
        if (!report.pass) {
            std::ostringstream msg;
            msg << "crosscheck: sum and closed-form paths disagree at t = "
                << params.time << " (worst relative deviation "
                << report.worst << ", tolerance " << cfg.tolerance << ")";
            throw ConsistencyError(msg.str());
        }
    }

    json result{{"points", cfg.t_points},
                {"tolerance", cfg.tolerance},
                {"t_max", t_max},
                {"pass", true},
                {"worst", worst},
                {"dev_mean_sx", dev_mean_sx},
                {"dev_second_yy", dev_second_yy},
                {"dev_second_zz", dev_second_zz},
                {"dev_f_abs", dev_f_abs},
                {"dev_c_value", dev_c_value}};
    return dump(wrap(prov, std::move(result)));
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"two-mode interferometer squeezing, steering and depth toolkit"};
    app.require_subcommand(1);

    EvolveConfig evolve_cfg;
    auto* evolve_cmd =
        app.add_subcommand("evolve", "evolve the splitter state and print it");
    evolve_cmd->add_option("--n", evolve_cfg.n, "particle count")->required();
    evolve_cmd->add_option("--chi", evolve_cfg.chi, "interaction strength");
    evolve_cmd->add_option("--k", evolve_cfg.k, "cross-coupling constant K");
    evolve_cmd->add_option("--t", evolve_cfg.t, "evolution time");
    evolve_cmd->add_option("--out", evolve_cfg.out, "output path (default stdout)");

    ScanConfig scan_cfg;
    auto* scan_cmd =
        app.add_subcommand("scan", "evaluate criteria on a time grid");
    scan_cmd->add_option("--n", scan_cfg.n, "particle count")->required();
    scan_cmd->add_option("--chi", scan_cfg.chi, "interaction strength");
    scan_cmd->add_option("--k", scan_cfg.k, "cross-coupling constant K");
    scan_cmd->add_option("--t-min", scan_cfg.t_min, "grid start");
    scan_cmd->add_option("--t-max", scan_cfg.t_max,
                         "grid end (<= 0 means pi/|2 chi (1-K)|)");
    scan_cmd->add_option("--t-points", scan_cfg.t_points, "grid size");
    scan_cmd->add_option("--objective", scan_cfg.objective,
                         "xi2_bar | e_hz_theta | e_hz | e_hz_t");
    scan_cmd->add_option("--workers", scan_cfg.workers,
                         "worker threads (0 = hardware)");
    scan_cmd->add_option("--format", scan_cfg.format, "csv | json");
    scan_cmd->add_option("--out", scan_cfg.out, "output path (default stdout)");

    OptimizeConfig opt_cfg;
    auto* opt_cmd =
        app.add_subcommand("optimize", "minimize an objective over time");
    opt_cmd->add_option("--n", opt_cfg.n, "particle count")->required();
    opt_cmd->add_option("--chi", opt_cfg.chi, "interaction strength");
    opt_cmd->add_option("--k", opt_cfg.k, "cross-coupling constant K");
    opt_cmd->add_option("--objective", opt_cfg.objective,
                        "xi2_bar | e_hz_theta | e_hz | e_hz_t");
    opt_cmd->add_option("--t-scan", opt_cfg.settings.t_scan,
                        "scan window (<= 0 means pi/|2 chi (1-K)|)");
    opt_cmd->add_option("--coarse-points", opt_cfg.settings.coarse_points,
                        "coarse grid size");
    opt_cmd->add_option("--t-tol", opt_cfg.settings.t_tol,
                        "time resolution of the refinement");
    opt_cmd->add_option("--workers", opt_cfg.workers,
                        "worker threads (0 = hardware)");
    opt_cmd->add_option("--out", opt_cfg.out, "output path (default stdout)");

    BoundsConfig bounds_cfg;
    auto* bounds_cmd = app.add_subcommand(
        "bounds", "build the certification bound table (CSV)");
    bounds_cmd->add_option("--two-s-max", bounds_cfg.two_s_max,
                           "largest tabulated 2S");
    bounds_cmd->add_option("--dense-max", bounds_cfg.dense_max,
                           "2S below which every half-integer is solved");
    bounds_cmd->add_option("--cs-per-decade", bounds_cfg.cs_per_decade,
                           "log-grid density of the variance bound");
    bounds_cmd->add_option("--zeta-per-decade", bounds_cfg.zeta_per_decade,
                           "log-grid density of the planar bound");
    bounds_cmd->add_flag("--no-zeta", bounds_cfg.no_zeta,
                         "skip the planar-squeezing column");
    bounds_cmd->add_option("--out", bounds_cfg.out,
                           "output path (default stdout)");

    DepthConfig depth_cfg;
    auto* depth_cmd = app.add_subcommand(
        "depth", "certified particle-number lower bound from measured scalars");
    depth_cmd->add_option("--ehz", depth_cfg.ehz, "measured e_hz")->required();
    depth_cmd->add_option("--r", depth_cfg.r, "measured contrast r");
    depth_cmd->add_option("--kind", depth_cfg.kind,
                          "entanglement | steering | pqs");
    depth_cmd->add_option("--bounds-table", depth_cfg.table_path,
                          "bound table CSV from the bounds command")
        ->required();
    depth_cmd->add_option("--out", depth_cfg.out, "output path (default stdout)");

    TableOneConfig t1_cfg;
    auto* t1_cmd = app.add_subcommand(
        "table1", "optimized ratio and certified depth per particle count");
    t1_cmd->add_option("--n", t1_cfg.n_list, "comma-separated particle counts")
        ->required()
        ->delimiter(',');
    t1_cmd->add_option("--chi", t1_cfg.chi, "interaction strength");
    t1_cmd->add_option("--k", t1_cfg.k, "cross-coupling constant K");
    t1_cmd->add_option("--bounds-table", t1_cfg.table_path,
                       "bound table CSV (built in-memory when omitted)");
    t1_cmd->add_option("--t-scan", t1_cfg.settings.t_scan,
                       "scan window (<= 0 means pi/|2 chi (1-K)|)");
    t1_cmd->add_option("--coarse-points", t1_cfg.settings.coarse_points,
                       "coarse grid size");
    t1_cmd->add_option("--t-tol", t1_cfg.settings.t_tol,
                       "time resolution of the refinement");
    t1_cmd->add_option("--workers", t1_cfg.workers,
                       "worker threads (0 = hardware)");
    t1_cmd->add_option("--format", t1_cfg.format, "csv | json");
    t1_cmd->add_option("--out", t1_cfg.out, "output path (default stdout)");

    CrosscheckConfig cross_cfg;
    auto* cross_cmd = app.add_subcommand(
        "crosscheck", "compare the sum and closed-form moment paths");
    cross_cmd->add_option("--n", cross_cfg.n, "particle count")->required();
    cross_cmd->add_option("--chi", cross_cfg.chi, "interaction strength");
    cross_cmd->add_option("--k", cross_cfg.k, "cross-coupling constant K");
    cross_cmd->add_option("--t-points", cross_cfg.t_points, "grid size");
    cross_cmd->add_option("--t-max", cross_cfg.t_max,
                          "grid end (<= 0 means 2 pi / |chi|)");
    cross_cmd->add_option("--tolerance", cross_cfg.tolerance,
                          "relative agreement required per field");
    cross_cmd->add_option("--out", cross_cfg.out,
                          "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string prov = provenance_line(argc, argv);
    try {
        std::string payload;
        std::string out;
        if (evolve_cmd->parsed()) {
            payload = run_evolve(evolve_cfg, prov);
            out = evolve_cfg.out;
        } else if (scan_cmd->parsed()) {
            payload = run_scan(scan_cfg, prov);
            out = scan_cfg.out;
        } else if (opt_cmd->parsed()) {
            payload = run_optimize(opt_cfg, prov);
            out = opt_cfg.out;
        } else if (bounds_cmd->parsed()) {
            payload = run_bounds(bounds_cfg, prov);
            out = bounds_cfg.out;
        } else if (depth_cmd->parsed()) {
            payload = run_depth(depth_cfg, prov);
            out = depth_cfg.out;
        } else if (t1_cmd->parsed()) {
            payload = run_table_one(t1_cfg, prov);
            out = t1_cfg.out;
        } else if (cross_cmd->parsed()) {
            payload = run_crosscheck(cross_cfg, prov);
            out = cross_cfg.out;
        } else {
            std::cerr << "error: no command selected\n";
            return 2;
        }
        write_atomic(out, payload);
        return 0;
    } catch (const ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace twomode
