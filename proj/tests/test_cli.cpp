#include "twomode/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("twomode");
    for (const auto& a : args) argv.push_back(a.c_str());
    return twomode::run(static_cast<int>(argv.size()), argv.data());
}

fs::path out_path(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("twomode_cli_" + name);
    std::error_code ec;
    fs::remove(p, ec);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

constexpr const char* kScanHeader =
    "t,theta,var_sx,var_sy,var_sz,var_stheta,mean_sx,e_hz,e_hz_t,e_hz_theta,"
    "xi2,xi2_bar,r,r_parallel";

}  // namespace

TEST_CASE("missing or unknown commands exit 2") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"bogus"}) == 2);
    CHECK(run_cli({"scan"}) == 2);  // --n is required
}

TEST_CASE("evolve at t = 0 emits the splitter state") {
    const auto out = out_path("evolve.json");
    CHECK(run_cli({"evolve", "--n", "4", "--k", "-1", "--chi", "1", "--t", "0",
                   "--out", out.string()}) == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    REQUIRE(doc.contains("provenance"));
    REQUIRE(doc.contains("result"));
    CHECK_FALSE(doc["provenance"].get<std::string>().empty());

    const auto& result = doc["result"];
    CHECK(result["n_total"].get<long long>() == 4);
    const auto& amps = result["amplitudes"];
    REQUIRE(amps.size() == 5);
    CHECK(amps[0][0].get<double>() == doctest::Approx(0.25));
    CHECK(amps[0][1].get<double>() == doctest::Approx(0.0));
    CHECK(amps[2][0].get<double>() ==
          doctest::Approx(std::sqrt(6.0) / 4.0));
    CHECK(result["moments"]["mean_sx"].get<double>() == doctest::Approx(2.0));
    CHECK(result["moments"]["second_zz"].get<double>() == doctest::Approx(1.0));
    fs::remove(out);
}

TEST_CASE("scan writes provenance plus the pinned CSV header") {
    const auto out = out_path("scan.csv");
    CHECK(run_cli({"scan", "--n", "12", "--t-min", "0.01", "--t-max", "0.2",
                   "--t-points", "5", "--out", out.string()}) == 0);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 7);  // provenance + header + 5 rows
    CHECK(lines[0].rfind("# provenance: twomode", 0) == 0);
    CHECK(lines[1] == kScanHeader);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        std::size_t commas = 0;
        for (char c : lines[i]) commas += (c == ',');
        CHECK(commas == 13);
    }
    CHECK(lines[2].rfind("0.01", 0) == 0);
    fs::remove(out);
}

TEST_CASE("identical flags give byte-identical output") {
    const auto a = out_path("rerun.csv");
    const std::vector<std::string> args = {
        "scan",    "--n",        "9",  "--t-min", "0.02",
        "--t-max", "0.3",        "--t-points", "11", "--out", a.string()};
    CHECK(run_cli(args) == 0);
    const std::string first = slurp(a);
    CHECK(run_cli(args) == 0);
    CHECK(slurp(a) == first);

    const auto oa = out_path("opt.json");
    const std::vector<std::string> opt_args = {
        "optimize", "--n", "16", "--coarse-points", "200", "--out", oa.string()};
    CHECK(run_cli(opt_args) == 0);
    const std::string opt_first = slurp(oa);
    CHECK(run_cli(opt_args) == 0);
    CHECK(slurp(oa) == opt_first);
    for (const auto& p : {a, oa}) fs::remove(p);
}

TEST_CASE("invalid arguments exit 2 without leaving output") {
    const auto out = out_path("never.csv");
    CHECK(run_cli({"scan", "--n", "12", "--t-points", "0", "--out",
                   out.string()}) == 2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_cli({"evolve", "--n", "-3", "--out", out.string()}) == 2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_cli({"depth", "--ehz", "0.3", "--out", out.string()}) == 2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_cli({"depth", "--ehz", "0.3", "--bounds-table",
                   "/nonexistent/table.csv", "--out", out.string()}) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("bounds builds a table that depth and table1 consume") {
    const auto table = out_path("table.csv");
    CHECK(run_cli({"bounds", "--two-s-max", "24", "--dense-max", "24", "--out",
                   table.string()}) == 0);
    const auto lines = lines_of(slurp(table));
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0].rfind("# provenance:", 0) == 0);
    CHECK(lines[1] == "two_s,c_s,c_tilde,zeta2");

    const auto depth_out = out_path("depth.json");
    CHECK(run_cli({"depth", "--ehz", "0.3", "--r", "1.0", "--kind", "steering",
                   "--bounds-table", table.string(), "--out",
                   depth_out.string()}) == 0);
    auto doc = nlohmann::json::parse(slurp(depth_out));
    CHECK(doc["result"]["certified"].get<bool>());
    CHECK(doc["result"]["kind"].get<std::string>() == "steering");
    CHECK(doc["result"]["n_lower_bound"].get<long long>() >= 3);
    CHECK(doc["result"]["margin"].get<double>() > 0.0);

    const auto pqs_out = out_path("pqs.json");
    CHECK(run_cli({"depth", "--ehz", "0.3", "--kind", "pqs", "--bounds-table",
                   table.string(), "--out", pqs_out.string()}) == 0);
    auto pqs = nlohmann::json::parse(slurp(pqs_out));
    CHECK(pqs["result"]["certified"].get<bool>());
    CHECK(pqs["result"]["kind"].get<std::string>() == "pqs");

    const auto t1 = out_path("table1.csv");
    CHECK(run_cli({"table1", "--n", "20,30", "--k", "-1", "--bounds-table",
                   table.string(), "--out", t1.string()}) == 0);
    const auto t1_lines = lines_of(slurp(t1));
    REQUIRE(t1_lines.size() == 4);  // provenance + header + 2 rows
    CHECK(t1_lines[1] ==
          "n,t_opt,theta_opt,e_hz_theta,r,ratio,certified,s0,n_lower_bound,"
          "c_tilde_at_s0,ok,error");
    CHECK(t1_lines[2].rfind("20,", 0) == 0);
    CHECK(t1_lines[3].rfind("30,", 0) == 0);

    for (const auto& p : {table, depth_out, pqs_out, t1}) fs::remove(p);
}

TEST_CASE("crosscheck passes at sane tolerance and reports the sweep") {
    const auto out = out_path("cross.json");
    CHECK(run_cli({"crosscheck", "--n", "40", "--k", "-1", "--chi", "1",
                   "--t-points", "10", "--out", out.string()}) == 0);
    auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["result"]["pass"].get<bool>());
    CHECK(doc["result"]["points"].get<int>() == 10);
    CHECK(doc["result"]["worst"].get<double>() < 1e-9);
    fs::remove(out);
}

TEST_CASE("crosscheck at an impossible tolerance exits 4 without output") {
    const auto out = out_path("cross_fail.json");
    CHECK(run_cli({"crosscheck", "--n", "400", "--t-points", "5",
                   "--tolerance", "1e-18", "--out", out.string()}) == 4);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("optimize emits a self-consistent record") {
    const auto out = out_path("opt.json");
    CHECK(run_cli({"optimize", "--n", "24", "--objective", "e_hz_theta",
                   "--coarse-points", "300", "--out", out.string()}) == 0);
    auto doc = nlohmann::json::parse(slurp(out));
    const auto& result = doc["result"];
    CHECK(result["t"].get<double>() > 0.0);
    CHECK(result["objective"].get<std::string>() == "e_hz_theta");
    CHECK(result["value"].get<double>() ==
          doctest::Approx(result["row"]["e_hz_theta"].get<double>()));
    CHECK(result["bracketed"].get<bool>());
    CHECK(doc["provenance"].get<std::string>().find("optimize") !=
          std::string::npos);
    fs::remove(out);
}
