#include "fracobs/cli_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace fracobs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::index;
}

json small_config()
{
    return json::parse(R"({
      "problem": {"s": 0.5, "grid": {"x_min": -4, "x_max": 4, "nodes": 256}, "T": 0.1,
                  "psi": {"kind": "gaussian_bump", "center": 0, "width": 0.5, "height": 1}},
      "scheme": {"dt": 0.01, "record_every": 2},
      "checks": ["monitors"]
    })");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("fracobs_test_cli_io_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Config, defaultsAndEcho)
{
    const RunConfig c = parse_run_config(small_config());
    EXPECT_EQ(c.nodes, 256u);
    EXPECT_EQ(c.scheme.scheme, Scheme::projection);
    EXPECT_EQ(c.scheme.generator, Generator::spectral);
    EXPECT_EQ(c.psi.payoff.kind, PayoffKind::gaussian_bump);
    EXPECT_FALSE(c.u0.has_value());
    EXPECT_EQ(c.slice_path, "slices.csv");
    EXPECT_EQ(c.checks, std::vector<std::string>{"monitors"});

    const json echo = to_json(c);
    EXPECT_EQ(to_json(parse_run_config(echo)), echo);
}

TEST(Config, strictness)
{
    auto with = [](auto edit) {
        json j = small_config();
        edit(j);
        return kind_of([&] { parse_run_config(j); });
    };
    EXPECT_EQ(with([](json& j) { j["extra"] = 1; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["problem"]["grid"]["n"] = 3; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["problem"]["s"] = "half"; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["problem"]["psi"]["kind"] = "call"; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["scheme"]["scheme"] = "explicit"; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["scheme"]["record_every"] = 0; }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["checks"] = json::array({"lemmas"}); }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["problem"].erase("psi"); }), ErrorKind::configuration);
    EXPECT_EQ(with([](json& j) { j["seed"] = -1; }), ErrorKind::configuration);
    EXPECT_EQ(kind_of([] { load_run_config("/nonexistent/config.json"); }), ErrorKind::configuration);
}

TEST(Config, randomObstacleFollowsSeed)
{
    json j = small_config();
    j["problem"]["psi"] = {{"kind", "random"}};
    j["seed"] = 5;
    RunConfig c = parse_run_config(j);
    EXPECT_TRUE(c.psi.random);
    const ProblemSpec a = build_problem(c);
    const ProblemSpec b = build_problem(c);
    EXPECT_EQ(linf_diff(a.psi, b.psi), 0.0);
    c.seed = 6;
    EXPECT_GT(linf_diff(a.psi, build_problem(c).psi), 0.0);
}

TEST(ExitCodes, mapping)
{
    for (ErrorKind k : {ErrorKind::parameter, ErrorKind::shape, ErrorKind::data,
                        ErrorKind::configuration, ErrorKind::resolution}) {
        EXPECT_EQ(exit_code(k), exit_config) << to_string(k);
    }
    for (ErrorKind k : {ErrorKind::numerical, ErrorKind::degenerate, ErrorKind::index}) {
        EXPECT_EQ(exit_code(k), exit_numerical) << to_string(k);
    }
}

TEST(SliceCsv, roundTripIsExact)
{
    const RunConfig c = parse_run_config(small_config());
    const ProblemSpec p = build_problem(c);
    const SpectralOp op = build_spectral(p.grid, p.s);
    const Solution sol = solve(p, c.scheme, op);

    std::stringstream ss;
    write_slices_csv(ss, p, sol, op);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "t,x,u,psi,flap,contact");
    ss.seekg(0);
    const SliceSet back = read_slices_csv(ss);

    EXPECT_EQ(back.grid.size(), p.grid.size());
    EXPECT_EQ(back.grid.spacing(), p.grid.spacing());
    EXPECT_EQ(back.times, sol.times);
    ASSERT_EQ(back.slices.size(), sol.slices.size());
    for (std::size_t k = 0; k < sol.slices.size(); ++k) {
        for (std::size_t i = 0; i < p.grid.size(); ++i) {
            ASSERT_EQ(back.slices[k][i], sol.slices[k][i]);
        }
    }
    for (std::size_t i = 0; i < p.grid.size(); ++i) EXPECT_EQ(back.psi[i], p.psi[i]);
}

TEST(SliceCsv, rejectsBadInput)
{
    std::stringstream empty;
    EXPECT_EQ(kind_of([&] { read_slices_csv(empty); }), ErrorKind::data);
    std::stringstream header("t,x,u\n0,0,0\n");
    EXPECT_EQ(kind_of([&] { read_slices_csv(header); }), ErrorKind::data);
    std::stringstream row("t,x,u,psi,flap,contact\n0,0,abc,0,0,1\n");
    EXPECT_EQ(kind_of([&] { read_slices_csv(row); }), ErrorKind::data);
    std::stringstream back("t,x,u,psi,flap,contact\n1,0,0,0,0,1\n0,0,0,0,0,1\n");
    EXPECT_EQ(kind_of([&] { read_slices_csv(back); }), ErrorKind::data);
}

TEST(Report, finitenessGuard)
{
    EXPECT_NO_THROW(require_finite(json{{"a", 1.0}, {"b", {1, 2.5}}}));
    const json bad{{"a", {{"b", std::numeric_limits<double>::quiet_NaN()}}}};
    EXPECT_EQ(kind_of([&] { require_finite(bad); }), ErrorKind::numerical);
    const json inf = json::array({1.0, std::numeric_limits<double>::infinity()});
    EXPECT_EQ(kind_of([&] { require_finite(inf); }), ErrorKind::numerical);
    EXPECT_FALSE(provenance().dump().empty());
}

TEST(Solve, byteIdenticalOutputs)
{
    RunConfig c = parse_run_config(small_config());
    c.checks = {"monitors", "exponents"};
    std::ostringstream log;
    const fs::path a = scratch("a"), b = scratch("b");
    const int ca = cmd_solve(c, a, log);
    const int cb = cmd_solve(c, b, log);
    EXPECT_EQ(ca, cb);
    EXPECT_EQ(slurp(a / "slices.csv"), slurp(b / "slices.csv"));
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));

    const json report = json::parse(slurp(a / "report.json"));
    EXPECT_EQ(report["document"], "fracobs-report");
    for (const auto& check : report["checks"]) {
        EXPECT_TRUE(check.contains("tolerance"));
        EXPECT_TRUE(check.contains("passed"));
    }
    EXPECT_EQ(report["hard_checks_pass"].get<bool>(), ca == exit_ok);
}

TEST(Solve, penalizationStepTooLarge)
{
    json j = small_config();
    j["scheme"]["scheme"] = "penalization";
    j["scheme"]["epsilon"] = 0.01;
    std::ostringstream log;
    try {
        cmd_solve(parse_run_config(j), scratch("pen"), log);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(exit_code(e.kind()), exit_config);
        EXPECT_NE(std::string(e.what()).find("exp(-s/eps)"), std::string::npos);
    }
}

TEST(Selftest, unknownSkipIsConfigurationExit)
{
    SelftestOptions o;
    o.skip = {"nope"};
    std::ostringstream log;
    EXPECT_EQ(cmd_selftest(o, log), exit_config);
}

TEST(RefinementStudy, supportsTolerances)
{
    std::ifstream in(fs::path(FRACOBS_FIXTURES) / "refinement_study.json");
    ASSERT_TRUE(in);
    const json study = json::parse(in);
    const double td = study["tolerances"]["detach"], tf = study["tolerances"]["flap"];
    for (const auto& run : study["runs"]) {
        if (run["nodes"].get<std::size_t>() < 2048) continue;
        const double s = run["s"];
        if (s == 0.5) {
            EXPECT_LE(std::abs(run["detach"].get<double>() - 1.5), td) << run.dump();
            EXPECT_LE(std::abs(run["flap"].get<double>() - 0.5), tf) << run.dump();
        } else {
            EXPECT_LE(std::abs(run["flap"].get<double>() - 0.25), tf) << run.dump();
        }
    }
    // Stored normalization constants stay within 0.5% of the closed form.
    for (const auto& row : study["normalization"]) {
        const double c = row["closed_form"];
        EXPECT_NEAR(row["fitted_2048"].get<double>() / c, 1.0, 0.005);
        EXPECT_NEAR(row["fitted_4096"].get<double>() / c, 1.0, 0.005);
        EXPECT_NEAR(normalization_constant(row["s"].get<double>()), c, 1e-15);
    }
}

TEST(RefinementStudy, reproducesStoredRun)
{
    std::ifstream in(fs::path(FRACOBS_FIXTURES) / "refinement_study.json");
    const json study = json::parse(in);
    const ProblemSpec p = reference_put(0.5, 2048, 1.0);
    SchemeConfig c;
    c.dt = 1e-3;
    c.record_every = 10;
    const SpectralOp op = build_spectral(p.grid, 0.5);
    const RegularityReport r = build_report(p, solve(p, c, op), op);
    bool found = false;
    for (const auto& run : study["runs"]) {
        if (run["s"] == 0.5 && run["nodes"] == 2048 && run["dt"] == 1e-3) {
            found = true;
            EXPECT_DOUBLE_EQ(run["detach"].get<double>(), r.detach.fit.exponent);
            EXPECT_DOUBLE_EQ(run["flap"].get<double>(), r.flap.fit.exponent);
        }
    }
    EXPECT_TRUE(found);
}
