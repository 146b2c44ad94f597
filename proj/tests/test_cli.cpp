#include "oracles.hpp"
#include "rfso/sweep.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>

using namespace rfso;
using nlohmann::json;

namespace {

json default_doc() {
    return json::parse(R"({
        "name": "default",
        "rf": {"relays": 3, "rank": 2, "rho": 0.7, "avg_snr_db": 20},
        "optical": {"beta1": 1, "beta2": 1, "detection": "heterodyne", "avg_snr_db": 20},
        "impairments": {"kappa1": 0.1, "kappa2": 0.1},
        "gamma_th_db": 5,
        "sweep": {"axis": "avg_snr_db", "grid": {"start": 0, "stop": 30, "step": 10},
                  "outputs": ["op_closed", "op_quad", "ec_bound", "ceilings"], "trials": 100000, "seed": 3}
    })");
}

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigInvalid& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::filesystem::path temp_dir() {
    auto d = std::filesystem::temp_directory_path() / "rfso_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

std::filesystem::path write_scenario(const std::string& name, const json& doc) {
    const auto p = temp_dir() / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RFSO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Scenario, ParsesDefault) {
    const auto sc = parse_scenario(default_doc());
    EXPECT_EQ(sc.link.rf.relays, 3);
    EXPECT_NEAR(sc.link.optical.avg_snr, 100.0, 1e-12);
    ASSERT_TRUE(sc.sweep);
    EXPECT_EQ(sc.sweep->grid.size(), 4u);
    EXPECT_EQ(sc.sweep->seed, 3u);
}

TEST(Scenario, ErrorsNameTheField) {
    auto doc = default_doc();
    doc["rf"]["rank"] = 5;
    EXPECT_NE(config_error(doc).find("rf.rank"), std::string::npos);

    doc = default_doc();
    doc["optical"]["detection"] = "coherent";
    EXPECT_NE(config_error(doc).find("detection"), std::string::npos);

    doc = default_doc();
    doc["optical"]["beta1"] = "two";
    EXPECT_NE(config_error(doc).find("optical.beta1"), std::string::npos);

    doc = default_doc();
    doc["impairments"]["kappa3"] = 0.1;
    EXPECT_NE(config_error(doc).find("impairments.kappa3: unknown field"), std::string::npos);

    doc = default_doc();
    doc["rf"].erase("avg_snr_db");
    EXPECT_NE(config_error(doc).find("rf.avg_snr_db: missing"), std::string::npos);

    doc = default_doc();
    doc["sweep"]["outputs"] = json::array({"op_closed", "bogus"});
    EXPECT_NE(config_error(doc).find("sweep.outputs: unknown output 'bogus'"), std::string::npos);
}

TEST(Scenario, SeveralErrorsReportedTogether) {
    auto doc = default_doc();
    doc["rf"]["rho"] = 1.5;
    doc["impairments"]["kappa1"] = -0.1;
    doc["optical"]["extra"] = 1;
    const auto msg = config_error(doc);
    EXPECT_NE(msg.find("optical.extra"), std::string::npos) << msg;
}

TEST(Scenario, JakesCorrelation) {
    auto doc = default_doc();
    doc["rf"].erase("rho");
    doc["rf"]["doppler_hz"] = 10.0;
    doc["rf"]["delay_s"] = 0.01;
    const auto sc = parse_scenario(doc);
    EXPECT_NEAR(sc.link.rf.rho, boost::math::cyl_bessel_j(0, 2.0 * std::numbers::pi * 0.1), 1e-12);
    doc["rf"]["rho"] = 0.3;
    EXPECT_NE(config_error(doc).find("rf.rho"), std::string::npos);
}

TEST(SweepSpec, EmptyOutputsRejected) {
    SweepSpec s;
    s.grid = {0.0, 1.0};
    EXPECT_THROW(s.validate(), ConfigInvalid);
    s.outputs = {"op_quad"};
    EXPECT_NO_THROW(s.validate());
    s.grid = {1.0, 0.0};
    EXPECT_THROW(s.validate(), ConfigInvalid);
    s.grid = {0.0, 1.0};
    s.outputs = {"op_mc"};
    s.trials = 5000;
    EXPECT_THROW(s.validate(), ConfigInvalid);
}

TEST(Grid, InclusiveLattice) {
    const auto g = make_grid(0.0, 1.0, 0.05);
    ASSERT_EQ(g.size(), 21u);
    EXPECT_EQ(g[7], 0.35);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_EQ(parse_grid_text("0:40:5").size(), 9u);
    EXPECT_THROW(parse_grid_text("0:40"), ConfigInvalid);
    EXPECT_THROW(make_grid(0.0, 1.0, 0.0), ConfigInvalid);
}

TEST(Sweep, CsvRoundTripIsExact) {
    const auto sc = parse_scenario(default_doc());
    const auto t = run_sweep(sc, *sc.sweep, 1);
    const auto csv = to_csv(t);
    std::istringstream in(csv);
    const auto back = read_csv(in);
    ASSERT_EQ(back.columns, t.columns);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].abscissa_db, t.rows[i].abscissa_db);
        EXPECT_EQ(back.rows[i].values, t.rows[i].values);
    }
    EXPECT_EQ(to_csv(back), csv);
}

TEST(Sweep, NullAndInfinityCells) {
    CurveTable t;
    t.columns = {"a", "b"};
    t.rows.push_back({1.5, {std::nullopt, std::numeric_limits<double>::infinity()}});
    std::istringstream in(to_csv(t));
    const auto back = read_csv(in);
    EXPECT_FALSE(back.rows[0].values[0]);
    EXPECT_TRUE(std::isinf(*back.rows[0].values[1]));
}

TEST(Sweep, ColumnOrderIsCanonical) {
    auto sc = parse_scenario(default_doc());
    auto spec = *sc.sweep;
    spec.outputs = {"ceilings", "op_quad"};
    const auto t = run_sweep(sc, spec, 1);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"op_quad", "sndr_ceiling_db", "capacity_ceiling"}));
}

TEST(Sweep, FailedPointsAreNullNotFatal) {
    auto doc = default_doc();
    doc["optical"]["beta1"] = 10.0 / 9.0;
    doc["optical"]["beta2"] = 10.0 / 9.0;
    const auto sc = parse_scenario(doc);
    const auto t = run_sweep(sc, *sc.sweep, 1);
    EXPECT_FALSE(t.at(0, "op_closed"));
    EXPECT_TRUE(t.at(0, "op_quad"));
    EXPECT_FALSE(t.errors.empty());
}

TEST(Sweep, MonteCarloIndependentOfWorkers) {
    auto sc = parse_scenario(default_doc());
    auto spec = *sc.sweep;
    spec.outputs = {"op_mc", "ec_mc"};
    spec.trials = 50'000;
    EXPECT_EQ(to_csv(run_sweep(sc, spec, 1)), to_csv(run_sweep(sc, spec, 3)));
    spec.axis = SweepAxis::gamma_th_db;
    EXPECT_EQ(to_csv(run_sweep(sc, spec, 1)), to_csv(run_sweep(sc, spec, 2)));
}

TEST(Validate, DefaultScenarioPasses) {
    const auto sc = parse_scenario(default_doc());
    const auto rep = validate_scenario(sc, 200'000, 11, 1);
    EXPECT_TRUE(rep.passed()) << format_report(rep);
    for (const auto& r : rep.rows)
        if (r.quantity == "ec_approx") EXPECT_EQ(r.status, CheckStatus::info);
}

TEST(Validate, NegativeControlFails) {
    auto doc = default_doc();
    doc["diagnostics"] = {{"analytic_delta_override", 0.5}};
    const auto sc = parse_scenario(doc);
    const auto rep = validate_scenario(sc, 200'000, 11, 1);
    EXPECT_FALSE(rep.passed());
    EXPECT_NE(format_report(rep).find("FAIL"), std::string::npos);
}

TEST(Validate, IdealHardwareHasNoCeiling) {
    auto doc = default_doc();
    doc["impairments"] = {{"kappa1", 0.0}, {"kappa2", 0.0}};
    const auto rep = validate_scenario(parse_scenario(doc), 100'000, 2, 1);
    EXPECT_NE(format_report(rep).find("none (ideal hardware)"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const auto good = write_scenario("good.json", default_doc());
    auto bad_doc = default_doc();
    bad_doc["rf"]["rank"] = 9;
    const auto bad = write_scenario("bad.json", bad_doc);
    auto neg_doc = default_doc();
    neg_doc["diagnostics"] = {{"analytic_delta_override", 0.5}};
    const auto neg = write_scenario("neg.json", neg_doc);
    const auto out = temp_dir() / "out.csv";

    EXPECT_EQ(run_cli("sweep --scenario " + good.string() + " --out " + out.string()), 0);
    EXPECT_TRUE(std::filesystem::exists(out.string() + ".meta.json"));
    EXPECT_EQ(run_cli("sweep --scenario " + bad.string()), 2);
    EXPECT_EQ(run_cli("sweep --scenario " + good.string() + " --outputs nothing"), 2);
    EXPECT_EQ(run_cli("sweep --scenario " + good.string() + " --grid 0:1"), 2);
    EXPECT_EQ(run_cli("sweep --scenario /nonexistent.json"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("validate --scenario " + good.string() + " --trials 100000"), 0);
    EXPECT_EQ(run_cli("validate --scenario " + neg.string() + " --trials 100000"), 1);
    EXPECT_EQ(run_cli("validate --scenario " + good.string() + " --trials 10"), 2);
    EXPECT_EQ(run_cli("sample --scenario " + good.string() + " --trials 5 --out " + out.string()), 0);
}

TEST(Cli, SweepOutputIsByteIdentical) {
    auto doc = default_doc();
    doc["sweep"]["outputs"] = json::array({"op_quad", "op_mc", "ec_mc"});
    const auto sc = write_scenario("mc.json", doc);
    const auto a = temp_dir() / "a.csv", b = temp_dir() / "b.csv";
    ASSERT_EQ(run_cli("sweep --scenario " + sc.string() + " --workers 1 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("sweep --scenario " + sc.string() + " --workers 2 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto meta = json::parse(slurp(a.string() + ".meta.json"));
    EXPECT_EQ(meta["sweep"]["seed"], 3);
    EXPECT_EQ(meta["scenario"]["rf"]["relays"], 3);
}

TEST(Cli, SampleMatchesLibraryStream) {
    const auto sc_path = write_scenario("sample.json", default_doc());
    const auto out = temp_dir() / "sample.csv";
    ASSERT_EQ(run_cli("sample --scenario " + sc_path.string() + " --trials 3 --seed 7 --out " + out.string()), 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "gamma1,irradiance,gamma2,sndr");
    const auto sc = parse_scenario(default_doc());
    Philox4x32 rng(7, stream_id(0, 0));
    const auto s = draw_trial(sc.link, gain_constant(sc.link), rng);
    std::getline(in, line);
    EXPECT_EQ(line, format_value(s.gamma1) + "," + format_value(s.irradiance) + "," + format_value(s.gamma2) + "," +
                        format_value(s.sndr));
}
