// rfso: sweeps, validation and raw sampling for the RF/FSO relay link model.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error.

#include "rfso/sweep.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

struct Common {
    std::string scenario;
    std::string out;
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) items.push_back(item);
    return items;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rfso::ConfigInvalid("--out: cannot write '" + path + "'");
    f << text;
}

int run_sweep_cmd(const Common& c, const std::string& axis, const std::string& grid, const std::string& outputs) {
    const auto sc = rfso::load_scenario(c.scenario);
    rfso::SweepSpec spec = sc.sweep.value_or(rfso::SweepSpec{});
    if (!axis.empty()) spec.axis = rfso::axis_from_string(axis);
    if (!grid.empty()) spec.grid = rfso::parse_grid_text(grid);
    if (!outputs.empty()) spec.outputs = split_list(outputs);
    if (c.trials) spec.trials = *c.trials;
    if (c.seed) spec.seed = *c.seed;
    spec.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const auto table = rfso::run_sweep(sc, spec, c.workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto csv = rfso::to_csv(table);
    if (c.out.empty()) {
        std::cout << csv;
    } else {
        write_text(c.out, csv);
        write_text(c.out + ".meta.json", rfso::sweep_metadata(sc, spec, table, wall).dump(2) + "\n");
    }
    for (const auto& e : table.errors) std::cerr << "warning: " << e << '\n';
    return exit_ok;
}

int run_validate_cmd(const Common& c) {
    const auto sc = rfso::load_scenario(c.scenario);
    const std::int64_t trials = c.trials.value_or(sc.sweep ? sc.sweep->trials : 1'000'000);
    const std::uint64_t seed = c.seed.value_or(sc.sweep ? sc.sweep->seed : 1);
    if (trials < rfso::mc_min_trials) throw rfso::ConfigInvalid("--trials: must be >= 10000");
    const auto rep = rfso::validate_scenario(sc, trials, seed, c.workers);
    std::cout << "scenario: " << sc.name << " (" << sc.label << "), trials " << trials << ", seed " << seed << '\n';
    std::cout << rfso::format_report(rep);
    if (!c.out.empty()) {
        auto j = rfso::report_json(rep);
        j["scenario"] = rfso::resolved_json(sc);
        j["trials"] = trials;
        j["seed"] = seed;
        j["tool_version"] = rfso::tool_version;
        write_text(c.out, j.dump(2) + "\n");
    }
    return rep.passed() ? exit_ok : exit_fail;
}

int run_sample_cmd(const Common& c) {
    const auto sc = rfso::load_scenario(c.scenario);
    const std::int64_t n = c.trials.value_or(10'000);
    if (n < 1) throw rfso::ConfigInvalid("--trials: must be >= 1");
    const std::uint64_t seed = c.seed.value_or(1);
    const double C = rfso::gain_constant(sc.link);

    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out, std::ios::binary);
        if (!file) throw rfso::ConfigInvalid("--out: cannot write '" + c.out + "'");
    }
    std::ostream& out = c.out.empty() ? std::cout : file;
    out << "gamma1,irradiance,gamma2,sndr\n";
    // Same chunked streams as the estimators, so samples line up with them.
    for (std::int64_t chunk = 0; chunk * rfso::mc_chunk_size < n; ++chunk) {
        rfso::Philox4x32 rng(seed, rfso::stream_id(0, std::uint64_t(chunk)));
        const std::int64_t count = std::min(rfso::mc_chunk_size, n - chunk * rfso::mc_chunk_size);
        for (std::int64_t i = 0; i < count; ++i) {
            const auto s = rfso::draw_trial(sc.link, C, rng);
            out << rfso::format_value(s.gamma1) << ',' << rfso::format_value(s.irradiance) << ','
                << rfso::format_value(s.gamma2) << ',' << rfso::format_value(s.sndr) << '\n';
        }
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RF/FSO dual-hop relay link: analytic and Monte Carlo outage and capacity"};
    app.set_version_flag("--version", rfso::tool_version);
    app.require_subcommand(1);

    Common c;
    std::string axis, grid, outputs;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", c.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "output path (stdout when omitted)");
        sub->add_option("--trials", c.trials, "Monte Carlo trials (sample: number of rows)");
        sub->add_option("--seed", c.seed, "root seed");
        sub->add_option("--workers", c.workers, "worker threads, 0 = all cores");
    };

    auto* sweep = app.add_subcommand("sweep", "evaluate curves over a grid and write CSV plus a .meta.json sidecar");
    add_common(sweep);
    sweep->add_option("--axis", axis, "avg_snr_db or gamma_th_db");
    sweep->add_option("--grid", grid, "start:stop:step in dB");
    sweep->add_option("--outputs", outputs,
                      "comma list of op_closed,op_quad,op_mc,ec_bound,ec_approx,ec_numeric,ec_mc,ceilings");

    auto* validate = app.add_subcommand("validate", "compare analytic results against Monte Carlo");
    add_common(validate);

    auto* sample = app.add_subcommand("sample", "dump raw channel and SNDR samples as CSV");
    add_common(sample);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (sweep->parsed()) return run_sweep_cmd(c, axis, grid, outputs);
        if (validate->parsed()) return run_validate_cmd(c);
        return run_sample_cmd(c);
    } catch (const rfso::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
}
