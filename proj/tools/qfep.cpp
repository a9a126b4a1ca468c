// qfep <scenario> --config FILE --seed N --out DIR [--exact | --shots N]

#include <iostream>

#include <CLI11.hpp>

#include "qfep/error.hpp"
#include "qfep/harness.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Run a registered qfep scenario"};
    std::string scenario;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    bool exact = false;
    std::size_t shots = 0;
    bool list = false;

    app.add_flag("--list", list, "List registered scenarios and exit");
    app.add_option("scenario", scenario, "Scenario name");
    app.add_option("--config", config, "INI configuration file")->check(CLI::ExistingFile);
    auto *seed_opt = app.add_option("--seed", seed, "Root RNG seed");
    auto *out_opt = app.add_option("--out", out, "Output directory");
    auto *exact_opt = app.add_flag("--exact", exact, "Use exact (trace formula) statistics");
    auto *shots_opt = app.add_option("--shots", shots, "Sample this many shots per statistic")->check(CLI::PositiveNumber);
    exact_opt->excludes(shots_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list) {
        for (const auto &n : qfep::scenario_names()) std::cout << n << '\n';
        return 0;
    }
    if (scenario.empty() || seed_opt->count() == 0 || out_opt->count() == 0) {
        std::cerr << "usage: qfep <scenario> --config FILE --seed N --out DIR [--exact | --shots N]\n";
        return 2;
    }

    try {
        if (!qfep::has_scenario(scenario)) {
            std::cerr << "unknown scenario '" << scenario << "'; registered scenarios:\n";
            for (const auto &n : qfep::scenario_names()) std::cerr << "  " << n << '\n';
            return 2;
        }
        std::optional<std::filesystem::path> cfg;
        if (!config.empty()) cfg = config;
        qfep::RunConfig rc = qfep::load_run_config(scenario, cfg, seed, out);
        if (exact) rc.shots = 0;
        if (shots_opt->count()) rc.shots = shots;
        const qfep::RunOutput r = qfep::run(rc);
        for (const auto &[name, _] : r.files) std::cout << (rc.out_dir / name).string() << '\n';
        return 0;
    } catch (const qfep::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == qfep::ErrorKind::validation_error || e.kind() == qfep::ErrorKind::parse_error ? 2 : 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
