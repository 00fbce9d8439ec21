// lambda-soliton: analytic Maxwell-Bloch soliton scenarios from the command line.
//
// Exit status: 0 success, 1 verification failed, 2 bad input, 3 numerical failure.

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/pipeline.hpp"
#include "lambda_soliton/presets.hpp"
#include "lambda_soliton/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace ls = lambda_soliton;

namespace {

int exit_code_for(const ls::Error& e)
{
    return ls::is_numerical(e.code()) ? 3 : 2;
}

int run_verify(const ls::ScenarioConfig& cfg, const std::string& level, const std::string& report_path)
{
    const auto report = ls::verify(cfg, level == "full" ? ls::VerifyLevel::Full : ls::VerifyLevel::Fast);
    const std::string text = report.to_json().dump(2);
    if (report_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream(report_path) << text << "\n";
    }
    for (const auto& c : report.checks)
        std::cerr << (c.passed ? "pass  " : "FAIL  ") << c.name << "  value=" << c.value << "  tol=" << c.tolerance
                  << "\n";
    if (const auto* f = report.first_failure()) {
        std::cerr << "verification failed: " << f->name << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact soliton solutions of the Lambda-system Maxwell-Bloch equations"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", preset, level = "fast", report_path;
    bool dump = false;

    auto* simulate = app.add_subcommand("simulate", "evaluate a scenario and write CSV data and report.json");
    simulate->add_option("--config", config_path, "scenario file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_flag("--dump-config", dump, "print the parsed scenario and exit");

    auto* figure = app.add_subcommand("figure", "write the data of a figure preset");
    figure->add_option("preset", preset, "pulse1 den1 pulse2 den2 pulse3 den3")->required();
    figure->add_option("--out", out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "run the invariant and convergence checks of a scenario");
    auto* cfg_opt = verify->add_option("--config", config_path, "scenario file");
    auto* preset_opt = verify->add_option("--preset", preset, "verify a preset scenario instead of a file");
    cfg_opt->excludes(preset_opt);
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--report", report_path, "write the JSON report here instead of stdout");
    verify->add_flag("--dump-config", dump, "print the parsed scenario and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate) {
            const auto cfg = ls::load_config(config_path);
            if (dump) {
                std::cout << ls::dump_config(cfg);
                return 0;
            }
            const auto report = ls::simulate(cfg, out_dir);
            std::cerr << "wrote " << report["files"].dump() << " and report.json to " << out_dir << "\n";
            return 0;
        }
        if (*figure) {
            const auto p = ls::make_preset(preset);
            ls::run_figure(p, out_dir);
            std::cerr << "wrote preset " << preset << " to " << out_dir << "\n";
            return 0;
        }
        if (*verify) {
            if (config_path.empty() && preset.empty()) {
                std::cerr << "verify needs --config or --preset\n";
                return 2;
            }
            const auto cfg = config_path.empty() ? ls::make_preset(preset).runs.front().config
                                                 : ls::load_config(config_path);
            if (dump) {
                std::cout << ls::dump_config(cfg);
                return 0;
            }
            return run_verify(cfg, level, report_path);
        }
    } catch (const ls::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
