#include "lambda_soliton/error.hpp"
#include "lambda_soliton/pipeline.hpp"
#include "lambda_soliton/presets.hpp"
#include "lambda_soliton/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace lambda_soliton;
namespace fs = std::filesystem;

namespace {

const fs::path configs = LAMBDA_SOLITON_CONFIGS;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("lambda_soliton_test_" + name);
    fs::remove_all(p);
    return p;
}

// Message of the ConfigError raised by parsing `text`.
std::string config_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    FAIL("expected ConfigError for:\n" << text);
    return {};
}

const char* minimal = R"(name = "mini"
outputs = ["fields"]
[grid]
nt = 128
nz = 32
[[soliton]]
kind = "type3"
tau = 1
a = [[1, 0], [0, 0], [1, 0]]
)";

} // namespace

TEST_CASE("parse a complete scenario")
{
    const auto cfg = parse_config(R"(# comment line
name = "demo"   # trailing comment
outputs = ["fields", "density", "imprints", "areas", "residuals"]
h_formula = "paper-printed"

[system]
mu = 3

[grid]
t_min = -30
t_max = 90
nt = 512
z_min = -5
z_max = 7.5
nz = 64
t_stride = 2
z_stride = 4

[[soliton]]
kind = "type1"
tau = 2
a = [[1, 0],
     [0, 1],
     [0.5, -0.5]]

[[soliton]]
kind = "type2"
tau = 0.5
a = [[0, 0], [1, 0], [2e3, 0]]
)");
    CHECK(cfg.name == "demo");
    CHECK(cfg.outputs.size() == 5);
    CHECK(cfg.h_formula == HFormula::Printed);
    CHECK(cfg.system.mu == 3.0);
    CHECK(cfg.grid.nt == 512);
    CHECK(cfg.grid.z_max == 7.5);
    CHECK(cfg.grid.t_stride == 2);
    REQUIRE(cfg.solitons.size() == 2);
    CHECK(cfg.solitons[0].kind == SolitonKind::Type1);
    CHECK(cfg.solitons[0].a[1] == complex(0.0, 1.0));
    CHECK(cfg.solitons[1].eta(1, 2) == doctest::Approx(-std::log(2e3)));

    // Reference scales: tau of the first type1 soliton.
    CHECK(cfg.tau_ref() == 2.0);
    CHECK(cfg.kappa_ref() == 3.0);
    const Grid g = cfg.physical_grid();
    CHECK(g.t_min == -60.0);
    CHECK(g.t_max == 180.0);
    CHECK(g.z_max == doctest::Approx(2.5));
}

TEST_CASE("defaults and the seed scenario")
{
    const auto cfg = parse_config("name = \"empty\"\n");
    CHECK(cfg.solitons.empty());
    CHECK(cfg.tau_ref() == 1.0);
    CHECK(cfg.grid == ScaledGrid{});
    CHECK(cfg.h_formula == HFormula::Compositional);
    CHECK(cfg.system.mu == 2.0);
}

TEST_CASE("dump and parse round trip")
{
    for (const auto& entry : fs::directory_iterator(configs)) {
        CAPTURE(entry.path().string());
        const auto cfg = load_config(entry.path().string());
        const std::string text = dump_config(cfg);
        const auto again = parse_config(text);
        CHECK(again == cfg);
        CHECK(dump_config(again) == text);
    }
    for (const auto& name : preset_names())
        for (const auto& run : make_preset(name).runs)
            CHECK(parse_config(dump_config(run.config)) == run.config);

    // Irrational values survive exactly.
    auto cfg = parse_config(minimal);
    cfg.solitons[0].tau = std::tanh(2.5);
    cfg.solitons[0].a[2] = std::polar(std::exp(33.3), 0.1);
    CHECK(parse_config(dump_config(cfg)) == cfg);
}

TEST_CASE("config errors name the line and the field")
{
    auto with = [](const std::string& from, const std::string& to) {
        std::string s = minimal;
        const auto pos = s.find(from);
        REQUIRE(pos != std::string::npos);
        return s.replace(pos, from.size(), to);
    };
    std::string msg = config_error(with("\"type3\"", "\"type9\""));
    CHECK(msg.find("line 7") != std::string::npos);
    CHECK(msg.find("soliton[0].kind") != std::string::npos);

    msg = config_error(with("a = [[1, 0], [0, 0], [1, 0]]", "a = [[1, 0], [0.5, 0], [1, 0]]"));
    CHECK(msg.find("soliton[0].a") != std::string::npos);
    CHECK(msg.find("line 9") != std::string::npos);

    msg = config_error(with("tau = 1", "tau = -1"));
    CHECK(msg.find("soliton[0].tau") != std::string::npos);

    msg = config_error(with("tau = 1", "tau = fast"));
    CHECK(msg.find("soliton[0].tau") != std::string::npos);

    msg = config_error(with("tau = 1\n", ""));
    CHECK(msg.find("soliton[0].tau") != std::string::npos);
    CHECK(msg.find("missing") != std::string::npos);

    msg = config_error(with("nz = 32", "nz = 32\nnz = 64"));
    CHECK(msg.find("duplicate") != std::string::npos);
    CHECK(msg.find("line 6") != std::string::npos);

    msg = config_error(with("nz = 32", "nzz = 32"));
    CHECK(msg.find("grid.nzz") != std::string::npos);

    msg = config_error(with("nt = 128", "nt = 12.5"));
    CHECK(msg.find("grid.nt") != std::string::npos);

    msg = config_error(with("[grid]", "[grids]"));
    CHECK(msg.find("unknown section") != std::string::npos);

    msg = config_error(with("[\"fields\"]", "[\"movies\"]"));
    CHECK(msg.find("outputs") != std::string::npos);

    msg = config_error(with("[[1, 0], [0, 0], [1, 0]]", "[[1, 0], [0, 0]"));
    CHECK(msg.find("soliton[0].a") != std::string::npos);

    msg = config_error(with("[[1, 0], [0, 0], [1, 0]]", "[[1, 0], [0, 0]]"));
    CHECK(msg.find("three") != std::string::npos);

    msg = config_error(std::string(minimal) + "[system]\nmu = 0\n");
    CHECK(msg.find("system.mu") != std::string::npos);

    msg = config_error("[grid]\nt_min = 5\nt_max = 1\n");
    CHECK(msg.find("grid.t_max") != std::string::npos);

    msg = config_error("h_formula = \"guess\"\n");
    CHECK(msg.find("h_formula") != std::string::npos);

    msg = config_error("name = \"open\n");
    CHECK(msg.find("name") != std::string::npos);

    std::string four = minimal;
    for (int k = 0; k < 3; ++k)
        four += "[[soliton]]\nkind = \"type3\"\ntau = " + std::to_string(2 + k) + "\na = [[1, 0], [0, 0], [1, 0]]\n";
    CHECK(config_error(four).find("at most three") != std::string::npos);

    try {
        load_config("/nonexistent/scenario.toml");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("equal durations parse but fail when the solution is built")
{
    const auto cfg = parse_config(std::string(minimal)
                                  + "[[soliton]]\nkind = \"type2\"\ntau = 1\na = [[0, 0], [1, 0], [1, 0]]\n");
    try {
        build_solution(cfg);
        FAIL("expected DegenerateSpectralParams");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSpectralParams);
        CHECK(is_numerical(e.code()));
        CHECK(std::string(e.what()).find("0 and 1") != std::string::npos);
    }
}

TEST_CASE("presets")
{
    CHECK(preset_names().size() == 6);
    try {
        make_preset("pulse9");
        FAIL("expected UnknownPreset");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownPreset);
        CHECK_FALSE(is_numerical(e.code()));
    }

    const Preset p1 = make_preset("pulse1");
    REQUIRE(p1.runs.size() == 1);
    const auto& s = p1.runs[0].config.solitons;
    REQUIRE(s.size() == 3);
    // Lags of 5 and 10 from tanh(delta / 2) = tau / tau_a.
    CHECK(std::log((s[0].tau + s[1].tau) / (s[0].tau - s[1].tau)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::log((s[0].tau + s[2].tau) / (s[0].tau - s[2].tau)) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(p1.emit_fields);
    CHECK(make_preset("den1").emit_density);

    const Preset p2 = make_preset("den2");
    REQUIRE(p2.runs.size() == 2);
    CHECK(p2.runs[0].config.solitons[0].eta(0, 1) == p2.runs[1].config.solitons[0].eta(0, 1));
    CHECK(p2.runs[0].config.solitons[0].eta(0, 2) != p2.runs[1].config.solitons[0].eta(0, 2));

    const Preset p3 = make_preset("den3");
    const auto& c = p3.runs[0].config.solitons;
    REQUIRE(c.size() == 3);
    CHECK(c[0].tau > c[2].tau);
    CHECK(c[2].tau > c[1].tau);
}

TEST_CASE("imprints measured on the three-step preset")
{
    const Preset p = make_preset("den1");
    const auto& cfg = p.runs[0].config;
    const auto sol = build_solution(cfg);
    const real expect[] = {0.0, -5.0, 5.0};
    const int sign[] = {1, -1, 1};
    const real cell = cfg.kappa_ref() * cfg.physical_grid().dz();
    for (std::size_t k = 0; k < p.snapshots.size(); ++k) {
        const auto& snap = p.snapshots[k];
        const auto reps = measure_imprints(cfg, sample_profile(cfg, sol, snap.t), snap.active);
        REQUIRE(reps.size() == 1);
        CHECK(std::abs(reps[0].location_measured - expect[k]) < 1.5 * cell);
        CHECK(reps[0].phase_sign == sign[k]);
        REQUIRE(reps[0].location_predicted.has_value());
        CHECK(*reps[0].location_predicted == doctest::Approx(expect[k]));
    }
}

TEST_CASE("simulate writes deterministic CSV data")
{
    auto cfg = load_config((configs / "type3.toml").string());
    cfg.grid.nt = 512;
    cfg.grid.nz = 64;
    cfg.grid.t_stride = 3;
    cfg.grid.z_stride = 5;
    cfg.outputs = {OutputKind::Fields, OutputKind::Density, OutputKind::Areas};

    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    ::setenv("LAMBDA_SOLITON_THREADS", "1", 1);
    const auto report = simulate(cfg, a);
    ::setenv("LAMBDA_SOLITON_THREADS", "8", 1);
    simulate(cfg, b);
    ::unsetenv("LAMBDA_SOLITON_THREADS");

    for (const char* f : {"fields.csv", "density.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(fs::exists(a / "report.json"));
    CHECK(report["files"].size() == 2);
    CHECK(report["invariants"]["points"].get<std::size_t>() > 0);
    CHECK(report["areas"].size() == (64 + 4) / 5);

    std::istringstream fields(slurp(a / "fields.csv"));
    std::string line;
    std::getline(fields, line);
    CHECK(line == "t,z,abs_omega13,arg_omega13,abs_omega23,arg_omega23");
    std::size_t rows = 0;
    while (std::getline(fields, line))
        ++rows;
    CHECK(rows == ((512 + 2) / 3) * ((64 + 4) / 5));

    std::istringstream density(slurp(a / "density.csv"));
    std::getline(density, line);
    CHECK(line == "t,z,rho11,rho22,rho33,re_rho12,im_rho12,re_rho13,im_rho13,re_rho23,im_rho23");
    // Values carry 10 significant digits.
    std::getline(density, line);
    const std::string first = line.substr(0, line.find(','));
    CHECK(first.find('e') == std::string::npos);
    std::size_t digits = 0;
    for (char ch : first)
        digits += std::isdigit(static_cast<unsigned char>(ch)) ? 1 : 0;
    CHECK(digits <= 10);

    // The peak written to fields.csv is the 2 / tau of the SIT pulse in units of 1 / tau_ref.
    fields.clear();
    fields.str(slurp(a / "fields.csv"));
    std::getline(fields, line);
    real peak = 0.0;
    while (std::getline(fields, line)) {
        std::stringstream row(line);
        std::string cell;
        for (int k = 0; k < 3; ++k)
            std::getline(row, cell, ',');
        peak = std::max(peak, std::stod(cell));
    }
    CHECK(peak == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("figure preset writes annotations")
{
    const fs::path out = scratch("fig");
    auto p = make_preset("den2");
    for (auto& r : p.runs) {
        r.config.grid.nt = 256;
        r.config.grid.nz = 256;
    }
    const auto ann = run_figure(p, out);
    CHECK(fs::exists(out / "annotations.json"));
    for (const char* run : {"order_ab", "order_ba"}) {
        CHECK(fs::exists(out / run / "scenario.toml"));
        CHECK(fs::exists(out / run / "density.csv"));
        CHECK(fs::exists(out / run / "profiles.csv"));
        CHECK(load_config((out / run / "scenario.toml").string()) == p.runs[run[6] == 'a' ? 0 : 1].config);
    }
    CHECK(ann["order_swap"]["max_density_difference"].get<real>() < 1e-8);
}

TEST_CASE("verify on small scenarios")
{
    SUBCASE("seed")
    {
        const auto report = verify(load_config((configs / "seed.toml").string()), VerifyLevel::Fast);
        CHECK(report.passed());
        CHECK(report.to_json()["first_failure"].is_null());
    }
    SUBCASE("single SIT pulse")
    {
        auto cfg = load_config((configs / "type3.toml").string());
        cfg.grid.nt = 1024;
        cfg.grid.nz = 64;
        const auto report = verify(cfg, VerifyLevel::Fast);
        CHECK(report.passed());
        std::set<std::string> names;
        for (const auto& c : report.checks)
            names.insert(c.name);
        for (const char* n : {"structural_invariants", "permutability", "table1_asymptotes", "area_conservation",
                              "residual_convergence"})
            CHECK(names.count(n) == 1);
    }
    SUBCASE("printed Hamiltonian is flagged")
    {
        const auto cfg = load_config((configs / "paper_printed.toml").string());
        const auto report = verify(cfg, VerifyLevel::Fast);
        CHECK_FALSE(report.passed());
        REQUIRE(report.first_failure() != nullptr);
        CHECK(report.first_failure()->name == "residual_convergence");
        CHECK(report.details["h_formula"]["converging"] == "compositional");
        CHECK(h_formula_discrepancy(cfg) > 0.1);
    }
}
