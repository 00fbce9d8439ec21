#ifndef LAMBDA_SOLITON_PIPELINE_HPP
#define LAMBDA_SOLITON_PIPELINE_HPP

// Scenario-level runs shared by the command-line tool and the acceptance suite.

#include "lambda_soliton/observables.hpp"
#include "lambda_soliton/presets.hpp"
#include "lambda_soliton/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lambda_soliton {

/// Worst structural defects seen over every evaluated point.
struct InvariantStats {
    real involution = 0.0;  // max ||M^2 - I|| over the chain
    real hermiticity = 0.0; // ||rho - rho^dagger||
    real trace = 0.0;       // |tr rho - 1|
    real purity = 0.0;      // ||rho^2 - rho||
    std::size_t points = 0;

    void absorb(const OrderedSolution::Evaluation& ev);
    void merge(const InvariantStats& other);
    real worst() const;
    nlohmann::json to_json() const;
};

OrderedSolution build_solution(const ScenarioConfig& cfg);
OrderedSolution build_solution(const ScenarioConfig& cfg, HFormula formula);

/// Ground-state profile over the full z grid at one time (units of tau_ref).
struct ZProfile {
    real t = 0.0;
    std::vector<real> z;
    std::vector<Mat3> rho;
    std::vector<real> rho22() const;
    std::vector<complex> rho12() const;
};

ZProfile sample_profile(const ScenarioConfig& cfg, const OrderedSolution& sol, real t, InvariantStats* stats = nullptr);

/// Imprints of a profile, labelled with the closed-form predictions for the first
/// `active` solitons when that sequence is covered (predictions left empty otherwise).
std::vector<ImprintReport> measure_imprints(const ScenarioConfig& cfg, const ZProfile& profile, std::size_t active);

nlohmann::json imprint_json(const ImprintReport& rep);

/// Time at which every pulse has left the grid, in units of tau_ref.
real late_time_scaled(const ScenarioConfig& cfg);

/// Per z slice (z_stride decimation) areas over the full t grid.
std::vector<PulseAreaRecord> area_profile(const ScenarioConfig& cfg, const OrderedSolution& sol,
                                          InvariantStats* stats = nullptr);

/// Long-form CSV writers over the decimated grid; 10 significant digits.
void write_fields_csv(const std::filesystem::path& path, const ScenarioConfig& cfg, const OrderedSolution& sol,
                      InvariantStats* stats = nullptr);
void write_density_csv(const std::filesystem::path& path, const ScenarioConfig& cfg, const OrderedSolution& sol,
                       InvariantStats* stats = nullptr);
void write_profiles_csv(const std::filesystem::path& path, const std::vector<ZProfile>& profiles);

/// Largest Bianchi-path mismatch over an n x n sample of the grid.
real permutability_sample(const ScenarioConfig& cfg, const OrderedSolution& sol, std::size_t n = 50,
                          InvariantStats* stats = nullptr);

/// Residual norms at fixed sample points with finite-difference steps h0 / 2^k.
struct ConvergenceStudy {
    std::vector<real> step_t; // physical units
    std::vector<ResidualNorms> norms;
    std::vector<real> ratios; // successive worst() ratios
    bool converged = false;   // every ratio >= 3 or the residual reached round-off

    nlohmann::json to_json() const;
};

ConvergenceStudy residual_convergence(const ScenarioConfig& cfg, const OrderedSolution& sol, std::size_t levels);

/// Largest |H_printed - H_compositional| relative to max |H_compositional| over a sample.
real h_formula_discrepancy(const ScenarioConfig& cfg, std::size_t n = 50);

/// Numerical integration from the analytic boundary data against the analytic fields.
struct OracleComparison {
    real error = 0.0;          // on the config grid
    real error_refined = -1.0; // steps halved, negative when not run
    real ratio() const { return error_refined > 0.0 ? error / error_refined : 0.0; }
    real seconds = 0.0;
    real max_trace_drift = 0.0;
    real max_hermiticity_defect = 0.0;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

OracleComparison oracle_compare(const ScenarioConfig& cfg, const OrderedSolution& sol, bool refine,
                                InvariantStats* stats = nullptr);

struct CheckResult {
    std::string name;
    bool passed = false;
    real value = 0.0;
    real tolerance = 0.0;
    std::string detail;
};

enum class VerifyLevel { Fast, Full };

struct VerifyReport {
    std::vector<CheckResult> checks;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const;
    const CheckResult* first_failure() const;
    nlohmann::json to_json() const;
};

VerifyReport verify(const ScenarioConfig& cfg, VerifyLevel level);

/// Writes the requested outputs and report.json into `out_dir`; returns the report.
nlohmann::json simulate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Runs a preset: data files, scenario.toml per run, profiles.csv and annotations.json.
/// Returns the annotations.
nlohmann::json run_figure(const Preset& preset, const std::filesystem::path& out_dir);

/// Largest |rho_1 - rho_2| entry between two scenarios over the z grid at time t.
real density_difference(const ScenarioConfig& a, const ScenarioConfig& b, real t);

} // namespace lambda_soliton

#endif
