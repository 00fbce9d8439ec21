#ifndef LAMBDA_SOLITON_SCENARIO_HPP
#define LAMBDA_SOLITON_SCENARIO_HPP

// Scenario files: a sectioned key = value format.
//
//   name = "type3"
//   outputs = ["fields", "density", "areas"]
//   h_formula = "compositional"        # or "paper-printed"
//
//   [system]
//   mu = 2
//
//   [grid]                             # t in units of tau_ref, z in units of 1/kappa_ref
//   t_min = -60
//   t_max = 160
//   nt = 4096
//   z_min = -10
//   z_max = 15
//   nz = 512
//   t_stride = 1                       # CSV decimation, optional
//   z_stride = 1
//
//   [[soliton]]                        # repeated, in Darboux order
//   kind = "type3"
//   tau = 1
//   a = [[1, 0], [0, 0], [1e-17, 0]]
//
// With no [[soliton]] section the scenario is the quiescent seed.
// tau_ref is the duration of the first type1 soliton (the first soliton if
// there is none, 1 for the seed) and kappa_ref = mu tau_ref / 2.

#include "lambda_soliton/darboux.hpp"
#include "lambda_soliton/mbsolver.hpp"
#include "lambda_soliton/superposition.hpp"

#include <set>
#include <string>
#include <vector>

namespace lambda_soliton {

enum class OutputKind { Fields, Density, Imprints, Areas, Residuals };

std::string_view to_string(OutputKind kind);

/// Grid in dimensionless units plus CSV decimation.
struct ScaledGrid {
    real t_min = -60.0;
    real t_max = 160.0;
    std::size_t nt = 4096;
    real z_min = -10.0;
    real z_max = 15.0;
    std::size_t nz = 512;
    std::size_t t_stride = 1;
    std::size_t z_stride = 1;

    bool operator==(const ScaledGrid&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    SystemParams system;
    std::vector<SolitonSpec> solitons;
    ScaledGrid grid;
    std::set<OutputKind> outputs;
    HFormula h_formula = HFormula::Compositional;

    real tau_ref() const;
    real kappa_ref() const { return 0.5 * system.mu * tau_ref(); }
    /// Grid in the physical (T, Z) coordinates used by the solvers.
    Grid physical_grid() const;
    bool wants(OutputKind k) const { return outputs.count(k) != 0; }
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// Parses and validates a scenario. Throws ConfigError with "line N" and the
/// offending field in the message. Equal durations are not a config error; they
/// surface as DegenerateSpectralParams when the solution is built.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Serialization that parse_config maps back to an identical scenario.
std::string dump_config(const ScenarioConfig& config);

} // namespace lambda_soliton

#endif
