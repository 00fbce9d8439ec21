#ifndef LAMBDA_SOLITON_MBSOLVER_HPP
#define LAMBDA_SOLITON_MBSOLVER_HPP

// Finite-difference Maxwell-Bloch integrator in traveling-wave coordinates.
// Shares only the matrix kernel and SystemParams with the analytic code.

#include "lambda_soliton/algebra.hpp"
#include "lambda_soliton/system.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lambda_soliton {

struct Grid {
    real t_min = -60.0;
    real t_max = 160.0;
    std::size_t nt = 4096;
    real z_min = -10.0;
    real z_max = 15.0;
    std::size_t nz = 512;

    /// Throws InvalidGrid unless nt, nz >= 16 and both ranges are increasing.
    void validate() const;
    real dt() const { return (t_max - t_min) / static_cast<real>(nt - 1); }
    real dz() const { return (z_max - z_min) / static_cast<real>(nz - 1); }
    real t(std::size_t i) const { return t_min + static_cast<real>(i) * dt(); }
    real z(std::size_t j) const { return z_min + static_cast<real>(j) * dz(); }
    /// Same extent with twice as many intervals in each direction.
    Grid refined() const;
};

struct BoundaryData {
    std::vector<complex> omega13_in; // over T at z_min
    std::vector<complex> omega23_in;
    Mat3 rho_initial = Mat3::diag(1.0, 0.0, 0.0); // at t_min for every Z
};

enum class ZScheme { Heun, RungeKutta4 };

struct IntegrationOptions {
    /// Heun reaches ~1e-2 relative error on the default grid for a single SIT pulse; RK4 ~5e-5.
    ZScheme scheme = ZScheme::RungeKutta4;
    /// Store rho at every grid point (nz * nt matrices); otherwise only the last T column.
    bool keep_density = false;
};

struct IntegrationResult {
    Grid grid;
    std::vector<complex> omega13; // index j * nt + i
    std::vector<complex> omega23;
    std::vector<Mat3> rho;        // same layout, empty unless keep_density
    std::vector<Mat3> rho_final;  // rho(t_max) for every Z
    real max_trace_drift = 0.0;
    real max_hermiticity_defect = 0.0;
    real max_purity_defect = 0.0;
    std::vector<std::string> warnings;

    complex field13(std::size_t j, std::size_t i) const { return omega13[j * grid.nt + i]; }
    complex field23(std::size_t j, std::size_t i) const { return omega23[j * grid.nt + i]; }
};

/// Marches in Z; at each slice the von Neumann equation is integrated in T with RK4
/// (fields interpolated to half steps with 4-point Lagrange), and the fields are
/// advanced with d Omega_j3 / dZ = i mu rho_3j (Heun or RK4 stages, each stage
/// re-solving the T problem). Throws NonPhysicalState when the
/// trace drifts by more than tol::trace_drift.
IntegrationResult integrate(const BoundaryData& boundary, const Grid& grid, const SystemParams& sys,
                            real detuning = 0.0, const IntegrationOptions& options = {});

/// Relative L-infinity distance of the integrated fields from reference arrays of the same layout.
real field_error(const IntegrationResult& result, const std::vector<complex>& ref13,
                 const std::vector<complex>& ref23);

using StateFunction = std::function<SolutionState(real T, real Z)>;

struct ResidualNorms {
    real bloch_linf = 0.0;   // d rho/dT + i [H, rho]
    real bloch_l2 = 0.0;
    real maxwell_linf = 0.0; // dH/dZ + (mu/2) [W, rho]
    real maxwell_l2 = 0.0;
    real lax_linf = 0.0;     // dZ U - dT V + [U, V]
    real lax_l2 = 0.0;

    real worst() const;
};

struct ResidualOptions {
    complex probe_lambda{0.3, 0.7};
    /// Central-difference steps; zero means the grid spacing.
    real fd_step_t = 0.0;
    real fd_step_z = 0.0;
};

/// Residuals of a candidate solution at every grid point. L2 norms are root-mean-square over points.
ResidualNorms residual(const StateFunction& state, const Grid& grid, const SystemParams& sys,
                       const ResidualOptions& options = {});

} // namespace lambda_soliton

#endif
