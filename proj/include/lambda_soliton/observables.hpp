#ifndef LAMBDA_SOLITON_OBSERVABLES_HPP
#define LAMBDA_SOLITON_OBSERVABLES_HPP

#include "lambda_soliton/darboux.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lambda_soliton {

enum class Quadrature { Trapezoid, Simpson };

/// Time integral of |Omega| over a uniformly sampled profile.
/// Throws GridTooNarrow if either edge sample exceeds tol::area_tail_fraction of the peak.
real pulse_area(std::span<const complex> omega, real dt, Quadrature scheme = Quadrature::Trapezoid);

/// sqrt(theta13^2 + theta23^2)
real total_area(real theta13, real theta23);

struct PulseAreaRecord {
    real z = 0.0;
    real theta13 = 0.0;
    real theta23 = 0.0;
    real theta_tot = 0.0;
};

/// Phase-lag parameter ln|(tau_a + tau_b) / (tau_a - tau_b)|.
real delta_lag(real tau_a, real tau_b);

/// Closed-form location of one imprint in units of its own absorption length
/// (kappa_k x), together with the expected sign of the ground-state coherence
/// relative to the single-soliton template A12 sech(u) tanh(u).
struct ImprintPrediction {
    std::size_t soliton = 0;
    real location = 0.0;
    int phase_sign = 1;
};

/// Supported sequences: one Type1 plus any number of Type2/Type3 pulses, or two
/// Type1 solitons plus at most one Type2/Type3 pulse. `target` must index a Type1
/// soliton. Throws UnsupportedSequence otherwise, including when a manipulation
/// would swap the spatial order of two imprints.
ImprintPrediction predict_location(std::span<const SolitonSpec> sequence, std::size_t target);

/// Predictions for every Type1 soliton in the sequence.
std::vector<ImprintPrediction> predict_all(std::span<const SolitonSpec> sequence);

struct ImprintReport {
    real location_measured = 0.0;               // kappa_k x of the matched soliton
    std::optional<real> location_predicted;     // same units
    real rho22_peak = 0.0;
    int phase_sign = 1;
    std::optional<int> predicted_phase_sign;
    real width_kappa = 0.0;                     // FWHM of rho22, informational
    std::optional<std::size_t> which_soliton;
};

/// Expected imprint used to label measured peaks: location in grid units, scale
/// from grid units to the soliton's own kappa units, and the reference phase A12.
struct ImprintTemplate {
    std::size_t soliton = 0;
    real grid_location = 0.0;
    real kappa_scale = 1.0;
    complex reference_phase{1.0, 0.0};
    std::optional<real> predicted_location;
    std::optional<int> predicted_phase_sign;
};

/// Finds every local maximum of rho22 above tol::imprint_threshold on a uniform
/// grid `x`, refines it with a 3-point quadratic and reads the coherence sign from
/// the slope of rho12 through the peak. Peaks are matched to the nearest template.
/// Throws NoImprintFound and OverlappingImprints.
std::vector<ImprintReport> locate_imprints(std::span<const real> x, std::span<const real> rho22,
                                           std::span<const complex> rho12,
                                           std::span<const ImprintTemplate> templates = {});

/// Latest time (traveling frame) at which any pulse of the sequence is still
/// inside [z_min, z_max], plus tol::late_time_margin times the longest duration.
real late_time(std::span<const SolitonSpec> sequence, const SystemParams& sys, real z_min, real z_max);

} // namespace lambda_soliton

#endif
