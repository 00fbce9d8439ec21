#include "lambda_soliton/observables.hpp"

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lambda_soliton {

namespace {

int sign_of(real v)
{
    return v < 0.0 ? -1 : 1;
}

int flip_parity(std::span<const SolitonSpec> seq, std::size_t target)
{
    int shorter = 0;
    for (std::size_t k = 0; k < seq.size(); ++k)
        if (k != target && seq[k].tau < seq[target].tau)
            ++shorter;
    return shorter % 2 == 0 ? 1 : -1;
}

// Displacement a single Type2/Type3 pulse imposes on imprint `target`, in its kappa units.
real manipulation_shift(const SolitonSpec& imprint, const SolitonSpec& pulse)
{
    const real d = delta_lag(imprint.tau, pulse.tau);
    return pulse.kind == SolitonKind::Type2 ? d : -d;
}

} // namespace

real pulse_area(std::span<const complex> omega, real dt, Quadrature scheme)
{
    if (omega.size() < 3 || !(dt > 0.0))
        throw Error(ErrorCode::InvalidGrid, "pulse area needs at least 3 samples and a positive step");
    real peak = 0.0;
    for (const auto& v : omega)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        return 0.0;
    const real edge = std::max(std::abs(omega.front()), std::abs(omega.back()));
    if (edge > tol::area_tail_fraction * peak)
        throw Error(ErrorCode::GridTooNarrow, "pulse tail at the grid edge is " + std::to_string(edge / peak)
                                                  + " of the peak");

    const std::size_t n = omega.size();
    if (scheme == Quadrature::Trapezoid) {
        real sum = 0.5 * (std::abs(omega.front()) + std::abs(omega.back()));
        for (std::size_t i = 1; i + 1 < n; ++i)
            sum += std::abs(omega[i]);
        return sum * dt;
    }

    // Composite Simpson on an even number of intervals, trapezoid on a leftover one.
    const std::size_t intervals = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    real sum = std::abs(omega[0]) + std::abs(omega[intervals]);
    for (std::size_t i = 1; i < intervals; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * std::abs(omega[i]);
    real area = sum * dt / 3.0;
    if (intervals != n - 1)
        area += 0.5 * dt * (std::abs(omega[n - 2]) + std::abs(omega[n - 1]));
    return area;
}

real total_area(real theta13, real theta23)
{
    return std::hypot(theta13, theta23);
}

real delta_lag(real tau_a, real tau_b)
{
    if (!(tau_a > 0.0) || !(tau_b > 0.0))
        throw Error(ErrorCode::InvalidSpec, "durations must be positive");
    if (!(std::abs(tau_a - tau_b) >= tol::tau_degeneracy * std::max(tau_a, tau_b)))
        throw Error(ErrorCode::DegenerateSpectralParams, "phase lag diverges for equal durations");
    return std::log(std::abs((tau_a + tau_b) / (tau_a - tau_b)));
}

ImprintPrediction predict_location(std::span<const SolitonSpec> seq, std::size_t target)
{
    if (target >= seq.size())
        throw Error(ErrorCode::UnsupportedSequence, "target index out of range");
    for (const auto& s : seq)
        s.validate();
    if (seq[target].kind != SolitonKind::Type1)
        throw Error(ErrorCode::UnsupportedSequence, "only type1 solitons leave an imprint");

    std::vector<std::size_t> imprinting;
    for (std::size_t k = 0; k < seq.size(); ++k)
        if (seq[k].kind == SolitonKind::Type1)
            imprinting.push_back(k);

    const SolitonSpec& own = seq[target];
    ImprintPrediction out;
    out.soliton = target;
    out.phase_sign = flip_parity(seq, target);

    if (imprinting.size() == 1) {
        real loc = own.eta(0, 1);
        for (std::size_t k = 0; k < seq.size(); ++k)
            if (k != target)
                loc += manipulation_shift(own, seq[k]);
        out.location = loc;
        return out;
    }

    if (imprinting.size() != 2 || seq.size() > 3)
        throw Error(ErrorCode::UnsupportedSequence,
                    "closed forms cover one imprint with any manipulations or two imprints with at most one");

    const std::size_t other = imprinting[0] == target ? imprinting[1] : imprinting[0];
    const SolitonSpec& partner = seq[other];

    // Spatial positions in a common length unit (kappa is proportional to tau).
    const real x_own = own.eta(0, 1) / own.tau;
    const real x_partner = partner.eta(0, 1) / partner.tau;
    const int sigma = sign_of(x_own - x_partner);

    auto locate = [&](const SolitonSpec& s, const SolitonSpec& p, int sgn) {
        real loc = s.eta(0, 1) + sgn * delta_lag(s.tau, p.tau);
        for (const auto& m : seq)
            if (m.kind != SolitonKind::Type1)
                loc += manipulation_shift(s, m);
        return loc;
    };
    out.location = locate(own, partner, sigma);
    const real partner_loc = locate(partner, own, -sigma);
    if (sign_of(out.location / own.tau - partner_loc / partner.tau) != sigma)
        throw Error(ErrorCode::UnsupportedSequence, "manipulation inverts the order of the imprints");
    return out;
}

std::vector<ImprintPrediction> predict_all(std::span<const SolitonSpec> seq)
{
    std::vector<ImprintPrediction> out;
    for (std::size_t k = 0; k < seq.size(); ++k)
        if (seq[k].kind == SolitonKind::Type1)
            out.push_back(predict_location(seq, k));
    return out;
}

std::vector<ImprintReport> locate_imprints(std::span<const real> x, std::span<const real> rho22,
                                           std::span<const complex> rho12,
                                           std::span<const ImprintTemplate> templates)
{
    const std::size_t n = x.size();
    if (n < 3 || rho22.size() != n || rho12.size() != n)
        throw Error(ErrorCode::InvalidGrid, "profiles must share a grid of at least 3 points");
    const real dx = (x.back() - x.front()) / static_cast<real>(n - 1);

    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (rho22[i] > tol::imprint_threshold && rho22[i] >= rho22[i - 1] && rho22[i] > rho22[i + 1])
            peaks.push_back(i);
    if (peaks.empty())
        throw Error(ErrorCode::NoImprintFound, "no rho22 maximum above threshold");

    for (std::size_t k = 1; k < peaks.size(); ++k) {
        const std::size_t lo = peaks[k - 1];
        const std::size_t hi = peaks[k];
        const real dip = *std::min_element(rho22.begin() + lo, rho22.begin() + hi + 1);
        if (hi - lo < static_cast<std::size_t>(tol::min_peak_separation_cells) || dip > tol::imprint_threshold)
            throw Error(ErrorCode::OverlappingImprints,
                        "imprints near x = " + std::to_string(x[lo]) + " and " + std::to_string(x[hi])
                            + " are not resolved");
    }

    std::vector<bool> used(templates.size(), false);
    std::vector<ImprintReport> reports;
    for (const std::size_t i : peaks) {
        const real left = rho22[i - 1], mid = rho22[i], right = rho22[i + 1];
        const real curvature = left - 2.0 * mid + right;
        const real offset = curvature != 0.0 ? 0.5 * (left - right) / curvature : 0.0;
        const real x_peak = x[i] + offset * dx;

        ImprintReport rep;
        rep.rho22_peak = mid - 0.25 * (left - right) * offset;

        // Half-maximum crossings on either side.
        const real half = 0.5 * rep.rho22_peak;
        real xl = std::numeric_limits<real>::quiet_NaN();
        real xr = xl;
        for (std::size_t j = i; j > 0; --j)
            if (rho22[j - 1] < half) {
                xl = x[j - 1] + dx * (half - rho22[j - 1]) / (rho22[j] - rho22[j - 1]);
                break;
            }
        for (std::size_t j = i; j + 1 < n; ++j)
            if (rho22[j + 1] < half) {
                xr = x[j] + dx * (rho22[j] - half) / (rho22[j] - rho22[j + 1]);
                break;
            }

        real scale = 1.0;
        complex reference{1.0, 0.0};
        std::optional<std::size_t> match;
        real best = std::numeric_limits<real>::infinity();
        for (std::size_t t = 0; t < templates.size(); ++t) {
            const real d = std::abs(templates[t].grid_location - x_peak);
            if (!used[t] && d < best) {
                best = d;
                match = t;
            }
        }
        if (match) {
            const auto& tpl = templates[*match];
            used[*match] = true;
            scale = tpl.kappa_scale;
            reference = tpl.reference_phase;
            rep.which_soliton = tpl.soliton;
            rep.location_predicted = tpl.predicted_location;
            rep.predicted_phase_sign = tpl.predicted_phase_sign;
        }
        rep.location_measured = x_peak * scale;
        rep.width_kappa = (xr - xl) * scale;

        // rho12 ~ A12 sech(u) tanh(u), u = -kappa x + eta: its x-slope at the peak is -kappa A12.
        const complex slope = (rho12[i + 1] - rho12[i - 1]) / (2.0 * dx);
        rep.phase_sign = sign_of(std::real(-slope * std::conj(reference)));
        reports.push_back(rep);
    }
    return reports;
}

real late_time(std::span<const SolitonSpec> seq, const SystemParams& sys, real z_min, real z_max)
{
    real latest = -std::numeric_limits<real>::infinity();
    real tau_max = 0.0;
    for (const auto& s : seq) {
        tau_max = std::max(tau_max, s.tau);
        const auto a = s.constants();
        if (a[0] != complex(0.0)) {
            // Signal trajectory T = tau (kappa Z - eta13).
            for (const real z : {z_min, z_max})
                latest = std::max(latest, s.tau * (s.kappa(sys) * z - s.eta(0, 2)));
        }
        if (a[1] != complex(0.0))
            latest = std::max(latest, -s.tau * s.eta(1, 2));
    }
    real shifts = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            shifts += delta_lag(seq[i].tau, seq[j].tau);
    return latest + (shifts + tol::late_time_margin) * tau_max;
}

} // namespace lambda_soliton
