#include "lambda_soliton/mbsolver.hpp"

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/parallel.hpp"
#include "lambda_soliton/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lambda_soliton {

namespace {

Mat3 rwa_hamiltonian(complex o13, complex o23, real detuning)
{
    Mat3 h;
    h(0, 2) = -0.5 * std::conj(o13);
    h(1, 2) = -0.5 * std::conj(o23);
    h(2, 0) = -0.5 * o13;
    h(2, 1) = -0.5 * o23;
    h(2, 2) = detuning;
    return h;
}

Mat3 bloch_rhs(const Mat3& h, const Mat3& rho)
{
    return commutator(h, rho) * (-I_unit);
}

// Value at i + 1/2 from the uniformly sampled f.
complex half_step(const std::vector<complex>& f, std::size_t i)
{
    const std::size_t n = f.size();
    if (i >= 1 && i + 2 < n)
        return (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
    if (i == 0)
        return (3.0 * f[0] + 6.0 * f[1] - f[2]) / 8.0;
    return (-f[i - 1] + 6.0 * f[i] + 3.0 * f[i + 1]) / 8.0;
}

struct Fields {
    std::vector<complex> o13;
    std::vector<complex> o23;
};

struct Slice {
    Fields polarization; // i mu rho_3j
    std::vector<Mat3> rho;
    Mat3 rho_last;
    real trace_drift = 0.0;
    real hermiticity = 0.0;
    real purity = 0.0;
};

Slice solve_slice(const Fields& f, real dt, real detuning, const Mat3& rho0, real mu, bool keep, bool pure)
{
    const std::size_t nt = f.o13.size();
    Slice s;
    s.polarization.o13.resize(nt);
    s.polarization.o23.resize(nt);
    if (keep)
        s.rho.resize(nt);

    const real trace0 = rho0.trace().real();
    Mat3 rho = rho0;
    auto record = [&](std::size_t i) {
        s.polarization.o13[i] = I_unit * mu * rho(2, 0);
        s.polarization.o23[i] = I_unit * mu * rho(2, 1);
        if (keep)
            s.rho[i] = rho;
        s.trace_drift = std::max(s.trace_drift, std::abs(rho.trace() - trace0));
        s.hermiticity = std::max(s.hermiticity, hermiticity_defect(rho));
        if (pure)
            s.purity = std::max(s.purity, idempotency_defect(rho));
    };

    record(0);
    Mat3 h0 = rwa_hamiltonian(f.o13[0], f.o23[0], detuning);
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        const Mat3 hm = rwa_hamiltonian(half_step(f.o13, i), half_step(f.o23, i), detuning);
        const Mat3 h1 = rwa_hamiltonian(f.o13[i + 1], f.o23[i + 1], detuning);
        const Mat3 k1 = bloch_rhs(h0, rho);
        const Mat3 k2 = bloch_rhs(hm, rho + k1 * complex(0.5 * dt));
        const Mat3 k3 = bloch_rhs(hm, rho + k2 * complex(0.5 * dt));
        const Mat3 k4 = bloch_rhs(h1, rho + k3 * complex(dt));
        rho += (k1 + k2 * complex(2.0) + k3 * complex(2.0) + k4) * complex(dt / 6.0);
        h0 = h1;
        record(i + 1);
    }
    s.rho_last = rho;
    return s;
}

Fields axpy(const Fields& base, real step, const Fields& slope)
{
    Fields out = base;
    for (std::size_t i = 0; i < out.o13.size(); ++i) {
        out.o13[i] += step * slope.o13[i];
        out.o23[i] += step * slope.o23[i];
    }
    return out;
}

real peak_of(const Fields& f)
{
    real peak = 0.0;
    for (std::size_t i = 0; i < f.o13.size(); ++i)
        peak = std::max({peak, std::abs(f.o13[i]), std::abs(f.o23[i])});
    return peak;
}

real max_change(const Fields& a, const Fields& b)
{
    real worst = 0.0;
    for (std::size_t i = 0; i < a.o13.size(); ++i)
        worst = std::max({worst, std::abs(a.o13[i] - b.o13[i]), std::abs(a.o23[i] - b.o23[i])});
    return worst;
}

} // namespace

void Grid::validate() const
{
    if (nt < 16 || nz < 16)
        throw Error(ErrorCode::InvalidGrid, "grid needs at least 16 points per direction");
    if (!(t_max > t_min) || !(z_max > z_min) || !std::isfinite(t_max - t_min) || !std::isfinite(z_max - z_min))
        throw Error(ErrorCode::InvalidGrid, "grid ranges must be finite and increasing");
}

Grid Grid::refined() const
{
    Grid g = *this;
    g.nt = 2 * (nt - 1) + 1;
    g.nz = 2 * (nz - 1) + 1;
    return g;
}

IntegrationResult integrate(const BoundaryData& boundary, const Grid& grid, const SystemParams& sys,
                            real detuning, const IntegrationOptions& options)
{
    grid.validate();
    sys.validate();
    const std::size_t nt = grid.nt;
    const std::size_t nz = grid.nz;
    if (boundary.omega13_in.size() != nt || boundary.omega23_in.size() != nt)
        throw Error(ErrorCode::InvalidGrid, "boundary profiles must have nt samples");
    if (hermiticity_defect(boundary.rho_initial) > tol::projector
        || std::abs(boundary.rho_initial.trace() - complex(1.0)) > tol::projector)
        throw Error(ErrorCode::NonPhysicalState, "initial density matrix must be hermitian with unit trace");

    const real dt = grid.dt();
    const real dz = grid.dz();
    const bool pure = idempotency_defect(boundary.rho_initial) < 1e-12;

    IntegrationResult out;
    out.grid = grid;
    out.omega13.resize(nz * nt);
    out.omega23.resize(nz * nt);
    out.rho_final.resize(nz);
    if (options.keep_density)
        out.rho.resize(nz * nt);

    auto solve = [&](const Fields& f, bool keep) {
        Slice s = solve_slice(f, dt, detuning, boundary.rho_initial, sys.mu, keep, pure);
        if (s.trace_drift > tol::trace_drift)
            throw Error(ErrorCode::NonPhysicalState, "trace drifted by " + std::to_string(s.trace_drift));
        out.max_trace_drift = std::max(out.max_trace_drift, s.trace_drift);
        out.max_hermiticity_defect = std::max(out.max_hermiticity_defect, s.hermiticity);
        out.max_purity_defect = std::max(out.max_purity_defect, s.purity);
        return s;
    };
    auto store = [&](std::size_t j, const Fields& f, const Slice& s) {
        std::copy(f.o13.begin(), f.o13.end(), out.omega13.begin() + static_cast<std::ptrdiff_t>(j * nt));
        std::copy(f.o23.begin(), f.o23.end(), out.omega23.begin() + static_cast<std::ptrdiff_t>(j * nt));
        if (options.keep_density)
            std::copy(s.rho.begin(), s.rho.end(), out.rho.begin() + static_cast<std::ptrdiff_t>(j * nt));
        out.rho_final[j] = s.rho_last;
    };

    Fields fields{boundary.omega13_in, boundary.omega23_in};
    Slice current = solve(fields, options.keep_density);
    store(0, fields, current);
    bool warned = false;

    for (std::size_t j = 0; j + 1 < nz; ++j) {
        const Fields& k1 = current.polarization;
        Fields next;
        if (options.scheme == ZScheme::Heun) {
            const Slice predicted = solve(axpy(fields, dz, k1), false);
            next = axpy(axpy(fields, 0.5 * dz, k1), 0.5 * dz, predicted.polarization);
        } else {
            const Fields k2 = solve(axpy(fields, 0.5 * dz, k1), false).polarization;
            const Fields k3 = solve(axpy(fields, 0.5 * dz, k2), false).polarization;
            const Fields k4 = solve(axpy(fields, dz, k3), false).polarization;
            next = axpy(axpy(axpy(axpy(fields, dz / 6.0, k1), dz / 3.0, k2), dz / 3.0, k3), dz / 6.0, k4);
        }

        const real peak = std::max(peak_of(fields), peak_of(next));
        if (!warned && peak > 0.0 && max_change(fields, next) > tol::cfl_field_change * peak) {
            out.warnings.push_back("field changes by more than " + std::to_string(tol::cfl_field_change * 100.0)
                                   + "% of its peak in one Z step near Z = " + std::to_string(grid.z(j)));
            warned = true;
        }

        fields = std::move(next);
        current = solve(fields, options.keep_density);
        store(j + 1, fields, current);
    }
    return out;
}

real field_error(const IntegrationResult& result, const std::vector<complex>& ref13,
                 const std::vector<complex>& ref23)
{
    if (ref13.size() != result.omega13.size() || ref23.size() != result.omega23.size())
        throw Error(ErrorCode::InvalidGrid, "reference arrays do not match the integration grid");
    real peak = 0.0;
    real worst = 0.0;
    for (std::size_t k = 0; k < ref13.size(); ++k) {
        peak = std::max({peak, std::abs(ref13[k]), std::abs(ref23[k])});
        worst = std::max({worst, std::abs(result.omega13[k] - ref13[k]), std::abs(result.omega23[k] - ref23[k])});
    }
    return peak > 0.0 ? worst / peak : worst;
}

real ResidualNorms::worst() const
{
    return std::max({bloch_linf, maxwell_linf, lax_linf});
}

ResidualNorms residual(const StateFunction& state, const Grid& grid, const SystemParams& sys,
                       const ResidualOptions& options)
{
    grid.validate();
    sys.validate();
    const real ht = options.fd_step_t > 0.0 ? options.fd_step_t : grid.dt();
    const real hz = options.fd_step_z > 0.0 ? options.fd_step_z : grid.dz();
    const complex lambda = options.probe_lambda;
    const Mat3 w = Mat3::diag(0.0, 0.0, I_unit);
    const complex v_scale = I_unit * sys.mu / (2.0 * lambda);

    struct Row {
        real linf[3] = {0.0, 0.0, 0.0};
        real sum2[3] = {0.0, 0.0, 0.0};
    };
    std::vector<Row> rows(grid.nz);

    auto frob2 = [](const Mat3& m) {
        real s = 0.0;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c)
                s += std::norm(m(r, c));
        return s;
    };

    parallel_for(grid.nz, [&](std::size_t j) {
        const real z = grid.z(j);
        Row& row = rows[j];
        for (std::size_t i = 0; i < grid.nt; ++i) {
            const real t = grid.t(i);
            const SolutionState s = state(t, z);
            const Mat3 drho_dt = (state(t + ht, z).rho - state(t - ht, z).rho) * complex(0.5 / ht);
            const Mat3 dh_dz = (state(t, z + hz).h - state(t, z - hz).h) * complex(0.5 / hz);

            const Mat3 bloch = drho_dt + commutator(s.h, s.rho) * I_unit;
            const Mat3 maxwell = dh_dz + commutator(w, s.rho) * complex(0.5 * sys.mu);
            const Mat3 u = s.h * (-I_unit) - w * lambda;
            const Mat3 v = s.rho * v_scale;
            const Mat3 lax = dh_dz * (-I_unit) - drho_dt * v_scale + commutator(u, v);

            const Mat3* parts[3] = {&bloch, &maxwell, &lax};
            for (int k = 0; k < 3; ++k) {
                row.linf[k] = std::max(row.linf[k], parts[k]->max_abs());
                row.sum2[k] += frob2(*parts[k]);
            }
        }
    });

    real linf[3] = {0.0, 0.0, 0.0};
    real sum2[3] = {0.0, 0.0, 0.0};
    for (const Row& row : rows)
        for (int k = 0; k < 3; ++k) {
            linf[k] = std::max(linf[k], row.linf[k]);
            sum2[k] += row.sum2[k];
        }
    const real count = static_cast<real>(grid.nt * grid.nz);
    ResidualNorms n;
    n.bloch_linf = linf[0];
    n.maxwell_linf = linf[1];
    n.lax_linf = linf[2];
    n.bloch_l2 = std::sqrt(sum2[0] / count);
    n.maxwell_l2 = std::sqrt(sum2[1] / count);
    n.lax_l2 = std::sqrt(sum2[2] / count);
    return n;
}

} // namespace lambda_soliton
