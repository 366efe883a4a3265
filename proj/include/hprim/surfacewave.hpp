#pragma once

#include <complex>

#include "hprim/model.hpp"

namespace hprim {

// ---- dispersion relation of the damped surface wave equation ----
//
// Per horizontal mode the homogeneous equation d2t zeta - g b Lap* zeta
// - Lap* dt zeta = 0 reads lambda^2 + ksq lambda + g b ksq = 0 with
// ksq = |xi|^2.

struct DispersionRoots {
    cplx lambda1; ///< root with the larger real part
    cplx lambda2;
};

inline DispersionRoots dispersion_roots(double ksq, double g, double b) {
    if (ksq < 0) throw PreconditionError("dispersion_roots: ksq must be >= 0");
    if (!(g > 0) || !(b > 0)) throw PreconditionError("dispersion_roots: g, b must be > 0");
    const double disc = ksq * ksq - 4.0 * g * b * ksq;
    cplx sq = disc >= 0 ? cplx(std::sqrt(disc), 0.0) : cplx(0.0, std::sqrt(-disc));
    DispersionRoots r;
    r.lambda1 = (cplx(-ksq, 0.0) + sq) / 2.0;
    r.lambda2 = (cplx(-ksq, 0.0) - sq) / 2.0;
    return r;
}

// ---- forcing terms of the surface wave equation ----

/// Phi1, Phi2, the assembled right-hand side Phi of
///   d2t zeta - g b Lap* zeta - Lap* dt zeta = Phi   on the surface,
/// and varphi = w at the surface. All time derivatives inside Phi1 are
/// expanded analytically through the equation-derived dt zeta and dt v;
/// nothing is finite-differenced here.
struct WaveForcing {
    SurfaceField phi1;
    SurfaceField phi2;
    SurfaceField phi;
    SurfaceField varphi;
};

inline WaveForcing compute_phi(const State& s) {
    const Grid& g = *s.grid;
    const MetricCache& m = s.metric;
    const double grav = g.spec().g, f = g.spec().f;

    detail::RhsKit k = detail::build_rhs_kit(s);

    // J div_Astar of the advective bundle dt_theta K d3v - v.gradA v - w K d3v
    VolumeVec2 bundle;
    for (int c = 0; c < 2; ++c) {
        bundle[c] = k.stretch[c];
        bundle[c] -= k.advection[c];
    }
    VolumeField t_adv = j_weighted_div(bundle, m);

    // dt(J div_Astar v) - J div_Astar dt v
    //   = dtJ (div_Astar v) - J [dt(AK) d3 v1 + dt(BK) d3 v2]
    VolumeField divA = k.dbar1_v[0];
    divA += k.dbar2_v[1];
    VolumeField dt_A = dx1(m.dt_theta);
    VolumeField dt_B = dx2(m.dt_theta);
    VolumeField t_comm(g);
    for (size_t i = 0; i < t_comm.v.size(); ++i) {
        const double K = m.K.v[i];
        const double dtK = -K * K * m.dt_J.v[i];
        const double dAK = dt_A.v[i] * K + m.A.v[i] * dtK;
        const double dBK = dt_B.v[i] * K + m.B.v[i] * dtK;
        t_comm.v[i] = m.dt_J.v[i] * divA.v[i] -
                      m.J.v[i] * (dAK * k.d3_v[0].v[i] + dBK * k.d3_v[1].v[i]);
    }

    // J div_Astar (Delta_A v) - Delta_A (J div_Astar v)
    VolumeField jdiv = j_weighted_div(s.v, m);
    VolumeField t_lap = j_weighted_div(k.lap_A, m);
    t_lap -= laplacian_A(jdiv, m);

    WaveForcing wf;
    {
        VolumeField integrand = t_adv;
        integrand += t_comm;
        integrand += t_lap;
        wf.phi1 = column_integral(integrand);
    }

    // Phi2 = -int f J (-dbar1 v2 + dbar2 v1) + [d3(J div_Astar v)]_{-b}^{0}
    //        + int (Delta_A - Delta)(J div_Astar v) - g zeta Lap* zeta + Phi1
    VolumeField cor(g);
    for (size_t i = 0; i < cor.v.size(); ++i)
        cor.v[i] = m.J.v[i] * (-k.dbar1_v[1].v[i] + k.dbar2_v[0].v[i]);
    SurfaceField cor_int = column_integral(cor);

    VolumeField d3jdiv = vertical_diff(jdiv);
    SurfaceField bracket = trace_top(d3jdiv);
    bracket -= trace_bottom(d3jdiv);

    VolumeField lap_defect = laplacian_A(jdiv, m);
    lap_defect -= laplacian_h(jdiv);
    lap_defect -= vertical_apply(jdiv, g.dz2());
    SurfaceField defect_int = column_integral(lap_defect);

    SurfaceField zlz = hadamard(s.zeta, laplacian_h(s.zeta));

    wf.phi2 = wf.phi1;
    axpy(wf.phi2, -f, cor_int);
    wf.phi2 += bracket;
    wf.phi2 += defect_int;
    axpy(wf.phi2, -grav, zlz);

    // Phi = -Phi2 - dt(v.grad* zeta) + Lap*(v.grad* zeta), with
    // dt(v.grad* zeta) = dt_v|0 . grad* zeta + v|0 . grad* dt_zeta
    SurfaceVec2 gz = grad_h(s.zeta);
    SurfaceVec2 gdz = grad_h(s.dt_zeta);
    SurfaceField vdz = hadamard(trace_top(s.v[0]), gz[0]);
    vdz += hadamard(trace_top(s.v[1]), gz[1]);
    SurfaceField dt_vdz = hadamard(trace_top(s.dt_v[0]), gz[0]);
    dt_vdz += hadamard(trace_top(s.dt_v[1]), gz[1]);
    dt_vdz += hadamard(trace_top(s.v[0]), gdz[0]);
    dt_vdz += hadamard(trace_top(s.v[1]), gdz[1]);

    wf.phi = SurfaceField(g);
    axpy(wf.phi, -1.0, wf.phi2);
    wf.phi -= dt_vdz;
    wf.phi += laplacian_h(vdz);

    wf.varphi = trace_top(s.w);
    return wf;
}

/// Exact linearization of Phi around the flat rest state:
/// int f (-d1 v2 + d2 v1) dx3 - [d3(div* v)](0) + [d3(div* v)](-b).
/// Phi minus this part is quadratic in the solution amplitude. Note that
/// the bottom bracket term makes Phi genuinely linear-in-v even with f = 0.
inline SurfaceField phi_linear_part(const Grid& g, const VolumeVec2& v) {
    const double f = g.spec().f;
    VolumeField cor = dx2(v[0]);
    cor -= dx1(v[1]);
    SurfaceField r = column_integral(cor);
    scale(r, f);
    VolumeField divv = dx1(v[0]);
    divv += dx2(v[1]);
    VolumeField d3div = vertical_diff(divv);
    r -= trace_top(d3div);
    r += trace_bottom(d3div);
    return r;
}

// ---- discrete wave-equation residual ----

/// Residual of d2t zeta - g b Lap* zeta - Lap* dt zeta - Phi on a uniform
/// three-snapshot window, second/first time derivatives by centered
/// differences at the middle time.
inline SurfaceField wave_residual(const SurfaceField& z_prev, const SurfaceField& z_mid,
                                  const SurfaceField& z_next, const SurfaceField& phi_mid,
                                  double dt) {
    const Grid& g = *z_mid.grid;
    const double gb = g.spec().g * g.spec().b;
    SurfaceField d2(g), d1(g);
    for (size_t i = 0; i < d2.v.size(); ++i) {
        d2.v[i] = (z_next.v[i] - 2.0 * z_mid.v[i] + z_prev.v[i]) / (dt * dt);
        d1.v[i] = (z_next.v[i] - z_prev.v[i]) / (2.0 * dt);
    }
    SurfaceField r = d2;
    axpy(r, -gb, laplacian_h(z_mid));
    r -= laplacian_h(d1);
    r -= phi_mid;
    return r;
}

/// L2-relative size of the residual against the largest constituent term.
inline double wave_residual_relative(const SurfaceField& z_prev, const SurfaceField& z_mid,
                                     const SurfaceField& z_next, const SurfaceField& phi_mid,
                                     double dt) {
    const Grid& g = *z_mid.grid;
    const double gb = g.spec().g * g.spec().b;
    SurfaceField d2(g), d1(g);
    for (size_t i = 0; i < d2.v.size(); ++i) {
        d2.v[i] = (z_next.v[i] - 2.0 * z_mid.v[i] + z_prev.v[i]) / (dt * dt);
        d1.v[i] = (z_next.v[i] - z_prev.v[i]) / (2.0 * dt);
    }
    SurfaceField res = d2;
    SurfaceField t2 = laplacian_h(z_mid);
    scale(t2, gb);
    SurfaceField t3 = laplacian_h(d1);
    res -= t2;
    res -= t3;
    res -= phi_mid;
    const double denom = std::max({surface_norm(d2, 0.0), surface_norm(t2, 0.0),
                                   surface_norm(t3, 0.0), surface_norm(phi_mid, 0.0)});
    if (denom <= 0.0) return 0.0;
    return surface_norm(res, 0.0) / denom;
}

// ---- eta and its advection commutator ----

/// eta = (1 + |grad*|)^{3/2} grad* zeta, realized per mode as
/// (1 + |xi|)^{3/2} (i xi) zeta-hat.
inline SurfaceVec2 eta_of_zeta(const SurfaceField& zeta) {
    const Grid* g = zeta.grid;
    SurfaceSpec zh = forward(zeta);
    auto mk = [&](bool second) {
        SurfaceSpec r(*g);
        for (int ky = 0; ky < g->ny(); ++ky)
            for (int kx = 0; kx < g->nxh(); ++kx) {
                const double amp = std::pow(1.0 + g->xi_abs(kx, ky), 1.5);
                const cplx grad = second ? cplx(0.0, g->dxi2(ky)) : cplx(0.0, g->dxi1(kx));
                r.at(kx, ky) = amp * grad * zh.at(kx, ky);
            }
        return inverse(r);
    };
    return {mk(false), mk(true)};
}

/// [(1+|grad*|)^{3/2} grad*, v.grad*] f for a surface advecting field v
/// (the trace of the volume velocity). Returns the 2-vector commutator.
inline SurfaceVec2 eta_advection_commutator(const SurfaceVec2& v, const SurfaceField& f) {
    const Grid* g = f.grid;
    auto op = [g](const SurfaceField& p) { return eta_of_zeta(p); }; // same multiplier

    SurfaceField vgf = hadamard(v[0], dx1(f));
    vgf += hadamard(v[1], dx2(f));
    SurfaceVec2 path_a = op(vgf);

    SurfaceVec2 q = op(f);
    SurfaceVec2 path_b;
    for (int c = 0; c < 2; ++c) {
        path_b[c] = hadamard(v[0], dx1(q[c]));
        path_b[c] += hadamard(v[1], dx2(q[c]));
    }
    return {path_a[0] - path_b[0], path_a[1] - path_b[1]};
}

// ---- exact linear wave evolution (per-mode oracle) ----

struct WaveState {
    SurfaceField zeta;
    SurfaceField dt_zeta;
};

/// Evolves the homogeneous damped wave equation exactly per mode for time T.
/// The degenerate double root switches to the (c1 + c2 t) e^{lambda t}
/// branch on a relative-discriminant threshold of 1e-12.
inline WaveState linear_wave_evolve(const SurfaceField& zeta0, const SurfaceField& dt_zeta0,
                                    double T, double g, double b) {
    const Grid& gr = *zeta0.grid;
    SurfaceSpec z = forward(zeta0), dz = forward(dt_zeta0);
    if (std::abs(z.at(0, 0).real()) > 1e-8 || std::abs(dz.at(0, 0).real()) > 1e-8)
        throw PreconditionError("linear_wave_evolve: inputs must be mean-zero");
    SurfaceSpec zT(gr), dzT(gr);
    for (int ky = 0; ky < gr.ny(); ++ky)
        for (int kx = 0; kx < gr.nxh(); ++kx) {
            const double ksq = gr.xi_abs2(kx, ky);
            const cplx z0 = z.at(kx, ky), w0 = dz.at(kx, ky);
            if (ksq == 0.0) { // neutral zero mode
                zT.at(kx, ky) = z0 + T * w0;
                dzT.at(kx, ky) = w0;
                continue;
            }
            const double disc = ksq * ksq - 4.0 * g * b * ksq;
            const double scale_ref = std::max(ksq * ksq, 4.0 * g * b * ksq);
            if (std::abs(disc) <= 1e-12 * scale_ref) {
                const double lam = -ksq / 2.0;
                const cplx c2 = w0 - lam * z0;
                const double e = std::exp(lam * T);
                zT.at(kx, ky) = (z0 + c2 * T) * e;
                dzT.at(kx, ky) = (w0 + lam * c2 * T) * e;
            } else {
                DispersionRoots r = dispersion_roots(ksq, g, b);
                const cplx l1 = r.lambda1, l2 = r.lambda2;
                const cplx c1 = (w0 - l2 * z0) / (l1 - l2);
                const cplx c2 = (l1 * z0 - w0) / (l1 - l2);
                const cplx e1 = std::exp(l1 * T), e2 = std::exp(l2 * T);
                zT.at(kx, ky) = c1 * e1 + c2 * e2;
                dzT.at(kx, ky) = c1 * l1 * e1 + c2 * l2 * e2;
            }
        }
    return {inverse(zT), inverse(dzT)};
}

} // namespace hprim
