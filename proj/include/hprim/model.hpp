#pragma once

#include "hprim/geometry.hpp"

namespace hprim {

/// One time level of the transformed system: prognostic (v, zeta) plus the
/// fields derived from them. dt_v and dt_zeta are equation-derived (momentum
/// and kinematic right-hand sides), never independent unknowns.
struct State {
    const Grid* grid = nullptr;
    double t = 0.0;

    VolumeVec2 v;
    SurfaceField zeta;

    VolumeField w;
    VolumeField P;
    VolumeVec2 dt_v;
    SurfaceField dt_zeta;
    MetricCache metric;
    bool dealias_products = true;
};

/// Hydrostatic pressure P = P0 + g zeta, constant in x3.
inline VolumeField pressure(const Grid& g, const SurfaceField& zeta) {
    VolumeField p = broadcast(zeta);
    for (auto& x : p.v) x = g.spec().P0 + g.spec().g * x;
    return p;
}

/// w = -integral_{-b}^{x3} (J div_Astar v) dtau. Vanishes at the bottom;
/// d3 w = -J div_Astar v to spectral accuracy, so div_Astar v + K d3 w = 0.
inline VolumeField reconstruct_w(const Grid& g, const VolumeVec2& v, const MetricCache& m) {
    (void)g;
    VolumeField s = j_weighted_div(v, m);
    VolumeField w = vertical_integral_from_bottom(s);
    for (auto& x : w.v) x = -x;
    return w;
}

namespace detail {

inline SurfaceField maybe_dealias(const SurfaceField& f, bool on) { return on ? dealias(f) : f; }
inline VolumeField maybe_dealias(const VolumeField& f, bool on) { return on ? dealias(f) : f; }

/// Shared nonlinear kitchen for the momentum right-hand side and the G
/// splitting terms, so the two assembly paths agree pointwise.
struct RhsKit {
    VolumeVec2 dbar1_v, dbar2_v, d3_v;
    VolumeVec2 advection;   // v . grad_Astar v (dealiased if requested)
    VolumeVec2 stretch;     // (dt_theta - w) K d3 v  (dealiased if requested)
    VolumeVec2 lap_A;       // Delta_A v, operational
};

inline RhsKit build_rhs_kit(const State& s) {
    const MetricCache& m = s.metric;
    RhsKit k;
    for (int c = 0; c < 2; ++c) {
        k.dbar1_v[c] = dbar1(s.v[c], m);
        k.dbar2_v[c] = dbar2(s.v[c], m);
        k.d3_v[c] = vertical_diff(s.v[c]);

        VolumeField adv = hadamard(s.v[0], k.dbar1_v[c]);
        adv += hadamard(s.v[1], k.dbar2_v[c]);
        k.advection[c] = maybe_dealias(adv, s.dealias_products);

        VolumeField st(*s.grid);
        for (size_t i = 0; i < st.v.size(); ++i)
            st.v[i] = (m.dt_theta.v[i] - s.w.v[i]) * m.K.v[i] * k.d3_v[c].v[i];
        k.stretch[c] = maybe_dealias(st, s.dealias_products);

        k.lap_A[c] = dbar1(k.dbar1_v[c], m);
        k.lap_A[c] += dbar2(k.dbar2_v[c], m);
        k.lap_A[c] += dbar3(dbar3(s.v[c], m), m);
    }
    return k;
}

inline VolumeVec2 momentum_rhs_impl(const State& s, const RhsKit& k) {
    const Grid& g = *s.grid;
    const double grav = g.spec().g, f = g.spec().f;
    SurfaceVec2 gz = grad_h(s.zeta);
    VolumeVec2 r;
    for (int c = 0; c < 2; ++c) {
        r[c] = k.stretch[c];
        r[c] -= k.advection[c];
        r[c] += k.lap_A[c];
        VolumeField gp = broadcast(gz[c]);
        axpy(r[c], -grav, gp);
    }
    // -f kappa x v = (f v2, -f v1)
    axpy(r[0], f, s.v[1]);
    axpy(r[1], -f, s.v[0]);
    return r;
}

} // namespace detail

/// Full right-hand side of the horizontal momentum equation:
/// dt v = dt_theta K d3 v - v.grad_Astar v - w K d3 v + Delta_A v
///        - g grad* zeta - f kappa x v.
inline VolumeVec2 momentum_rhs(const State& s) {
    return detail::momentum_rhs_impl(s, detail::build_rhs_kit(s));
}

/// Kinematic right-hand side dt zeta = w - v.grad* zeta on the surface.
inline SurfaceField surface_rhs(const State& s) {
    SurfaceVec2 gz = grad_h(s.zeta);
    SurfaceField prod = hadamard(trace_top(s.v[0]), gz[0]);
    prod += hadamard(trace_top(s.v[1]), gz[1]);
    prod = detail::maybe_dealias(prod, s.dealias_products);
    SurfaceField r = trace_top(s.w);
    r -= prod;
    return r;
}

/// Builds the fully derived state for one time level from (v, zeta):
/// metric (spatial parts from zeta), w, dt_zeta by the kinematic condition,
/// metric time parts from dt_zeta, P, and dt_v from the momentum equation.
inline State derive_state(const Grid& g, VolumeVec2 v, SurfaceField zeta, double t,
                          bool dealias_products = true, double j_floor = 0.1) {
    State s;
    s.grid = &g;
    s.t = t;
    s.dealias_products = dealias_products;
    s.v = std::move(v);
    s.zeta = std::move(zeta);

    SurfaceField zero_s(g);
    MetricCache spatial = build_metric(g, s.zeta, zero_s, j_floor);
    s.w = reconstruct_w(g, s.v, spatial);

    // kinematic condition, then rebuild the metric time parts it feeds
    s.metric = std::move(spatial);
    s.dt_zeta = surface_rhs(s);
    s.metric = build_metric(g, s.zeta, s.dt_zeta, j_floor);

    s.P = pressure(g, s.zeta);
    s.dt_v = momentum_rhs(s);
    return s;
}

/// G2 = AK d3 v1 + BK d3 v2 - d3theta div_Astar v  (reduced form).
inline VolumeField field_G2(const State& s) {
    const MetricCache& m = s.metric;
    VolumeField d3v1 = vertical_diff(s.v[0]);
    VolumeField d3v2 = vertical_diff(s.v[1]);
    VolumeField divA = dbar1(s.v[0], m);
    divA += dbar2(s.v[1], m);
    VolumeField r(*s.grid);
    for (size_t i = 0; i < r.v.size(); ++i)
        r.v[i] = m.AK.v[i] * d3v1.v[i] + m.BK.v[i] * d3v2.v[i] - m.d3theta.v[i] * divA.v[i];
    return detail::maybe_dealias(r, s.dealias_products);
}

/// G3 = grad* zeta . grad* v + K (-|grad* zeta|^2 + d3theta) d3 v  at x3 = 0.
inline SurfaceVec2 surface_G3(const State& s) {
    const MetricCache& m = s.metric;
    SurfaceVec2 gz = grad_h(s.zeta);
    SurfaceField gz2 = hadamard(gz[0], gz[0]);
    gz2 += hadamard(gz[1], gz[1]);
    SurfaceField kt = trace_top(m.K);
    SurfaceField d3t = trace_top(m.d3theta);
    SurfaceVec2 r;
    for (int c = 0; c < 2; ++c) {
        SurfaceField t1 = hadamard(gz[0], trace_top(dx1(s.v[c])));
        t1 += hadamard(gz[1], trace_top(dx2(s.v[c])));
        SurfaceField d3v = trace_top(vertical_diff(s.v[c]));
        for (size_t i = 0; i < t1.v.size(); ++i)
            t1.v[i] += kt.v[i] * (-gz2.v[i] + d3t.v[i]) * d3v.v[i];
        r[c] = detail::maybe_dealias(t1, s.dealias_products);
    }
    return r;
}

/// G4 = -v . grad* zeta at x3 = 0.
inline SurfaceField surface_G4(const State& s) {
    SurfaceVec2 gz = grad_h(s.zeta);
    SurfaceField g4 = hadamard(trace_top(s.v[0]), gz[0]);
    g4 += hadamard(trace_top(s.v[1]), gz[1]);
    for (auto& x : g4.v) x = -x;
    return detail::maybe_dealias(g4, s.dealias_products);
}

/// The four nonlinear splitting terms of the linearized system:
/// G1 in the momentum equation, G2 in the divergence relation, G3 the
/// Neumann datum, G4 in the kinematic condition.
struct GTerms {
    VolumeVec2 G1;
    VolumeField G2;
    SurfaceVec2 G3;
    SurfaceField G4;
};

inline GTerms nonlinear_G(const State& s) {
    const Grid& g = *s.grid;
    detail::RhsKit k = detail::build_rhs_kit(s);

    GTerms gt;
    for (int c = 0; c < 2; ++c) {
        gt.G1[c] = k.stretch[c];
        gt.G1[c] -= k.advection[c];
        gt.G1[c] += k.lap_A[c];
        VolumeField lap = laplacian_h(s.v[c]);
        lap += vertical_apply(s.v[c], g.dz2());
        gt.G1[c] -= lap;
    }
    gt.G2 = field_G2(s);
    gt.G3 = surface_G3(s);
    gt.G4 = surface_G4(s);
    return gt;
}

/// Residuals of the top Neumann condition n . grad_A v = 0 (componentwise,
/// with n = (-d1 zeta, -d2 zeta, 1)) and the bottom Dirichlet condition.
struct BoundaryResiduals {
    SurfaceVec2 top;
    SurfaceVec2 bottom;
};

inline BoundaryResiduals boundary_residuals(const State& s) {
    const MetricCache& m = s.metric;
    SurfaceVec2 gz = grad_h(s.zeta);
    BoundaryResiduals r;
    for (int c = 0; c < 2; ++c) {
        SurfaceField t = trace_top(dbar3(s.v[c], m));
        SurfaceField b1 = hadamard(gz[0], trace_top(dbar1(s.v[c], m)));
        SurfaceField b2 = hadamard(gz[1], trace_top(dbar2(s.v[c], m)));
        t -= b1;
        t -= b2;
        r.top[c] = std::move(t);
        r.bottom[c] = trace_bottom(s.v[c]);
    }
    return r;
}

/// Compatibility report for initial data, orders j = 0 and 1. Order 2 is
/// never enforced, only noted.
struct CompatReport {
    double bottom0 = 0.0, top0 = 0.0;
    double bottom1 = 0.0, top1 = 0.0;
    int order = 0;
    double tolerance = 1e-6;
    bool pass = false;
    bool order2_evaluated = false;
};

inline CompatReport compatibility_check(const Grid& g, const VolumeVec2& v0,
                                        const SurfaceField& zeta0, int order,
                                        double tolerance = 1e-6) {
    if (order < 0 || order > 1) throw PreconditionError("compatibility_check: order must be 0 or 1");
    State s = derive_state(g, v0, zeta0, 0.0);
    BoundaryResiduals br = boundary_residuals(s);
    CompatReport rep;
    rep.order = order;
    rep.tolerance = tolerance;
    rep.bottom0 = max_abs(br.bottom);
    rep.top0 = max_abs(br.top);
    rep.pass = rep.bottom0 <= tolerance && rep.top0 <= tolerance;
    if (order == 0) return rep;

    // order 1: dt v vanishes at the bottom, and dt(n . grad_A v) on top with
    // dt v, dt zeta taken from the equations.
    const MetricCache& m = s.metric;
    rep.bottom1 = std::max(max_abs(trace_bottom(s.dt_v[0])), max_abs(trace_bottom(s.dt_v[1])));

    SurfaceVec2 gz = grad_h(s.zeta);
    SurfaceVec2 gdz = grad_h(s.dt_zeta);
    VolumeField dt_A = dx1(m.dt_theta);
    VolumeField dt_B = dx2(m.dt_theta);
    double worst = 0.0;
    for (int c = 0; c < 2; ++c) {
        // n . grad_A (dt v)
        SurfaceField t = trace_top(dbar3(s.dt_v[c], m));
        SurfaceField u1 = hadamard(gz[0], trace_top(dbar1(s.dt_v[c], m)));
        SurfaceField u2 = hadamard(gz[1], trace_top(dbar2(s.dt_v[c], m)));
        t -= u1;
        t -= u2;
        // (dt n) . grad_A v
        SurfaceField w1 = hadamard(gdz[0], trace_top(dbar1(s.v[c], m)));
        SurfaceField w2 = hadamard(gdz[1], trace_top(dbar2(s.v[c], m)));
        t -= w1;
        t -= w2;
        // n . (dt A-coefficients applied to v): rows are
        // (-dt(AK) d3v, -dt(BK) d3v, dt K d3v), dt K = -K^2 dt J
        VolumeField d3v = vertical_diff(s.v[c]);
        SurfaceField kt = trace_top(m.K);
        SurfaceField dtJ = trace_top(m.dt_J);
        SurfaceField At = trace_top(m.A), Bt = trace_top(m.B);
        SurfaceField dtAt = trace_top(dt_A), dtBt = trace_top(dt_B);
        SurfaceField d3vt = trace_top(d3v);
        for (size_t i = 0; i < t.v.size(); ++i) {
            const double K = kt.v[i];
            const double dtK = -K * K * dtJ.v[i];
            const double dAK = dtAt.v[i] * K + At.v[i] * dtK;
            const double dBK = dtBt.v[i] * K + Bt.v[i] * dtK;
            t.v[i] += gz[0].v[i] * dAK * d3vt.v[i];   // -(-d1z)*(-dAK d3v)
            t.v[i] += gz[1].v[i] * dBK * d3vt.v[i];
            t.v[i] += dtK * d3vt.v[i];
        }
        worst = std::max(worst, max_abs(t));
    }
    rep.top1 = worst;
    rep.pass = rep.pass && rep.bottom1 <= tolerance && rep.top1 <= tolerance;
    return rep;
}

} // namespace hprim
