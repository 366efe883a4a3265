#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hprim/surfacewave.hpp"

namespace hprim {

// ---- finite-difference estimates of higher time derivatives ----
//
// The stored first derivatives (dt v, dt zeta) are equation-derived; second
// and third derivatives come from centered differences of those at the
// middle of a uniform three-level window.

struct TimeDerivativeEstimates {
    VolumeVec2 dt2_v;
    SurfaceField dt2_zeta;
    SurfaceField dt3_zeta;
    bool valid = false;
    bool converged = false; ///< coarse two-stencil agreement indicator
};

inline TimeDerivativeEstimates estimate_time_derivatives(const State& s0, const State& s1,
                                                         const State& s2, double dt) {
    const double h1 = s1.t - s0.t, h2 = s2.t - s1.t;
    if (std::abs(h1 - dt) > 1e-9 * std::max(1.0, dt) || std::abs(h2 - dt) > 1e-9 * std::max(1.0, dt))
        throw PreconditionError("estimate_time_derivatives: non-uniform history window");
    const Grid& g = *s1.grid;
    TimeDerivativeEstimates e;
    for (int c = 0; c < 2; ++c) {
        e.dt2_v[c] = VolumeField(g);
        for (size_t i = 0; i < e.dt2_v[c].v.size(); ++i)
            e.dt2_v[c].v[i] = (s2.dt_v[c].v[i] - s0.dt_v[c].v[i]) / (2.0 * dt);
    }
    e.dt2_zeta = SurfaceField(g);
    e.dt3_zeta = SurfaceField(g);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < e.dt2_zeta.v.size(); ++i) {
        const double centered = (s2.dt_zeta.v[i] - s0.dt_zeta.v[i]) / (2.0 * dt);
        const double onesided = (s2.dt_zeta.v[i] - s1.dt_zeta.v[i]) / dt;
        e.dt2_zeta.v[i] = centered;
        e.dt3_zeta.v[i] =
            (s2.dt_zeta.v[i] - 2.0 * s1.dt_zeta.v[i] + s0.dt_zeta.v[i]) / (dt * dt);
        num += (centered - onesided) * (centered - onesided);
        den += centered * centered;
    }
    e.valid = true;
    e.converged = den == 0.0 || num <= 0.25 * den;
    return e;
}

// ---- the paper-level functionals ----

/// E = sum_{i=0..2} ( ||dt^i v||_{4-2i} + |dt^i zeta|_{4-2i} ). Without
/// valid second-derivative estimates the i = 2 terms are omitted (callers
/// should flag the truncation).
inline double functional_E(const State& s, const TimeDerivativeEstimates* h = nullptr) {
    double e = volume_norm(s.v, 4) + surface_norm(s.zeta, 4.0);
    e += volume_norm(s.dt_v, 2) + surface_norm(s.dt_zeta, 2.0);
    if (h && h->valid) e += volume_norm(h->dt2_v, 0) + surface_norm(h->dt2_zeta, 0.0);
    return e;
}

/// D = sum_{i=0..2} ||dt^i v||_{5-2i} + |grad* zeta|_3
///     + sum_{i=1..3} |dt^i zeta|_{7/2-2(i-1)}.
inline double functional_D(const State& s, const TimeDerivativeEstimates* h = nullptr) {
    double d = volume_norm(s.v, 5) + volume_norm(s.dt_v, 3);
    d += surface_norm(grad_h(s.zeta), 3.0);
    d += surface_norm(s.dt_zeta, 3.5);
    if (h && h->valid) {
        d += volume_norm(h->dt2_v, 1);
        d += surface_norm(h->dt2_zeta, 1.5);
        d += surface_norm(h->dt3_zeta, -0.5);
    }
    return d;
}

/// F = |grad* zeta|_{7/2}.
inline double functional_F(const State& s) { return surface_norm(grad_h(s.zeta), 3.5); }

// ---- per-output diagnostics record ----

struct DiagnosticsRecord {
    double t = 0.0;
    double E = 0.0, D = 0.0, F = 0.0;
    double mass = 0.0;
    double min_J = 1.0;
    double div_res = 0.0;
    double top_bc_res = 0.0;
    double bottom_bc_res = 0.0;
    double wave_res_rel = std::numeric_limits<double>::quiet_NaN();
    double neg_norm_zeta = std::numeric_limits<double>::quiet_NaN();
    bool full_e = false; ///< i = 2 terms included in E and D
};

inline double divergence_residual(const State& s) {
    VolumeField r = div_Astar(s.v, s.metric);
    VolumeField d3w = vertical_diff(s.w);
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] += s.metric.K.v[i] * d3w.v[i];
    return max_abs(r);
}

namespace detail {
inline void fill_common(DiagnosticsRecord& r, const State& s, double gamma) {
    const Grid& g = *s.grid;
    r.t = s.t;
    r.mass = mean(s.zeta) * g.parseval_area();
    r.min_J = s.metric.min_J;
    r.div_res = divergence_residual(s);
    BoundaryResiduals br = boundary_residuals(s);
    r.top_bc_res = max_abs(br.top);
    r.bottom_bc_res = max_abs(br.bottom);
    r.F = functional_F(s);
    if (gamma > 0.0) r.neg_norm_zeta = negative_norm(s.zeta, gamma);
}
} // namespace detail

/// Record for the initial level: no history yet, E and D truncated to i <= 1.
inline DiagnosticsRecord initial_record(const State& s, double gamma = 0.0) {
    DiagnosticsRecord r;
    detail::fill_common(r, s, gamma);
    r.E = functional_E(s);
    r.D = functional_D(s);
    r.full_e = false;
    return r;
}

/// Record at the middle of a uniform three-level window: full E and D plus
/// the wave-equation closure residual.
inline DiagnosticsRecord make_record(const State& prev, const State& mid, const State& next,
                                     double dt, double gamma = 0.0) {
    DiagnosticsRecord r;
    detail::fill_common(r, mid, gamma);
    TimeDerivativeEstimates h = estimate_time_derivatives(prev, mid, next, dt);
    r.E = functional_E(mid, &h);
    r.D = functional_D(mid, &h);
    r.full_e = true;
    WaveForcing wf = compute_phi(mid);
    r.wave_res_rel = wave_residual_relative(prev.zeta, mid.zeta, next.zeta, wf.phi, dt);
    return r;
}

/// G(T) = sup_{t <= T} (E^2 + F^2) + trapezoid integral of D^2.
inline double functional_G(const std::vector<DiagnosticsRecord>& records, double T) {
    double sup = 0.0, integral = 0.0;
    const DiagnosticsRecord* last = nullptr;
    for (const auto& r : records) {
        if (r.t > T) break;
        sup = std::max(sup, r.E * r.E + r.F * r.F);
        if (last) integral += 0.5 * (r.D * r.D + last->D * last->D) * (r.t - last->t);
        last = &r;
    }
    return sup + integral;
}

// ---- energy-decay inequality monitor ----

struct EnergyMonitorReport {
    double theta_hat = std::numeric_limits<double>::infinity(); ///< +inf when unconstrained
    int intervals = 0;
    int violations = 0;
    double first_violation_t = std::numeric_limits<double>::quiet_NaN();
    double slack = 0.0;
};

/// Largest theta >= 0 with d(E^2)/dt + theta D^2 <= slack on every interval,
/// slack = 1e-8 * max E^2. Intervals whose endpoints lack full E are skipped.
inline EnergyMonitorReport energy_inequality_monitor(const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 2) throw PreconditionError("energy monitor needs >= 2 records");
    EnergyMonitorReport rep;
    double emax2 = 0.0;
    for (const auto& r : records) emax2 = std::max(emax2, r.E * r.E);
    rep.slack = 1e-8 * emax2;
    for (size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        if (!a.full_e || !b.full_e) continue;
        const double h = b.t - a.t;
        if (h <= 0) continue;
        ++rep.intervals;
        const double de2 = (b.E * b.E - a.E * a.E) / h;
        const double d2 = 0.5 * (a.D * a.D + b.D * b.D);
        if (de2 > rep.slack) {
            ++rep.violations;
            if (std::isnan(rep.first_violation_t)) rep.first_violation_t = a.t;
            rep.theta_hat = 0.0;
            continue;
        }
        if (d2 > 0.0) rep.theta_hat = std::min(rep.theta_hat, (rep.slack - de2) / d2);
    }
    if (rep.theta_hat < 0.0) rep.theta_hat = 0.0;
    return rep;
}

// ---- decay-rate fitting ----

enum class DecayModel { exponential, algebraic };

struct DecayFit {
    double rate = 0.0; ///< decay rate (exponential) or exponent (algebraic); positive = decay
    double r2 = 0.0;
    int n_used = 0;
};

/// Least squares of log y against t (exponential, y ~ e^{-rate t}) or
/// against log(1+t) (algebraic, y ~ (1+t)^{-rate}). The fit window drops the
/// leading skip_fraction of the time range.
inline DecayFit decay_fit(const std::vector<double>& ts, const std::vector<double>& ys,
                          DecayModel model, double skip_fraction = 0.1) {
    if (ts.size() != ys.size() || ts.size() < 3)
        throw PreconditionError("decay_fit: need >= 3 samples");
    const double t0 = ts.front(), t1 = ts.back();
    const double lo = t0 + skip_fraction * (t1 - t0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    std::vector<double> xs, ls;
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < lo) continue;
        if (!(ys[i] > 0.0)) throw PreconditionError("decay_fit: nonpositive value in fit window");
        const double x = model == DecayModel::exponential ? ts[i] : std::log1p(ts[i]);
        const double l = std::log(ys[i]);
        xs.push_back(x);
        ls.push_back(l);
        sx += x; sy += l; sxx += x * x; sxy += x * l;
        ++n;
    }
    if (n < 3) throw PreconditionError("decay_fit: fit window too small");
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw PreconditionError("decay_fit: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / n;
    double ssr = 0.0, sst = 0.0;
    const double lbar = sy / n;
    for (int i = 0; i < n; ++i) {
        const double fit = icept + slope * xs[i];
        ssr += (ls[i] - fit) * (ls[i] - fit);
        sst += (ls[i] - lbar) * (ls[i] - lbar);
    }
    DecayFit out;
    out.rate = -slope;
    out.n_used = n;
    out.r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 ? 1.0 : 0.0);
    return out;
}

} // namespace hprim
