#pragma once

#include <cmath>
#include <string>

#include "hprim/operators.hpp"

namespace hprim {

// ---- vertical cutoff ----
//
// chi is 0 on (-b, -3b/4], 1 on [-b/4, 0], and transitions through the
// exp-based smoothstep s(u) = h(u)/(h(u)+h(1-u)), h(u) = exp(-1/u), with
// u = (x3 + 3b/4)/(b/2). Derivatives are analytic.

namespace detail {
inline double bump_h(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
inline double bump_h1(double u) { return u > 0.0 ? bump_h(u) / (u * u) : 0.0; }
inline double bump_h2(double u) {
    return u > 0.0 ? bump_h(u) * (1.0 / (u * u * u * u) - 2.0 / (u * u * u)) : 0.0;
}
} // namespace detail

struct Cutoff {
    double b;

    explicit Cutoff(double depth) : b(depth) {}

    void check(double x3) const {
        if (x3 < -b - 1e-12 * b || x3 > 1e-12 * b)
            throw PreconditionError("cutoff: x3 outside [-b, 0]");
    }
    double u_of(double x3) const { return (x3 + 0.75 * b) / (0.5 * b); }

    double value(double x3) const {
        check(x3);
        const double u = u_of(x3);
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        const double h = detail::bump_h(u), k = detail::bump_h(1.0 - u);
        return h / (h + k);
    }
    double d1(double x3) const {
        check(x3);
        const double u = u_of(x3);
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double h = detail::bump_h(u), k = detail::bump_h(1.0 - u);
        const double h1 = detail::bump_h1(u), k1 = -detail::bump_h1(1.0 - u);
        const double den = h + k;
        return (h1 * k - h * k1) / (den * den) / (0.5 * b);
    }
    double d2(double x3) const {
        check(x3);
        const double u = u_of(x3);
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double h = detail::bump_h(u), k = detail::bump_h(1.0 - u);
        const double h1 = detail::bump_h1(u), k1 = -detail::bump_h1(1.0 - u);
        const double h2 = detail::bump_h2(u), k2 = detail::bump_h2(1.0 - u);
        const double den = h + k;
        const double num1 = h2 * k - h * k2;
        const double num2 = h1 * k - h * k1;
        const double sp2 = num1 / (den * den) - 2.0 * num2 * (h1 + k1) / (den * den * den);
        return sp2 / (0.25 * b * b);
    }
};

// ---- harmonic extension ----

/// Extension of a surface field into the slab with the per-mode profile
/// e^{|xi| x3}; the zero mode extends as a constant. The trace at x3 = 0 is
/// the input, exactly, in spectral space.
inline VolumeField harmonic_extension(const Grid& g, const SurfaceField& zeta) {
    SurfaceSpec zh = forward(zeta);
    VolumeSpec ext(g);
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const double a = g.xi_abs(kx, ky);
            const cplx z = zh.at(kx, ky);
            for (int j = 0; j < g.nz(); ++j) ext.at(kx, ky, j) = z * std::exp(a * g.x3()[j]);
        }
    return inverse(ext);
}

/// Analytic second vertical derivative of the extension, |xi|^2 e^{|xi| x3}.
inline VolumeField harmonic_extension_d2(const Grid& g, const SurfaceField& zeta) {
    SurfaceSpec zh = forward(zeta);
    VolumeSpec ext(g);
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const double a = g.xi_abs(kx, ky);
            const cplx z = zh.at(kx, ky);
            for (int j = 0; j < g.nz(); ++j) ext.at(kx, ky, j) = z * a * a * std::exp(a * g.x3()[j]);
        }
    return inverse(ext);
}

// ---- metric coefficients of the flattening map ----

/// theta = chi * (harmonic extension of zeta) and everything derived from it
/// for one time level. d3theta is assembled per mode as chi' e^{|xi| x3} +
/// chi |xi| e^{|xi| x3}, not by collocation differencing. Immutable after
/// construction.
struct MetricCache {
    VolumeField theta;     ///< chi * zeta-extension
    VolumeField d3theta;   ///< analytic d theta / d x3
    VolumeField A;         ///< d1 theta
    VolumeField B;         ///< d2 theta
    VolumeField J;         ///< 1 + d3theta
    VolumeField K;         ///< 1/J pointwise
    VolumeField AK, BK;    ///< cached products
    VolumeField dt_theta;  ///< chi * extension of dt zeta
    VolumeField dt_J;      ///< analytic d3 of dt_theta
    double min_J = 1.0;
    int min_i1 = 0, min_i2 = 0, min_level = 0;
};

inline MetricCache build_metric(const Grid& g, const SurfaceField& zeta,
                                const SurfaceField& dt_zeta, double j_floor = 0.1) {
    const Cutoff chi(g.depth());
    const int nz = g.nz();
    std::vector<double> cv(nz), cd(nz);
    for (int j = 0; j < nz; ++j) {
        cv[j] = chi.value(g.x3()[j]);
        cd[j] = chi.d1(g.x3()[j]);
    }

    SurfaceSpec zh = forward(zeta), dzh = forward(dt_zeta);
    VolumeSpec th(g), d3th(g), ah(g), bh(g), dtth(g), dtd3(g);
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const double a = g.xi_abs(kx, ky);
            const cplx i1(0.0, g.dxi1(kx)), i2(0.0, g.dxi2(ky));
            const cplx z = zh.at(kx, ky), dz = dzh.at(kx, ky);
            for (int j = 0; j < nz; ++j) {
                const double e = std::exp(a * g.x3()[j]);
                const double p = cv[j] * e;            // chi * profile
                const double q = (cd[j] + cv[j] * a) * e; // d3 of chi*profile
                th.at(kx, ky, j) = p * z;
                d3th.at(kx, ky, j) = q * z;
                ah.at(kx, ky, j) = i1 * (p * z);
                bh.at(kx, ky, j) = i2 * (p * z);
                dtth.at(kx, ky, j) = p * dz;
                dtd3.at(kx, ky, j) = q * dz;
            }
        }

    MetricCache m;
    m.theta = inverse(th);
    m.d3theta = inverse(d3th);
    m.A = inverse(ah);
    m.B = inverse(bh);
    m.dt_theta = inverse(dtth);
    m.dt_J = inverse(dtd3);

    m.J = VolumeField(g);
    m.K = VolumeField(g);
    m.min_J = std::numeric_limits<double>::max();
    for (int j = 0; j < nz; ++j)
        for (int i2 = 0; i2 < g.ny(); ++i2)
            for (int i1 = 0; i1 < g.nx(); ++i1) {
                const double jj = 1.0 + m.d3theta.at(i1, i2, j);
                m.J.at(i1, i2, j) = jj;
                if (jj < m.min_J) {
                    m.min_J = jj;
                    m.min_i1 = i1;
                    m.min_i2 = i2;
                    m.min_level = j;
                }
            }
    if (m.min_J <= j_floor)
        throw DegenerateMetricError(m.min_J, m.min_i1, m.min_i2, m.min_level,
                                    "flattening map degenerated: min J = " + std::to_string(m.min_J) +
                                        " at (" + std::to_string(m.min_i1) + "," + std::to_string(m.min_i2) +
                                        ",level " + std::to_string(m.min_level) + ")");
    for (size_t i = 0; i < m.J.v.size(); ++i) m.K.v[i] = 1.0 / m.J.v[i];
    m.AK = hadamard(m.A, m.K);
    m.BK = hadamard(m.B, m.K);
    return m;
}

// ---- transformed differential operators ----

inline VolumeField dbar1(const VolumeField& phi, const MetricCache& m) {
    VolumeField r = dx1(phi);
    VolumeField d3 = vertical_diff(phi);
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] -= m.AK.v[i] * d3.v[i];
    return r;
}

inline VolumeField dbar2(const VolumeField& phi, const MetricCache& m) {
    VolumeField r = dx2(phi);
    VolumeField d3 = vertical_diff(phi);
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] -= m.BK.v[i] * d3.v[i];
    return r;
}

inline VolumeField dbar3(const VolumeField& phi, const MetricCache& m) {
    VolumeField r = vertical_diff(phi);
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] *= m.K.v[i];
    return r;
}

inline std::array<VolumeField, 3> grad_A(const VolumeField& phi, const MetricCache& m) {
    return {dbar1(phi, m), dbar2(phi, m), dbar3(phi, m)};
}

/// Transformed horizontal divergence of a 2-vector.
inline VolumeField div_Astar(const VolumeVec2& u, const MetricCache& m) {
    VolumeField r = dbar1(u[0], m);
    r += dbar2(u[1], m);
    return r;
}

/// Operational transformed Laplacian: each dbar_i applied twice.
inline VolumeField laplacian_A(const VolumeField& phi, const MetricCache& m) {
    VolumeField r = dbar1(dbar1(phi, m), m);
    r += dbar2(dbar2(phi, m), m);
    r += dbar3(dbar3(phi, m), m);
    return r;
}

/// J * div_Astar(v) reduced pointwise with JK = 1:
/// J (d1 v1 + d2 v2) - A d3 v1 - B d3 v2. This is the w-reconstruction
/// integrand and keeps the discrete column mass identity exact.
inline VolumeField j_weighted_div(const VolumeVec2& v, const MetricCache& m) {
    VolumeField hdiv = dx1(v[0]);
    hdiv += dx2(v[1]);
    VolumeField d3v1 = vertical_diff(v[0]);
    VolumeField d3v2 = vertical_diff(v[1]);
    VolumeField r(*v[0].grid);
    for (size_t i = 0; i < r.v.size(); ++i)
        r.v[i] = m.J.v[i] * hdiv.v[i] - m.A.v[i] * d3v1.v[i] - m.B.v[i] * d3v2.v[i];
    return r;
}

} // namespace hprim
