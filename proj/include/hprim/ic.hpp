#pragma once

#include <random>

#include "hprim/model.hpp"

namespace hprim {

struct InitialCondition {
    VolumeVec2 v;
    SurfaceField zeta;
};

namespace detail {

/// Cubic vertical profile with q(-b) = 0, q'(-b) = 0, q'(0) = 0, q(0) = 1.
inline double shear_profile(double x3, double b) {
    const double s = x3 + b;
    return s * s * (3.0 * b - 2.0 * s) / (b * b * b);
}

/// p(-b) = 0, p'(-b) = 0, p'(0) = 1: used to impose a Neumann value at the
/// top without disturbing the bottom Dirichlet rows.
inline double neumann_profile(double x3, double b) {
    const double s = x3 + b;
    return s * s / (2.0 * b);
}

} // namespace detail

/// Named initial-condition families. All outputs satisfy the bottom
/// Dirichlet condition exactly and the top Neumann condition to round-off
/// ("surface-bump", "shear-cell") or to a configured tolerance after a
/// short fixed-point correction ("random-lowpass"). zeta is mean-zero by
/// construction.
inline InitialCondition ic_gen(const Grid& g, const std::string& name, double amplitude,
                               unsigned long seed) {
    const double b = g.depth();
    InitialCondition ic;
    ic.v = {VolumeField(g), VolumeField(g)};
    ic.zeta = SurfaceField(g);

    auto x1 = [&](int i1) { return static_cast<double>(i1) / g.nx(); };
    auto x2 = [&](int i2) { return static_cast<double>(i2) / g.ny(); };

    if (name == "surface-bump") {
        for (int i2 = 0; i2 < g.ny(); ++i2)
            for (int i1 = 0; i1 < g.nx(); ++i1)
                ic.zeta.at(i1, i2) = amplitude * (std::cos(2.0 * kPi * x1(i1)) +
                                                  0.5 * std::cos(2.0 * kPi * x2(i2)));
        return ic;
    }

    if (name == "shear-cell") {
        for (int j = 0; j < g.nz(); ++j) {
            const double q = detail::shear_profile(g.x3()[j], b);
            for (int i2 = 0; i2 < g.ny(); ++i2)
                for (int i1 = 0; i1 < g.nx(); ++i1) {
                    ic.v[0].at(i1, i2, j) = amplitude * q * std::sin(2.0 * kPi * x2(i2));
                    ic.v[1].at(i1, i2, j) = amplitude * q * std::sin(2.0 * kPi * x1(i1));
                }
        }
        return ic;
    }

    if (name == "random-lowpass") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int bmax = std::max(1, std::min(g.nx(), g.ny()) / 8);

        auto band_limited = [&](double scale) {
            SurfaceSpec s(g);
            for (int ky = 0; ky < g.ny(); ++ky)
                for (int kx = 0; kx < g.nxh(); ++kx) {
                    const int n1 = g.mode1(kx), n2 = g.mode2(ky);
                    if (n1 == 0 && n2 == 0) continue;
                    if (std::abs(n1) > bmax || std::abs(n2) > bmax) continue;
                    const double decay = 1.0 / (1.0 + n1 * n1 + n2 * n2);
                    s.at(kx, ky) = scale * decay * cplx(gauss(rng), gauss(rng));
                }
            // enforce the conjugate pairs the half-complex layout stores
            // explicitly (kx = 0 and Nyquist columns)
            for (int kx : {0, g.nx() / 2})
                for (int ky = 1; ky < g.ny() / 2; ++ky) {
                    if (kx >= g.nxh()) continue;
                    s.at(kx, g.ny() - ky) = std::conj(s.at(kx, ky));
                }
            for (int kx : {0, g.nx() / 2}) {
                if (kx >= g.nxh()) continue;
                s.at(kx, 0) = cplx(s.at(kx, 0).real(), 0.0);
                s.at(kx, g.ny() / 2) = cplx(s.at(kx, g.ny() / 2).real(), 0.0);
            }
            s.at(0, 0) = 0.0;
            return inverse(s);
        };

        ic.zeta = band_limited(amplitude);

        // horizontal structure times a bottom-clamped vertical profile
        SurfaceField h1 = band_limited(amplitude), h2 = band_limited(amplitude);
        for (int j = 0; j < g.nz(); ++j) {
            const double q = detail::shear_profile(g.x3()[j], b);
            for (int i = 0; i < g.surface_size(); ++i) {
                ic.v[0].level(j)[i] = q * h1.v[i];
                ic.v[1].level(j)[i] = q * h2.v[i];
            }
        }

        // fixed-point correction of the top Neumann condition
        // n.grad_A v = 0: push the required d3 v(0) through a profile that
        // leaves the bottom rows untouched
        SurfaceField zero(g);
        MetricCache m = build_metric(g, ic.zeta, zero);
        for (int iter = 0; iter < 12; ++iter) {
            State tmp;
            tmp.grid = &g;
            tmp.v = ic.v;
            tmp.zeta = ic.zeta;
            tmp.metric = m;
            BoundaryResiduals br = boundary_residuals(tmp);
            const double res = max_abs(br.top);
            if (res <= 1e-12 * std::max(1.0, amplitude)) break;
            // residual = n.grad_A v at the top; with the profile p the
            // update changes d3 v(0) by delta and the residual by
            // K(1+|grad z|^2) delta at leading order
            SurfaceField kt = trace_top(m.K);
            SurfaceVec2 gz = grad_h(ic.zeta);
            SurfaceField gz2 = hadamard(gz[0], gz[0]);
            gz2 += hadamard(gz[1], gz[1]);
            for (int c = 0; c < 2; ++c) {
                SurfaceField delta(g);
                for (int i = 0; i < g.surface_size(); ++i)
                    delta.v[i] = -br.top[c].v[i] / (kt.v[i] * (1.0 + gz2.v[i]));
                for (int j = 0; j < g.nz(); ++j) {
                    const double p = detail::neumann_profile(g.x3()[j], b);
                    if (p == 0.0) continue;
                    for (int i = 0; i < g.surface_size(); ++i)
                        ic.v[c].level(j)[i] += p * delta.v[i];
                }
            }
        }
        return ic;
    }

    throw PreconditionError("ic_gen: unknown initial condition '" + name + "'");
}

} // namespace hprim
