#pragma once

#include <cmath>
#include <functional>

#include "hprim/field.hpp"

namespace hprim {

// ---- Fourier multipliers ----
//
// A multiplier is any callable (kx, ky) -> cplx evaluated on the stored
// half-complex modes. Conventions on the period-L torus: |grad*| <-> |xi|,
// grad* <-> i*xi with xi = 2*pi*n/L; first-derivative factors vanish on the
// Nyquist lines (Grid::dxi*).

template <class M>
inline SurfaceSpec apply_multiplier(const SurfaceSpec& f, M&& m) {
    const Grid& g = *f.grid;
    SurfaceSpec r(g);
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const cplx mz = m(kx, ky);
            if (!std::isfinite(mz.real()) || !std::isfinite(mz.imag()))
                throw PreconditionError("non-finite multiplier on a resolved mode");
            r.at(kx, ky) = mz * f.at(kx, ky);
        }
    return r;
}

template <class M>
inline SurfaceField apply_multiplier(const SurfaceField& f, M&& m) {
    return inverse(apply_multiplier(forward(f), std::forward<M>(m)));
}

template <class M>
inline VolumeSpec apply_multiplier(const VolumeSpec& f, M&& m) {
    const Grid& g = *f.grid;
    VolumeSpec r(g);
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const cplx mz = m(kx, ky);
            if (!std::isfinite(mz.real()) || !std::isfinite(mz.imag()))
                throw PreconditionError("non-finite multiplier on a resolved mode");
            for (int j = 0; j < g.nz(); ++j) r.at(kx, ky, j) = mz * f.at(kx, ky, j);
        }
    return r;
}

template <class M>
inline VolumeField apply_multiplier(const VolumeField& f, M&& m) {
    return inverse(apply_multiplier(forward(f), std::forward<M>(m)));
}

// ---- horizontal derivatives ----

inline SurfaceField dx1(const SurfaceField& f) {
    const Grid* g = f.grid;
    return apply_multiplier(f, [g](int kx, int) { return cplx(0.0, g->dxi1(kx)); });
}
inline SurfaceField dx2(const SurfaceField& f) {
    const Grid* g = f.grid;
    return apply_multiplier(f, [g](int, int ky) { return cplx(0.0, g->dxi2(ky)); });
}
inline VolumeField dx1(const VolumeField& f) {
    const Grid* g = f.grid;
    return apply_multiplier(f, [g](int kx, int) { return cplx(0.0, g->dxi1(kx)); });
}
inline VolumeField dx2(const VolumeField& f) {
    const Grid* g = f.grid;
    return apply_multiplier(f, [g](int, int ky) { return cplx(0.0, g->dxi2(ky)); });
}

/// Horizontal Laplacian (all levels for volume fields).
template <class F>
inline F laplacian_h(const F& f) {
    const Grid* g = f.grid;
    return apply_multiplier(f, [g](int kx, int ky) { return cplx(-g->xi_abs2(kx, ky), 0.0); });
}

inline SurfaceVec2 grad_h(const SurfaceField& f) { return {dx1(f), dx2(f)}; }

// ---- vertical operations (Chebyshev collocation) ----

inline VolumeField vertical_apply(const VolumeField& f, const Eigen::MatrixXd& op) {
    const Grid& g = *f.grid;
    VolumeField r(g);
    const int ns = g.surface_size(), nz = g.nz();
    for (int jo = 0; jo < nz; ++jo) {
        double* out = r.level(jo);
        for (int ji = 0; ji < nz; ++ji) {
            const double a = op(jo, ji);
            if (a == 0.0) continue;
            const double* in = f.level(ji);
            for (int i = 0; i < ns; ++i) out[i] += a * in[i];
        }
    }
    return r;
}

/// d/dx3: exact for vertical polynomials of degree < nz.
inline VolumeField vertical_diff(const VolumeField& f) { return vertical_apply(f, f.grid->dz()); }

/// x3 -> integral of f from -b to x3; vanishes at the bottom level.
inline VolumeField vertical_integral_from_bottom(const VolumeField& f) {
    return vertical_apply(f, f.grid->qz());
}

/// Column integral over [-b, 0] as a surface field.
inline SurfaceField column_integral(const VolumeField& f) {
    const Grid& g = *f.grid;
    SurfaceField r(g);
    const int ns = g.surface_size();
    for (int j = 0; j < g.nz(); ++j) {
        const double wj = g.column_weights()[j];
        const double* in = f.level(j);
        for (int i = 0; i < ns; ++i) r.v[i] += wj * in[i];
    }
    return r;
}

// ---- dealiasing (2/3 rule) ----

inline void dealias_inplace(SurfaceSpec& s) {
    const Grid& g = *s.grid;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx)
            if (g.dealias_cut(kx, ky)) s.at(kx, ky) = 0.0;
}

inline void dealias_inplace(VolumeSpec& s) {
    const Grid& g = *s.grid;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx)
            if (g.dealias_cut(kx, ky))
                for (int j = 0; j < g.nz(); ++j) s.at(kx, ky, j) = 0.0;
}

template <class F>
inline F dealias(const F& f) {
    auto s = forward(f);
    dealias_inplace(s);
    return inverse(s);
}

// ---- Sobolev-type norms ----

/// |f|_r with the equivalent-norm multiplier (1 + |xi|^2)^r and the torus
/// measure. r = 0 recovers the L^2(Gamma) norm (Parseval). Negative r
/// requires a mean-zero field.
inline double surface_norm(const SurfaceField& f, double r) {
    if (r < -2.0) throw PreconditionError("surface_norm: r < -2 not supported");
    const Grid& g = *f.grid;
    SurfaceSpec s = forward(f);
    if (r < 0.0) {
        const double m = std::abs(s.at(0, 0).real());
        if (m > 1e-8) throw PreconditionError("surface_norm: negative order requires a mean-zero field");
    }
    double acc = 0.0;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            const double wgt = g.conj_weight(kx) * std::pow(1.0 + g.xi_abs2(kx, ky), r);
            acc += wgt * std::norm(s.at(kx, ky));
        }
    return std::sqrt(g.parseval_area() * acc);
}

inline double surface_norm(const SurfaceVec2& f, double r) {
    const double a = surface_norm(f[0], r), b = surface_norm(f[1], r);
    return std::sqrt(a * a + b * b);
}

/// L^2(Gamma) norm by quadrature (used by Parseval cross-checks).
inline double l2_quadrature(const SurfaceField& f) {
    double acc = 0.0;
    for (double x : f.v) acc += x * x;
    return std::sqrt(f.grid->cell_area() * acc);
}

/// ||f||_s, s in 0..5: mixed-derivative equivalent norm. Horizontal
/// derivatives are spectral, vertical ones collocated, the vertical L^2 by
/// Clenshaw-Curtis quadrature.
inline double volume_norm(const VolumeField& f, int s) {
    if (s < 0 || s > 5) throw PreconditionError("volume_norm: s must be in 0..5");
    const Grid& g = *f.grid;
    const int nz = g.nz();
    VolumeSpec sp = forward(f);
    const Eigen::VectorXd& wq = g.column_weights();

    Eigen::VectorXcd col(nz), dcol(nz);
    double acc = 0.0;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            for (int j = 0; j < nz; ++j) col[j] = sp.at(kx, ky, j);
            const double x1 = g.dxi1(kx) * g.dxi1(kx);
            const double x2 = g.dxi2(ky) * g.dxi2(ky);
            const double cw = g.conj_weight(kx);
            for (int c = 0; c <= s; ++c) {
                dcol = g.dz_pow(c) * col;
                double quad = 0.0;
                for (int j = 0; j < nz; ++j) quad += wq[j] * std::norm(dcol[j]);
                // sum over horizontal derivative orders a + b <= s - c
                double hw = 0.0;
                for (int a = 0; a + c <= s; ++a)
                    for (int bb = 0; a + bb + c <= s; ++bb)
                        hw += std::pow(x1, a) * std::pow(x2, bb);
                acc += cw * hw * quad;
            }
        }
    return std::sqrt(g.parseval_area() * acc);
}

inline double volume_norm(const VolumeVec2& f, int s) {
    const double a = volume_norm(f[0], s), b = volume_norm(f[1], s);
    return std::sqrt(a * a + b * b);
}

/// L^2(Omega) norm (volume_norm at s = 0, kept separate for hot paths).
inline double l2_volume(const VolumeField& f) { return volume_norm(f, 0); }

// ---- negative-index (Riesz) norms, |grad*|^{-gamma} ----

namespace detail {
inline void require_mean_zero(double m, const char* who) {
    if (std::abs(m) > 1e-8) throw PreconditionError(std::string(who) + ": field must be mean-zero");
}
} // namespace detail

/// | |grad*|^{-gamma} f |_0 for gamma in (0,1); the zero mode is annihilated
/// and the input must be mean-zero.
inline double negative_norm(const SurfaceField& f, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("negative_norm: gamma must be in (0,1)");
    const Grid& g = *f.grid;
    SurfaceSpec s = forward(f);
    detail::require_mean_zero(s.at(0, 0).real(), "negative_norm");
    double acc = 0.0;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double a = g.xi_abs(kx, ky);
            acc += g.conj_weight(kx) * std::pow(a, -2.0 * gamma) * std::norm(s.at(kx, ky));
        }
    return std::sqrt(g.parseval_area() * acc);
}

/// Volume version: |grad*|^{-gamma} per level, then L^2 in x3.
/// Requires per-level mean zero.
inline double negative_norm_volume(const VolumeField& f, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw PreconditionError("negative_norm_volume: gamma must be in (0,1)");
    const Grid& g = *f.grid;
    VolumeSpec s = forward(f);
    for (int j = 0; j < g.nz(); ++j)
        detail::require_mean_zero(s.at(0, 0, j).real(), "negative_norm_volume");
    const Eigen::VectorXd& wq = g.column_weights();
    double acc = 0.0;
    for (int ky = 0; ky < g.ny(); ++ky)
        for (int kx = 0; kx < g.nxh(); ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double a = std::pow(g.xi_abs(kx, ky), -2.0 * gamma) * g.conj_weight(kx);
            double quad = 0.0;
            for (int j = 0; j < g.nz(); ++j) quad += wq[j] * std::norm(s.at(kx, ky, j));
            acc += a * quad;
        }
    return std::sqrt(g.parseval_area() * acc);
}

} // namespace hprim
