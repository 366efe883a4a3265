#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "hprim/grid.hpp"

namespace hprim {

namespace detail {
inline void check_same_grid(const Grid* a, const Grid* b) {
    if (a != b) throw SizeError("fields built on different grids");
}
} // namespace detail

/// Real scalar field on the upper boundary, ny*nx values, x1 fastest.
struct SurfaceField {
    const Grid* grid = nullptr;
    std::vector<double> v;

    SurfaceField() = default;
    explicit SurfaceField(const Grid& g) : grid(&g), v(g.surface_size(), 0.0) {}
    double& at(int i1, int i2) { return v[static_cast<size_t>(i2) * grid->nx() + i1]; }
    double at(int i1, int i2) const { return v[static_cast<size_t>(i2) * grid->nx() + i1]; }
};

/// Half-complex spectral counterpart of a SurfaceField, ny*(nx/2+1).
struct SurfaceSpec {
    const Grid* grid = nullptr;
    std::vector<cplx> c;

    SurfaceSpec() = default;
    explicit SurfaceSpec(const Grid& g) : grid(&g), c(g.spectral_size(), cplx(0.0)) {}
    cplx& at(int kx, int ky) { return c[static_cast<size_t>(ky) * grid->nxh() + kx]; }
    cplx at(int kx, int ky) const { return c[static_cast<size_t>(ky) * grid->nxh() + kx]; }

    /// Coefficient of integer mode (n1, n2) with n1 possibly negative;
    /// resolves through conjugate symmetry of the half-complex layout.
    cplx coeff(int n1, int n2) const {
        const int nx = grid->nx(), ny = grid->ny();
        bool conj = false;
        if (n1 < 0) {
            n1 = -n1;
            n2 = -n2;
            conj = true;
        }
        int ky = n2 >= 0 ? n2 : n2 + ny;
        cplx z = at(n1, ky);
        return conj ? std::conj(z) : z;
    }
};

/// Real scalar field on the slab, nz*ny*nx values; level-major with the top
/// level (x3 = 0) first, x1 fastest within a level.
struct VolumeField {
    const Grid* grid = nullptr;
    std::vector<double> v;

    VolumeField() = default;
    explicit VolumeField(const Grid& g) : grid(&g), v(g.volume_size(), 0.0) {}
    double* level(int j) { return v.data() + static_cast<size_t>(j) * grid->surface_size(); }
    const double* level(int j) const { return v.data() + static_cast<size_t>(j) * grid->surface_size(); }
    double& at(int i1, int i2, int j) {
        return v[(static_cast<size_t>(j) * grid->ny() + i2) * grid->nx() + i1];
    }
    double at(int i1, int i2, int j) const {
        return v[(static_cast<size_t>(j) * grid->ny() + i2) * grid->nx() + i1];
    }
};

/// Per-level spectral counterpart of a VolumeField, nz * (ny*(nx/2+1)).
struct VolumeSpec {
    const Grid* grid = nullptr;
    std::vector<cplx> c;

    VolumeSpec() = default;
    explicit VolumeSpec(const Grid& g) : grid(&g), c(static_cast<size_t>(g.spectral_size()) * g.nz(), cplx(0.0)) {}
    cplx* level(int j) { return c.data() + static_cast<size_t>(j) * grid->spectral_size(); }
    const cplx* level(int j) const { return c.data() + static_cast<size_t>(j) * grid->spectral_size(); }
    cplx& at(int kx, int ky, int j) {
        return c[(static_cast<size_t>(j) * grid->ny() + ky) * grid->nxh() + kx];
    }
    cplx at(int kx, int ky, int j) const {
        return c[(static_cast<size_t>(j) * grid->ny() + ky) * grid->nxh() + kx];
    }
};

using SurfaceVec2 = std::array<SurfaceField, 2>;
using VolumeVec2 = std::array<VolumeField, 2>;

// ---- transforms ----

inline SurfaceSpec forward(const SurfaceField& f) {
    SurfaceSpec s(*f.grid);
    f.grid->ht().forward(f.v.data(), s.c.data());
    return s;
}

inline SurfaceField inverse(const SurfaceSpec& s) {
    SurfaceField f(*s.grid);
    s.grid->ht().inverse(s.c.data(), f.v.data());
    return f;
}

inline VolumeSpec forward(const VolumeField& f) {
    VolumeSpec s(*f.grid);
    for (int j = 0; j < f.grid->nz(); ++j) f.grid->ht().forward(f.level(j), s.level(j));
    return s;
}

inline VolumeField inverse(const VolumeSpec& s) {
    VolumeField f(*s.grid);
    for (int j = 0; j < s.grid->nz(); ++j) s.grid->ht().inverse(s.level(j), f.level(j));
    return f;
}

// ---- elementwise arithmetic ----

template <class F>
inline F& operator+=(F& a, const F& b) {
    detail::check_same_grid(a.grid, b.grid);
    for (size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}

template <class F>
inline F& operator-=(F& a, const F& b) {
    detail::check_same_grid(a.grid, b.grid);
    for (size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
    return a;
}

inline SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
inline VolumeField operator+(VolumeField a, const VolumeField& b) { return a += b; }
inline SurfaceField operator-(SurfaceField a, const SurfaceField& b) { return a -= b; }
inline VolumeField operator-(VolumeField a, const VolumeField& b) { return a -= b; }

template <class F>
inline F& scale(F& a, double s) {
    for (auto& x : a.v) x *= s;
    return a;
}

inline SurfaceField operator*(double s, SurfaceField a) { return scale(a, s); }
inline VolumeField operator*(double s, VolumeField a) { return scale(a, s); }

/// Pointwise product.
template <class F>
inline F hadamard(const F& a, const F& b) {
    detail::check_same_grid(a.grid, b.grid);
    F r = a;
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] *= b.v[i];
    return r;
}

template <class F>
inline void axpy(F& y, double alpha, const F& x) {
    detail::check_same_grid(y.grid, x.grid);
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
}

template <class F>
inline double max_abs(const F& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(const SurfaceVec2& f) { return std::max(max_abs(f[0]), max_abs(f[1])); }
inline double max_abs(const VolumeVec2& f) { return std::max(max_abs(f[0]), max_abs(f[1])); }

template <class F>
inline bool all_finite(const F& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Arithmetic mean over collocation points (= zero-mode coefficient).
inline double mean(const SurfaceField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / static_cast<double>(f.v.size());
}

/// Surface trace (top level) of a volume field.
inline SurfaceField trace_top(const VolumeField& f) {
    SurfaceField r(*f.grid);
    const double* src = f.level(0);
    std::copy(src, src + f.grid->surface_size(), r.v.begin());
    return r;
}

/// Bottom level of a volume field.
inline SurfaceField trace_bottom(const VolumeField& f) {
    SurfaceField r(*f.grid);
    const double* src = f.level(f.grid->nz() - 1);
    std::copy(src, src + f.grid->surface_size(), r.v.begin());
    return r;
}

/// Broadcast a surface field to every level.
inline VolumeField broadcast(const SurfaceField& f) {
    VolumeField r(*f.grid);
    for (int j = 0; j < f.grid->nz(); ++j)
        std::copy(f.v.begin(), f.v.end(), r.v.begin() + static_cast<size_t>(j) * f.grid->surface_size());
    return r;
}

} // namespace hprim
