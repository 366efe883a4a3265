#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hprim/errors.hpp"
#include "hprim/transform.hpp"

namespace hprim {

inline constexpr double kPi = 3.14159265358979323846;

/// Discretization and physical parameters for one run.
///
/// Horizontal: Fourier collocation on a square torus of period `box_scale`
/// (period 1 unless a large-box surrogate is requested), with the
/// e^{2*pi*i*n.x} mode convention, so the wavenumber of integer mode n is
/// xi = 2*pi*n/box_scale. Vertical: Chebyshev-Gauss-Lobatto points on
/// [-b, 0], stored top (x3 = 0) first.
struct GridSpec {
    int nx = 32;            ///< horizontal collocation count, even
    int ny = 32;            ///< horizontal collocation count, even
    int nz = 17;            ///< vertical collocation count, >= 5
    double b = 1.0;         ///< depth, > 0
    double box_scale = 1.0; ///< horizontal period L >= 1 (large-box surrogate)
    double g = 9.8;         ///< gravity, > 0
    double f = 0.0;         ///< Coriolis coefficient, >= 0
    double P0 = 0.0;        ///< reference surface pressure (reporting only)

    void validate() const {
        if (nx < 4 || nx % 2 != 0) throw PreconditionError("nx must be even and >= 4");
        if (ny < 4 || ny % 2 != 0) throw PreconditionError("ny must be even and >= 4");
        if (nz < 5) throw PreconditionError("nz must be >= 5");
        if (!(b > 0)) throw PreconditionError("depth b must be > 0");
        if (!(box_scale >= 1.0)) throw PreconditionError("box_scale must be >= 1");
        if (!(g > 0)) throw PreconditionError("gravity g must be > 0");
        if (f < 0) throw PreconditionError("Coriolis f must be >= 0");
    }
};

namespace detail {

inline Eigen::MatrixXd cgl_diff_matrix(int nz) {
    const int m = nz - 1;
    Eigen::VectorXd y(nz), c(nz);
    for (int j = 0; j < nz; ++j) {
        y[j] = std::cos(kPi * j / m);
        c[j] = ((j == 0 || j == m) ? 2.0 : 1.0) * ((j % 2 == 0) ? 1.0 : -1.0);
    }
    Eigen::MatrixXd d(nz, nz);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nz; ++j)
            d(i, j) = (i == j) ? 0.0 : c[i] / c[j] / (y[i] - y[j]);
    for (int i = 0; i < nz; ++i) d(i, i) = -d.row(i).sum();
    return d;
}

/// Values at CGL nodes -> Chebyshev coefficients (DCT-I normalization).
inline Eigen::MatrixXd cgl_coeff_matrix(int nz) {
    const int m = nz - 1;
    Eigen::MatrixXd c(nz, nz);
    for (int k = 0; k < nz; ++k) {
        const double ck = (k == 0 || k == m) ? 2.0 : 1.0;
        for (int j = 0; j < nz; ++j) {
            const double cj = (j == 0 || j == m) ? 2.0 : 1.0;
            c(k, j) = 2.0 / (m * ck * cj) * std::cos(kPi * j * k / m);
        }
    }
    return c;
}

} // namespace detail

/// Immutable per-run discretization backbone: collocation geometry,
/// Chebyshev differentiation/integration matrices and mode bookkeeping.
/// Horizontal transforms live in HTransform (transform.hpp); a Grid owns one.
class Grid {
public:
    explicit Grid(const GridSpec& spec) : spec_(spec), ht_((spec.validate(), spec.nx), spec.ny) {
        const int nz = spec.nz;
        const int m = nz - 1;
        x3_.resize(nz);
        for (int j = 0; j < nz; ++j)
            x3_[j] = (std::cos(kPi * j / m) - 1.0) * spec.b / 2.0;

        dz_ = detail::cgl_diff_matrix(nz) * (2.0 / spec.b);
        dz2_ = dz_ * dz_;
        dzpow_.resize(6);
        dzpow_[0] = Eigen::MatrixXd::Identity(nz, nz);
        for (int c = 1; c <= 5; ++c) dzpow_[c] = dz_ * dzpow_[c - 1];

        // Integration from the bottom: antiderivative in Chebyshev
        // coefficient space, evaluated at the nodes, pinned to zero at
        // x3 = -b. Exact for polynomial integrands of degree < nz-1.
        Eigen::MatrixXd coef = detail::cgl_coeff_matrix(nz);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nz + 1, nz);
        s(1, 0) = 1.0;
        if (nz > 2) s(1, 2) = -0.5;
        for (int k = 2; k <= nz; ++k) {
            s(k, k - 1) += 1.0 / (2.0 * k);
            if (k + 1 < nz) s(k, k + 1) -= 1.0 / (2.0 * k);
        }
        Eigen::MatrixXd vt(nz, nz + 1); // T_k at the nodes, k = 0..nz
        for (int j = 0; j < nz; ++j) {
            const double yj = std::cos(kPi * j / m);
            for (int k = 0; k <= nz; ++k) vt(j, k) = std::cos(k * std::acos(std::min(1.0, std::max(-1.0, yj))));
        }
        Eigen::MatrixXd qy = vt * s * coef;
        qy.rowwise() -= qy.row(nz - 1);
        qz_ = qy * (spec.b / 2.0);
        wq_ = qz_.row(0); // integral over the whole column = value at the top
    }

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const GridSpec& spec() const { return spec_; }
    const HTransform& ht() const { return ht_; }
    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }
    int nz() const { return spec_.nz; }
    int nxh() const { return spec_.nx / 2 + 1; }
    double depth() const { return spec_.b; }

    int surface_size() const { return spec_.nx * spec_.ny; }
    int spectral_size() const { return nxh() * spec_.ny; }
    int volume_size() const { return surface_size() * spec_.nz; }

    /// Vertical collocation points, x3[0] = 0 down to x3[nz-1] = -b.
    const std::vector<double>& x3() const { return x3_; }

    const Eigen::MatrixXd& dz() const { return dz_; }
    const Eigen::MatrixXd& dz2() const { return dz2_; }
    /// dz^c for c in 0..5.
    const Eigen::MatrixXd& dz_pow(int c) const { return dzpow_.at(c); }
    /// Integration matrix: (qz * f)[j] = integral of f from -b to x3[j].
    const Eigen::MatrixXd& qz() const { return qz_; }
    /// Quadrature row for the full column integral over [-b, 0].
    const Eigen::VectorXd& column_weights() const { return wq_; }

    // -- horizontal mode bookkeeping (half-complex layout, kx = 0..nx/2) --

    int mode1(int kx) const { return kx; }
    int mode2(int ky) const { return ky <= spec_.ny / 2 ? ky : ky - spec_.ny; }

    /// Wavenumber components; the paper's |grad*| corresponds to |xi|.
    double xi1(int kx) const { return 2.0 * kPi * mode1(kx) / spec_.box_scale; }
    double xi2(int ky) const { return 2.0 * kPi * mode2(ky) / spec_.box_scale; }
    double xi_abs2(int kx, int ky) const {
        const double a = xi1(kx), b2 = xi2(ky);
        return a * a + b2 * b2;
    }
    double xi_abs(int kx, int ky) const { return std::sqrt(xi_abs2(kx, ky)); }

    /// First-derivative multipliers vanish on the Nyquist lines.
    double dxi1(int kx) const { return 2 * kx == spec_.nx ? 0.0 : xi1(kx); }
    double dxi2(int ky) const { return 2 * ky == spec_.ny ? 0.0 : xi2(ky); }

    /// Parseval weight of a stored half-complex coefficient.
    double conj_weight(int kx) const { return (kx == 0 || 2 * kx == spec_.nx) ? 1.0 : 2.0; }

    /// True for modes removed by the 2/3 dealiasing rule.
    bool dealias_cut(int kx, int ky) const {
        return 3 * std::abs(mode1(kx)) > spec_.nx || 3 * std::abs(mode2(ky)) > spec_.ny;
    }

    /// Area element of one collocation cell (trapezoidal quadrature on the
    /// period-L torus).
    double cell_area() const {
        const double L = spec_.box_scale;
        return L * L / (spec_.nx * spec_.ny);
    }
    /// Measure factor for spectral (Parseval) sums.
    double parseval_area() const {
        const double L = spec_.box_scale;
        return L * L;
    }

private:
    GridSpec spec_;
    HTransform ht_;
    std::vector<double> x3_;
    Eigen::MatrixXd dz_, dz2_, qz_;
    std::vector<Eigen::MatrixXd> dzpow_;
    Eigen::VectorXd wq_;
};

} // namespace hprim
