#pragma once

#include <complex>
#include <cstring>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace hprim {

using cplx = std::complex<double>;

/// Thin FFTW wrapper for the horizontal transforms of one grid size.
///
/// Forward: real (ny x nx, x1 fastest) -> half-complex (ny x (nx/2+1)),
/// normalized so coefficients are the e^{2*pi*i*n.x} series coefficients of
/// the collocated field. Inverse is exact up to round-off.
///
/// Plans are created once (FFTW_MEASURE|FFTW_UNALIGNED); execution uses the
/// new-array interface with caller buffers and per-call scratch, so distinct
/// fields can be transformed concurrently.
class HTransform {
public:
    HTransform(int nx, int ny) : nx_(nx), ny_(ny), nxh_(nx / 2 + 1) {
        std::vector<double> r(static_cast<size_t>(nx) * ny);
        std::vector<cplx> c(static_cast<size_t>(nxh_) * ny);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_2d(ny, nx, r.data(), reinterpret_cast<fftw_complex*>(c.data()),
                                    FFTW_MEASURE | FFTW_UNALIGNED);
        inv_ = fftw_plan_dft_c2r_2d(ny, nx, reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                    FFTW_MEASURE | FFTW_UNALIGNED);
    }
    ~HTransform() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    HTransform(const HTransform&) = delete;
    HTransform& operator=(const HTransform&) = delete;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nxh() const { return nxh_; }

    /// in: ny*nx reals -> out: ny*nxh coefficients. Input is preserved.
    void forward(const double* in, cplx* out) const {
        std::vector<double> scratch(in, in + static_cast<size_t>(nx_) * ny_);
        fftw_execute_dft_r2c(fwd_, scratch.data(), reinterpret_cast<fftw_complex*>(out));
        const double scale = 1.0 / (static_cast<double>(nx_) * ny_);
        const size_t n = static_cast<size_t>(nxh_) * ny_;
        for (size_t i = 0; i < n; ++i) out[i] *= scale;
    }

    /// in: ny*nxh coefficients -> out: ny*nx reals. Input is preserved
    /// (the required destructive copy is internal).
    void inverse(const cplx* in, double* out) const {
        std::vector<cplx> scratch(in, in + static_cast<size_t>(nxh_) * ny_);
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(scratch.data()), out);
    }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
    int nx_, ny_, nxh_;
    fftw_plan fwd_, inv_;
};

} // namespace hprim
