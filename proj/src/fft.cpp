#include "fraccurve/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "fraccurve/errors.hpp"

namespace fraccurve {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    require(n >= 1, "RealFft: size must be positive");
    real_buf_ = fftw_alloc_real(n_);
    auto* c = fftw_alloc_complex(n_ / 2 + 1);
    cplx_buf_ = c;
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n_);
    fwd_plan_ = fftw_plan_dft_r2c_1d(ni, real_buf_, c, FFTW_ESTIMATE);
    inv_plan_ = fftw_plan_dft_c2r_1d(ni, c, real_buf_, FFTW_ESTIMATE);
    if (!fwd_plan_ || !inv_plan_) fail(ErrorKind::InvalidArgument, "RealFft: planning failed");
}

RealFft::~RealFft() {
    {
        std::lock_guard lock(planner_mutex());
        if (fwd_plan_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
        if (inv_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
    }
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    require(in.size() <= n_ && out.size() >= spectrum_size(), "RealFft::forward: size mismatch");
    std::copy(in.begin(), in.end(), real_buf_);
    std::fill(real_buf_ + in.size(), real_buf_ + n_, 0.0);
    auto* c = static_cast<fftw_complex*>(cplx_buf_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_plan_), real_buf_, c);
    std::memcpy(static_cast<void*>(out.data()), c, sizeof(fftw_complex) * spectrum_size());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    require(in.size() >= spectrum_size() && out.size() >= n_, "RealFft::inverse: size mismatch");
    auto* c = static_cast<fftw_complex*>(cplx_buf_);
    // c2r destroys its input, so always work on the owned buffer
    std::memcpy(c, in.data(), sizeof(fftw_complex) * spectrum_size());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_plan_), c, real_buf_);
    std::copy(real_buf_, real_buf_ + n_, out.begin());
}

std::size_t good_fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t f : {2u, 3u, 5u})
            while (r % f == 0) r /= f;
        if (r == 1) return m;
    }
}

std::vector<double> fft_convolve_truncated(std::span<const double> kernel, std::span<const double> signal,
                                           std::size_t out_len) {
    const std::size_t k = std::min(kernel.size(), out_len);
    const std::size_t s = std::min(signal.size(), out_len);
    std::vector<double> out(out_len, 0.0);
    if (k == 0 || s == 0) return out;
    const std::size_t n = good_fft_size(k + s - 1);
    RealFft fft(n);
    std::vector<std::complex<double>> a(fft.spectrum_size()), b(fft.spectrum_size());
    fft.forward(kernel.first(k), a);
    fft.forward(signal.first(s), b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    std::vector<double> full(n);
    fft.inverse(a, full);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t t = 0; t < std::min(out_len, n); ++t) out[t] = full[t] * scale;
    return out;
}

}  // namespace fraccurve
