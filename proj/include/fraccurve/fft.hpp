#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fraccurve {

/// Real-to-complex FFT of a fixed length backed by FFTW.
///
/// Plans are created under a global lock (FFTW planning is not thread-safe);
/// execution uses the new-array interface so one instance per thread is the
/// intended usage. Not copyable.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    /// out[k] = sum_t in[t] exp(-2 pi i k t / n), k = 0..n/2. in is zero-padded to n.
    void forward(std::span<const double> in, std::span<std::complex<double>> out);

    /// Unnormalized inverse (multiply by 1/n yourself). out has n entries.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    std::size_t n_;
    double* real_buf_ = nullptr;
    void* cplx_buf_ = nullptr;
    void* fwd_plan_ = nullptr;
    void* inv_plan_ = nullptr;
};

/// Smallest length >= n with only factors 2, 3, 5.
[[nodiscard]] std::size_t good_fft_size(std::size_t n);

/// Linear convolution truncated to the first out_len terms:
/// out[t] = sum_{j=0}^{t} kernel[j] * signal[t-j].
[[nodiscard]] std::vector<double> fft_convolve_truncated(std::span<const double> kernel, std::span<const double> signal,
                                                         std::size_t out_len);

}  // namespace fraccurve
