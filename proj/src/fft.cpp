#include "synreg/fft.hpp"

#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace synreg {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft2D::Fft2D(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("Fft2D: dims must be >= 1");
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    if (!buf) throw std::bad_alloc();
    // FFTW's row-major (n0, n1) order puts n1 fastest; that's our x.
    fwd_plan_ = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_plan_ = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    buffer_ = buf;
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
    fftw_free(static_cast<fftw_complex*>(buffer_));
}

void Fft2D::forward(std::vector<std::complex<double>>& data) const {
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    if (data.size() != n) throw std::invalid_argument("Fft2D::forward: size mismatch");
    auto* buf = static_cast<fftw_complex*>(buffer_);
    std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(fwd_plan_));
    std::memcpy(data.data(), buf, n * sizeof(fftw_complex));
}

void Fft2D::inverse(std::vector<std::complex<double>>& data) const {
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    if (data.size() != n) throw std::invalid_argument("Fft2D::inverse: size mismatch");
    auto* buf = static_cast<fftw_complex*>(buffer_);
    std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(inv_plan_));
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = std::complex<double>(buf[i][0], buf[i][1]) * scale;
}

} // namespace synreg
