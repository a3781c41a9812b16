#pragma once

#include <complex>
#include <vector>

namespace synreg {

// Thin RAII wrapper over FFTW's complex 2D transform. Plan creation is
// serialized internally (FFTW planning is not thread-safe); execution on
// distinct objects is. Transforms are unnormalized; inverse() divides by
// the element count so forward-then-inverse is the identity.
class Fft2D {
public:
    // nx is the fastest-varying axis of the row-major (y, x) layout.
    Fft2D(int nx, int ny);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    void forward(std::vector<std::complex<double>>& data) const;
    void inverse(std::vector<std::complex<double>>& data) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }

private:
    int nx_;
    int ny_;
    void* fwd_plan_;
    void* inv_plan_;
    void* buffer_;
};

} // namespace synreg
