// Exact-size complex discrete Fourier transforms used by the periodic
// convolution. Power-of-two lengths go through an iterative radix-2 FFT;
// any other length falls back to the direct O(N^2) transform.
#pragma once

#include <complex>
#include <vector>

namespace hf {

using cplx = std::complex<double>;

// One-dimensional transform plan for a fixed length.
class Dft1 {
public:
    explicit Dft1(int n);
    int length() const { return n_; }
    // In-place transform of n contiguous values; sign = -1 forward, +1 inverse
    // (inverse does NOT divide by n).
    void transform(cplx* x, int sign) const;

private:
    int n_;
    bool pow2_;
    std::vector<int> bitrev_;
    std::vector<cplx> tw_fwd_;  // e^{-2pi i k / n}
    std::vector<cplx> tw_inv_;
};

// Row-column 2D transform on an m x n array stored row-major with x (size m)
// fastest, matching CellField layout.
class Dft2 {
public:
    Dft2(int m, int n);
    // forward: X[k] = sum_j x[j] e^{-2pi i <j,k>/N}
    void forward(std::vector<cplx>& a) const;
    // inverse including the 1/(m n) factor
    void inverse(std::vector<cplx>& a) const;

private:
    void pass(std::vector<cplx>& a, int sign) const;
    int m_, n_;
    Dft1 fx_, fy_;
};

}  // namespace hf
