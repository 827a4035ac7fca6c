#include "hf/dft.hpp"

#include <cmath>
#include <stdexcept>

namespace hf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Dft1::Dft1(int n) : n_(n), pow2_(is_pow2(n)) {
    if (n <= 0) throw std::invalid_argument("Dft1: length must be positive");
    tw_fwd_.resize(n_);
    tw_inv_.resize(n_);
    for (int k = 0; k < n_; ++k) {
        const double a = kTwoPi * k / n_;
        tw_fwd_[k] = cplx(std::cos(a), -std::sin(a));
        tw_inv_[k] = cplx(std::cos(a), std::sin(a));
    }
    if (pow2_) {
        bitrev_.resize(n_);
        int lg = 0;
        while ((1 << lg) < n_) ++lg;
        for (int i = 0; i < n_; ++i) {
            int r = 0;
            for (int b = 0; b < lg; ++b)
                if (i & (1 << b)) r |= 1 << (lg - 1 - b);
            bitrev_[i] = r;
        }
    }
}

void Dft1::transform(cplx* x, int sign) const {
    const std::vector<cplx>& tw = (sign < 0) ? tw_fwd_ : tw_inv_;
    if (pow2_) {
        for (int i = 0; i < n_; ++i) {
            const int r = bitrev_[i];
            if (i < r) std::swap(x[i], x[r]);
        }
        for (int len = 2; len <= n_; len <<= 1) {
            const int stride = n_ / len;
            for (int base = 0; base < n_; base += len) {
                for (int k = 0; k < len / 2; ++k) {
                    const cplx w = tw[std::size_t(k) * stride];
                    const cplx a = x[base + k];
                    const cplx b = x[base + k + len / 2] * w;
                    x[base + k] = a + b;
                    x[base + k + len / 2] = a - b;
                }
            }
        }
        return;
    }
    // direct transform for arbitrary lengths
    std::vector<cplx> out(n_);
    for (int k = 0; k < n_; ++k) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < n_; ++j) s += x[j] * tw[std::size_t(j) * k % n_];
        out[k] = s;
    }
    for (int k = 0; k < n_; ++k) x[k] = out[k];
}

Dft2::Dft2(int m, int n) : m_(m), n_(n), fx_(m), fy_(n) {}

void Dft2::pass(std::vector<cplx>& a, int sign) const {
    if (int(a.size()) != m_ * n_) throw std::invalid_argument("Dft2: size mismatch");
    // rows (x direction, contiguous)
#pragma omp parallel for
    for (int j = 0; j < n_; ++j) fx_.transform(a.data() + std::size_t(j) * m_, sign);
    // columns
#pragma omp parallel for
    for (int i = 0; i < m_; ++i) {
        std::vector<cplx> col(n_);
        for (int j = 0; j < n_; ++j) col[j] = a[std::size_t(j) * m_ + i];
        fy_.transform(col.data(), sign);
        for (int j = 0; j < n_; ++j) a[std::size_t(j) * m_ + i] = col[j];
    }
}

void Dft2::forward(std::vector<cplx>& a) const { pass(a, -1); }

void Dft2::inverse(std::vector<cplx>& a) const {
    pass(a, +1);
    const double scale = 1.0 / (double(m_) * double(n_));
    for (cplx& z : a) z *= scale;
}

}  // namespace hf
