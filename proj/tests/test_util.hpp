#pragma once

#include <random>

#include "hf/grid.hpp"

namespace hf::test {

inline CellField random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0,
                              double hi = 1.0) {
    CellField f(g);
    std::uniform_real_distribution<double> d(lo, hi);
    for (std::size_t q = 0; q < f.size(); ++q) f.data()[q] = d(rng);
    return f;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double max_diff(const CellField& a, const CellField& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q)
        m = std::max(m, std::abs(a.data()[q] - b.data()[q]));
    return m;
}

}  // namespace hf::test
