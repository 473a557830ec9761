#pragma once

// Shared helpers for the test suites: a seeded generator and independent
// oracles kept deliberately separate from the library implementations.

#include <cmath>
#include <cstdint>
#include <vector>

#include "dwellcert/matrix.hpp"

namespace testutil {

// splitmix64; deterministic across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

inline dwellcert::Matrix random_matrix(Rng& rng, std::size_t n, double scale) {
    dwellcert::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

inline dwellcert::SymMatrix random_sym(Rng& rng, std::size_t n, double scale) {
    dwellcert::SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) s.set(i, j, rng.uniform(-scale, scale));
    return s;
}

// Taylor-series matrix exponential: scale until ||X||_1 <= 0.25, sum the
// series to `terms`, square back. Independent of the Pade path under test.
inline dwellcert::Matrix expm_taylor(const dwellcert::Matrix& m, double t, int terms = 200) {
    using dwellcert::Matrix;
    Matrix x = t * m;
    int squarings = 0;
    while (x.norm1() > 0.25) {
        x *= 0.5;
        ++squarings;
    }
    Matrix sum = Matrix::identity(m.rows());
    Matrix term = Matrix::identity(m.rows());
    for (int k = 1; k <= terms; ++k) {
        term = term * x;
        term *= 1.0 / k;
        sum += term;
        if (term.max_abs() < 1e-300) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

inline double rel_err(const dwellcert::Matrix& got, const dwellcert::Matrix& want) {
    return (got - want).max_abs() / (1.0 + want.max_abs());
}

}  // namespace testutil
