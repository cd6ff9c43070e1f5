#pragma once

// Deterministic random generators for property tests. Every test seeds its
// own engine so failures reproduce exactly.

#include <cmath>
#include <random>

#include "qdspin/linalg.hpp"
#include "qdspin/model.hpp"

namespace testsupport {

using qdspin::linalg::Complex;
using qdspin::linalg::ComplexMatrix;

inline ComplexMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols,
                                   double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(u(rng), u(rng));
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937& rng, std::size_t n, double scale = 1.0) {
    const ComplexMatrix a = random_matrix(rng, n, n, scale);
    return Complex(0.5, 0.0) * (a + a.adjoint());
}

// Random density matrix V V^dag / tr(V V^dag): Hermitian, unit trace,
// positive semidefinite by construction.
inline ComplexMatrix random_density(std::mt19937& rng, std::size_t n) {
    const ComplexMatrix v = random_matrix(rng, n, n);
    ComplexMatrix rho = v * v.adjoint();
    rho *= Complex(1.0 / rho.trace().real(), 0.0);
    return rho;
}

// Valid rate sets spanning the studied region: drive 0.01 to 3 GHz
// (log-uniform), enhanced decay 5 to 20 GHz, background channels jittered
// around their defaults.
inline qdspin::model::RateSet random_rateset(std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    qdspin::model::RateSet r;
    r.omega_ghz = 0.01 * std::pow(300.0, u01(rng));
    r.gamma15_ghz = 5.0 + 15.0 * u01(rng);
    r.gamma25_ghz = 1e-4 * (0.5 + u01(rng));
    r.gamma35_ghz = 6.0 + 4.0 * u01(rng);
    r.gamma45_ghz = 6.0 + 4.0 * u01(rng);
    r.gamma12_ghz = 1e-5 * (0.5 + u01(rng));
    return r;
}

// Same but with the drive restricted to the strongly pumped region, where
// relaxation to the stationary state is fast enough for finite-horizon
// comparisons.
inline qdspin::model::RateSet random_pumped_rateset(std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    qdspin::model::RateSet r = random_rateset(rng);
    r.omega_ghz = 0.5 * std::pow(6.0, u01(rng)); // 0.5 to 3 GHz
    return r;
}

} // namespace testsupport
