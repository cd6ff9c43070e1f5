#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <qdspin/linalg.hpp>
#include <support/generators.hpp>
#include <support/spectrum_oracle.hpp>

// The general eigenvalue solver lives in the test tree and is itself used as
// an oracle elsewhere, so it gets checked against closed-form spectra here.

using qdspin::linalg::ComplexMatrix;
using namespace std::complex_literals;

namespace {

void sort_by_real_then_imag(std::vector<std::complex<double>>& v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

} // namespace

TEST_CASE("oracle: diagonal matrix returns its diagonal") {
    ComplexMatrix a(4, 4);
    a(0, 0) = 2.0 - 1.0i;
    a(1, 1) = -3.0;
    a(2, 2) = 0.5i;
    a(3, 3) = 7.0 + 7.0i;
    auto ev = testsupport::general_eigenvalues(a);
    std::vector<std::complex<double>> expect = {2.0 - 1.0i, -3.0, 0.5i, 7.0 + 7.0i};
    sort_by_real_then_imag(ev);
    sort_by_real_then_imag(expect);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(ev[i] - expect[i]) < 1e-12);
}

TEST_CASE("oracle: complex 2x2 with hand-computed spectrum") {
    // [[1, 2i], [3, 4]]: lambda = (5 +- sqrt(9 + 24i)) / 2
    ComplexMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0i;
    a(1, 0) = 3.0;
    a(1, 1) = 4.0;
    const auto root = std::sqrt(std::complex<double>(9.0, 24.0));
    std::vector<std::complex<double>> expect = {(5.0 + root) / 2.0, (5.0 - root) / 2.0};
    auto ev = testsupport::general_eigenvalues(a);
    sort_by_real_then_imag(ev);
    sort_by_real_then_imag(expect);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(ev[i] - expect[i]) < 1e-12);
}

TEST_CASE("oracle: companion matrix recovers known roots") {
    // p(x) = (x - 1)(x + 2)(x - 3i)(x + 3i) = x^4 + x^3 + 7x^2 + 9x - 18
    const std::vector<std::complex<double>> coeff = {1.0, 7.0, 9.0, -18.0}; // x^3..x^0
    ComplexMatrix c(4, 4);
    for (std::size_t j = 0; j < 4; ++j)
        c(0, j) = -coeff[j];
    c(1, 0) = c(2, 1) = c(3, 2) = 1.0;

    auto ev = testsupport::general_eigenvalues(c);
    std::vector<std::complex<double>> expect = {1.0, -2.0, 3.0i, -3.0i};
    sort_by_real_then_imag(ev);
    sort_by_real_then_imag(expect);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(ev[i] - expect[i]) < 1e-10);
}

TEST_CASE("oracle: agrees with the hermitian solver on random hermitian input") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = testsupport::random_hermitian(rng, 6);
        auto sym = qdspin::linalg::hermitian_eigenvalues(a);
        auto gen = testsupport::general_eigenvalues(a);
        std::vector<std::complex<double>> gen_sorted = gen;
        sort_by_real_then_imag(gen_sorted);
        REQUIRE(gen_sorted.size() == sym.size());
        for (std::size_t i = 0; i < sym.size(); ++i) {
            CHECK(std::abs(gen_sorted[i].imag()) < 1e-9);
            CHECK(gen_sorted[i].real() == Catch::Approx(sym[i]).margin(1e-9));
        }
    }
}

TEST_CASE("oracle: spectral abscissa picks the largest real part") {
    ComplexMatrix a(3, 3);
    a(0, 0) = -1.0 + 5.0i;
    a(1, 1) = -0.25 - 2.0i;
    a(2, 2) = -4.0;
    CHECK(testsupport::spectral_abscissa(a) == Catch::Approx(-0.25).margin(1e-12));
}
