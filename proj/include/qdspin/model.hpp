#pragma once

// Five-level model of a single quantum-dot spin driven by a two-photon
// Raman process inside a cavity. Levels, in fixed order:
//
//   0  spin up          (target of the initialization)
//   1  spin down        (start of the pumping cycle)
//   2  trion reached from spin down by the two-photon drive
//   3  trion reached from spin up by the two-photon drive
//   4  relay trion that decays back into the spin ground states
//
// The drive couples 1 -> 2 and 0 -> 3 coherently with equal strength. The
// trions 2 and 3 relax into the relay 4, which decays predominantly into
// spin up (the enhanced channel, rate gamma15) and weakly into spin down
// (gamma25). A slow ground-state spin-flip channel (gamma12) connects the
// two spin states in both directions.
//
// Unit conventions, used across the whole library:
//   * every user-facing rate or coupling is a plain frequency nu = rate/2pi
//     in GHz,
//   * internal generator matrices are angular, in rad/ns,
//   * time is in ns.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace qdspin::model {

using linalg::Complex;
using linalg::ComplexMatrix;

inline constexpr int level_count = 5;

enum class Level : int {
    spin_up = 0,
    spin_down = 1,
    trion_from_down = 2,
    trion_from_up = 3,
    relay_trion = 4,
};

static_assert(static_cast<int>(Level::spin_up) == 0);
static_assert(static_cast<int>(Level::spin_down) == 1);
static_assert(static_cast<int>(Level::trion_from_down) == 2);
static_assert(static_cast<int>(Level::trion_from_up) == 3);
static_assert(static_cast<int>(Level::relay_trion) == 4);

inline constexpr std::size_t index_of(Level l) { return static_cast<std::size_t>(l); }

// frequency in GHz (nu = rate/2pi) -> angular rate in rad/ns
inline double angular(double ghz) { return 2.0 * std::numbers::pi * ghz; }

// Model parameters. All fields are plain frequencies in GHz. The defaults
// are the slow channels of the reference device; the drive strength
// omega_ghz and the enhanced decay gamma15_ghz have no natural default and
// must be set per use.
struct RateSet {
    double omega_ghz = 0.0;          // two-photon drive, 1->2 and 0->3
    double gamma15_ghz = 0.0;        // enhanced relay decay into spin up
    double gamma25_ghz = 1.0e-4;     // residual relay decay into spin down (100 kHz)
    double gamma35_ghz = 8.0;        // trion 2 relaxation into the relay
    double gamma45_ghz = 8.0;        // trion 3 relaxation into the relay
    double gamma12_ghz = 1.0e-5;     // total ground-state spin flip rate (10 kHz)

    // Same model with every frequency multiplied by s. Dynamics generated
    // by the scaled set run s times faster.
    RateSet scaled(double s) const {
        RateSet r = *this;
        r.omega_ghz *= s;
        r.gamma15_ghz *= s;
        r.gamma25_ghz *= s;
        r.gamma35_ghz *= s;
        r.gamma45_ghz *= s;
        r.gamma12_ghz *= s;
        return r;
    }
};

inline void validate(const RateSet& r) {
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("RateSet: ") + name +
                                        " must be finite and non-negative, got " + std::to_string(v));
        }
    };
    check(r.omega_ghz, "omega_ghz");
    check(r.gamma15_ghz, "gamma15_ghz");
    check(r.gamma25_ghz, "gamma25_ghz");
    check(r.gamma35_ghz, "gamma35_ghz");
    check(r.gamma45_ghz, "gamma45_ghz");
    check(r.gamma12_ghz, "gamma12_ghz");
}

// Drive Hamiltonian over hbar, in rad/ns:
//   H/hbar = Omega_ang (|3><0| + |2><1|) + h.c.
inline ComplexMatrix build_hamiltonian(const RateSet& rates) {
    validate(rates);
    ComplexMatrix h(level_count, level_count);
    const double w = angular(rates.omega_ghz);
    h(index_of(Level::trion_from_up), index_of(Level::spin_up)) = w;
    h(index_of(Level::spin_up), index_of(Level::trion_from_up)) = w;
    h(index_of(Level::trion_from_down), index_of(Level::spin_down)) = w;
    h(index_of(Level::spin_down), index_of(Level::trion_from_down)) = w;
    return h;
}

// The six collapse operators, in a fixed order:
//   sqrt(gamma15) |0><4|        relay -> spin up
//   sqrt(gamma25) |1><4|        relay -> spin down
//   sqrt(gamma35) |4><2|        trion 2 -> relay
//   sqrt(gamma45) |4><3|        trion 3 -> relay
//   sqrt(gamma12/2) |1><0|      spin flip up -> down
//   sqrt(gamma12/2) |0><1|      spin flip down -> up
// gamma12 is the total flip rate, split evenly over the two directions, so
// that the bare two-level spin relaxes toward the balanced mixture at
// rate gamma12.
inline std::vector<ComplexMatrix> build_collapse_operators(const RateSet& rates) {
    validate(rates);
    auto jump = [](Level to, Level from, double rate_ghz) {
        ComplexMatrix d(level_count, level_count);
        d(index_of(to), index_of(from)) = std::sqrt(angular(rate_ghz));
        return d;
    };
    std::vector<ComplexMatrix> ops;
    ops.reserve(6);
    ops.push_back(jump(Level::spin_up, Level::relay_trion, rates.gamma15_ghz));
    ops.push_back(jump(Level::spin_down, Level::relay_trion, rates.gamma25_ghz));
    ops.push_back(jump(Level::relay_trion, Level::trion_from_down, rates.gamma35_ghz));
    ops.push_back(jump(Level::relay_trion, Level::trion_from_up, rates.gamma45_ghz));
    ops.push_back(jump(Level::spin_down, Level::spin_up, rates.gamma12_ghz / 2.0));
    ops.push_back(jump(Level::spin_up, Level::spin_down, rates.gamma12_ghz / 2.0));
    return ops;
}

// Column-stacking: vec(rho)[i + n*j] = rho(i, j).
inline std::vector<Complex> vec(const ComplexMatrix& m) {
    std::vector<Complex> v(m.rows() * m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) v[i + m.rows() * j] = m(i, j);
    return v;
}

inline ComplexMatrix unvec(const std::vector<Complex>& v, std::size_t n) {
    if (v.size() != n * n) {
        throw std::invalid_argument("unvec: vector length is not n*n");
    }
    ComplexMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = v[i + n * j];
    return m;
}

// Lindblad generator as a 25x25 superoperator acting on column-stacked
// density matrices, in rad/ns:
//   L = -i (I (x) H - H^T (x) I)
//     + sum_k [ conj(D_k) (x) D_k
//               - 1/2 I (x) (D_k^dag D_k) - 1/2 (D_k^dag D_k)^T (x) I ]
struct Liouvillian {
    ComplexMatrix matrix;
};

inline Liouvillian build_liouvillian(const RateSet& rates) {
    const ComplexMatrix h = build_hamiltonian(rates);
    const ComplexMatrix ident = ComplexMatrix::identity(level_count);

    ComplexMatrix l = linalg::kron(ident, h) - linalg::kron(h.transpose(), ident);
    l *= Complex(0.0, -1.0);

    for (const ComplexMatrix& d : build_collapse_operators(rates)) {
        const ComplexMatrix dd = d.adjoint() * d;
        l += linalg::kron(d.conjugate(), d);
        l -= Complex(0.5, 0.0) * linalg::kron(ident, dd);
        l -= Complex(0.5, 0.0) * linalg::kron(dd.transpose(), ident);
    }
    return Liouvillian{l};
}

// Raised when a matrix fails the density-matrix checks.
class DensityValidationError : public std::runtime_error {
public:
    DensityValidationError(const std::string& invariant, double magnitude, double tolerance)
        : std::runtime_error("density matrix violates " + invariant + ": defect " +
                             std::to_string(magnitude) + " exceeds tolerance " +
                             std::to_string(tolerance)),
          invariant_(invariant), magnitude_(magnitude) {}

    const std::string& invariant() const { return invariant_; }
    double magnitude() const { return magnitude_; }

private:
    std::string invariant_;
    double magnitude_;
};

struct DensityTolerances {
    double hermiticity = 1e-10;   // max entrywise |rho - rho^dag|
    double trace = 1e-9;          // |tr rho - 1|
    double positivity = 1e-9;     // eigenvalues may not drop below -positivity
};

class DensityMatrix;
inline DensityMatrix validate_density(const ComplexMatrix& m, const DensityTolerances& tol = {});

// A 5x5 density matrix. Instances are only created through the named
// factories or through validate_density, so holding one certifies the
// state passed the Hermiticity, trace and positivity checks at build time.
class DensityMatrix {
public:
    // diag(1/2, 1/2, 0, 0, 0): both spin states equally likely, no trions.
    static DensityMatrix equal_spin_mixture() {
        ComplexMatrix m(level_count, level_count);
        m(index_of(Level::spin_up), index_of(Level::spin_up)) = 0.5;
        m(index_of(Level::spin_down), index_of(Level::spin_down)) = 0.5;
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix pure(Level l) {
        ComplexMatrix m(level_count, level_count);
        m(index_of(l), index_of(l)) = 1.0;
        return DensityMatrix(std::move(m));
    }

    const ComplexMatrix& matrix() const { return m_; }

    double population(Level l) const { return m_(index_of(l), index_of(l)).real(); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    friend DensityMatrix validate_density(const ComplexMatrix&, const DensityTolerances&);

    ComplexMatrix m_;
};

// Checks Hermiticity, unit trace and positivity (semidefinite up to the
// tolerance) and wraps the matrix. Throws DensityValidationError naming the
// violated invariant otherwise.
inline DensityMatrix validate_density(const ComplexMatrix& m, const DensityTolerances& tol) {
    if (m.rows() != level_count || m.cols() != level_count) {
        throw std::invalid_argument("validate_density: expected a 5x5 matrix");
    }
    const double herm = m.hermiticity_defect();
    if (herm > tol.hermiticity) {
        throw DensityValidationError("hermiticity", herm, tol.hermiticity);
    }
    const double trace_defect = std::abs(m.trace() - Complex(1.0, 0.0));
    if (trace_defect > tol.trace) {
        throw DensityValidationError("unit trace", trace_defect, tol.trace);
    }
    const auto ev = linalg::hermitian_eigenvalues(m, tol.hermiticity);
    if (ev.front() < -tol.positivity) {
        throw DensityValidationError("positivity", -ev.front(), tol.positivity);
    }
    return DensityMatrix(Complex(0.5, 0.0) * (m + m.adjoint()));
}

} // namespace qdspin::model
