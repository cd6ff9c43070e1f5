#pragma once

// Dense complex linear algebra sized for the 5x5 / 25x25 problems this
// library works with: Kronecker products, matrix exponentials
// (scaling-and-squaring with Pade approximants), pivoted-QR least squares
// and a Jacobi eigensolver for Hermitian matrices. Everything is dense,
// value-semantic and allocation-simple; there is deliberately no sparse or
// iterative machinery here.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdspin::linalg {

using Complex = std::complex<double>;

// Thrown by solve_linear when the system is rank deficient beyond the
// requested tolerance. Carries a cheap condition estimate (ratio of the
// largest to the offending pivoted-QR diagonal).
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

// Dense row-major complex matrix. Equality is always tolerance-based and the
// tolerance is an explicit absolute parameter (see approx_equal).
class ComplexMatrix {
public:
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("ComplexMatrix: incompatible shapes for product");
        }
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex(0.0, 0.0)) continue;
                const Complex* brow = &b.data_[k * b.cols_];
                Complex* crow = &c.data_[i * c.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    friend std::vector<Complex> operator*(const ComplexMatrix& a, const std::vector<Complex>& x) {
        if (a.cols_ != x.size()) {
            throw std::invalid_argument("ComplexMatrix: incompatible shapes for matrix-vector product");
        }
        std::vector<Complex> y(a.rows_, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < a.rows_; ++i) {
            Complex acc(0.0, 0.0);
            const Complex* arow = &a.data_[i * a.cols_];
            for (std::size_t j = 0; j < a.cols_; ++j) acc += arow[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix c(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) c.data_[k] = std::conj(data_[k]);
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    Complex trace() const {
        require_square("trace");
        Complex t(0.0, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    // Maximum absolute column sum.
    double one_norm() const {
        double m = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    // Entrywise comparison with an explicit absolute tolerance.
    bool approx_equal(const ComplexMatrix& o, double abs_tol) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t k = 0; k < data_.size(); ++k) {
            if (std::abs(data_[k] - o.data_[k]) > abs_tol) return false;
        }
        return true;
    }

    // max |A - A^dag| over entries; 0 for an exactly Hermitian matrix.
    double hermiticity_defect() const {
        require_square("hermiticity_defect");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool hermitian_within(double abs_tol) const { return hermiticity_defect() <= abs_tol; }

private:
    void require_same_shape(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument("ComplexMatrix: shape mismatch");
        }
    }
    void require_square(const char* op) const {
        if (!square()) {
            throw std::invalid_argument(std::string("ComplexMatrix: ") + op + " requires a square matrix");
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> data_;
};

// Kronecker product, (a.rows*b.rows) x (a.cols*b.cols).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1) {
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
            const Complex v = a(i1, j1);
            if (v == Complex(0.0, 0.0)) continue;
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
                for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
                    c(i1 * b.rows() + i2, j1 * b.cols() + j2) = v * b(i2, j2);
        }
    }
    return c;
}

namespace detail {

// LU factorization with partial pivoting, then X = A^-1 B. Used for the
// Pade denominator solve inside matexp; A must be well conditioned there by
// construction (norm of the scaled argument is below the Pade threshold).
inline ComplexMatrix lu_solve(ComplexMatrix a, ComplexMatrix b) {
    const std::size_t n = a.rows();
    if (!a.square() || b.rows() != n) {
        throw std::invalid_argument("lu_solve: shape mismatch");
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) {
            throw SingularSystemError("lu_solve: singular matrix", std::numeric_limits<double>::infinity());
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        const Complex akk = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = a(i, k) / akk;
            if (f == Complex(0.0, 0.0)) continue;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    // back substitution on the stored U
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            Complex acc = b(ii, col);
            for (std::size_t j = ii + 1; j < n; ++j) acc -= a(ii, j) * b(j, col);
            b(ii, col) = acc / a(ii, ii);
        }
    }
    return b;
}

} // namespace detail

// exp(a*t) by scaling-and-squaring with diagonal Pade approximants of order
// 3/5/7/9/13, picked from the one-norm of a*t (Higham's thresholds). No
// balancing or trace shift; shifts can overflow for strongly damped
// generators and the problem sizes here do not need them.
inline ComplexMatrix matexp(const ComplexMatrix& a, double t) {
    if (!a.square()) {
        throw std::invalid_argument("matexp: matrix must be square");
    }
    if (!std::isfinite(t)) {
        throw std::invalid_argument("matexp: time must be finite");
    }
    const std::size_t n = a.rows();
    ComplexMatrix b = a;
    b *= Complex(t, 0.0);

    static constexpr double theta3 = 1.495585217958292e-2;
    static constexpr double theta5 = 2.539398330063230e-1;
    static constexpr double theta7 = 9.504178996162932e-1;
    static constexpr double theta9 = 2.097847961257068e0;
    static constexpr double theta13 = 5.371920351148152e0;

    const double eta = b.one_norm();
    int squarings = 0;
    if (eta > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(eta / theta13)));
        const double scale = std::ldexp(1.0, -squarings);
        b *= Complex(scale, 0.0);
    }

    const ComplexMatrix ident = ComplexMatrix::identity(n);
    ComplexMatrix u(n, n), v(n, n);

    auto polynomial_uv = [&](const std::vector<double>& c) {
        // even/odd split: U = B * sum c[2k+1] B^(2k), V = sum c[2k] B^(2k)
        const ComplexMatrix b2 = b * b;
        ComplexMatrix even = ident;
        even *= Complex(c[0], 0.0);
        ComplexMatrix odd = ident;
        odd *= Complex(c[1], 0.0);
        ComplexMatrix pw = ident;
        for (std::size_t k = 2; k < c.size(); k += 2) {
            pw = pw * b2;
            even += Complex(c[k], 0.0) * pw;
            if (k + 1 < c.size()) odd += Complex(c[k + 1], 0.0) * pw;
        }
        u = b * odd;
        v = even;
    };

    if (eta <= theta3) {
        polynomial_uv({120.0, 60.0, 12.0, 1.0});
    } else if (eta <= theta5) {
        polynomial_uv({30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
    } else if (eta <= theta7) {
        polynomial_uv({17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0});
    } else if (eta <= theta9) {
        polynomial_uv({17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                       2162160.0, 110880.0, 3960.0, 90.0, 1.0});
    } else {
        static constexpr double c13[] = {
            64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
            129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
            1323241920.0,        40840800.0,          960960.0,           16380.0,
            182.0,               1.0};
        const ComplexMatrix b2 = b * b;
        const ComplexMatrix b4 = b2 * b2;
        const ComplexMatrix b6 = b2 * b4;
        ComplexMatrix w1 = Complex(c13[13], 0.0) * b6 + Complex(c13[11], 0.0) * b4 + Complex(c13[9], 0.0) * b2;
        ComplexMatrix w2 = Complex(c13[7], 0.0) * b6 + Complex(c13[5], 0.0) * b4 + Complex(c13[3], 0.0) * b2
                         + Complex(c13[1], 0.0) * ident;
        u = b * (b6 * w1 + w2);
        ComplexMatrix z1 = Complex(c13[12], 0.0) * b6 + Complex(c13[10], 0.0) * b4 + Complex(c13[8], 0.0) * b2;
        v = b6 * z1 + Complex(c13[6], 0.0) * b6 + Complex(c13[4], 0.0) * b4 + Complex(c13[2], 0.0) * b2
          + Complex(c13[0], 0.0) * ident;
    }

    ComplexMatrix f = detail::lu_solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) f = f * f;
    return f;
}

struct LeastSquaresSolution {
    std::vector<Complex> x;
    double residual_norm; // euclidean norm of b - a*x
};

// Least-squares solve of a*x = b via Householder QR with column pivoting.
// a may be square or overdetermined. Rank deficiency relative to rank_tol
// raises SingularSystemError with the pivot-ratio condition estimate.
inline LeastSquaresSolution solve_linear(const ComplexMatrix& a, const std::vector<Complex>& b,
                                         double rank_tol = 1e-10) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n) {
        throw std::invalid_argument("solve_linear: system must be square or overdetermined");
    }
    if (b.size() != m) {
        throw std::invalid_argument("solve_linear: right-hand side has wrong length");
    }

    ComplexMatrix r = a;
    std::vector<Complex> qtb = b;
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;

    double first_pivot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        // pivot on the largest remaining column norm
        std::size_t best_j = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += std::norm(r(i, j));
            if (s > best_norm) { best_norm = s; best_j = j; }
        }
        if (best_j != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, best_j));
            std::swap(perm[k], perm[best_j]);
        }

        double colnorm = std::sqrt(std::max(best_norm, 0.0));
        if (k == 0) first_pivot = colnorm;
        const double threshold = rank_tol * first_pivot;
        if (colnorm <= threshold) {
            const double cond = colnorm > 0.0 ? first_pivot / colnorm
                                              : std::numeric_limits<double>::infinity();
            throw SingularSystemError(
                "solve_linear: rank-deficient system (pivot " + std::to_string(k) +
                    ", condition estimate " + std::to_string(cond) + ")",
                cond);
        }

        // Householder reflector zeroing column k below the diagonal
        const Complex x0 = r(k, k);
        const double ax0 = std::abs(x0);
        const Complex phase = ax0 > 0.0 ? x0 / ax0 : Complex(1.0, 0.0);
        const Complex alpha = -phase * colnorm;

        std::vector<Complex> v(m - k);
        v[0] = x0 - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = r(i, k);
        double vsq = 0.0;
        for (const auto& vi : v) vsq += std::norm(vi);
        if (vsq > 0.0) {
            const double beta = 2.0 / vsq;
            for (std::size_t j = k; j < n; ++j) {
                Complex dot(0.0, 0.0);
                for (std::size_t i = k; i < m; ++i) dot += std::conj(v[i - k]) * r(i, j);
                dot *= beta;
                for (std::size_t i = k; i < m; ++i) r(i, j) -= dot * v[i - k];
            }
            Complex dot(0.0, 0.0);
            for (std::size_t i = k; i < m; ++i) dot += std::conj(v[i - k]) * qtb[i];
            dot *= beta;
            for (std::size_t i = k; i < m; ++i) qtb[i] -= dot * v[i - k];
        }
        r(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
    }

    // back substitution, then undo the column permutation
    std::vector<Complex> xp(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Complex acc = qtb[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= r(ii, j) * xp[j];
        xp[ii] = acc / r(ii, ii);
    }
    std::vector<Complex> x(n);
    for (std::size_t j = 0; j < n; ++j) x[perm[j]] = xp[j];

    std::vector<Complex> res = a * x;
    double rs = 0.0;
    for (std::size_t i = 0; i < m; ++i) rs += std::norm(b[i] - res[i]);
    return {std::move(x), std::sqrt(rs)};
}

// All eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi with
// complex rotations. The input must be Hermitian within hermiticity_tol
// (absolute, entrywise); it is symmetrized exactly before iterating.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h,
                                                 double hermiticity_tol = 1e-10) {
    if (!h.square()) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix must be square");
    }
    const double defect = h.hermiticity_defect();
    if (defect > hermiticity_tol) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian (defect " +
                                    std::to_string(defect) + ")");
    }
    const std::size_t n = h.rows();
    ComplexMatrix a = Complex(0.5, 0.0) * (h + h.adjoint());
    if (n == 1) return {a(0, 0).real()};

    const double fro = std::max(a.frobenius_norm(), 1.0);
    const double stop = 1e-15 * fro;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                const Complex phase = apq / mag; // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double tt = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0);
                const double s = tt * c;

                // A <- J^dag A J with J(p,p)=c, J(p,q)=s*phase, J(q,p)=-s*conj(phase), J(q,q)=c
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex apj = a(p, j);
                    const Complex aqj = a(q, j);
                    a(p, j) = c * apj - s * phase * aqj;
                    a(q, j) = s * std::conj(phase) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace qdspin::linalg
