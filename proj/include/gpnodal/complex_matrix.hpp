#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpnodal {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

struct NotHermitian : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotPSD : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadDimension : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidDensityMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense square complex matrix, row-major. Sized for the 2x2/4x4 operators
/// this project works with; no attempt at large-matrix performance.
class ComplexMatrix {
public:
    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw BadDimension("ComplexMatrix: dim must be >= 1");
    }

    static ComplexMatrix identity(int dim) {
        ComplexMatrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

    int dim() const { return dim_; }

    Complex& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const Complex& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * dim_ + j];
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    /// Largest entry magnitude.
    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    /// max_ij |a_ij - conj(a_ji)|; zero for an exactly Hermitian matrix.
    double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    bool all_finite() const {
        for (const Complex& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (Complex& z : a_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.check_same_dim(b);
        const int n = a.dim_;
        ComplexMatrix r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

private:
    void check_same_dim(const ComplexMatrix& o) const {
        if (dim_ != o.dim_) throw BadDimension("ComplexMatrix: dimension mismatch");
    }

    int dim_;
    std::vector<Complex> a_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int na = a.dim(), nb = b.dim();
    ComplexMatrix r(na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            const Complex aij = a(i, j);
            if (aij == 0.0) continue;
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l) r(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return r;
}

/// Transpose of the second tensor factor of a 4x4 operator on a 2x2 system:
/// entry ((a,b),(c,d)) -> ((a,d),(c,b)). Involution; preserves the trace.
inline ComplexMatrix partial_transpose_2(const ComplexMatrix& m) {
    if (m.dim() != 4) throw BadDimension("partial_transpose_2: dim must be 4");
    ComplexMatrix r(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) r(2 * a + b, 2 * c + d) = m(2 * a + d, 2 * c + b);
    return r;
}

inline ComplexVector apply(const ComplexMatrix& m, const ComplexVector& v) {
    const int n = m.dim();
    if (static_cast<int>(v.size()) != n) throw BadDimension("apply: size mismatch");
    ComplexVector r(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] += m(i, j) * v[j];
    return r;
}

inline Complex inner(const ComplexVector& u, const ComplexVector& v) {
    if (u.size() != v.size()) throw BadDimension("inner: size mismatch");
    Complex s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
    return s;
}

/// |v><v| as a matrix.
inline ComplexMatrix projector(const ComplexVector& v) {
    const int n = static_cast<int>(v.size());
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = v[i] * std::conj(v[j]);
    return r;
}

}  // namespace gpnodal
