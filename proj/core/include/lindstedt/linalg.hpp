#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

#include "lindstedt/errors.hpp"

namespace lindstedt {

using Cplx = std::complex<double>;

// Truncated polynomial in one formal variable (used to expand the
// perturbation parameter exactly through a fixed order).
template <class C, int N>
struct Jet {
    std::array<C, N + 1> a{};

    Jet() = default;
    Jet(const C& c0) { a[0] = c0; }  // NOLINT: implicit scalar lift
    Jet(double c0) { a[0] = C(c0); }

    static Jet variable(const C& value_unused = C(0)) {
        (void)value_unused;
        Jet j;
        j.a[1] = C(1);
        return j;
    }

    Jet operator-() const {
        Jet r;
        for (int i = 0; i <= N; ++i) r.a[i] = -a[i];
        return r;
    }
    Jet& operator+=(const Jet& o) {
        for (int i = 0; i <= N; ++i) a[i] += o.a[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i <= N; ++i) a[i] -= o.a[i];
        return *this;
    }
    friend Jet operator+(Jet x, const Jet& y) { return x += y; }
    friend Jet operator-(Jet x, const Jet& y) { return x -= y; }
    friend Jet operator*(const Jet& x, const Jet& y) {
        Jet r;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; i + j <= N; ++j) r.a[i + j] += x.a[i] * y.a[j];
        return r;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }

    // Multiplicative inverse; requires a nonzero constant term.
    Jet inverse() const {
        Jet r;
        r.a[0] = C(1) / a[0];
        for (int n = 1; n <= N; ++n) {
            C acc(0);
            for (int j = 1; j <= n; ++j) acc += a[j] * r.a[n - j];
            r.a[n] = -acc / a[0];
        }
        return r;
    }
    friend Jet operator/(const Jet& x, const Jet& y) { return x * y.inverse(); }

    friend bool operator==(const Jet& x, const Jet& y) { return x.a == y.a; }
};

using EpsJet = Jet<Cplx, 4>;

inline double scalar_mag(double x) { return std::abs(x); }
inline double scalar_mag(const Cplx& x) { return std::abs(x); }
template <class C, int N>
double scalar_mag(const Jet<C, N>& x) {
    return std::abs(x.a[0]);
}

template <class S>
S scalar_pow(const S& base, int n) {
    S r(1.0);
    for (int i = 0; i < n; ++i) r = r * base;
    return r;
}

// Small dense matrix over a generic scalar (complex doubles or jets).
template <class S>
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, S(0.0)) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1.0);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    Mat& operator+=(const Mat& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    friend Mat operator+(Mat x, const Mat& y) { return x += y; }
    friend Mat operator-(Mat x, const Mat& y) { return x -= y; }

    Mat operator*(const Mat& o) const {
        assert(cols_ == o.rows_);
        Mat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const S& x = (*this)(i, k);
                for (int j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }

    std::vector<S> operator*(const std::vector<S>& v) const {
        assert(static_cast<int>(v.size()) == cols_);
        std::vector<S> r(rows_, S(0.0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Mat& scale(const S& c) {
        for (auto& x : a_) x = x * c;
        return *this;
    }

    Mat transpose() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    // Gauss-Jordan with partial pivoting on scalar magnitude. Reports the
    // pivot-based condition estimate so callers can reject near-singular
    // inversions.
    Mat inverse(double* min_pivot = nullptr) const {
        assert(rows_ == cols_);
        const int n = rows_;
        Mat a(*this);
        Mat inv = identity(n);
        double minp = -1.0;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            double best = scalar_mag(a(col, col));
            for (int i = col + 1; i < n; ++i) {
                double m = scalar_mag(a(i, col));
                if (m > best) {
                    best = m;
                    piv = i;
                }
            }
            if (best == 0.0) throw NearSingularInversion("matrix inverse: zero pivot");
            if (minp < 0.0 || best < minp) minp = best;
            if (piv != col) {
                for (int j = 0; j < n; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
            }
            S d = a(col, col);
            for (int j = 0; j < n; ++j) {
                a(col, j) = a(col, j) / d;
                inv(col, j) = inv(col, j) / d;
            }
            for (int i = 0; i < n; ++i) {
                if (i == col) continue;
                S f = a(i, col);
                if (scalar_mag(f) == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    a(i, j) -= f * a(col, j);
                    inv(i, j) -= f * inv(col, j);
                }
            }
        }
        if (min_pivot) *min_pivot = minp;
        return inv;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<S> a_;
};

using MatC = Mat<Cplx>;
using MatJ = Mat<EpsJet>;
using MatR = Mat<double>;

// Operator infinity norm (max absolute row sum); submultiplicative.
template <class S>
double inf_norm(const Mat<S>& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += scalar_mag(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

template <class S>
Mat<S> conj_transpose(const Mat<S>& m) {
    Mat<S> r(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(const MatR& m);

}  // namespace lindstedt
