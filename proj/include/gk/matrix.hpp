#pragma once

#include <stdexcept>
#include <vector>

namespace gk {

/// Dense row-major matrix over an arbitrary ring-like scalar (double,
/// FieldExpr, ...).  Only the small fixed sizes used by this project
/// (2..12) ever occur, so no effort is spent on large-matrix performance.
template <class T>
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows * cols)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    static Mat identity(int n, const T& one) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int i, int j) { return d_[static_cast<size_t>(i * cols_ + j)]; }
    const T& operator()(int i, int j) const { return d_[static_cast<size_t>(i * cols_ + j)]; }

    Mat transpose() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat: size mismatch in product");
        Mat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                for (int j = 0; j < o.cols_; ++j) r(i, j) = r(i, j) + a * o(k, j);
            }
        return r;
    }

    Mat operator+(const Mat& o) const {
        check_same(o);
        Mat r(rows_, cols_);
        for (size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] + o.d_[i];
        return r;
    }

    Mat operator-(const Mat& o) const {
        check_same(o);
        Mat r(rows_, cols_);
        for (size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] - o.d_[i];
        return r;
    }

    Mat operator-() const {
        Mat r(rows_, cols_);
        for (size_t i = 0; i < d_.size(); ++i) r.d_[i] = -d_[i];
        return r;
    }

    Mat scaled(const T& s) const {
        Mat r(rows_, cols_);
        for (size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] * s;
        return r;
    }

    void set_block(int i0, int j0, const Mat& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_)
            throw std::invalid_argument("Mat: block out of range");
        for (int i = 0; i < b.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    Mat block(int i0, int j0, int r, int c) const {
        if (i0 + r > rows_ || j0 + c > cols_) throw std::invalid_argument("Mat: block out of range");
        Mat b(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }

    /// Commutator [a, b] = a*b - b*a.
    friend Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

private:
    void check_same(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: size mismatch");
    }

    int rows_, cols_;
    std::vector<T> d_;
};

/// Determinant by cofactor expansion, exact for symbolic scalars.  n <= 4.
template <class T>
T mat_det(const Mat<T>& m) {
    const int n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("mat_det: square matrix required");
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (n > 4) throw std::invalid_argument("mat_det: supported up to 4x4");
    T det{};
    for (int j = 0; j < n; ++j) {
        Mat<T> sub(n - 1, n - 1);
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                sub(i - 1, cc++) = m(i, c);
            }
        }
        T term = m(0, j) * mat_det(sub);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

/// Inverse via adjugate; scalars must support division.  n <= 4.
template <class T>
Mat<T> mat_inverse(const Mat<T>& m) {
    const int n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("mat_inverse: square matrix required");
    T det = mat_det(m);
    Mat<T> inv(n, n);
    if (n == 1) {
        inv(0, 0) = T{1} / det;
        return inv;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Mat<T> sub(n - 1, n - 1);
            int rr = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub(rr, cc++) = m(r, c);
                }
                ++rr;
            }
            T cof = mat_det(sub);
            if ((i + j) % 2) cof = -cof;
            inv(j, i) = cof / det;  // adjugate transposes indices
        }
    return inv;
}

}  // namespace gk
