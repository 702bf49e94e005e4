#pragma once

#include <array>

#include "gk/matrix.hpp"

namespace gk::tables {

// Shared between the numeric fiber algebra (T = double) and the symbolic
// twistor construction (T = FieldExpr).  All matrices act on components in
// the frame order (e1, e2, eta1, eta2).

/// Plus-sheet structure I = x1 I1 + x2 I2 + x3 I3.
template <class T>
Mat<T> structure_plus_mat(const T& x1, const T& x2, const T& x3) {
    Mat<T> m(4, 4);
    m(0, 0) = x2;
    m(1, 0) = x1 + x3;
    m(0, 1) = -(x1 - x3);
    m(1, 1) = -x2;
    m(2, 2) = -x2;
    m(3, 2) = x1 - x3;
    m(2, 3) = -(x1 + x3);
    m(3, 3) = x2;
    return m;
}

/// Minus-sheet structure J = y1 J1 + y2 J2 + y3 J3.
template <class T>
Mat<T> structure_minus_mat(const T& y1, const T& y2, const T& y3) {
    Mat<T> m(4, 4);
    m(0, 0) = y2;
    m(3, 0) = y1 - y3;
    m(1, 1) = y2;
    m(2, 1) = -(y1 - y3);
    m(1, 2) = y1 + y3;
    m(2, 2) = -y2;
    m(0, 3) = -(y1 + y3);
    m(3, 3) = -y2;
    return m;
}

/// Coordinates (c1,c2,c3) of a matrix known to lie in span{I1,I2,I3}.
template <class T>
std::array<T, 3> span_plus_coords(const Mat<T>& m) {
    T half{0.5};
    return {(m(1, 0) - m(0, 1)) * half, m(0, 0), (m(1, 0) + m(0, 1)) * half};
}

/// Coordinates of a matrix in span{J1,J2,J3}.
template <class T>
std::array<T, 3> span_minus_coords(const Mat<T>& m) {
    T half{0.5};
    return {(m(1, 2) + m(3, 0)) * half, m(0, 0), (m(1, 2) - m(3, 0)) * half};
}

/// Connection endomorphism of TM+T*M for the base direction m in {0,1}:
/// vector block G^k_j = Gamma^k_{mj}, covector block minus its transpose.
template <class T>
Mat<T> connection_endo(const std::array<std::array<T, 2>, 2>& gamma_m) {
    Mat<T> g(4, 4);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            g(k, j) = gamma_m[k][j];
            g(2 + k, 2 + j) = -gamma_m[j][k];
        }
    return g;
}

/// Extension of a curvature endomorphism rho on TM to TM+T*M: vector
/// block rho, covector block -rho^T.
template <class T>
Mat<T> hat_extension(const Mat<T>& rho) {
    Mat<T> m(4, 4);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
            m(k, j) = rho(k, j);
            m(2 + k, 2 + j) = -rho(j, k);
        }
    return m;
}

/// Gram matrix of the fiber metric h on the plus sheet chart frame
/// tau_i = I(w_i), w_2 = (x2/x1, 1, 0), w_3 = (x3/x1, 0, 1):
/// h(I(w), I(w')) = -2 (w1 w1' - w2 w2' - w3 w3').
template <class T>
Mat<T> fiber_h_gram(const T& x1, const T& x2, const T& x3) {
    Mat<T> h(2, 2);
    T x1sq = x1 * x1;
    h(0, 0) = T{2} * (x1sq - x2 * x2) / x1sq;
    h(0, 1) = T{-2} * x2 * x3 / x1sq;
    h(1, 0) = h(0, 1);
    h(1, 1) = T{2} * (x1sq - x3 * x3) / x1sq;
    return h;
}

/// Closed-form inverse of fiber_h_gram (det of the scaled Gram is x1^2).
template <class T>
Mat<T> fiber_h_gram_inverse(const T& x1, const T& x2, const T& x3) {
    Mat<T> g(2, 2);
    T half{0.5};
    T x1sq = x1 * x1;
    g(0, 0) = half * (x1sq - x3 * x3);
    g(0, 1) = half * (x2 * x3);
    g(1, 0) = g(0, 1);
    g(1, 1) = half * (x1sq - x2 * x2);
    return g;
}

}  // namespace gk::tables
