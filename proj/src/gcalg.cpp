#include "gk/gcalg.hpp"

#include <cmath>

#include "gk/structure_tables.hpp"

namespace gk::gcalg {

namespace {

Eigen::Matrix4d to_eigen(const Mat<double>& m) {
    Eigen::Matrix4d r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = m(i, j);
    return r;
}

Eigen::Matrix2d jhat() {
    Eigen::Matrix2d j;
    j << 0, -1, 1, 0;
    return j;
}

}  // namespace

double neutral_pairing(const GVec& a, const GVec& b) {
    return 0.5 * (a[2] * b[0] + a[3] * b[1] + b[2] * a[0] + b[3] * a[1]);
}

Eigen::Matrix4d neutral_gram() {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 2) = g(2, 0) = g(1, 3) = g(3, 1) = 0.5;
    return g;
}

QBasis QBasis::standard() {
    QBasis q;
    q.q[0] = gvec(1, 0, 1, 0);
    q.q[1] = gvec(0, 1, 0, 1);
    q.q[2] = gvec(1, 0, -1, 0);
    q.q[3] = gvec(0, 1, 0, -1);
    q.eps = {1, 1, -1, -1};
    return q;
}

Hyper3 Hyper3::make(double x1, double x2, double x3, double tol) {
    Hyper3 h{x1, x2, x3};
    if (std::abs(h.constraint_residual()) > tol)
        throw std::invalid_argument("hyperboloid point violates x1^2 - x2^2 - x3^2 = 1");
    return h;
}

Hyper3 Hyper3::from_chart(int sigma, double c2, double c3) {
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sheet sign must be +1 or -1");
    return Hyper3{sigma * std::sqrt(1.0 + c2 * c2 + c3 * c3), c2, c3};
}

bool is_neutral_skew(const GEndo& m, double tol) {
    Eigen::Matrix4d g = neutral_gram();
    return (g * m + m.transpose() * g).cwiseAbs().maxCoeff() <= tol;
}

bool is_structure(const GEndo& m, double tol) {
    return is_neutral_skew(m, tol) &&
           (m * m + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <= tol;
}

GEndo structure_plus(const Hyper3& x) {
    Hyper3 v = Hyper3::make(x.x1, x.x2, x.x3);  // re-check the invariant
    return to_eigen(tables::structure_plus_mat<double>(v.x1, v.x2, v.x3));
}

GEndo structure_minus(const Hyper3& y) {
    Hyper3 v = Hyper3::make(y.x1, y.x2, y.x3);
    return to_eigen(tables::structure_minus_mat<double>(v.x1, v.x2, v.x3));
}

GEndo from_complex(const Eigen::Matrix2d& k, double tol) {
    if ((k * k + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("from_complex: K^2 = -Id violated");
    GEndo m = GEndo::Zero();
    m.topLeftCorner<2, 2>() = k;
    m.bottomRightCorner<2, 2>() = -k.transpose();
    return m;
}

GEndo from_symplectic(double w) {
    if (w == 0.0) throw std::invalid_argument("from_symplectic: degenerate form");
    GEndo m = GEndo::Zero();
    m.bottomLeftCorner<2, 2>() = w * jhat();
    m.topRightCorner<2, 2>() = jhat() / w;
    return m;
}

Orientation orientation_class(const GEndo& j, double tol) {
    if (!is_structure(j, tol)) throw std::invalid_argument("orientation_class: not a structure");
    QBasis qb = QBasis::standard();
    Eigen::Matrix4d g = neutral_gram();
    auto pair = [&](const GVec& a, const GVec& b) { return a.dot(g * b); };

    GVec a1 = qb.q[0];  // <Q1,Q1> = 1
    GVec a2 = j * a1;
    // orthogonal complement of span{a1, a2} is negative definite; take the
    // projected Q with the most negative norm
    GVec a3;
    double best = 0.0;
    for (int k = 0; k < 4; ++k) {
        GVec c = qb.q[k] - pair(qb.q[k], a1) * a1 - pair(qb.q[k], a2) * a2;
        double n = pair(c, c);
        if (n < best) {
            best = n;
            a3 = c;
        }
    }
    if (best > -1e-12) throw std::logic_error("orientation_class: degenerate complement");
    a3 /= std::sqrt(-best);
    GVec a4 = j * a3;

    Eigen::Matrix4d basis;
    basis.col(0) = a1;
    basis.col(1) = a2;
    basis.col(2) = a3;
    basis.col(3) = a4;
    return basis.determinant() > 0 ? Orientation::Plus : Orientation::Minus;
}

Eigen::Matrix4d b_shear(double b) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.bottomLeftCorner<2, 2>() = b * jhat();
    return m;
}

Eigen::Matrix4d beta_shear(double b) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topRightCorner<2, 2>() = b * jhat();
    return m;
}

GEndo b_transform(const GEndo& j, double b, double tol) {
    if (!is_structure(j, tol)) throw std::invalid_argument("b_transform: not a structure");
    return b_shear(b) * j * b_shear(-b);
}

GEndo beta_transform(const GEndo& j, double b, double tol) {
    if (!is_structure(j, tol)) throw std::invalid_argument("beta_transform: not a structure");
    return beta_shear(b) * j * beta_shear(-b);
}

FiberTangent FiberTangent::make(const GEndo& base, const GEndo& q, double tol) {
    if (!is_structure(base, tol)) throw std::invalid_argument("fiber tangent: base is not a structure");
    if (!is_neutral_skew(q, tol)) throw std::invalid_argument("fiber tangent: q is not skew");
    if ((q * base + base * q).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("fiber tangent: q does not anti-commute with base");
    return FiberTangent{base, q};
}

double so_metric(const GEndo& a, const GEndo& b) { return -0.5 * (a * b).trace(); }

namespace {

/// The six S_ij (i<j) sections in the (e,eta) frame.
std::array<GEndo, 6> so_basis() {
    QBasis qb = QBasis::standard();
    Eigen::Matrix4d qmat;
    for (int k = 0; k < 4; ++k) qmat.col(k) = qb.q[k];
    Eigen::Matrix4d qinv = qmat.inverse();

    std::array<GEndo, 6> out;
    int idx = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Eigen::Matrix4d s_q = Eigen::Matrix4d::Zero();  // action in Q components
            for (int k = 0; k < 4; ++k) {
                if (k == i) s_q(j, k) += qb.eps[k];
                if (k == j) s_q(i, k) -= qb.eps[k];
            }
            out[idx++] = qmat * s_q * qinv;
        }
    return out;
}

}  // namespace

FiberGeometry fiber_geometry(const GEndo& j, double tol) {
    if (!is_structure(j, tol)) throw std::invalid_argument("fiber_geometry: not a structure");
    auto basis6 = so_basis();

    // tangent space = kernel of Q -> QJ + JQ inside so
    Eigen::Matrix<double, 16, 6> op;
    for (int b = 0; b < 6; ++b) {
        Eigen::Matrix4d anti = basis6[b] * j + j * basis6[b];
        op.col(b) = Eigen::Map<Eigen::Matrix<double, 16, 1>>(anti.data());
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[3] < 1e-8 || sv[4] > 1e-8 * std::max(1.0, sv[0]))
        throw std::logic_error("fiber_geometry: tangent space is not 2-dimensional");

    FiberGeometry fg;
    for (int a = 0; a < 2; ++a) {
        Eigen::Matrix<double, 6, 1> c = svd.matrixV().col(4 + a);
        GEndo q = GEndo::Zero();
        for (int b = 0; b < 6; ++b) q += c[b] * basis6[b];
        fg.basis[a] = q;
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) fg.h(a, b) = -so_metric(fg.basis[a], fg.basis[b]);

    for (int a = 0; a < 2; ++a) fg.k.col(a) = fg.components(j * fg.basis[a]);
    return fg;
}

Eigen::Vector2d FiberGeometry::components(const GEndo& q) const {
    Eigen::Vector2d rhs;
    for (int b = 0; b < 2; ++b) rhs[b] = -so_metric(q, basis[b]);  // h(q, basis_b)
    return h.ldlt().solve(rhs);
}

GEndo FiberGeometry::from_components(const Eigen::Vector2d& c) const {
    return c[0] * basis[0] + c[1] * basis[1];
}

double positivity_min_eig(const GEndo& i, const GEndo& j) {
    Eigen::Matrix4d g = neutral_gram();
    Eigen::Matrix4d m = i.transpose() * g * j;
    Eigen::Matrix4d sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym);
    return es.eigenvalues().minCoeff();
}

bool positivity(const GEndo& i, const GEndo& j, double tol) {
    if (orientation_class(i) != Orientation::Plus)
        throw std::invalid_argument("positivity: first structure must induce the canonical orientation");
    if (orientation_class(j) != Orientation::Minus)
        throw std::invalid_argument("positivity: second structure must induce the opposite orientation");
    return positivity_min_eig(i, j) > tol;
}

Eigen::Matrix<double, 8, 8> GksFiberPair::pairing_gram() {
    Eigen::Matrix<double, 8, 8> g = Eigen::Matrix<double, 8, 8>::Zero();
    for (int a = 0; a < 4; ++a) g(a, 4 + a) = g(4 + a, a) = 0.5;
    return g;
}

GksFiberPair gks_fiber_pair(const GEndo& i, const GEndo& j, double tol) {
    if (!positivity(i, j, tol)) throw std::invalid_argument("gks_fiber_pair: pair is not positive");
    GksFiberPair p;
    p.plus = fiber_geometry(i, tol);
    p.minus = fiber_geometry(j, tol);

    const Eigen::Matrix2d kp = p.plus.k, km = p.minus.k;
    const Eigen::Matrix2d hp = p.plus.h, hm = p.minus.h;

    p.op_i.setZero();
    p.op_j.setZero();
    // component blocks: u = 0..1, v = 2..3, phi = 4..5, psi = 6..7
    p.op_i.block<2, 2>(0, 0) = kp;
    p.op_i.block<2, 2>(2, 6) = km * hm.inverse();
    p.op_i.block<2, 2>(4, 4) = -kp.transpose();
    p.op_i.block<2, 2>(6, 2) = -km.transpose() * hm;

    p.op_j.block<2, 2>(0, 4) = kp * hp.inverse();
    p.op_j.block<2, 2>(2, 2) = km;
    p.op_j.block<2, 2>(4, 0) = -kp.transpose() * hp;
    p.op_j.block<2, 2>(6, 6) = -km.transpose();
    return p;
}

}  // namespace gk::gcalg
