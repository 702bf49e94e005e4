#include "gk/twistor.hpp"

#include <cmath>

#include "gk/structure_tables.hpp"

namespace gk::twistor {

using connection::ConnectionSpec;
using fields::Section;
using fields::StructureField;

namespace {

const std::array<std::string, 4> kFiberNames = {"a2", "a3", "b2", "b3"};

Eigen::MatrixXd to_eigen(const Mat<double>& m) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

Mat<double> from_eigen(const Eigen::MatrixXd& m) {
    Mat<double> r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

/// Plus/minus fiber data as fields on the 6-chart.
struct FiberExprs {
    FieldExpr x1, x2, x3;   // plus sheet ambient coordinates
    FieldExpr y1, y2, y3;   // minus sheet
    MatExpr imat, jmat;     // 4x4 structures
    MatExpr kp, km;         // 2x2 fiber complex structures in chart frame
    MatExpr hp, hm;         // 2x2 fiber metrics
    MatExpr hp_inv, hm_inv;
};

FiberExprs fiber_exprs(const TwistorChart& tc) {
    FiberExprs f;
    FieldExpr a2 = FieldExpr::variable("a2"), a3 = FieldExpr::variable("a3");
    FieldExpr b2 = FieldExpr::variable("b2"), b3 = FieldExpr::variable("b3");
    FieldExpr sig(static_cast<double>(tc.sheet));
    f.x1 = sig * sqrt(FieldExpr(1.0) + a2 * a2 + a3 * a3);
    f.x2 = a2;
    f.x3 = a3;
    f.y1 = sig * sqrt(FieldExpr(1.0) + b2 * b2 + b3 * b3);
    f.y2 = b2;
    f.y3 = b3;
    f.imat = tables::structure_plus_mat(f.x1, f.x2, f.x3);
    f.jmat = tables::structure_minus_mat(f.y1, f.y2, f.y3);
    f.hp = tables::fiber_h_gram(f.x1, f.x2, f.x3);
    f.hm = tables::fiber_h_gram(f.y1, f.y2, f.y3);
    f.hp_inv = tables::fiber_h_gram_inverse(f.x1, f.x2, f.x3);
    f.hm_inv = tables::fiber_h_gram_inverse(f.y1, f.y2, f.y3);

    // chart frame tau_i = I(w_i), w_2 = (x2/x1, 1, 0), w_3 = (x3/x1, 0, 1);
    // K tau_i = I o tau_i, extracted back to chart components
    auto kmat = [](const MatExpr& s, const FieldExpr& c1, const FieldExpr& c2, const FieldExpr& c3,
                   bool plus) {
        MatExpr k(2, 2);
        for (int i = 0; i < 2; ++i) {
            FieldExpr w2 = (i == 0) ? FieldExpr(1.0) : FieldExpr(0.0);
            FieldExpr w3 = (i == 0) ? FieldExpr(0.0) : FieldExpr(1.0);
            FieldExpr w1 = ((i == 0) ? c2 : c3) / c1;
            MatExpr tau = plus ? tables::structure_plus_mat(w1, w2, w3)
                               : tables::structure_minus_mat(w1, w2, w3);
            MatExpr img = s * tau;
            auto coords = plus ? tables::span_plus_coords(img) : tables::span_minus_coords(img);
            k(0, i) = coords[1];
            k(1, i) = coords[2];
        }
        return k;
    };
    f.kp = kmat(f.imat, f.x1, f.x2, f.x3, true);
    f.km = kmat(f.jmat, f.y1, f.y2, f.y3, false);
    return f;
}

/// Fiber velocities of the horizontal lift: column m holds the chart
/// velocity of (a2, a3, b2, b3) under parallel transport along d_m.
MatExpr lift_matrix(const ConnectionSpec& spec, const FiberExprs& f) {
    MatExpr lift(4, 2);
    for (int m = 0; m < 2; ++m) {
        const MatExpr& ghat = spec.endo(m);
        MatExpr idot = f.imat * ghat - ghat * f.imat;  // -[G(d_m), I]
        MatExpr jdot = f.jmat * ghat - ghat * f.jmat;
        auto ci = tables::span_plus_coords(idot);
        auto cj = tables::span_minus_coords(jdot);
        lift(0, m) = ci[1];
        lift(1, m) = ci[2];
        lift(2, m) = cj[1];
        lift(3, m) = cj[2];
    }
    return lift;
}

struct FrameChange {
    MatExpr p, p_inv;  // 12x12
};

/// Frame change between the adapted (horizontal/vertical) frame and the
/// chart frame; block triangular with identity diagonal, so the inverse
/// is explicit.
FrameChange frame_change(const MatExpr& lift) {
    FrameChange fc;
    FieldExpr one(1.0);
    fc.p = MatExpr::identity(12, one);
    fc.p_inv = MatExpr::identity(12, one);
    for (int i = 0; i < 4; ++i)
        for (int m = 0; m < 2; ++m) {
            fc.p(2 + i, m) = lift(i, m);           // tangent: vertical rows pick up F X
            fc.p_inv(2 + i, m) = -lift(i, m);
            fc.p(6 + m, 8 + i) = -lift(i, m);      // cotangent: du rows pick up -F^T theta
            fc.p_inv(6 + m, 8 + i) = lift(i, m);
        }
    return fc;
}

// adapted slot layout
constexpr std::array<int, 4> kHorSlots = {0, 1, 6, 7};      // (e1, e2, eta1, eta2)
constexpr std::array<int, 2> kUSlots = {2, 3};
constexpr std::array<int, 2> kVSlots = {4, 5};
constexpr std::array<int, 2> kPhiSlots = {8, 9};
constexpr std::array<int, 2> kPsiSlots = {10, 11};

void put_block(MatExpr& m, const std::array<int, 2>& rows, const std::array<int, 2>& cols,
               const MatExpr& b) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]) = b(i, j);
}

Chart make_six_chart(const Chart& base, double fiber_bound) {
    if (base.dim() != 2) throw std::invalid_argument("twistor chart: base must be 2-dimensional");
    std::vector<std::string> names = base.names();
    std::vector<std::array<double, 2>> bounds = base.bounds();
    for (const auto& fn : kFiberNames) {
        if (base.find(fn) >= 0)
            throw std::invalid_argument("twistor chart: base coordinate name '" + fn +
                                        "' collides with a fiber coordinate");
        names.push_back(fn);
        bounds.push_back({-fiber_bound, fiber_bound});
    }
    return Chart(std::move(names), std::move(bounds));
}

}  // namespace

TwistorChart TwistorChart::make(const Chart& base, int sheet_plus, int sheet_minus,
                                double fiber_bound) {
    if (sheet_plus != sheet_minus)
        throw std::invalid_argument("twistor chart: sheet signs must agree (positivity)");
    if (sheet_plus != 1 && sheet_plus != -1)
        throw std::invalid_argument("twistor chart: sheet sign must be +1 or -1");
    TwistorChart tc;
    tc.base = base;
    tc.sheet = sheet_plus;
    tc.fiber_bound = fiber_bound;
    tc.six = make_six_chart(base, fiber_bound);
    return tc;
}

void TwistorPoint::validate(const TwistorChart& tc) const {
    tc.six.require_inside(span());
    gcalg::GEndo i4 = gcalg::structure_plus(hyper_plus(tc));
    gcalg::GEndo j4 = gcalg::structure_minus(hyper_minus(tc));
    if (!gcalg::positivity(i4, j4))
        throw std::invalid_argument("twistor point: induced pair fails positivity");
}

Matrix12 neutral_gram12() {
    Matrix12 g = Matrix12::Zero();
    for (int i = 0; i < 6; ++i) g(i, 6 + i) = g(6 + i, i) = 0.5;
    return g;
}

BigStructure big_structures(const ConnectionSpec& spec, const TwistorChart& tc) {
    if (!(spec.chart() == tc.base))
        throw std::invalid_argument("big_structures: connection chart differs from twistor base");
    connection::require_torsion_free(spec);

    FiberExprs f = fiber_exprs(tc);
    MatExpr lift = lift_matrix(spec, f);
    FrameChange fc = frame_change(lift);

    MatExpr i_ad(12, 12), j_ad(12, 12);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            i_ad(kHorSlots[static_cast<size_t>(r)], kHorSlots[static_cast<size_t>(c)]) = f.imat(r, c);
            j_ad(kHorSlots[static_cast<size_t>(r)], kHorSlots[static_cast<size_t>(c)]) = f.jmat(r, c);
        }

    // vertical action of the fiber generalized Kaehler pair:
    //   I(U,V) = I o U - V_flat o J          I(phi,psi) = -phi o I + J o psi_sharp
    //   J(U,V) = J o V - U_flat o I          J(phi,psi) = -psi o J + I o phi_sharp
    put_block(i_ad, kUSlots, kUSlots, f.kp);
    put_block(i_ad, kVSlots, kPsiSlots, f.km * f.hm_inv);
    put_block(i_ad, kPhiSlots, kPhiSlots, -(f.kp.transpose()));
    put_block(i_ad, kPsiSlots, kVSlots, -(f.km.transpose() * f.hm));

    put_block(j_ad, kUSlots, kPhiSlots, f.kp * f.hp_inv);
    put_block(j_ad, kVSlots, kVSlots, f.km);
    put_block(j_ad, kPhiSlots, kUSlots, -(f.kp.transpose() * f.hp));
    put_block(j_ad, kPsiSlots, kPsiSlots, -(f.km.transpose()));

    MatExpr i_chart = fc.p * i_ad * fc.p_inv;
    MatExpr j_chart = fc.p * j_ad * fc.p_inv;

    return BigStructure{tc, lift, StructureField(tc.six, std::move(i_chart)),
                        StructureField(tc.six, std::move(j_chart))};
}

Vector6 horizontal_lift(const ConnectionSpec& spec, const TwistorChart& tc,
                        const Eigen::Vector2d& x_base, const TwistorPoint& k) {
    connection::require_torsion_free(spec);
    k.validate(tc);

    std::array<double, 2> bp = k.base();
    EvalCache cache(spec.chart(), bp);
    Eigen::Matrix4d i4 = gcalg::structure_plus(k.hyper_plus(tc));
    Eigen::Matrix4d j4 = gcalg::structure_minus(k.hyper_minus(tc));

    Vector6 out;
    out[0] = x_base[0];
    out[1] = x_base[1];
    Eigen::Matrix4d ghat = x_base[0] * eval_matrix(spec.endo(0), cache) +
                           x_base[1] * eval_matrix(spec.endo(1), cache);
    Eigen::Matrix4d idot = i4 * ghat - ghat * i4;
    Eigen::Matrix4d jdot = j4 * ghat - ghat * j4;
    auto ci = tables::span_plus_coords(from_eigen(idot));
    auto cj = tables::span_minus_coords(from_eigen(jdot));
    out[2] = ci[1];
    out[3] = ci[2];
    out[4] = cj[1];
    out[5] = cj[2];
    return out;
}

Section horizontal_section(const BigStructure& bs, const gcalg::GVec& a) {
    const Chart& six = bs.tc.six;
    std::vector<FieldExpr> vec(6), cov(6);
    vec[0] = FieldExpr(a[0]);
    vec[1] = FieldExpr(a[1]);
    for (int i = 0; i < 4; ++i)
        vec[static_cast<size_t>(2 + i)] = bs.lift(i, 0) * FieldExpr(a[0]) + bs.lift(i, 1) * FieldExpr(a[1]);
    cov[0] = FieldExpr(a[2]);
    cov[1] = FieldExpr(a[3]);
    return Section::make(six, std::move(vec), std::move(cov));
}

Section vertical_tangent_section(const TwistorChart& tc, int i) {
    if (i < 0 || i > 3) throw std::invalid_argument("vertical_tangent_section: index 0..3");
    return Section::frame(tc.six, 2 + i);
}

Section vertical_coform_section(const BigStructure& bs, int i) {
    if (i < 0 || i > 3) throw std::invalid_argument("vertical_coform_section: index 0..3");
    const Chart& six = bs.tc.six;
    std::vector<FieldExpr> vec(6), cov(6);
    cov[static_cast<size_t>(2 + i)] = FieldExpr(1.0);
    cov[0] = -bs.lift(i, 0);
    cov[1] = -bs.lift(i, 1);
    return Section::make(six, std::move(vec), std::move(cov));
}

Vector12 nijenhuis_twistor(const BigStructure& bs, char which, int frame_a, int frame_b,
                           const TwistorPoint& k) {
    if (frame_a < 0 || frame_a > 11 || frame_b < 0 || frame_b > 11)
        throw std::invalid_argument("nijenhuis_twistor: frame index 0..11");
    k.validate(bs.tc);
    const StructureField& sf = bs.structure(which);
    Section a = Section::frame(bs.tc.six, frame_a);
    Section b = Section::frame(bs.tc.six, frame_b);
    return fields::nijenhuis_field(sf, a, b, k.span());
}

namespace {

Eigen::Matrix4d act_on(const Eigen::Matrix4d& rho_hat, const Eigen::Matrix4d& s) {
    return rho_hat * s - s * rho_hat;
}

Eigen::Vector2d plus_coords(const Eigen::Matrix4d& m) {
    auto c = tables::span_plus_coords(from_eigen(m));
    return {c[1], c[2]};
}

Eigen::Vector2d minus_coords(const Eigen::Matrix4d& m) {
    auto c = tables::span_minus_coords(from_eigen(m));
    return {c[1], c[2]};
}

struct PointFiber {
    Eigen::Matrix4d i4, j4;
    Eigen::Matrix2d hp, hm, kp, km;
    Eigen::MatrixXd lift;  // 4x2
};

PointFiber eval_fiber(const BigStructure& bs, const TwistorPoint& k) {
    PointFiber pf;
    pf.i4 = gcalg::structure_plus(k.hyper_plus(bs.tc));
    pf.j4 = gcalg::structure_minus(k.hyper_minus(bs.tc));
    gcalg::Hyper3 hx = k.hyper_plus(bs.tc), hy = k.hyper_minus(bs.tc);
    pf.hp = to_eigen(tables::fiber_h_gram(hx.x1, hx.x2, hx.x3));
    pf.hm = to_eigen(tables::fiber_h_gram(hy.x1, hy.x2, hy.x3));
    EvalCache cache(bs.tc.six, k.span());
    pf.lift = eval_matrix(bs.lift, cache);
    // chart-frame fiber complex structures
    for (int i = 0; i < 2; ++i) {
        double w2 = i == 0 ? 1.0 : 0.0, w3 = i == 0 ? 0.0 : 1.0;
        double w1 = (i == 0 ? hx.x2 : hx.x3) / hx.x1;
        Eigen::Matrix4d tau = to_eigen(tables::structure_plus_mat(w1, w2, w3));
        pf.kp.col(i) = plus_coords(pf.i4 * tau);
        double z1 = (i == 0 ? hy.x2 : hy.x3) / hy.x1;
        Eigen::Matrix4d sig = to_eigen(tables::structure_minus_mat(z1, w2, w3));
        pf.km.col(i) = minus_coords(pf.j4 * sig);
    }
    return pf;
}

}  // namespace

Vector12 nijenhuis_horizontal_closed_form(const ConnectionSpec& spec, const BigStructure& bs,
                                          char which, const gcalg::GVec& a, const gcalg::GVec& b,
                                          const TwistorPoint& k) {
    k.validate(bs.tc);
    PointFiber pf = eval_fiber(bs, k);
    const bool for_i = (which == 'I');
    if (which != 'I' && which != 'J')
        throw std::invalid_argument("nijenhuis_horizontal_closed_form: which must be 'I' or 'J'");

    // roles: "self" is the structure whose Nijenhuis we compute
    const Eigen::Matrix4d& self = for_i ? pf.i4 : pf.j4;
    const Eigen::Matrix4d& other = for_i ? pf.j4 : pf.i4;
    const Eigen::Matrix2d& h_other = for_i ? pf.hm : pf.hp;
    const Eigen::Matrix2d& k_other = for_i ? pf.km : pf.kp;

    std::array<double, 2> bp = k.base();
    auto rho_hat = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
        return connection::curvature(spec, x, y, bp).rho_hat;
    };

    Eigen::Vector2d pa = a.head<2>(), pb = b.head<2>();
    gcalg::GVec sa = self * a, sb = self * b;
    Eigen::Vector2d psa = sa.head<2>(), psb = sb.head<2>();

    // vertical tangent parts
    Eigen::Matrix4d t_self = -act_on(rho_hat(pa, pb), self) -
                             self * act_on(rho_hat(pa, psb), self) -
                             self * act_on(rho_hat(psa, pb), self) + act_on(rho_hat(psa, psb), self);
    Eigen::Matrix4d t_other = -act_on(rho_hat(pa, pb), other) + act_on(rho_hat(psa, psb), other);

    // vertical coform part: K*_other applied to the flats of the two
    // mixed-curvature terms
    Eigen::Matrix4d m1 = act_on(rho_hat(pa, psb), other);
    Eigen::Matrix4d m2 = act_on(rho_hat(psa, pb), other);
    Eigen::Vector2d c1 = for_i ? minus_coords(m1) : plus_coords(m1);
    Eigen::Vector2d c2 = for_i ? minus_coords(m2) : plus_coords(m2);
    Eigen::Vector2d theta = k_other.transpose() * (h_other * (c1 + c2));

    Vector12 out = Vector12::Zero();
    Eigen::Vector2d t_self_c = for_i ? plus_coords(t_self) : minus_coords(t_self);
    Eigen::Vector2d t_other_c = for_i ? minus_coords(t_other) : plus_coords(t_other);
    if (for_i) {
        out.segment<2>(2) = t_self_c;   // T_I
        out.segment<2>(4) = t_other_c;  // T_J
        out.segment<2>(10) = theta;     // T*_J (delta-coform components)
    } else {
        out.segment<2>(4) = t_self_c;
        out.segment<2>(2) = t_other_c;
        out.segment<2>(8) = theta;  // T*_I
    }
    // chart coform components of a vertical coform pick up -F^T theta
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 4; ++i) out[6 + m] -= pf.lift(i, m) * out[8 + i];
    return out;
}

Eigen::Vector2d gamma_form(const ConnectionSpec& spec, const TwistorChart& tc, const gcalg::GVec& a,
                           const Eigen::Vector4d& w, const TwistorPoint& k) {
    k.validate(tc);
    gcalg::Hyper3 hy = k.hyper_minus(tc);
    double v2 = w[2], v3 = w[3];
    double v1 = (hy.x2 * v2 + hy.x3 * v3) / hy.x1;  // tangency to the sheet
    Eigen::Matrix4d vmat = to_eigen(tables::structure_minus_mat(v1, v2, v3));
    Eigen::Matrix4d j4 = gcalg::structure_minus(hy);

    std::array<double, 2> bp = k.base();
    Eigen::Vector2d pa = a.head<2>();
    Eigen::Vector2d out;
    for (int kk = 0; kk < 2; ++kk) {
        Eigen::Vector2d z = Eigen::Vector2d::Unit(kk);
        Eigen::Matrix4d rj = connection::curvature(spec, pa, z, bp).act(j4);
        out[kk] = gcalg::so_metric(j4 * vmat, rj);
    }
    return out;
}

// ---------------------------------------------------------------------------
// bi-Hermitian data

BiHermitianFields bihermitian_fields(const ConnectionSpec& spec, const TwistorChart& tc) {
    if (!(spec.chart() == tc.base))
        throw std::invalid_argument("bihermitian_fields: connection chart differs from twistor base");
    connection::require_torsion_free(spec);

    FiberExprs f = fiber_exprs(tc);
    MatExpr lift = lift_matrix(spec, f);

    FieldExpr one(1.0);
    MatExpr ptan = MatExpr::identity(6, one), ptan_inv = MatExpr::identity(6, one);
    for (int i = 0; i < 4; ++i)
        for (int m = 0; m < 2; ++m) {
            ptan(2 + i, m) = lift(i, m);
            ptan_inv(2 + i, m) = -lift(i, m);
        }

    FieldExpr ysum = f.y1 + f.y3;
    MatExpr g_ad(6, 6);
    g_ad(0, 0) = (f.x1 + f.x3) / ysum;
    g_ad(0, 1) = g_ad(1, 0) = -f.x2 / ysum;
    g_ad(1, 1) = (f.x1 - f.x3) / ysum;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            g_ad(2 + i, 2 + j) = f.hp(i, j);
            g_ad(4 + i, 4 + j) = f.hm(i, j);
        }

    // J+- act as I on horizontals and as (I o U, +-J o V) on verticals
    MatExpr jp_ad(6, 6), jm_ad(6, 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            jp_ad(i, j) = f.imat(i, j);
            jm_ad(i, j) = f.imat(i, j);
            jp_ad(2 + i, 2 + j) = f.kp(i, j);
            jm_ad(2 + i, 2 + j) = f.kp(i, j);
            jp_ad(4 + i, 4 + j) = f.km(i, j);
            jm_ad(4 + i, 4 + j) = -f.km(i, j);
        }

    MatExpr b_ad(6, 6);
    b_ad(0, 1) = f.y2 / ysum;
    b_ad(1, 0) = -(f.y2 / ysum);

    // Kaehler forms from the paper's block formulas (the identity
    // omega_pm = g(J_pm ., .) is then a checked invariant, not built in)
    MatExpr wp_ad(6, 6), wm_ad(6, 6);
    wp_ad(0, 1) = one / ysum;
    wp_ad(1, 0) = -(one / ysum);
    wm_ad(0, 1) = wp_ad(0, 1);
    wm_ad(1, 0) = wp_ad(1, 0);
    MatExpr op = f.kp.transpose() * f.hp;  // omega(U,U') = h(K U, U')
    MatExpr om = f.km.transpose() * f.hm;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            wp_ad(2 + i, 2 + j) = op(i, j);
            wm_ad(2 + i, 2 + j) = op(i, j);
            wp_ad(4 + i, 4 + j) = om(i, j);
            wm_ad(4 + i, 4 + j) = -om(i, j);
        }

    MatExpr ptan_invT = ptan_inv.transpose();
    BiHermitianFields out{tc,
                          ptan_invT * g_ad * ptan_inv,
                          ptan * jp_ad * ptan_inv,
                          ptan * jm_ad * ptan_inv,
                          ptan_invT * b_ad * ptan_inv,
                          ptan_invT * wp_ad * ptan_inv,
                          ptan_invT * wm_ad * ptan_inv};
    return out;
}

BiHermitianData bihermitian_data(const BiHermitianFields& f, const TwistorPoint& k) {
    k.validate(f.tc);
    EvalCache cache(f.tc.six, k.span());
    BiHermitianData d;
    d.g = eval_matrix(f.g, cache);
    d.jp = eval_matrix(f.jp, cache);
    d.jm = eval_matrix(f.jm, cache);
    d.b = eval_matrix(f.b, cache);
    d.wp = eval_matrix(f.wp, cache);
    d.wm = eval_matrix(f.wm, cache);
    return d;
}

BiHermitianData bihermitian_data(const ConnectionSpec& spec, const TwistorChart& tc,
                                 const TwistorPoint& k) {
    return bihermitian_data(bihermitian_fields(spec, tc), k);
}

namespace {

fields::KForm two_form_from_matrix(const Chart& chart, const MatExpr& m) {
    fields::KForm w = fields::KForm::zero(chart, 2);
    for (int i = 0; i < chart.dim(); ++i)
        for (int j = i + 1; j < chart.dim(); ++j) w.at({i, j}) = m(i, j);
    return w;
}

}  // namespace

WitnessValue non_kahler_witness(const ConnectionSpec& spec, const BiHermitianFields& f,
                                const TwistorPoint& k, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& y, const Eigen::Vector4d& w) {
    k.validate(f.tc);
    const TwistorChart& tc = f.tc;
    gcalg::Hyper3 hx = k.hyper_plus(tc), hy = k.hyper_minus(tc);

    // closed form
    double v2 = w[2], v3 = w[3];
    double v1 = (hy.x2 * v2 + hy.x3 * v3) / hy.x1;
    double u2 = w[0], u3 = w[1];
    double u1 = (hx.x2 * u2 + hx.x3 * u3) / hx.x1;
    Eigen::Matrix4d umat = to_eigen(tables::structure_plus_mat(u1, u2, u3));
    Eigen::Matrix4d vmat = to_eigen(tables::structure_minus_mat(v1, v2, v3));
    Eigen::Matrix4d i4 = gcalg::structure_plus(hx);
    Eigen::Matrix4d j4 = gcalg::structure_minus(hy);

    std::array<double, 2> bp = k.base();
    connection::CurvatureValue cv = connection::curvature(spec, x, y, bp);
    double area = x[0] * y[1] - x[1] * y[0];
    double ysum = hy.x1 + hy.x3;
    double first = -(v1 + v3) / (ysum * ysum) * area;
    auto h_pair = [](const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
        return 0.5 * (a * b).trace();  // h = -g on fiber tangents
    };
    double term_i = h_pair(cv.act(i4), i4 * umat);
    double term_j = h_pair(cv.act(j4), j4 * vmat);

    WitnessValue out;
    out.closed_plus = first + term_i + term_j;
    out.closed_minus = first + term_i - term_j;

    // numeric exterior derivative of the materialized Kaehler forms
    fields::KForm dwp = fields::exterior_derivative(two_form_from_matrix(tc.six, f.wp));
    fields::KForm dwm = fields::exterior_derivative(two_form_from_matrix(tc.six, f.wm));
    Vector6 xh = horizontal_lift(spec, tc, x, k);
    Vector6 yh = horizontal_lift(spec, tc, y, k);
    Vector6 wv = Vector6::Zero();
    wv.tail<4>() = w;
    EvalCache cache(tc.six, k.span());
    std::vector<Eigen::VectorXd> args = {xh, yh, wv};
    out.numeric_plus = dwp.value_on(cache, args);
    out.numeric_minus = dwm.value_on(cache, args);
    return out;
}

double almost_complex_nijenhuis_max(const BiHermitianFields& f, char pm, const TwistorPoint& k) {
    k.validate(f.tc);
    const MatExpr& jm = (pm == '+') ? f.jp : f.jm;
    const Chart& six = f.tc.six;
    EvalCache cache(six, k.span());
    Matrix6 j = eval_matrix(jm, cache);
    std::array<Matrix6, 6> dj;
    for (int c = 0; c < 6; ++c) {
        MatExpr d(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int jj = 0; jj < 6; ++jj) d(i, jj) = jm(i, jj).derivative(six.names()[static_cast<size_t>(c)]);
        dj[static_cast<size_t>(c)] = eval_matrix(d, cache);
    }
    // N(e_a, e_b) = [Je_a, Je_b] + J d_b(Je_a) - J d_a(Je_b), coordinate frame
    double worst = 0.0;
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) {
            Vector6 lie = Vector6::Zero();
            for (int jj = 0; jj < 6; ++jj)
                lie += j(jj, a) * dj[static_cast<size_t>(jj)].col(b) - j(jj, b) * dj[static_cast<size_t>(jj)].col(a);
            Vector6 n = lie + j * dj[static_cast<size_t>(b)].col(a) - j * dj[static_cast<size_t>(a)].col(b);
            worst = std::max(worst, n.cwiseAbs().maxCoeff());
        }
    return worst;
}

double b_closedness_residual(const BiHermitianFields& f, const TwistorPoint& k) {
    k.validate(f.tc);
    fields::KForm db = fields::exterior_derivative(two_form_from_matrix(f.tc.six, f.b));
    EvalCache cache(f.tc.six, k.span());
    double worst = 0.0;
    for (const auto& c : db.comp) worst = std::max(worst, std::abs(c.value(cache)));
    return worst;
}

}  // namespace gk::twistor
