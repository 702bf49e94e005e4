#pragma once

#include <array>

#include <Eigen/Dense>

#include "gk/connection.hpp"
#include "gk/fields.hpp"
#include "gk/gcalg.hpp"

namespace gk::twistor {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector12 = Eigen::Matrix<double, 12, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix12 = Eigen::Matrix<double, 12, 12>;

/// Chart of the twistor space over a 2-dimensional base chart: base
/// coordinates plus hyperboloid sheet coordinates (a2,a3) for the plus
/// fiber and (b2,b3) for the minus fiber.  Both sheet signs must agree
/// (positivity of the induced pair).
struct TwistorChart {
    Chart base;
    Chart six;
    int sheet = +1;
    double fiber_bound = 2.5;

    static TwistorChart make(const Chart& base, int sheet_plus, int sheet_minus,
                             double fiber_bound = 2.5);

    int dim() const { return 6; }
};

/// Point (u, v, a2, a3, b2, b3) of the twistor chart.
struct TwistorPoint {
    std::array<double, 6> x{};

    std::span<const double> span() const { return {x.data(), x.size()}; }
    std::array<double, 2> base() const { return {x[0], x[1]}; }

    gcalg::Hyper3 hyper_plus(const TwistorChart& tc) const {
        return gcalg::Hyper3::from_chart(tc.sheet, x[2], x[3]);
    }
    gcalg::Hyper3 hyper_minus(const TwistorChart& tc) const {
        return gcalg::Hyper3::from_chart(tc.sheet, x[4], x[5]);
    }

    /// Throws unless inside the chart and the induced pair is positive.
    void validate(const TwistorChart& tc) const;
};

/// The two generalized almost complex structures of the twistor space,
/// materialized as 12x12 field matrices on the 6-chart (components
/// ordered d_u, d_v, d_a2, d_a3, d_b2, d_b3, du, dv, da2, da3, db2, db3),
/// together with the horizontal-lift data they are built from.
struct BigStructure {
    TwistorChart tc;
    MatExpr lift;  // 4x2: fiber velocity of the lift of d_u, d_v
    fields::StructureField op_i, op_j;

    const fields::StructureField& structure(char which) const {  // 'I' or 'J'
        if (which == 'I') return op_i;
        if (which == 'J') return op_j;
        throw std::invalid_argument("BigStructure: which must be 'I' or 'J'");
    }
};

/// Builds the twistor structures for a torsion-free connection.
BigStructure big_structures(const connection::ConnectionSpec& spec, const TwistorChart& tc);

/// Horizontal lift of a base vector at K: base part X, fiber part the
/// chart coordinates of the parallel-transport velocities of the two
/// fiber structures.  Torsion-free connections only.
Vector6 horizontal_lift(const connection::ConnectionSpec& spec, const TwistorChart& tc,
                        const Eigen::Vector2d& x_base, const TwistorPoint& k);

/// A^h as a section of T P + T* P for A in T_pM + T_p*M (4 components).
fields::Section horizontal_section(const BigStructure& bs, const gcalg::GVec& a);

/// Coordinate vertical field d/d(fiber_i), i in 0..3.
fields::Section vertical_tangent_section(const TwistorChart& tc, int i);

/// Vertical coform dual to the fiber frame and vanishing on horizontals.
fields::Section vertical_coform_section(const BigStructure& bs, int i);

/// Brute-force Nijenhuis tensor of one of the two structures on chart
/// frame sections (indices 0..11), evaluated at K.
Vector12 nijenhuis_twistor(const BigStructure& bs, char which, int frame_a, int frame_b,
                           const TwistorPoint& k);

/// Closed-form Nijenhuis on horizontal lifts: the six curvature terms and
/// the two pulled-back musical terms; the horizontal part vanishes for
/// torsion-free connections.  Returns chart components.
Vector12 nijenhuis_horizontal_closed_form(const connection::ConnectionSpec& spec,
                                          const BigStructure& bs, char which,
                                          const gcalg::GVec& a, const gcalg::GVec& b,
                                          const TwistorPoint& k);

/// gamma_A(Z) = <JV, R(pi1 A, Z) J> as a 1-form on the base tangent
/// space; W is a vertical tangent vector in chart components.
Eigen::Vector2d gamma_form(const connection::ConnectionSpec& spec, const TwistorChart& tc,
                           const gcalg::GVec& a, const Eigen::Vector4d& w, const TwistorPoint& k);

/// Metric, complex structures, 2-form b and Kaehler forms of the induced
/// almost generalized Kaehler structure, as field matrices on T P.
struct BiHermitianFields {
    TwistorChart tc;
    MatExpr g, jp, jm, b, wp, wm;  // 6x6 each
};

BiHermitianFields bihermitian_fields(const connection::ConnectionSpec& spec,
                                     const TwistorChart& tc);

struct BiHermitianData {
    Matrix6 g, jp, jm, b, wp, wm;
};

BiHermitianData bihermitian_data(const BiHermitianFields& f, const TwistorPoint& k);
BiHermitianData bihermitian_data(const connection::ConnectionSpec& spec, const TwistorChart& tc,
                                 const TwistorPoint& k);

/// d(omega_pm)(X^h, Y^h, W) at K, both by the closed form
///   -(v1+v3)(y1+y3)^-2 (X1 Y2 - X2 Y1) + h(R(X,Y)I, I o U) +- h(R(X,Y)J, J o V)
/// and by exterior differentiation of the materialized Kaehler forms.
struct WitnessValue {
    double closed_plus = 0, closed_minus = 0;
    double numeric_plus = 0, numeric_minus = 0;
};

WitnessValue non_kahler_witness(const connection::ConnectionSpec& spec,
                                const BiHermitianFields& f, const TwistorPoint& k,
                                const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                const Eigen::Vector4d& w);

/// Classical Nijenhuis tensor of J_pm as an almost complex structure on
/// the 6-chart, max over coordinate frame pairs at K.
double almost_complex_nijenhuis_max(const BiHermitianFields& f, char pm, const TwistorPoint& k);

/// Max |db| component at K (reported, not asserted; the closedness of b
/// is left open).
double b_closedness_residual(const BiHermitianFields& f, const TwistorPoint& k);

/// Gram matrix of the neutral pairing of T P + T* P in chart components.
Matrix12 neutral_gram12();

}  // namespace gk::twistor
