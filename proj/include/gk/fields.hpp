#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gk/expr.hpp"

namespace gk::fields {

/// Vector field on a chart: one component per coordinate.
struct VectorField {
    Chart chart;
    std::vector<FieldExpr> c;

    static VectorField zero(const Chart& chart);
    static VectorField coordinate(const Chart& chart, int i);  // d/dx_i
};

/// k-form with explicit components over strictly increasing index tuples,
/// k <= 3.  A 0-form is a scalar field.
struct KForm {
    Chart chart;
    int k = 0;
    std::vector<FieldExpr> comp;  // indexed by combination rank

    static KForm scalar(const Chart& chart, FieldExpr f);
    static KForm zero(const Chart& chart, int k);
    static KForm coordinate(const Chart& chart, int i);  // dx_i

    FieldExpr& at(std::initializer_list<int> idx);
    const FieldExpr& at(std::initializer_list<int> idx) const;

    /// Value on k tangent vectors (full antisymmetrization).
    double value_on(EvalCache& cache, const std::vector<Eigen::VectorXd>& vecs) const;
};

int comb_count(int d, int k);
int comb_rank(const Chart& chart, std::initializer_list<int> idx, int& sign);

/// Section of TM + T*M: vector components then covector components.
struct Section {
    Chart chart;
    std::vector<FieldExpr> vec, cov;

    static Section zero(const Chart& chart);
    static Section frame(const Chart& chart, int i);  // i < d: d/dx_i, else dx_{i-d}
    static Section make(const Chart& chart, std::vector<FieldExpr> vec, std::vector<FieldExpr> cov);
    static Section from_parts(VectorField x, KForm one_form);

    VectorField vector_part() const;
    KForm covector_part() const;
    Section scaled(const FieldExpr& f) const;
    Section operator+(const Section& o) const;
    Section operator-(const Section& o) const;

    Eigen::VectorXd value_at(EvalCache& cache) const;  // 2d components
};

// --- exterior / Lie calculus (all results are exact fields) -------------

VectorField lie_bracket(const VectorField& x, const VectorField& y);
KForm exterior_derivative(const KForm& w);                          // k <= 2
KForm interior_product(const VectorField& x, const KForm& w);       // k >= 1
KForm lie_derivative_form(const VectorField& x, const KForm& w);    // direct formula, k <= 2

/// Courant bracket [X+xi, Y+eta] = [X,Y] + L_X eta - L_Y xi - d(i_X eta - i_Y xi)/2.
Section courant_bracket(const Section& a, const Section& b);

// --- structures ----------------------------------------------------------

/// Generalized almost complex structure field: (2d)x(2d) matrix of fields
/// acting on Section components.  Entry derivatives are materialized once
/// so pointwise jets are cheap.
class StructureField {
public:
    StructureField(Chart chart, MatExpr m);

    const Chart& chart() const { return chart_; }
    const MatExpr& mat() const { return m_; }

    struct PointJets {
        Eigen::MatrixXd m;                 // (2d)x(2d) values
        std::vector<Eigen::MatrixXd> dm;   // per-coordinate derivative
    };
    PointJets jets(EvalCache& cache) const;

    /// max residual of (skewness, square = -Id) at the point.
    double structure_residual(EvalCache& cache) const;
    void require_structure(EvalCache& cache, double tol = 1e-9) const;

    Section apply(const Section& s) const;  // pointwise matrix action, symbolic

    static StructureField from_complex_field(const Chart& chart, const MatExpr& k);
    static StructureField from_symplectic_field(const Chart& chart, const KForm& omega);
    /// exp(B) J exp(-B) for a 2-form field B.
    static StructureField b_transform_field(const StructureField& j, const KForm& b);

private:
    Chart chart_;
    MatExpr m_;
    std::vector<MatExpr> dm_;
};

/// Numeric value + first derivatives of a section at a point.
struct SectionJet {
    Eigen::VectorXd val;  // 2d
    Eigen::MatrixXd d;    // (2d) x d, column k = d/dx_k of components
};

SectionJet section_jet(const Section& s, EvalCache& cache);
SectionJet apply_structure(const StructureField::PointJets& j, const SectionJet& s);

/// Courant bracket value at the cache point from section jets.
Eigen::VectorXd courant_at(const SectionJet& a, const SectionJet& b, int dim);

/// Nijenhuis tensor N(A,B) = -[A,B] - J[A,JB] - J[JA,B] + [JA,JB] of a
/// structure field, evaluated at a point.  Tensorial in A and B.
Eigen::VectorXd nijenhuis_field(const StructureField& j, const Section& a, const Section& b,
                                std::span<const double> p, double structure_tol = 1e-9);

/// Same, with precomputed structure jets (hot loops).
Eigen::VectorXd nijenhuis_at(const StructureField::PointJets& j, const SectionJet& a,
                             const SectionJet& b, int dim);

/// |N(fA, B) - N(A, B)| at p for a scalar f with f(p) = 1.
double tensoriality_check(const StructureField& j, const Section& a, const Section& b,
                          std::span<const double> p, const FieldExpr& f);

}  // namespace gk::fields
