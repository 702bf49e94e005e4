#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gk/chart.hpp"
#include "gk/matrix.hpp"

namespace gk {

/// Value with exact first and second partial derivatives at a point.
/// `order` records how many derivative levels are meaningful (opaque
/// fields obtained by differentiating other opaque fields lose levels).
struct Jet {
    int order = 2;
    double v = 0.0;
    Eigen::VectorXd g;   // gradient, one entry per chart coordinate
    Eigen::MatrixXd h;   // Hessian

    static Jet constant(double value, int dim) {
        Jet j;
        j.v = value;
        j.g = Eigen::VectorXd::Zero(dim);
        j.h = Eigen::MatrixXd::Zero(dim, dim);
        return j;
    }
};

/// Jet of an opaque (internally synthesized) field over its own
/// variable list; converted to chart jets at evaluation time.
struct OpaqueJet {
    int order = 2;
    double v = 0.0;
    std::vector<double> g;
    std::vector<std::vector<double>> h;
};

struct ExprParseError : std::runtime_error {
    ExprParseError(const std::string& msg, size_t position)
        : std::runtime_error(msg + " at position " + std::to_string(position)), pos(position) {}
    size_t pos;
};

namespace detail {
struct Node;
}
using NodePtr = std::shared_ptr<const detail::Node>;

class EvalCache;

/// Closed-form scalar field over named chart coordinates.  Backed by an
/// immutable expression tree (shared, so fields behave as cheap values)
/// supporting exact evaluation and symbolic differentiation, plus an
/// opaque evaluable variant for internally synthesized fields.
class FieldExpr {
public:
    FieldExpr();                 // the zero field
    FieldExpr(double constant);  // implicit: lets doubles mix into expressions

    static FieldExpr constant(double v);
    static FieldExpr variable(std::string name);

    /// Parse the expression mini-language:
    ///   expr   := ('-')? term (('+'|'-') term)*
    ///   term   := factor (('*'|'/') factor)*
    ///   factor := base ('^' INT)?
    ///   base   := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
    ///   FUNC   := sin | cos | exp | sqrt
    /// The leading '-' is a convenience extension; everything the grammar
    /// above accepts parses identically.
    static FieldExpr parse(std::string_view src);

    /// Opaque field: evaluation is delegated to `fn`, which receives the
    /// values of `vars` (in that order) and returns a jet over them.
    /// Supports at most two derivative levels.
    static FieldExpr opaque(std::vector<std::string> vars,
                            std::function<OpaqueJet(std::span<const double>)> fn);

    friend FieldExpr operator+(const FieldExpr&, const FieldExpr&);
    friend FieldExpr operator-(const FieldExpr&, const FieldExpr&);
    friend FieldExpr operator*(const FieldExpr&, const FieldExpr&);
    friend FieldExpr operator/(const FieldExpr&, const FieldExpr&);
    FieldExpr operator-() const;

    FieldExpr pow(int n) const;

    friend FieldExpr sin(const FieldExpr&);
    friend FieldExpr cos(const FieldExpr&);
    friend FieldExpr exp(const FieldExpr&);
    friend FieldExpr sqrt(const FieldExpr&);

    double value(const Chart& chart, std::span<const double> x) const;
    double value(EvalCache& cache) const;

    /// Value plus exact first/second partials w.r.t. the chart coordinates.
    Jet jet(const Chart& chart, std::span<const double> x) const;

    /// Exact partial derivative as a new field.
    FieldExpr derivative(const std::string& var) const;

    bool is_zero() const;
    bool is_constant() const;
    double constant_value() const;  // throws unless is_constant()

    std::set<std::string> variables() const;
    std::string to_string() const;

    const NodePtr& node() const { return node_; }
    explicit FieldExpr(NodePtr n) : node_(std::move(n)) {}

private:
    NodePtr node_;
};

/// Memoizing evaluation context for one (chart, point) pair.  Reusing a
/// cache across many field evaluations at the same point makes shared
/// subtrees evaluate once.
class EvalCache {
public:
    EvalCache(const Chart& chart, std::span<const double> x);

    const Chart& chart() const { return *chart_; }
    std::span<const double> point() const { return {x_.data(), x_.size()}; }

private:
    friend class FieldExpr;
    friend double eval_node(const detail::Node*, EvalCache&);
    friend struct CacheAccess;

    const Chart* chart_;
    std::vector<double> x_;
    std::unordered_map<const detail::Node*, double> memo_;
    std::unordered_map<const void*, OpaqueJet> opaque_memo_;
};

using MatExpr = Mat<FieldExpr>;

/// Evaluate a matrix of fields at the cache's point.
Eigen::MatrixXd eval_matrix(const MatExpr& m, EvalCache& cache);

}  // namespace gk
