#include "gk/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace gk {
namespace detail {

enum class Kind { Constant, Variable, Add, Sub, Mul, Div, IntPow, Neg, Call, Opaque };
enum class Func { Sin, Cos, Exp, Sqrt };

struct OpaqueField {
    std::vector<std::string> vars;
    std::function<OpaqueJet(std::span<const double>)> fn;
};

struct Node {
    Kind kind;
    double constant = 0.0;
    std::string name;  // Variable
    int exponent = 0;  // IntPow
    Func func = Func::Sin;
    NodePtr a, b;
    std::shared_ptr<const OpaqueField> field;
    int deriv_count = 0;           // opaque: number of derivative projections applied
    std::array<int, 2> deriv{-1, -1};  // indices into field->vars

    static NodePtr make_const(double v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Constant;
        n->constant = v;
        return n;
    }
};

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::Constant && n->constant == v;
}
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

// Smart constructors fold constants and drop algebraic no-ops so that
// machine-built trees (matrix products, symbolic derivatives) stay small.
NodePtr make_add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return Node::make_const(a->constant + b->constant);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (is_const(a)) return Node::make_const(-a->constant);
    if (a->kind == Kind::Neg) return a->a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return Node::make_const(a->constant - b->constant);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(std::move(b));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sub;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return Node::make_const(a->constant * b->constant);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Node::make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return make_neg(std::move(b));
    if (is_const(b, -1.0)) return make_neg(std::move(a));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mul;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_div(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) throw std::invalid_argument("field expression: division by constant zero");
    if (is_const(a) && is_const(b)) return Node::make_const(a->constant / b->constant);
    if (is_const(a, 0.0)) return Node::make_const(0.0);
    if (is_const(b, 1.0)) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Div;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int k) {
    if (k == 0) return Node::make_const(1.0);
    if (k == 1) return a;
    if (is_const(a)) return Node::make_const(std::pow(a->constant, k));
    auto n = std::make_shared<Node>();
    n->kind = Kind::IntPow;
    n->exponent = k;
    n->a = std::move(a);
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    if (is_const(a)) {
        double x = a->constant;
        switch (f) {
            case Func::Sin: return Node::make_const(std::sin(x));
            case Func::Cos: return Node::make_const(std::cos(x));
            case Func::Exp: return Node::make_const(std::exp(x));
            case Func::Sqrt: return Node::make_const(std::sqrt(x));
        }
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

}  // namespace detail

using detail::Func;
using detail::Kind;
using detail::Node;

// ---------------------------------------------------------------------------
// evaluation

struct CacheAccess {
    static std::unordered_map<const void*, OpaqueJet>& opaque_memo(EvalCache& c) {
        return c.opaque_memo_;
    }
};

double eval_node(const detail::Node* n, EvalCache& cache);

namespace {

const OpaqueJet& opaque_jet(const Node* n, EvalCache& cache) {
    auto& memo = CacheAccess::opaque_memo(cache);
    auto it = memo.find(n->field.get());
    if (it != memo.end()) return it->second;
    const Chart& chart = cache.chart();
    std::span<const double> x = cache.point();
    std::vector<double> sub(n->field->vars.size());
    for (size_t i = 0; i < sub.size(); ++i) sub[i] = x[chart.index_of(n->field->vars[i])];
    return memo.emplace(n->field.get(), n->field->fn(sub)).first->second;
}

double eval_rec(const Node* n, EvalCache& cache) {
    switch (n->kind) {
        case Kind::Constant: return n->constant;
        case Kind::Variable: {
            const Chart& c = cache.chart();
            return cache.point()[c.index_of(n->name)];
        }
        case Kind::Add: return eval_node(n->a.get(), cache) + eval_node(n->b.get(), cache);
        case Kind::Sub: return eval_node(n->a.get(), cache) - eval_node(n->b.get(), cache);
        case Kind::Mul: return eval_node(n->a.get(), cache) * eval_node(n->b.get(), cache);
        case Kind::Div: {
            double den = eval_node(n->b.get(), cache);
            if (den == 0.0) throw std::domain_error("field expression: division by zero");
            return eval_node(n->a.get(), cache) / den;
        }
        case Kind::IntPow: return std::pow(eval_node(n->a.get(), cache), n->exponent);
        case Kind::Neg: return -eval_node(n->a.get(), cache);
        case Kind::Call: {
            double x = eval_node(n->a.get(), cache);
            switch (n->func) {
                case Func::Sin: return std::sin(x);
                case Func::Cos: return std::cos(x);
                case Func::Exp: return std::exp(x);
                case Func::Sqrt:
                    if (x < 0.0) throw std::domain_error("field expression: sqrt of negative value");
                    return std::sqrt(x);
            }
            return 0.0;
        }
        case Kind::Opaque: {
            const OpaqueJet& j = opaque_jet(n, cache);
            if (n->deriv_count == 0) return j.v;
            if (n->deriv_count == 1) {
                if (j.order < 1) throw std::logic_error("opaque field: first derivative unavailable");
                return j.g[static_cast<size_t>(n->deriv[0])];
            }
            if (j.order < 2) throw std::logic_error("opaque field: second derivative unavailable");
            return j.h[static_cast<size_t>(n->deriv[0])][static_cast<size_t>(n->deriv[1])];
        }
    }
    throw std::logic_error("field expression: corrupt node");
}

}  // namespace

EvalCache::EvalCache(const Chart& chart, std::span<const double> x)
    : chart_(&chart), x_(x.begin(), x.end()) {
    chart.require_inside(x);
}

double eval_node(const detail::Node* n, EvalCache& cache) {
    auto it = cache.memo_.find(n);
    if (it != cache.memo_.end()) return it->second;
    double v = eval_rec(n, cache);
    cache.memo_.emplace(n, v);
    return v;
}

// ---------------------------------------------------------------------------
// FieldExpr surface

FieldExpr::FieldExpr() : node_(Node::make_const(0.0)) {}
FieldExpr::FieldExpr(double c) : node_(Node::make_const(c)) {}

FieldExpr FieldExpr::constant(double v) { return FieldExpr(Node::make_const(v)); }

FieldExpr FieldExpr::variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    return FieldExpr(NodePtr(n));
}

FieldExpr FieldExpr::opaque(std::vector<std::string> vars,
                            std::function<OpaqueJet(std::span<const double>)> fn) {
    auto f = std::make_shared<detail::OpaqueField>();
    f->vars = std::move(vars);
    f->fn = std::move(fn);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Opaque;
    n->field = f;
    return FieldExpr(NodePtr(n));
}

FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) {
    return FieldExpr(detail::make_add(a.node(), b.node()));
}
FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) {
    return FieldExpr(detail::make_sub(a.node(), b.node()));
}
FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) {
    return FieldExpr(detail::make_mul(a.node(), b.node()));
}
FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) {
    return FieldExpr(detail::make_div(a.node(), b.node()));
}
FieldExpr FieldExpr::operator-() const { return FieldExpr(detail::make_neg(node_)); }
FieldExpr FieldExpr::pow(int n) const { return FieldExpr(detail::make_pow(node_, n)); }

FieldExpr sin(const FieldExpr& a) { return FieldExpr(detail::make_call(Func::Sin, a.node())); }
FieldExpr cos(const FieldExpr& a) { return FieldExpr(detail::make_call(Func::Cos, a.node())); }
FieldExpr exp(const FieldExpr& a) { return FieldExpr(detail::make_call(Func::Exp, a.node())); }
FieldExpr sqrt(const FieldExpr& a) { return FieldExpr(detail::make_call(Func::Sqrt, a.node())); }

bool FieldExpr::is_zero() const { return detail::is_const(node_, 0.0); }
bool FieldExpr::is_constant() const { return detail::is_const(node_); }
double FieldExpr::constant_value() const {
    if (!is_constant()) throw std::logic_error("field expression: not a constant");
    return node_->constant;
}

double FieldExpr::value(const Chart& chart, std::span<const double> x) const {
    EvalCache cache(chart, x);
    return value(cache);
}

double FieldExpr::value(EvalCache& cache) const { return eval_node(node_.get(), cache); }

// ---------------------------------------------------------------------------
// symbolic differentiation

namespace {

using DiffMemo = std::map<std::pair<const Node*, std::string>, NodePtr>;

NodePtr diff_node(const NodePtr& n, const std::string& var, DiffMemo& memo) {
    auto key = std::make_pair(n.get(), var);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    NodePtr r;
    switch (n->kind) {
        case Kind::Constant: r = Node::make_const(0.0); break;
        case Kind::Variable: r = Node::make_const(n->name == var ? 1.0 : 0.0); break;
        case Kind::Add: r = detail::make_add(diff_node(n->a, var, memo), diff_node(n->b, var, memo)); break;
        case Kind::Sub: r = detail::make_sub(diff_node(n->a, var, memo), diff_node(n->b, var, memo)); break;
        case Kind::Mul:
            r = detail::make_add(detail::make_mul(diff_node(n->a, var, memo), n->b),
                                 detail::make_mul(n->a, diff_node(n->b, var, memo)));
            break;
        case Kind::Div:
            // (a/b)' = a'/b - a b'/b^2
            r = detail::make_sub(
                detail::make_div(diff_node(n->a, var, memo), n->b),
                detail::make_div(detail::make_mul(n->a, diff_node(n->b, var, memo)),
                                 detail::make_pow(n->b, 2)));
            break;
        case Kind::IntPow:
            r = detail::make_mul(
                detail::make_mul(Node::make_const(n->exponent), detail::make_pow(n->a, n->exponent - 1)),
                diff_node(n->a, var, memo));
            break;
        case Kind::Neg: r = detail::make_neg(diff_node(n->a, var, memo)); break;
        case Kind::Call: {
            NodePtr inner = diff_node(n->a, var, memo);
            NodePtr outer;
            switch (n->func) {
                case Func::Sin: outer = detail::make_call(Func::Cos, n->a); break;
                case Func::Cos: outer = detail::make_neg(detail::make_call(Func::Sin, n->a)); break;
                case Func::Exp: outer = detail::make_call(Func::Exp, n->a); break;
                case Func::Sqrt:
                    outer = detail::make_div(Node::make_const(0.5), detail::make_call(Func::Sqrt, n->a));
                    break;
            }
            r = detail::make_mul(outer, inner);
            break;
        }
        case Kind::Opaque: {
            if (n->deriv_count >= 2)
                throw std::logic_error("opaque field: only two derivative levels are supported");
            int vi = -1;
            for (size_t i = 0; i < n->field->vars.size(); ++i)
                if (n->field->vars[i] == var) vi = static_cast<int>(i);
            if (vi < 0) {
                r = Node::make_const(0.0);
            } else {
                auto d = std::make_shared<Node>(*n);
                d->deriv[d->deriv_count] = vi;
                d->deriv_count += 1;
                r = d;
            }
            break;
        }
    }
    memo.emplace(key, r);
    return r;
}

}  // namespace

FieldExpr FieldExpr::derivative(const std::string& var) const {
    DiffMemo memo;
    return FieldExpr(diff_node(node_, var, memo));
}

Jet FieldExpr::jet(const Chart& chart, std::span<const double> x) const {
    const int d = chart.dim();
    Jet j = Jet::constant(0.0, d);
    EvalCache cache(chart, x);
    j.v = value(cache);

    DiffMemo memo;
    std::vector<NodePtr> grads(d);
    for (int i = 0; i < d; ++i) {
        grads[i] = diff_node(node_, chart.names()[i], memo);
        j.g[i] = eval_node(grads[i].get(), cache);
    }
    try {
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                j.h(i, k) = eval_node(diff_node(grads[i], chart.names()[k], memo).get(), cache);
    } catch (const std::logic_error&) {
        j.order = 1;  // opaque derivative field: Hessian level unavailable
        j.h.setZero();
    }
    return j;
}

// ---------------------------------------------------------------------------
// variables / printing

namespace {
void collect_vars(const Node* n, std::set<std::string>& out) {
    if (!n) return;
    if (n->kind == Kind::Variable) out.insert(n->name);
    if (n->kind == Kind::Opaque)
        for (const auto& v : n->field->vars) out.insert(v);
    if (n->a) collect_vars(n->a.get(), out);
    if (n->b) collect_vars(n->b.get(), out);
}

void print_node(const Node* n, std::ostringstream& os) {
    switch (n->kind) {
        case Kind::Constant: os << n->constant; return;
        case Kind::Variable: os << n->name; return;
        case Kind::Add:
            os << '(';
            print_node(n->a.get(), os);
            os << " + ";
            print_node(n->b.get(), os);
            os << ')';
            return;
        case Kind::Sub:
            os << '(';
            print_node(n->a.get(), os);
            os << " - ";
            print_node(n->b.get(), os);
            os << ')';
            return;
        case Kind::Mul:
            os << '(';
            print_node(n->a.get(), os);
            os << " * ";
            print_node(n->b.get(), os);
            os << ')';
            return;
        case Kind::Div:
            os << '(';
            print_node(n->a.get(), os);
            os << " / ";
            print_node(n->b.get(), os);
            os << ')';
            return;
        case Kind::IntPow:
            print_node(n->a.get(), os);
            os << '^' << n->exponent;
            return;
        case Kind::Neg:
            os << "(-";
            print_node(n->a.get(), os);
            os << ')';
            return;
        case Kind::Call:
            switch (n->func) {
                case Func::Sin: os << "sin"; break;
                case Func::Cos: os << "cos"; break;
                case Func::Exp: os << "exp"; break;
                case Func::Sqrt: os << "sqrt"; break;
            }
            os << '(';
            print_node(n->a.get(), os);
            os << ')';
            return;
        case Kind::Opaque: os << "<opaque>"; return;
    }
}
}  // namespace

std::set<std::string> FieldExpr::variables() const {
    std::set<std::string> out;
    collect_vars(node_.get(), out);
    return out;
}

std::string FieldExpr::to_string() const {
    std::ostringstream os;
    print_node(node_.get(), os);
    return os.str();
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Lexer {
    std::string_view src;
    size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

struct Parser {
    Lexer lx;

    NodePtr parse_expr() {
        bool neg = lx.eat('-');
        NodePtr t = parse_term();
        if (neg) t = detail::make_neg(t);
        for (;;) {
            if (lx.eat('+'))
                t = detail::make_add(t, parse_term());
            else if (lx.eat('-'))
                t = detail::make_sub(t, parse_term());
            else
                return t;
        }
    }

    NodePtr parse_term() {
        NodePtr t = parse_factor();
        for (;;) {
            if (lx.eat('*'))
                t = detail::make_mul(t, parse_factor());
            else if (lx.eat('/'))
                t = detail::make_div(t, parse_factor());
            else
                return t;
        }
    }

    NodePtr parse_factor() {
        NodePtr b = parse_base();
        if (lx.eat('^')) {
            size_t at = lx.pos;
            b = detail::make_pow(b, parse_int(at));
        }
        return b;
    }

    int parse_int(size_t at) {
        lx.skip_ws();
        size_t start = lx.pos;
        bool neg = false;
        if (lx.pos < lx.src.size() && lx.src[lx.pos] == '-') {
            neg = true;
            ++lx.pos;
        }
        size_t digits = 0;
        long v = 0;
        while (lx.pos < lx.src.size() && std::isdigit(static_cast<unsigned char>(lx.src[lx.pos]))) {
            v = v * 10 + (lx.src[lx.pos] - '0');
            if (v > 64) throw ExprParseError("exponent too large", start);
            ++lx.pos;
            ++digits;
        }
        if (digits == 0) throw ExprParseError("expected integer exponent", at);
        return static_cast<int>(neg ? -v : v);
    }

    NodePtr parse_base() {
        char c = lx.peek();
        size_t at = lx.pos;
        if (c == '(') {
            ++lx.pos;
            NodePtr e = parse_expr();
            if (!lx.eat(')')) throw ExprParseError("expected ')'", lx.pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ExprParseError(std::string("unexpected character '") + c + "'", at);
    }

    NodePtr parse_number() {
        size_t start = lx.pos;
        auto digits = [&] {
            while (lx.pos < lx.src.size() && std::isdigit(static_cast<unsigned char>(lx.src[lx.pos])))
                ++lx.pos;
        };
        digits();
        if (lx.pos < lx.src.size() && lx.src[lx.pos] == '.') {
            ++lx.pos;
            digits();
        }
        if (lx.pos < lx.src.size() && (lx.src[lx.pos] == 'e' || lx.src[lx.pos] == 'E')) {
            size_t mark = lx.pos;
            ++lx.pos;
            if (lx.pos < lx.src.size() && (lx.src[lx.pos] == '+' || lx.src[lx.pos] == '-')) ++lx.pos;
            if (lx.pos < lx.src.size() && std::isdigit(static_cast<unsigned char>(lx.src[lx.pos])))
                digits();
            else
                lx.pos = mark;  // no exponent digits: the 'e' is not part of the number
        }
        double v = std::stod(std::string(lx.src.substr(start, lx.pos - start)));
        return Node::make_const(v);
    }

    NodePtr parse_ident() {
        size_t start = lx.pos;
        while (lx.pos < lx.src.size() &&
               (std::isalnum(static_cast<unsigned char>(lx.src[lx.pos])) || lx.src[lx.pos] == '_'))
            ++lx.pos;
        std::string name(lx.src.substr(start, lx.pos - start));
        if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
            if (!lx.eat('(')) throw ExprParseError("expected '(' after function " + name, lx.pos);
            NodePtr arg = parse_expr();
            if (!lx.eat(')')) throw ExprParseError("expected ')'", lx.pos);
            Func f = name == "sin"   ? Func::Sin
                     : name == "cos" ? Func::Cos
                     : name == "exp" ? Func::Exp
                                     : Func::Sqrt;
            return detail::make_call(f, arg);
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->name = std::move(name);
        return NodePtr(n);
    }
};

}  // namespace

FieldExpr FieldExpr::parse(std::string_view src) {
    Parser p{Lexer{src, 0}};
    NodePtr n = p.parse_expr();
    p.lx.skip_ws();
    if (p.lx.pos != src.size())
        throw ExprParseError("unexpected trailing input", p.lx.pos);
    return FieldExpr(std::move(n));
}

Eigen::MatrixXd eval_matrix(const MatExpr& m, EvalCache& cache) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).value(cache);
    return r;
}

}  // namespace gk
