#include "gk/fields.hpp"

#include <algorithm>
#include <cmath>

namespace gk::fields {

namespace {

void check_chart(const Chart& a, const Chart& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": chart mismatch");
}

std::vector<std::vector<int>> combinations(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(static_cast<size_t>(k));
    if (k == 0) {
        out.push_back({});
        return out;
    }
    // lexicographic strictly increasing tuples
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            out.push_back(idx);
            return;
        }
        for (int i = start; i < d; ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return out;
}

}  // namespace

int comb_count(int d, int k) {
    if (k < 0 || k > d) return 0;
    long n = 1;
    for (int i = 0; i < k; ++i) n = n * (d - i) / (i + 1);
    return static_cast<int>(n);
}

int comb_rank(const Chart& chart, std::initializer_list<int> idx, int& sign) {
    std::vector<int> v(idx);
    sign = 1;
    for (size_t i = 0; i + 1 < v.size(); ++i)  // insertion sort tracking parity
        for (size_t j = 0; j + 1 < v.size() - i; ++j)
            if (v[j] > v[j + 1]) {
                std::swap(v[j], v[j + 1]);
                sign = -sign;
            }
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i] == v[i + 1]) {
            sign = 0;
            return 0;
        }
    auto all = combinations(chart.dim(), static_cast<int>(v.size()));
    for (size_t r = 0; r < all.size(); ++r)
        if (all[r] == v) return static_cast<int>(r);
    throw std::invalid_argument("k-form: index out of range");
}

VectorField VectorField::zero(const Chart& chart) {
    return VectorField{chart, std::vector<FieldExpr>(static_cast<size_t>(chart.dim()))};
}

VectorField VectorField::coordinate(const Chart& chart, int i) {
    VectorField v = zero(chart);
    v.c[static_cast<size_t>(i)] = FieldExpr::constant(1.0);
    return v;
}

KForm KForm::scalar(const Chart& chart, FieldExpr f) { return KForm{chart, 0, {std::move(f)}}; }

KForm KForm::zero(const Chart& chart, int k) {
    if (k < 0 || k > 3) throw std::invalid_argument("k-form: only k <= 3 is supported");
    return KForm{chart, k, std::vector<FieldExpr>(static_cast<size_t>(comb_count(chart.dim(), k)))};
}

KForm KForm::coordinate(const Chart& chart, int i) {
    KForm w = zero(chart, 1);
    w.comp[static_cast<size_t>(i)] = FieldExpr::constant(1.0);
    return w;
}

FieldExpr& KForm::at(std::initializer_list<int> idx) {
    int sign = 0;
    int r = comb_rank(chart, idx, sign);
    if (sign != 1) throw std::invalid_argument("k-form: at() needs strictly increasing indices");
    return comp[static_cast<size_t>(r)];
}

const FieldExpr& KForm::at(std::initializer_list<int> idx) const {
    return const_cast<KForm*>(this)->at(idx);
}

double KForm::value_on(EvalCache& cache, const std::vector<Eigen::VectorXd>& vecs) const {
    if (static_cast<int>(vecs.size()) != k) throw std::invalid_argument("k-form: arity mismatch");
    if (k == 0) return comp[0].value(cache);
    auto combs = combinations(chart.dim(), k);
    double total = 0.0;
    // expand over increasing tuples and permutations of the arguments
    std::vector<int> perm(static_cast<size_t>(k));
    for (size_t r = 0; r < combs.size(); ++r) {
        double cval = comp[r].value(cache);
        if (cval == 0.0) continue;
        for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        double sum = 0.0;
        // sum over permutations with sign: k <= 3 so just enumerate
        std::sort(perm.begin(), perm.end());
        do {
            int sign = 1;
            for (size_t i = 0; i < perm.size(); ++i)
                for (size_t j = i + 1; j < perm.size(); ++j)
                    if (perm[i] > perm[j]) sign = -sign;
            double prod = 1.0;
            for (int i = 0; i < k; ++i) prod *= vecs[static_cast<size_t>(perm[static_cast<size_t>(i)])]
                                                     [combs[r][static_cast<size_t>(i)]];
            sum += sign * prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += cval * sum;
    }
    return total;
}

Section Section::zero(const Chart& chart) {
    size_t d = static_cast<size_t>(chart.dim());
    return Section{chart, std::vector<FieldExpr>(d), std::vector<FieldExpr>(d)};
}

Section Section::frame(const Chart& chart, int i) {
    Section s = zero(chart);
    const int d = chart.dim();
    if (i < d)
        s.vec[static_cast<size_t>(i)] = FieldExpr::constant(1.0);
    else
        s.cov[static_cast<size_t>(i - d)] = FieldExpr::constant(1.0);
    return s;
}

Section Section::make(const Chart& chart, std::vector<FieldExpr> vec, std::vector<FieldExpr> cov) {
    if (static_cast<int>(vec.size()) != chart.dim() || static_cast<int>(cov.size()) != chart.dim())
        throw std::invalid_argument("section: component count mismatch");
    return Section{chart, std::move(vec), std::move(cov)};
}

Section Section::from_parts(VectorField x, KForm w) {
    check_chart(x.chart, w.chart, "section");
    if (w.k != 1) throw std::invalid_argument("section: covector part must be a 1-form");
    return Section{x.chart, std::move(x.c), std::move(w.comp)};
}

VectorField Section::vector_part() const { return VectorField{chart, vec}; }

KForm Section::covector_part() const { return KForm{chart, 1, cov}; }

Section Section::scaled(const FieldExpr& f) const {
    Section s = *this;
    for (auto& c : s.vec) c = c * f;
    for (auto& c : s.cov) c = c * f;
    return s;
}

Section Section::operator+(const Section& o) const {
    check_chart(chart, o.chart, "section sum");
    Section s = *this;
    for (size_t i = 0; i < vec.size(); ++i) s.vec[i] = s.vec[i] + o.vec[i];
    for (size_t i = 0; i < cov.size(); ++i) s.cov[i] = s.cov[i] + o.cov[i];
    return s;
}

Section Section::operator-(const Section& o) const {
    check_chart(chart, o.chart, "section difference");
    Section s = *this;
    for (size_t i = 0; i < vec.size(); ++i) s.vec[i] = s.vec[i] - o.vec[i];
    for (size_t i = 0; i < cov.size(); ++i) s.cov[i] = s.cov[i] - o.cov[i];
    return s;
}

Eigen::VectorXd Section::value_at(EvalCache& cache) const {
    const int d = chart.dim();
    Eigen::VectorXd v(2 * d);
    for (int i = 0; i < d; ++i) {
        v[i] = vec[static_cast<size_t>(i)].value(cache);
        v[d + i] = cov[static_cast<size_t>(i)].value(cache);
    }
    return v;
}

// ---------------------------------------------------------------------------

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    check_chart(x.chart, y.chart, "lie_bracket");
    const auto& names = x.chart.names();
    VectorField out = VectorField::zero(x.chart);
    for (size_t i = 0; i < names.size(); ++i) {
        FieldExpr acc;
        for (size_t j = 0; j < names.size(); ++j)
            acc = acc + x.c[j] * y.c[i].derivative(names[j]) - y.c[j] * x.c[i].derivative(names[j]);
        out.c[i] = acc;
    }
    return out;
}

KForm exterior_derivative(const KForm& w) {
    if (w.k >= 3) throw std::invalid_argument("exterior_derivative: result would exceed 3-forms");
    const Chart& chart = w.chart;
    const auto& names = chart.names();
    KForm out = KForm::zero(chart, w.k + 1);
    auto combs_out = combinations(chart.dim(), w.k + 1);
    for (size_t r = 0; r < combs_out.size(); ++r) {
        const auto& idx = combs_out[r];
        FieldExpr acc;
        for (int drop = 0; drop <= w.k; ++drop) {
            // (dw)_{i0..ik} = sum_j (-1)^j d_{i_j} w_{i0..^j..ik}
            std::vector<int> rest;
            for (int t = 0; t <= w.k; ++t)
                if (t != drop) rest.push_back(idx[static_cast<size_t>(t)]);
            int rank = 0;
            if (w.k == 0) {
                rank = 0;
            } else {
                auto combs_in = combinations(chart.dim(), w.k);
                rank = static_cast<int>(std::find(combs_in.begin(), combs_in.end(), rest) -
                                        combs_in.begin());
            }
            FieldExpr term =
                w.comp[static_cast<size_t>(rank)].derivative(names[static_cast<size_t>(idx[static_cast<size_t>(drop)])]);
            acc = (drop % 2 == 0) ? acc + term : acc - term;
        }
        out.comp[r] = acc;
    }
    return out;
}

KForm interior_product(const VectorField& x, const KForm& w) {
    check_chart(x.chart, w.chart, "interior_product");
    if (w.k < 1) throw std::invalid_argument("interior_product: needs k >= 1");
    const Chart& chart = w.chart;
    KForm out = KForm::zero(chart, w.k - 1);
    auto combs_out = combinations(chart.dim(), w.k - 1);
    auto combs_in = combinations(chart.dim(), w.k);
    for (size_t r = 0; r < combs_out.size(); ++r) {
        FieldExpr acc;
        for (int j = 0; j < chart.dim(); ++j) {
            // (i_X w)_{i1..} = sum_j X^j w_{j i1..}
            std::vector<int> full;
            full.push_back(j);
            for (int t : combs_out[r]) full.push_back(t);
            // sort with parity
            int sign = 1;
            for (size_t a = 0; a + 1 < full.size(); ++a)
                for (size_t b = 0; b + 1 < full.size() - a; ++b)
                    if (full[b] > full[b + 1]) {
                        std::swap(full[b], full[b + 1]);
                        sign = -sign;
                    }
            bool dup = false;
            for (size_t a = 0; a + 1 < full.size(); ++a)
                if (full[a] == full[a + 1]) dup = true;
            if (dup) continue;
            int rank = static_cast<int>(std::find(combs_in.begin(), combs_in.end(), full) -
                                        combs_in.begin());
            FieldExpr term = x.c[static_cast<size_t>(j)] * w.comp[static_cast<size_t>(rank)];
            acc = (sign > 0) ? acc + term : acc - term;
        }
        out.comp[r] = acc;
    }
    return out;
}

KForm lie_derivative_form(const VectorField& x, const KForm& w) {
    check_chart(x.chart, w.chart, "lie_derivative_form");
    if (w.k > 2) throw std::invalid_argument("lie_derivative_form: k <= 2 only");
    const Chart& chart = w.chart;
    const auto& names = chart.names();
    if (w.k == 0) {
        FieldExpr acc;
        for (int j = 0; j < chart.dim(); ++j)
            acc = acc + x.c[static_cast<size_t>(j)] * w.comp[0].derivative(names[static_cast<size_t>(j)]);
        return KForm::scalar(chart, acc);
    }
    KForm out = KForm::zero(chart, w.k);
    auto combs = combinations(chart.dim(), w.k);
    for (size_t r = 0; r < combs.size(); ++r) {
        const auto& idx = combs[r];
        FieldExpr acc;
        for (int j = 0; j < chart.dim(); ++j)
            acc = acc + x.c[static_cast<size_t>(j)] *
                            w.comp[r].derivative(names[static_cast<size_t>(j)]);
        // + sum_a w_{..j..} d_{i_a} X^j
        for (size_t a = 0; a < idx.size(); ++a) {
            for (int j = 0; j < chart.dim(); ++j) {
                std::vector<int> jdx(idx.begin(), idx.end());
                jdx[a] = j;
                int sign = 1;
                for (size_t s = 0; s + 1 < jdx.size(); ++s)
                    for (size_t t = 0; t + 1 < jdx.size() - s; ++t)
                        if (jdx[t] > jdx[t + 1]) {
                            std::swap(jdx[t], jdx[t + 1]);
                            sign = -sign;
                        }
                bool dup = false;
                for (size_t s = 0; s + 1 < jdx.size(); ++s)
                    if (jdx[s] == jdx[s + 1]) dup = true;
                if (dup) continue;
                int rank = static_cast<int>(std::find(combs.begin(), combs.end(), jdx) - combs.begin());
                FieldExpr term = w.comp[static_cast<size_t>(rank)] *
                                 x.c[static_cast<size_t>(j)].derivative(names[static_cast<size_t>(idx[a])]);
                acc = (sign > 0) ? acc + term : acc - term;
            }
        }
        out.comp[r] = acc;
    }
    return out;
}

Section courant_bracket(const Section& a, const Section& b) {
    check_chart(a.chart, b.chart, "courant_bracket");
    VectorField x = a.vector_part(), y = b.vector_part();
    KForm xi = a.covector_part(), eta = b.covector_part();

    VectorField vec = lie_bracket(x, y);
    KForm lx_eta = lie_derivative_form(x, eta);
    KForm ly_xi = lie_derivative_form(y, xi);
    KForm half_d = exterior_derivative(
        KForm::scalar(a.chart, interior_product(x, eta).comp[0] - interior_product(y, xi).comp[0]));

    KForm cov = KForm::zero(a.chart, 1);
    for (size_t i = 0; i < cov.comp.size(); ++i)
        cov.comp[i] = lx_eta.comp[i] - ly_xi.comp[i] - FieldExpr(0.5) * half_d.comp[i];
    return Section::from_parts(std::move(vec), std::move(cov));
}

// ---------------------------------------------------------------------------

StructureField::StructureField(Chart chart, MatExpr m) : chart_(std::move(chart)), m_(std::move(m)) {
    const int n = 2 * chart_.dim();
    if (m_.rows() != n || m_.cols() != n)
        throw std::invalid_argument("structure field: matrix must be (2d)x(2d)");
    dm_.reserve(static_cast<size_t>(chart_.dim()));
    for (const auto& name : chart_.names()) {
        MatExpr d(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = m_(i, j).derivative(name);
        dm_.push_back(std::move(d));
    }
}

StructureField::PointJets StructureField::jets(EvalCache& cache) const {
    PointJets out;
    out.m = eval_matrix(m_, cache);
    out.dm.reserve(dm_.size());
    for (const auto& d : dm_) out.dm.push_back(eval_matrix(d, cache));
    return out;
}

double StructureField::structure_residual(EvalCache& cache) const {
    Eigen::MatrixXd m = eval_matrix(m_, cache);
    const int n = m.rows();
    const int d = n / 2;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < d; ++i) gram(i, d + i) = gram(d + i, i) = 0.5;
    double r1 = (m * m + Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    double r2 = (gram * m + m.transpose() * gram).cwiseAbs().maxCoeff();
    return std::max(r1, r2);
}

void StructureField::require_structure(EvalCache& cache, double tol) const {
    if (structure_residual(cache) > tol)
        throw std::invalid_argument("structure field: pointwise structure invariant violated");
}

Section StructureField::apply(const Section& s) const {
    check_chart(chart_, s.chart, "structure apply");
    const int d = chart_.dim();
    Section out = Section::zero(chart_);
    for (int i = 0; i < 2 * d; ++i) {
        FieldExpr acc;
        for (int j = 0; j < d; ++j)
            acc = acc + m_(i, j) * s.vec[static_cast<size_t>(j)] +
                  m_(i, d + j) * s.cov[static_cast<size_t>(j)];
        if (i < d)
            out.vec[static_cast<size_t>(i)] = acc;
        else
            out.cov[static_cast<size_t>(i - d)] = acc;
    }
    return out;
}

StructureField StructureField::from_complex_field(const Chart& chart, const MatExpr& k) {
    const int d = chart.dim();
    if (k.rows() != d || k.cols() != d)
        throw std::invalid_argument("from_complex_field: K must be d x d");
    MatExpr m(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            m(i, j) = k(i, j);
            m(d + i, d + j) = -k(j, i);
        }
    return StructureField(chart, std::move(m));
}

StructureField StructureField::from_symplectic_field(const Chart& chart, const KForm& omega) {
    if (omega.k != 2) throw std::invalid_argument("from_symplectic_field: needs a 2-form");
    const int d = chart.dim();
    // W_{ij} = omega(d_i, d_j); the structure is  X -> i_X omega,  xi -> -W^{-1} xi
    MatExpr w(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            w(i, j) = omega.at({i, j});
            w(j, i) = -omega.at({i, j});
        }
    // X -> i_X omega has covector block W^T; minus the inverse map on V*
    // then has vector block +W^{-1} (so that the two blocks compose to -Id).
    MatExpr m(2 * d, 2 * d);
    MatExpr winv = mat_inverse(w);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            m(d + i, j) = w(j, i);
            m(i, d + j) = winv(i, j);
        }
    return StructureField(chart, std::move(m));
}

StructureField StructureField::b_transform_field(const StructureField& j, const KForm& b) {
    check_chart(j.chart(), b.chart, "b_transform_field");
    if (b.k != 2) throw std::invalid_argument("b_transform_field: B must be a 2-form");
    const int d = j.chart().dim();
    MatExpr shear = MatExpr::identity(2 * d, FieldExpr(1.0));
    MatExpr unshear = MatExpr::identity(2 * d, FieldExpr(1.0));
    for (int i = 0; i < d; ++i)
        for (int jj = i + 1; jj < d; ++jj) {
            // (i_X B)_m = X^l B_{lm}
            shear(d + jj, i) = b.at({i, jj});
            shear(d + i, jj) = -b.at({i, jj});
            unshear(d + jj, i) = -b.at({i, jj});
            unshear(d + i, jj) = b.at({i, jj});
        }
    return StructureField(j.chart(), shear * j.mat() * unshear);
}

// ---------------------------------------------------------------------------

SectionJet section_jet(const Section& s, EvalCache& cache) {
    const Chart& chart = s.chart;
    const int d = chart.dim();
    SectionJet out;
    out.val.resize(2 * d);
    out.d.resize(2 * d, d);
    std::vector<FieldExpr> comps(static_cast<size_t>(2 * d));
    for (int i = 0; i < d; ++i) {
        comps[static_cast<size_t>(i)] = s.vec[static_cast<size_t>(i)];
        comps[static_cast<size_t>(d + i)] = s.cov[static_cast<size_t>(i)];
    }
    for (int i = 0; i < 2 * d; ++i) {
        out.val[i] = comps[static_cast<size_t>(i)].value(cache);
        for (int k = 0; k < d; ++k)
            out.d(i, k) = comps[static_cast<size_t>(i)].derivative(chart.names()[static_cast<size_t>(k)]).value(cache);
    }
    return out;
}

SectionJet apply_structure(const StructureField::PointJets& j, const SectionJet& s) {
    SectionJet out;
    out.val = j.m * s.val;
    out.d.resize(s.d.rows(), s.d.cols());
    for (int k = 0; k < s.d.cols(); ++k) out.d.col(k) = j.dm[static_cast<size_t>(k)] * s.val + j.m * s.d.col(k);
    return out;
}

Eigen::VectorXd courant_at(const SectionJet& a, const SectionJet& b, int dim) {
    const int d = dim;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * d);
    auto X = a.val.head(d);
    auto Y = b.val.head(d);
    auto xi = a.val.tail(d);
    auto eta = b.val.tail(d);

    // [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i
    for (int i = 0; i < d; ++i) {
        double acc = 0;
        for (int j = 0; j < d; ++j) acc += X[j] * b.d(i, j) - Y[j] * a.d(i, j);
        out[i] = acc;
    }
    // (L_X eta)_i = X^j d_j eta_i + eta_j d_i X^j, minus same with (Y, xi),
    // minus d(i_X eta - i_Y xi)/2 with (d f)_i = d_i(X^j eta_j - Y^j xi_j).
    for (int i = 0; i < d; ++i) {
        double acc = 0;
        for (int j = 0; j < d; ++j) {
            acc += X[j] * b.d(d + i, j) + eta[j] * a.d(j, i);
            acc -= Y[j] * a.d(d + i, j) + xi[j] * b.d(j, i);
            acc -= 0.5 * (a.d(j, i) * eta[j] + X[j] * b.d(d + j, i) - b.d(j, i) * xi[j] - Y[j] * a.d(d + j, i));
        }
        out[d + i] = acc;
    }
    return out;
}

Eigen::VectorXd nijenhuis_at(const StructureField::PointJets& j, const SectionJet& a,
                             const SectionJet& b, int dim) {
    SectionJet ja = apply_structure(j, a);
    SectionJet jb = apply_structure(j, b);
    Eigen::VectorXd n = -courant_at(a, b, dim) - j.m * courant_at(a, jb, dim) -
                        j.m * courant_at(ja, b, dim) + courant_at(ja, jb, dim);
    return n;
}

Eigen::VectorXd nijenhuis_field(const StructureField& j, const Section& a, const Section& b,
                                std::span<const double> p, double structure_tol) {
    check_chart(j.chart(), a.chart, "nijenhuis_field");
    check_chart(j.chart(), b.chart, "nijenhuis_field");
    EvalCache cache(j.chart(), p);
    j.require_structure(cache, structure_tol);
    auto jets = j.jets(cache);
    return nijenhuis_at(jets, section_jet(a, cache), section_jet(b, cache), j.chart().dim());
}

double tensoriality_check(const StructureField& j, const Section& a, const Section& b,
                          std::span<const double> p, const FieldExpr& f) {
    EvalCache probe(j.chart(), p);
    double fv = f.value(probe);
    if (std::abs(fv - 1.0) > 1e-12)
        throw std::invalid_argument("tensoriality_check: f(p) must be 1");
    Eigen::VectorXd n0 = nijenhuis_field(j, a, b, p);
    Eigen::VectorXd n1 = nijenhuis_field(j, a.scaled(f), b, p);
    return (n1 - n0).cwiseAbs().maxCoeff();
}

}  // namespace gk::fields
