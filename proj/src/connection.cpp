#include "gk/connection.hpp"

#include <cmath>

#include "gk/structure_tables.hpp"

namespace gk::connection {

ConnectionSpec::ConnectionSpec(Chart chart, std::array<FieldExpr, 8> gamma_in)
    : chart_(std::move(chart)), gamma_(std::move(gamma_in)) {
    if (chart_.dim() != 2) throw std::invalid_argument("connection: chart must be 2-dimensional");
    const auto& names = chart_.names();

    // rho^l_k = -( d_u Gamma^l_{vk} - d_v Gamma^l_{uk}
    //              + Gamma^l_{um} Gamma^m_{vk} - Gamma^l_{vm} Gamma^m_{uk} )
    rho_uv_ = MatExpr(2, 2);
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            FieldExpr acc = gamma(l, 1, k).derivative(names[0]) - gamma(l, 0, k).derivative(names[1]);
            for (int m = 0; m < 2; ++m)
                acc = acc + gamma(l, 0, m) * gamma(m, 1, k) - gamma(l, 1, m) * gamma(m, 0, k);
            rho_uv_(l, k) = -acc;
        }

    for (int m = 0; m < 2; ++m) {
        std::array<std::array<FieldExpr, 2>, 2> g;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) g[static_cast<size_t>(k)][static_cast<size_t>(j)] = gamma(k, m, j);
        ghat_[static_cast<size_t>(m)] = tables::connection_endo(g);
    }
}

ConnectionSpec ConnectionSpec::flat(Chart chart) {
    return ConnectionSpec(std::move(chart), std::array<FieldExpr, 8>{});
}

ConnectionSpec ConnectionSpec::from_gamma(Chart chart, std::array<FieldExpr, 8> gamma) {
    return ConnectionSpec(std::move(chart), std::move(gamma));
}

ConnectionSpec ConnectionSpec::levi_civita(Chart chart, FieldExpr e, FieldExpr f, FieldExpr g) {
    const auto& names = chart.names();
    if (chart.dim() != 2) throw std::invalid_argument("levi_civita: chart must be 2-dimensional");

    MatExpr met(2, 2);
    met(0, 0) = e;
    met(0, 1) = met(1, 0) = f;
    met(1, 1) = g;
    MatExpr inv = mat_inverse(met);

    // Gamma^k_{ij} = g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}) / 2
    std::array<FieldExpr, 8> gamma;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                FieldExpr acc;
                for (int l = 0; l < 2; ++l) {
                    FieldExpr t = met(j, l).derivative(names[static_cast<size_t>(i)]) +
                                  met(i, l).derivative(names[static_cast<size_t>(j)]) -
                                  met(i, j).derivative(names[static_cast<size_t>(l)]);
                    acc = acc + inv(k, l) * t;
                }
                gamma[static_cast<size_t>(4 * k + 2 * i + j)] = FieldExpr(0.5) * acc;
            }
    return ConnectionSpec(std::move(chart), std::move(gamma));
}

std::array<double, 8> torsion(const ConnectionSpec& spec, std::span<const double> p) {
    EvalCache cache(spec.chart(), p);
    std::array<double, 8> t{};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                t[static_cast<size_t>(4 * k + 2 * i + j)] =
                    spec.gamma(k, i, j).value(cache) - spec.gamma(k, j, i).value(cache);
    return t;
}

double max_torsion(const ConnectionSpec& spec, int grid_n) {
    double worst = 0.0;
    for (const auto& p : uniform_grid(spec.chart(), grid_n)) {
        auto t = torsion(spec, p);
        for (double v : t) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

void require_torsion_free(const ConnectionSpec& spec, double tol, int grid_n) {
    if (max_torsion(spec, grid_n) > tol)
        throw std::invalid_argument("connection has torsion; the twistor construction requires a torsion-free connection");
}

CurvatureValue curvature(const ConnectionSpec& spec, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& y, std::span<const double> p) {
    EvalCache cache(spec.chart(), p);
    Eigen::MatrixXd rho_uv = eval_matrix(spec.curvature_uv(), cache);
    CurvatureValue cv;
    cv.rho = (x[0] * y[1] - x[1] * y[0]) * rho_uv;
    cv.rho_hat.setZero();
    cv.rho_hat.topLeftCorner<2, 2>() = cv.rho;
    cv.rho_hat.bottomRightCorner<2, 2>() = -cv.rho.transpose();
    return cv;
}

bool trace_condition(const ConnectionSpec& spec, std::span<const double> p, double tol) {
    EvalCache cache(spec.chart(), p);
    Eigen::MatrixXd rho = eval_matrix(spec.curvature_uv(), cache);
    return std::abs(rho(0, 0) + rho(1, 1)) <= tol;
}

FlatnessReport flatness_scan(const ConnectionSpec& spec,
                             const std::vector<std::array<double, 2>>& grid, double tol) {
    if (grid.empty()) throw std::invalid_argument("flatness_scan: empty grid");
    FlatnessReport r;
    r.points = static_cast<int>(grid.size());
    for (const auto& p : grid) {
        EvalCache cache(spec.chart(), p);
        double n = eval_matrix(spec.curvature_uv(), cache).cwiseAbs().maxCoeff();
        if (n > r.max_norm) {
            r.max_norm = n;
            r.argmax = p;
        }
    }
    r.flat = r.max_norm < tol;
    return r;
}

std::vector<std::array<double, 2>> uniform_grid(const Chart& chart, int n) {
    if (chart.dim() != 2) throw std::invalid_argument("uniform_grid: 2-dimensional charts only");
    if (n < 2) throw std::invalid_argument("uniform_grid: n >= 2 required");
    const auto& b = chart.bounds();
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = (i + 0.5) / n, t = (j + 0.5) / n;
            pts.push_back({b[0][0] + s * (b[0][1] - b[0][0]), b[1][0] + t * (b[1][1] - b[1][0])});
        }
    return pts;
}

}  // namespace gk::connection
