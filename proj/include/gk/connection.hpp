#pragma once

#include <array>

#include <Eigen/Dense>

#include "gk/expr.hpp"

namespace gk::connection {

/// Affine connection on a 2-dimensional chart, given by Christoffel data
/// Gamma^k_{ij} meaning nabla_{d_i} d_j = Gamma^k_{ij} d_k.
///
/// Curvature uses the sign convention R(X,Y) = nabla_[X,Y] - [nabla_X,
/// nabla_Y], the negative of the more common choice.  Every curvature
/// value produced here carries that sign.
class ConnectionSpec {
public:
    static ConnectionSpec flat(Chart chart);
    static ConnectionSpec from_gamma(Chart chart, std::array<FieldExpr, 8> gamma);  // [k][i][j]
    /// Levi-Civita connection of E du^2 + 2F du dv + G dv^2.
    static ConnectionSpec levi_civita(Chart chart, FieldExpr e, FieldExpr f, FieldExpr g);

    const Chart& chart() const { return chart_; }
    const FieldExpr& gamma(int k, int i, int j) const {
        return gamma_[static_cast<size_t>(4 * k + 2 * i + j)];
    }

    /// rho(d_u, d_v) as a symbolic 2x2 matrix (paper sign).
    const MatExpr& curvature_uv() const { return rho_uv_; }

    /// Connection endomorphism of TM+T*M for base direction m (4x4).
    const MatExpr& endo(int m) const { return ghat_[static_cast<size_t>(m)]; }

private:
    ConnectionSpec(Chart chart, std::array<FieldExpr, 8> gamma);

    Chart chart_;
    std::array<FieldExpr, 8> gamma_;
    MatExpr rho_uv_;
    std::array<MatExpr, 2> ghat_;
};

/// T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji} at p, flattened [k][i][j].
std::array<double, 8> torsion(const ConnectionSpec& spec, std::span<const double> p);

double max_torsion(const ConnectionSpec& spec, int grid_n = 7);

void require_torsion_free(const ConnectionSpec& spec, double tol = 1e-10, int grid_n = 7);

/// Curvature endomorphism at a point for base vectors X, Y, plus its
/// extension to TM+T*M (covector block -rho^T) and the induced action on
/// endomorphism fields s -> [rho_hat, s].
struct CurvatureValue {
    Eigen::Matrix2d rho;
    Eigen::Matrix4d rho_hat;

    Eigen::Matrix4d act(const Eigen::Matrix4d& s) const { return rho_hat * s - s * rho_hat; }
};

CurvatureValue curvature(const ConnectionSpec& spec, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& y, std::span<const double> p);

/// True iff the curvature endomorphism is trace-free at p.
bool trace_condition(const ConnectionSpec& spec, std::span<const double> p, double tol = 1e-9);

struct FlatnessReport {
    double max_norm = 0.0;           // max over grid of |rho(d_u,d_v)|_inf
    bool flat = false;               // max_norm < tol
    std::array<double, 2> argmax{};  // grid point attaining the max
    int points = 0;
};

/// Scan |rho| over an explicit grid; declared flat when the max < tol.
FlatnessReport flatness_scan(const ConnectionSpec& spec,
                             const std::vector<std::array<double, 2>>& grid, double tol = 1e-9);

/// Uniform n x n interior grid over the chart bounds.
std::vector<std::array<double, 2>> uniform_grid(const Chart& chart, int n);

}  // namespace gk::connection
