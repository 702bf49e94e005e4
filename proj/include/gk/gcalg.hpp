#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

namespace gk::gcalg {

/// Element of V + V* in the frame (e1, e2, eta1, eta2); component order is
/// fixed as (x1, x2, xi1, xi2) everywhere.
using GVec = Eigen::Vector4d;

/// Endomorphism of V + V* as a 4x4 matrix acting on GVec components.
using GEndo = Eigen::Matrix4d;

inline GVec gvec(double x1, double x2, double xi1, double xi2) { return GVec(x1, x2, xi1, xi2); }

/// <X+xi, Y+eta> = (xi(Y) + eta(X)) / 2; symmetric, signature (2,2).
double neutral_pairing(const GVec& a, const GVec& b);

/// Gram matrix of the neutral pairing in the (e1,e2,eta1,eta2) frame.
Eigen::Matrix4d neutral_gram();

/// Q1=e1+eta1, Q2=e2+eta2, Q3=e1-eta1, Q4=e2-eta2 with signs (1,1,-1,-1);
/// orthonormal and positively oriented for the canonical orientation.
struct QBasis {
    std::array<GVec, 4> q;
    std::array<double, 4> eps;
    static QBasis standard();
};

/// Point (x1,x2,x3) on x1^2 - x2^2 - x3^2 = 1; parametrizes one sheet of
/// the structure hyperboloid.
struct Hyper3 {
    double x1, x2, x3;

    int sheet() const { return x1 >= 0 ? +1 : -1; }
    double constraint_residual() const { return x1 * x1 - x2 * x2 - x3 * x3 - 1.0; }

    /// Validates the hyperboloid constraint to `tol` (default per fiber
    /// construction: reject beyond 1e-9).
    static Hyper3 make(double x1, double x2, double x3, double tol = 1e-9);

    /// Sheet chart (c2, c3) -> (sigma*sqrt(1+c2^2+c3^2), c2, c3).
    static Hyper3 from_chart(int sigma, double c2, double c3);
};

bool is_neutral_skew(const GEndo& m, double tol = 1e-9);
bool is_structure(const GEndo& m, double tol = 1e-9);  // m^2 = -Id and skew

/// Structures on the plus/minus sheets, matrix actions exactly those of
/// the hyperboloid parametrization:
///   I e1 = x2 e1 + (x1+x3) e2          J e1 = y2 e1 + (y1-y3) eta2
///   I e2 = -(x1-x3) e1 - x2 e2         J e2 = y2 e2 - (y1-y3) eta1
///   I eta1 = -x2 eta1 + (x1-x3) eta2   J eta1 = (y1+y3) e2 - y2 eta1
///   I eta2 = -(x1+x3) eta1 + x2 eta2   J eta2 = -(y1+y3) e1 - y2 eta2
GEndo structure_plus(const Hyper3& x);
GEndo structure_minus(const Hyper3& y);

/// Structure induced by a complex structure K on V: K on V, -K* on V*.
/// Throws unless K^2 = -Id.
GEndo from_complex(const Eigen::Matrix2d& K, double tol = 1e-9);

/// Structure induced by the symplectic form w * eta1^eta2: the interior
/// product map on V and minus its inverse on V*.  Throws if w = 0.
GEndo from_symplectic(double w);

enum class Orientation { Plus, Minus };

/// Orientation class of a structure: builds an adapted orthonormal basis
/// {a, Ja, b, Jb} and compares a determinant sign against the canonical
/// frame.  Throws on non-structure input.
Orientation orientation_class(const GEndo& j, double tol = 1e-9);

/// exp(B) J exp(-B) with exp(B): X+xi -> X + xi + i_X B for B = coeff *
/// eta1^eta2.  Preserves structure property and orientation class.
GEndo b_transform(const GEndo& j, double b_coeff, double tol = 1e-9);

/// exp(beta) J exp(-beta) with exp(beta): X+xi -> X + i_xi beta + xi for
/// beta = coeff * e1^e2.
GEndo beta_transform(const GEndo& j, double beta_coeff, double tol = 1e-9);

Eigen::Matrix4d b_shear(double b_coeff);     // matrix of exp(B)
Eigen::Matrix4d beta_shear(double b_coeff);  // matrix of exp(beta)

/// Tangent vector to the structure manifold at `base`: skew and
/// anti-commuting with `base`.
struct FiberTangent {
    GEndo base;
    GEndo q;
    static FiberTangent make(const GEndo& base, const GEndo& q, double tol = 1e-9);
};

/// Metric on skew endomorphisms: <a,b> = -Trace(a b)/2.
double so_metric(const GEndo& a, const GEndo& b);

/// Fiber Kaehler geometry at a structure J: a basis of the (2-dim)
/// tangent space T_J, the positive metric h = -g on it, the complex
/// structure K Q = J o Q, and the musical isomorphisms.
struct FiberGeometry {
    std::array<GEndo, 2> basis;
    Eigen::Matrix2d h;  // Gram of h in `basis`; positive definite
    Eigen::Matrix2d k;  // action of Q -> J o Q in `basis`; squares to -Id

    Eigen::Matrix2d flat() const { return h; }             // U -> h(U, .)
    Eigen::Matrix2d sharp() const { return h.inverse(); }  // inverse of flat

    /// Components of a tangent endomorphism in `basis` (least squares via h).
    Eigen::Vector2d components(const GEndo& q) const;
    GEndo from_components(const Eigen::Vector2d& c) const;
};

FiberGeometry fiber_geometry(const GEndo& j, double tol = 1e-9);

/// Smallest eigenvalue of the symmetrized Gram matrix of A -> <IA, JA>.
double positivity_min_eig(const GEndo& i, const GEndo& j);

/// True iff <IA, JA> is positive definite.  Requires orientation classes
/// (+, -); agrees with the sheet criterion x1*y1 > 0.
bool positivity(const GEndo& i, const GEndo& j, double tol = 1e-9);

/// The induced generalized Kaehler pair on the 8-dimensional fiber phase
/// space (T_I + T_J) + (T_I* + T_J*), component order (u, v, phi, psi)
/// with two components each:
///   I(U,V) = I o U - V_flat o J      I(phi,psi) = -phi o I + J o psi_sharp
///   J(U,V) = J o V - U_flat o I      J(phi,psi) = -psi o J + I o phi_sharp
struct GksFiberPair {
    FiberGeometry plus, minus;
    Eigen::Matrix<double, 8, 8> op_i, op_j;

    /// Gram of the natural neutral pairing of the fiber phase space.
    static Eigen::Matrix<double, 8, 8> pairing_gram();
};

GksFiberPair gks_fiber_pair(const GEndo& i, const GEndo& j, double tol = 1e-9);

}  // namespace gk::gcalg
