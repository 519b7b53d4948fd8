// Small symmetric-matrix algebra: eigen decompositions (n = 2, 3), elementary
// symmetric functions, and membership margins for the Garding cones Gamma_k
// and the k-convex cones P_k.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "hessfield/errors.hpp"

namespace hessfield {

// Dense symmetric matrix of dimension 2 or 3. Only the upper triangle is
// stored, in row-major order: n=2 -> (a00, a01, a11),
// n=3 -> (a00, a01, a02, a11, a12, a22).
struct SymMat {
    int n = 2;
    std::array<double, 6> a{};

    SymMat() = default;
    explicit SymMat(int dim) : n(dim) { a.fill(0.0); }

    static SymMat zero(int n) { return SymMat(n); }
    static SymMat identity(int n);
    static SymMat diag(std::span<const double> d);
    static SymMat diag2(double a0, double a1);
    static SymMat diag3(double a0, double a1, double a2);

    int storage_size() const { return n * (n + 1) / 2; }

    double& at(int i, int j);
    double at(int i, int j) const;
    double operator()(int i, int j) const { return at(i, j); }

    bool finite() const;
    double frobenius_norm() const;
    double max_abs() const;
    double trace() const;

    SymMat& operator+=(const SymMat& o);
    SymMat& operator-=(const SymMat& o);
    SymMat& operator*=(double s);
    friend SymMat operator+(SymMat l, const SymMat& r) { return l += r; }
    friend SymMat operator-(SymMat l, const SymMat& r) { return l -= r; }
    friend SymMat operator*(double s, SymMat m) { return m *= s; }

    // v^T m v for a vector with at least n entries
    double quad_form(std::span<const double> v) const;

    // sum_ij m_ij o_ij (Frobenius inner product)
    double inner(const SymMat& o) const;
};

// Eigen decomposition of a SymMat. Eigenvalues ascending; vec[k] is the unit
// eigenvector for lambda[k]; the frame is orthonormal.
struct Spectrum {
    int n = 2;
    std::array<double, 3> lambda{};
    std::array<std::array<double, 3>, 3> vec{};

    // Q diag(d) Q^T for per-eigenvalue scalars d
    SymMat reassemble(std::span<const double> d) const;
};

enum class ConeKind { GammaK, Pk };

// A Garding cone Gamma_k or k-convex cone P_k in dimension n.
struct ConeSpec {
    ConeKind kind = ConeKind::GammaK;
    int k = 1;
    int n = 2;

    static ConeSpec gamma(int k, int n) { return {ConeKind::GammaK, k, n}; }
    static ConeSpec pk(int k, int n) { return {ConeKind::Pk, k, n}; }

    void validate() const;
};

// Eigen decomposition. n=2 closed-form; n=3 trigonometric (Cardano) with a
// Jacobi-sweep fallback when the discriminant is within 1e-12 of degenerate.
Spectrum eigen(const SymMat& m);

// k-th elementary symmetric function of the entries of lambda.
double elem_sym(std::span<const double> lambda, int k);

// Minimum over the cone's defining inequalities: min_{j<=k} S_j for Gamma_k,
// min over k-subsets of partial eigenvalue sums for P_k. Membership in the
// open cone is margin > 0; "closed cone" is margin >= -1e-12.
double cone_margin(const SymMat& m, const ConeSpec& cone);
double cone_margin(std::span<const double> lambda, const ConeSpec& cone);

// Minimum eigenvalue and a unit eigenvector for it.
std::pair<double, std::array<double, 3>> min_eig_direction(const SymMat& m);

}  // namespace hessfield
