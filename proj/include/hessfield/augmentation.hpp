// Augmentation data: the matrix A(x,z,p) and scalar B(x,z,p) with first and
// second derivatives (analytic where supplied, finite-difference fallback
// otherwise), the built-in catalog, regularity and structure-growth
// certification, and admissibility classification of grid functions.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hessfield/grid.hpp"
#include "hessfield/operators.hpp"
#include "hessfield/symmat.hpp"

namespace hessfield {

// point / gradient in R^n, n <= 3
using Pt = std::array<double, 3>;

inline double pt_norm(const Pt& p, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += p[static_cast<size_t>(i)] * p[static_cast<size_t>(i)];
    return std::sqrt(s);
}

struct AugmentedData {
    int n = 2;
    bool z_dependent = false;
    std::string a_id = "zero";
    std::string b_id = "const";

    std::function<SymMat(const Pt&, double, const Pt&)> A;
    std::function<double(const Pt&, double, const Pt&)> B;

    // analytic derivatives; empty means central finite differences with step
    // 1e-6 (1 + |p|)
    std::function<SymMat(const Pt&, double, const Pt&, int)> A_p;
    std::function<SymMat(const Pt&, double, const Pt&, int, int)> A_pp;
    std::function<SymMat(const Pt&, double, const Pt&)> A_z;
    std::function<SymMat(const Pt&, double, const Pt&, int)> A_x;
    std::function<Pt(const Pt&, double, const Pt&)> B_p;
    std::function<double(const Pt&, double, const Pt&)> B_z;
    std::function<Pt(const Pt&, double, const Pt&)> B_x;

    double fd_step(const Pt& p) const { return 1e-6 * (1.0 + pt_norm(p, n)); }

    SymMat dpA(const Pt& x, double z, const Pt& p, int k) const;
    SymMat d2pA(const Pt& x, double z, const Pt& p, int k, int l) const;
    SymMat dzA(const Pt& x, double z, const Pt& p) const;
    SymMat dxA(const Pt& x, double z, const Pt& p, int k) const;
    Pt dpB(const Pt& x, double z, const Pt& p) const;
    double dzB(const Pt& x, double z, const Pt& p) const;
    Pt dxB(const Pt& x, double z, const Pt& p) const;

    // quartic regularity form  sum A_ij^kl xi_i xi_j eta_k eta_l
    double regularity_form(const Pt& x, double z, const Pt& p, const Pt& xi, const Pt& eta) const;
};

// named closed-form scalar fields for phi, subsolutions, supersolutions and
// manufactured exact solutions
struct ScalarField {
    std::string id = "const";
    std::vector<double> params{0.0};

    double operator()(Vec2 p) const;
    static ScalarField make(const std::string& id, std::vector<double> params);
};

// catalog of named A entries: zero | const_shift c | quad_iso c |
// power_iso c q | xz_matrix c0 c1
AugmentedData make_A(const std::string& id, std::vector<double> params, int n);
// catalog of named B entries: const c | linear_x c0 cx cy | quad_p c |
// exp_radial c     (all convex in p)
void attach_B(AugmentedData& aug, const std::string& id, std::vector<double> params);

struct ProblemSpec {
    OperatorSpec op;
    AugmentedData aug;
    DomainSpec domain;
    ScalarField phi;
    ScalarField usub;
    std::optional<ScalarField> usuper;
    std::optional<ScalarField> exact;  // manufactured solution when known
    bool z_dependence = false;

    // subsolution trace must match phi; B must stay above a0 on the domain
    void validate(const Grid& grid) const;
};

SymMat augmented_hessian(const AugmentedData& aug, const Pt& x, double z, const Pt& p,
                         const SymMat& hess);

struct SampleBox {
    std::array<double, 2> x_range{-1.0, 1.0};
    std::array<double, 2> z_range{-1.0, 1.0};
    std::array<double, 2> p_range{-5.0, 5.0};
};

// Regularity of A per the quartic form on orthogonal unit pairs; also reports
// the unconstrained variant ("regular without orthogonality").
ConditionReport regularity_check(const AugmentedData& aug, const SampleBox& box, bool strict,
                                 int samples, std::uint64_t seed);

enum class GrowthCondition { Cond_1_14, Cond_1_15, Cond_1_16 };

struct GrowthQuantity {
    std::string name;
    std::vector<double> bin_p;      // sampled |p| magnitudes
    std::vector<double> bin_value;  // sup of the scalar reduction per bin
    double slope = 0.0;
    double slope_threshold = 0.0;
    bool pass = false;
};

struct GrowthReport {
    std::string condition;
    bool pass = false;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<GrowthQuantity> quantities;

    nlohmann::json to_json() const;
};

GrowthReport structure_growth_check(const AugmentedData& aug, GrowthCondition which,
                                    const SampleBox& x_box, std::array<double, 2> z_box,
                                    int samples, std::uint64_t seed);

struct AdmissibilityReport {
    bool admissible = false;
    bool strictly_admissible = false;
    bool subsolution = false;
    bool strict_subsolution = false;
    bool supersolution = false;
    double min_margin = 0.0;
    double min_rel_margin = 0.0;  // margin / (1 + ||M||)
    double min_residual = 0.0;
    double max_residual = 0.0;
    double delta = 0.0;  // reported strictness of the subsolution inequality
    long worst_node = -1;

    nlohmann::json to_json() const;
};

// Node-wise admissibility and sub/supersolution classification of u with
// respect to itself (z = u(x); for z-independent data this is plain
// admissibility).
AdmissibilityReport classify(const AugmentedData& aug, const OperatorSpec& op,
                             const GridFunction& u);

}  // namespace hessfield
