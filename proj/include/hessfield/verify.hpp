// Numerical certification of the barrier lemmas, the boundary second-derivative
// identity, the f_R / g(x) boundary reduction, and derivative-bound monitors.
#pragma once

#include <span>

#include "hessfield/solver.hpp"

namespace hessfield {

struct BarrierCertificate {
    double K = 0.0;
    double epsilon = 0.0;  // certified constant on pass, best (non-positive) slack on fail
    std::string kind;      // lemma21 | lemma22 | phi
    long min_node = -1;
    bool pass = false;

    nlohmann::json to_json() const;
};

std::vector<double> default_K_ladder();     // 2^0 .. 2^20
std::vector<double> default_eps2_ladder();  // 2^-1 .. 2^-20

// Exponential barrier certificate ("lemma21"): first K in the ladder with
// min_interior L[e^{K(usub-u)}] / (1+T) > 0.
BarrierCertificate verify_lemma21(const DiscreteProblem& dp, const GridFunction& u,
                                  std::span<const double> K_ladder = {});

// Strengthened barrier certificate ("lemma22"): (K, eps2) with
// L[e^{K(usub-u)} + eps2/2 |delta u|^2] >= eps2 (1 + T*),
// T* = sum_i F^{ii}(1+|w_ii|) in the nodal eigenframe. Disc domains only.
BarrierCertificate verify_lemma22(const DiscreteProblem& dp, const GridFunction& u,
                                  std::span<const double> K_ladder = {},
                                  std::span<const double> eps2_ladder = {});

struct PhiReport {
    double K = 0.0;
    double eps2 = 0.0;
    double max_boundary_abs = 0.0;  // |Phi| on trace nodes, must vanish
    double max_interior = 0.0;      // Phi <= tol_disc inside
    double tol_interior = 0.0;      // 10 h^2
    double mixed_derivative_sup = 0.0;
    long worst_node = -1;
    bool pass = false;

    nlohmann::json to_json() const;
};

// Phi = e^{K(usub-u)} - 1 + eps2/2 |delta(u-usub)|^2: zero trace, nonpositive
// interior up to the discretization tolerance; also reports the implied
// mixed-derivative bound along the boundary.
PhiReport verify_phi(const DiscreteProblem& dp, const GridFunction& u, double K, double eps2);

struct BoundaryIdentityReport {
    double max_discrepancy = 0.0;
    double mean_discrepancy = 0.0;
    long argmax_trace = -1;

    nlohmann::json to_json() const;
};

// Tangential second derivative of (u - phi) against curvature times the normal
// derivative at every boundary node (disc domains; rectangles have corners).
BoundaryIdentityReport boundary_identity_check(const DiscreteProblem& dp, const GridFunction& u);

struct GScanRow {
    double R = 0.0;
    double min_g = 0.0;
    double max_g = 0.0;
    long argmin_trace = -1;
};

struct GScanReport {
    std::vector<GScanRow> rows;
    bool monotone_in_R = true;  // per node, f_R nondecreasing across the ladder
    bool pass = false;          // min g > 0 at the largest R

    nlohmann::json to_json() const;
};

std::vector<double> default_R_ladder();  // 10, 1e2, 1e3, 1e4

GScanReport g_function_scan(const DiscreteProblem& dp, const GridFunction& u,
                            std::span<const double> R_ladder = {});

struct EstimateReport {
    double sup_du = 0.0;
    double sup_du_boundary = 0.0;
    double ratio = 0.0;
    double sup_d2u = 0.0;
    double alpha = 0.0;
    Vec2 vmax_location;
    bool vmax_on_boundary = false;

    nlohmann::json to_json() const;
};

// sup |Du|, boundary sup, their ratio, sup |D^2 u|, and the argmax of the
// auxiliary field v = |Du|^2 + alpha M1^2 (u - inf u).
EstimateReport estimate_monitor(const DiscreteProblem& dp, const GridFunction& u);

}  // namespace hessfield
