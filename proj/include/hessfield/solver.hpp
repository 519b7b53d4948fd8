// Residual assembly for the continuation family F[u] = tB + (1-t)F[usub],
// the linearized operator, an admissibility-preserving damped Newton method,
// and the method-of-continuity driver.
#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "hessfield/augmentation.hpp"

namespace hessfield {

struct SolverConfig {
    double newton_tol = 1e-9;
    int max_newton = 50;
    int continuation_steps = 10;
    double damping_min = 1.0 / 1024.0;
    double adm_margin = 1e-8;  // required relative cone margin along the path
    enum class Linear { DirectBand, IterativeBicg } linear_solver = Linear::DirectBand;

    void validate() const;
};

struct NewtonTrace {
    std::vector<double> residuals;  // max-norm history, accepted iterates
    std::vector<double> dampings;
    double min_rel_margin = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct ContinuationStep {
    double t = 0.0;
    int newton_iterations = 0;
    std::vector<double> residual_history;
    double min_rel_margin = 0.0;
    double min_damping = 1.0;
};

struct SolveReport {
    std::vector<ContinuationStep> steps;
    double final_residual = 0.0;
    double sup_du = 0.0;
    double sup_du_boundary = 0.0;
    double du_ratio = 0.0;  // sup_du / sup_du_boundary
    double sup_d2u = 0.0;   // max spectral radius of the discrete Hessian
    bool comparison_checked = false;
    bool comparison_ok = false;
    double min_u_minus_usub = 0.0;
    double max_u_minus_usuper = 0.0;
    double wall_time_seconds = 0.0;  // excluded from the deterministic JSON

    nlohmann::json to_json() const;
};

// A ProblemSpec bound to its grid, with F(M[usub]) frozen node-wise at setup
// so the t = 0 member of the family is solved by usub identically.
class DiscreteProblem {
  public:
    explicit DiscreteProblem(ProblemSpec spec);

    const ProblemSpec& spec() const { return spec_; }
    std::shared_ptr<const Grid> grid() const { return grid_; }
    const std::vector<double>& f_sub() const { return f_sub_; }
    const GridFunction& subsolution() const { return usub_; }

    // sample a closed-form field; trace slots carry the field's own trace
    GridFunction sample(const ScalarField& f) const;

  private:
    ProblemSpec spec_;
    std::shared_ptr<const Grid> grid_;
    GridFunction usub_;
    std::vector<double> f_sub_;
};

// Everything the linearized operator needs at one interior node.
struct NodeLinearization {
    SymMat M;                     // augmented Hessian
    SymMat Fij;                   // F_r in grid coordinates
    std::array<double, 3> lambda{};
    std::array<double, 3> f{};    // eigenframe derivatives, degeneracy-symmetrized
    double F = 0.0;
    double margin = 0.0;
    double T = 0.0;               // trace(F_r)
    Vec2 grad;                    // Du at the node
};

NodeLinearization node_linearization(const DiscreteProblem& dp, const GridFunction& u, long slot);

// Node-wise F(M[u]) - t B(x,u,Du) - (1-t) F(M[usub]); u - phi on trace slots.
// Throws NotAdmissibleError when any interior node leaves the cone.
GridFunction residual(const DiscreteProblem& dp, const GridFunction& u, double t);

// Gateaux derivative of the residual: F^{ij} D_ij - (F^{ij} A_ij^k + t D_{p_k}B) D_k
// - (F^{ij} D_z A_ij + t D_z B); identity rows at trace slots.
Eigen::SparseMatrix<double> assemble_linearized(const DiscreteProblem& dp, const GridFunction& u,
                                                double t);

std::pair<GridFunction, NewtonTrace> newton_solve(const DiscreteProblem& dp, const GridFunction& u0,
                                                  double t, const SolverConfig& cfg);

std::pair<GridFunction, SolveReport> continuation_solve(const DiscreteProblem& dp,
                                                        const SolverConfig& cfg);

}  // namespace hessfield
