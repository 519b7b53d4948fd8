#include "hessfield/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace hessfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_norm_interior(const Grid& grid, const std::vector<double>& v) {
    double m = 0.0;
    for (long s = 0; s < grid.interior_count(); ++s)
        m = std::max(m, std::abs(v[static_cast<size_t>(s)]));
    return m;
}

struct ResidualEval {
    std::vector<double> values;
    double max_norm = 0.0;
    double min_rel_margin = kInf;
};

// residual + the worst relative cone margin in one sweep
ResidualEval eval_residual(const DiscreteProblem& dp, const GridFunction& u, double t) {
    const Grid& grid = *dp.grid();
    const auto& aug = dp.spec().aug;
    ResidualEval out;
    out.values.assign(static_cast<size_t>(grid.slot_count()), 0.0);

    for (long s = 0; s < grid.interior_count(); ++s) {
        const Vec2 pos = grid.position(s);
        const Vec2 g = fd_gradient(u, s);
        const SymMat H = fd_hessian(u, s);
        const Pt x{pos.x, pos.y, 0.0};
        const Pt p{g.x, g.y, 0.0};
        const double z = u[s];
        const SymMat M = augmented_hessian(aug, x, z, p, H);
        const Spectrum sp = eigen(M);
        const std::span<const double> lam(sp.lambda.data(), 2);
        const double margin = cone_margin(lam, dp.spec().op.cone);
        if (!(margin > 0.0)) throw NotAdmissibleError(margin, s);
        out.min_rel_margin = std::min(out.min_rel_margin, margin / (1.0 + M.frobenius_norm()));
        const double F = eigenvalue_value(dp.spec().op, lam);
        const double r =
            F - t * aug.B(x, z, p) - (1.0 - t) * dp.f_sub()[static_cast<size_t>(s)];
        out.values[static_cast<size_t>(s)] = r;
        out.max_norm = std::max(out.max_norm, std::abs(r));
    }
    for (long b = grid.interior_count(); b < grid.slot_count(); ++b) {
        const double r = u[b] - dp.spec().phi(grid.position(b));
        out.values[static_cast<size_t>(b)] = r;
        out.max_norm = std::max(out.max_norm, std::abs(r));
    }
    return out;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& rhs,
                             SolverConfig::Linear kind) {
    if (kind == SolverConfig::Linear::DirectBand) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(L);
        lu.factorize(L);
        if (lu.info() != Eigen::Success)
            throw Error(ErrorCode::LinearSolveFailure, "sparse LU factorization failed");
        Eigen::VectorXd x = lu.solve(rhs);
        if (lu.info() != Eigen::Success)
            throw Error(ErrorCode::LinearSolveFailure, "sparse LU solve failed");
        return x;
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> bicg;
    bicg.setTolerance(1e-13);
    bicg.setMaxIterations(20000);
    bicg.compute(L);
    Eigen::VectorXd x = bicg.solve(rhs);
    if (bicg.info() != Eigen::Success)
        throw Error(ErrorCode::LinearSolveFailure, "BiCGStab did not converge");
    return x;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0) || max_newton <= 0 || continuation_steps <= 0 ||
        !(damping_min > 0.0) || damping_min > 1.0 || !(adm_margin > 0.0))
        throw Error(ErrorCode::ConfigError, "invalid solver configuration");
}

nlohmann::json SolveReport::to_json() const {
    nlohmann::json steps_j = nlohmann::json::array();
    for (const auto& st : steps) {
        steps_j.push_back({{"t", st.t},
                           {"newton_iterations", st.newton_iterations},
                           {"residual_history", st.residual_history},
                           {"min_rel_margin", st.min_rel_margin},
                           {"min_damping", st.min_damping}});
    }
    nlohmann::json j{{"steps", steps_j},
                     {"final_residual", final_residual},
                     {"sup_du", sup_du},
                     {"sup_du_boundary", sup_du_boundary},
                     {"du_ratio", du_ratio},
                     {"sup_d2u", sup_d2u},
                     {"comparison_checked", comparison_checked},
                     {"comparison_ok", comparison_ok},
                     {"min_u_minus_usub", min_u_minus_usub}};
    if (comparison_checked) j["max_u_minus_usuper"] = max_u_minus_usuper;
    return j;
}

DiscreteProblem::DiscreteProblem(ProblemSpec spec)
    : spec_(std::move(spec)), grid_(std::make_shared<Grid>(spec_.domain)) {
    spec_.validate(*grid_);
    usub_ = sample(spec_.usub);
    // freeze F(M[usub]) node-wise; the subsolution must be admissible
    f_sub_.assign(static_cast<size_t>(grid_->interior_count()), 0.0);
    for (long s = 0; s < grid_->interior_count(); ++s) {
        const Vec2 pos = grid_->position(s);
        const Vec2 g = fd_gradient(usub_, s);
        const SymMat H = fd_hessian(usub_, s);
        const SymMat M = augmented_hessian(spec_.aug, {pos.x, pos.y, 0.0}, usub_[s],
                                           {g.x, g.y, 0.0}, H);
        const Spectrum sp = eigen(M);
        const std::span<const double> lam(sp.lambda.data(), 2);
        const double margin = cone_margin(lam, spec_.op.cone);
        if (!(margin > 0.0)) throw NotAdmissibleError(margin, s);
        f_sub_[static_cast<size_t>(s)] = eigenvalue_value(spec_.op, lam);
    }
}

GridFunction DiscreteProblem::sample(const ScalarField& f) const {
    GridFunction out(grid_);
    for (long s = 0; s < grid_->interior_count(); ++s) out[s] = f(grid_->position(s));
    // boundary trace carries the Dirichlet data
    for (long b = grid_->interior_count(); b < grid_->slot_count(); ++b)
        out[b] = spec_.phi(grid_->position(b));
    return out;
}

NodeLinearization node_linearization(const DiscreteProblem& dp, const GridFunction& u, long slot) {
    const Grid& grid = *dp.grid();
    const Vec2 pos = grid.position(slot);
    const Vec2 g = fd_gradient(u, slot);
    const SymMat H = fd_hessian(u, slot);
    NodeLinearization nl;
    nl.grad = g;
    nl.M = augmented_hessian(dp.spec().aug, {pos.x, pos.y, 0.0}, u[slot], {g.x, g.y, 0.0}, H);
    const Spectrum sp = eigen(nl.M);
    const std::span<const double> lam(sp.lambda.data(), 2);
    nl.margin = cone_margin(lam, dp.spec().op.cone);
    if (!(nl.margin > 0.0)) throw NotAdmissibleError(nl.margin, slot);
    nl.lambda = sp.lambda;
    nl.F = eigenvalue_value(dp.spec().op, lam);
    nl.f = eigenvalue_grad(dp.spec().op, lam);
    if (sp.lambda[1] - sp.lambda[0] < 1e-9) {
        const double avg = 0.5 * (nl.f[0] + nl.f[1]);
        nl.f[0] = nl.f[1] = avg;
    }
    nl.Fij = sp.reassemble(std::span<const double>(nl.f.data(), 2));
    nl.T = nl.f[0] + nl.f[1];
    return nl;
}

GridFunction residual(const DiscreteProblem& dp, const GridFunction& u, double t) {
    if (t < 0.0 || t > 1.0) throw Error(ErrorCode::ConfigError, "t must lie in [0,1]");
    GridFunction r(dp.grid());
    r.values = eval_residual(dp, u, t).values;
    return r;
}

Eigen::SparseMatrix<double> assemble_linearized(const DiscreteProblem& dp, const GridFunction& u,
                                                double t) {
    const Grid& grid = *dp.grid();
    const auto& aug = dp.spec().aug;
    const long nslots = grid.slot_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(nslots) * 12);

    for (long s = 0; s < grid.interior_count(); ++s) {
        const NodeLinearization nl = node_linearization(dp, u, s);
        const Vec2 pos = grid.position(s);
        const Pt x{pos.x, pos.y, 0.0};
        const Pt p{nl.grad.x, nl.grad.y, 0.0};
        const double z = u[s];

        const auto add_row = [&](const StencilRow& row, double coef) {
            if (coef == 0.0) return;
            for (const auto& [slot, w] : row)
                trips.emplace_back(static_cast<int>(s), static_cast<int>(slot), coef * w);
        };

        // second-order part F^{ij} D_ij
        add_row(grid.dxx_row(s), nl.Fij(0, 0));
        add_row(grid.dyy_row(s), nl.Fij(1, 1));
        add_row(grid.dxy_row(s), 2.0 * nl.Fij(0, 1));

        // first-order drift -(F^{ij} A_ij^k + t D_{p_k} B) D_k
        const Pt dpb = aug.dpB(x, z, p);
        for (int k = 0; k < 2; ++k) {
            const double coef = -(nl.Fij.inner(aug.dpA(x, z, p, k)) + t * dpb[static_cast<size_t>(k)]);
            add_row(k == 0 ? grid.dx_row(s) : grid.dy_row(s), coef);
        }

        // zero-order term, present only with z-dependent data
        if (dp.spec().z_dependence) {
            const double coef = -(nl.Fij.inner(aug.dzA(x, z, p)) + t * aug.dzB(x, z, p));
            if (coef != 0.0) trips.emplace_back(static_cast<int>(s), static_cast<int>(s), coef);
        }
    }
    for (long b = grid.interior_count(); b < nslots; ++b)
        trips.emplace_back(static_cast<int>(b), static_cast<int>(b), 1.0);

    Eigen::SparseMatrix<double> L(static_cast<int>(nslots), static_cast<int>(nslots));
    L.setFromTriplets(trips.begin(), trips.end());
    return L;
}

std::pair<GridFunction, NewtonTrace> newton_solve(const DiscreteProblem& dp, const GridFunction& u0,
                                                  double t, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& grid = *dp.grid();
    GridFunction u = u0;

    ResidualEval cur = eval_residual(dp, u, t);  // throws NotAdmissible if u0 leaves the cone
    if (cur.min_rel_margin < cfg.adm_margin)
        throw NotAdmissibleError(cur.min_rel_margin, -1);

    NewtonTrace trace;
    trace.residuals.push_back(cur.max_norm);
    trace.min_rel_margin = cur.min_rel_margin;

    while (cur.max_norm > cfg.newton_tol) {
        if (trace.iterations >= cfg.max_newton)
            throw Error(ErrorCode::MaxIterations, "Newton did not reach tolerance");

        const Eigen::SparseMatrix<double> L = assemble_linearized(dp, u, t);
        Eigen::VectorXd rhs(grid.slot_count());
        for (long i = 0; i < grid.slot_count(); ++i) rhs(i) = -cur.values[static_cast<size_t>(i)];
        const Eigen::VectorXd delta = solve_linear(L, rhs, cfg.linear_solver);

        // largest step that stays admissible with margin and decreases the residual
        double s = 1.0;
        bool accepted = false;
        while (s >= cfg.damping_min) {
            GridFunction trial = u;
            for (long i = 0; i < grid.slot_count(); ++i) trial[i] += s * delta(i);
            try {
                ResidualEval next = eval_residual(dp, trial, t);
                if (next.min_rel_margin >= cfg.adm_margin && next.max_norm < cur.max_norm) {
                    u = std::move(trial);
                    cur = std::move(next);
                    accepted = true;
                    break;
                }
            } catch (const NotAdmissibleError&) {
                // shrink the step
            }
            s *= 0.5;
        }
        if (!accepted) throw Error(ErrorCode::LineSearchStalled, "no admissible decreasing step");

        ++trace.iterations;
        trace.residuals.push_back(cur.max_norm);
        trace.dampings.push_back(s);
        trace.min_rel_margin = std::min(trace.min_rel_margin, cur.min_rel_margin);
    }
    trace.converged = true;
    return {u, trace};
}

std::pair<GridFunction, SolveReport> continuation_solve(const DiscreteProblem& dp,
                                                        const SolverConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const Grid& grid = *dp.grid();

    // A strict subsolution is the robust input; the non-strict boundary case
    // (B == F(M[usub]) node-wise) makes usub a fixed point of the whole family
    // and is accepted as well.
    const auto cls = classify(dp.spec().aug, dp.spec().op, dp.subsolution());
    if (!(cls.admissible && cls.subsolution))
        throw Error(ErrorCode::NotAdmissible,
                    "continuation requires an admissible subsolution (classify residual " +
                        std::to_string(cls.min_residual) + ")");

    SolveReport report;
    GridFunction u = dp.subsolution();

    double t = 0.0;
    double dt = 1.0 / cfg.continuation_steps;
    {
        // the family's base point: usub solves the t = 0 problem by construction
        auto [u0, trace0] = newton_solve(dp, u, 0.0, cfg);
        u = std::move(u0);
        report.steps.push_back({0.0, trace0.iterations, trace0.residuals, trace0.min_rel_margin,
                                trace0.dampings.empty()
                                    ? 1.0
                                    : *std::min_element(trace0.dampings.begin(), trace0.dampings.end())});
    }
    while (t < 1.0) {
        const double t_next = std::min(t + dt, 1.0);
        try {
            auto [u_next, trace] = newton_solve(dp, u, t_next, cfg);
            u = std::move(u_next);
            t = t_next;
            report.steps.push_back({t, trace.iterations, trace.residuals, trace.min_rel_margin,
                                    trace.dampings.empty()
                                        ? 1.0
                                        : *std::min_element(trace.dampings.begin(),
                                                            trace.dampings.end())});
        } catch (const Error& e) {
            dt *= 0.5;
            if (dt < 1e-4)
                throw Error(ErrorCode::ContinuationStalled,
                            "stalled at t = " + std::to_string(t) + " (" + e.what() + ")");
        }
    }

    report.final_residual = eval_residual(dp, u, 1.0).max_norm;

    // derivative monitors
    for (long s = 0; s < grid.interior_count(); ++s) {
        report.sup_du = std::max(report.sup_du, fd_gradient(u, s).norm());
        const Spectrum sp = eigen(fd_hessian(u, s));
        report.sup_d2u =
            std::max(report.sup_d2u, std::max(std::abs(sp.lambda[0]), std::abs(sp.lambda[1])));
    }
    for (long b = grid.interior_count(); b < grid.slot_count(); ++b) {
        if (grid.trace(b).corner) continue;
        report.sup_du_boundary = std::max(report.sup_du_boundary, trace_gradient(u, b).norm());
    }
    report.du_ratio =
        report.sup_du_boundary > 0.0 ? report.sup_du / report.sup_du_boundary : 0.0;

    // solution bounds against the sub/supersolution
    const double slack = 10.0 * grid.h() * grid.h();
    double min_gap = kInf;
    for (long s = 0; s < grid.interior_count(); ++s)
        min_gap = std::min(min_gap, u[s] - dp.subsolution()[s]);
    report.min_u_minus_usub = min_gap;
    report.comparison_ok = min_gap >= -slack;
    if (dp.spec().usuper) {
        report.comparison_checked = true;
        const GridFunction usuper = dp.sample(*dp.spec().usuper);
        double max_over = -kInf;
        for (long s = 0; s < grid.interior_count(); ++s)
            max_over = std::max(max_over, u[s] - usuper[s]);
        report.max_u_minus_usuper = max_over;
        report.comparison_ok = report.comparison_ok && max_over <= slack;
    }

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {u, report};
}

}  // namespace hessfield
