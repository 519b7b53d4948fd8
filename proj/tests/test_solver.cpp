#include <Eigen/SparseLU>
#include <cmath>

#include "doctest.h"
#include "hessfield/rng.hpp"
#include "hessfield/solver.hpp"

using namespace hessfield;

namespace {

ProblemSpec ma_disc_problem(double h, double B = 2.0) {
    ProblemSpec ps;
    ps.op = OperatorSpec::monge_ampere_root(2);
    ps.aug = make_A("zero", {}, 2);
    attach_B(ps.aug, "const", {B});
    ps.domain = DomainSpec::disc({0, 0}, 1.0, h);
    ps.phi = ScalarField::make("radial_quad", {1.0, 0.0});
    ps.usub = ScalarField::make("radial_quad", {1.1, -0.1});
    ps.usuper = ScalarField::make("radial_quad", {1.0, 0.1});
    ps.exact = ScalarField::make("radial_quad", {1.0, 0.0});
    return ps;
}

ProblemSpec poisson_disc_problem(double h) {
    ProblemSpec ps;
    ps.op = OperatorSpec::k_hessian(1, 2);
    ps.aug = make_A("zero", {}, 2);
    attach_B(ps.aug, "const", {1.0});
    ps.domain = DomainSpec::disc({0, 0}, 1.0, h);
    ps.phi = ScalarField::make("const", {0.0});
    ps.usub = ScalarField::make("radial_quad", {0.5, -0.5});
    ps.exact = ScalarField::make("radial_quad", {0.25, -0.25});
    return ps;
}

double max_err_vs(const DiscreteProblem& dp, const GridFunction& u, const ScalarField& exact) {
    double err = 0.0;
    for (long s = 0; s < dp.grid()->interior_count(); ++s)
        err = std::max(err, std::abs(u[s] - exact(dp.grid()->position(s))));
    return err;
}

}  // namespace

TEST_CASE("residual: family base point and exact solutions") {
    DiscreteProblem dp(ma_disc_problem(1.0 / 16.0));
    // t = 0 at the subsolution: identically zero
    const GridFunction r0 = residual(dp, dp.subsolution(), 0.0);
    for (long s = 0; s < dp.grid()->slot_count(); ++s) CHECK(r0[s] == 0.0);

    // t = 1 with the exact solution u = |x|^2: F(M) = 2 = B
    const GridFunction u = dp.sample(*dp.spec().exact);
    const GridFunction r1 = residual(dp, u, 1.0);
    for (long s = 0; s < dp.grid()->interior_count(); ++s) CHECK(std::abs(r1[s]) <= 1e-12);

    // raising B by one shifts the interior residual by -1
    DiscreteProblem dp3(ma_disc_problem(1.0 / 16.0, 3.0));
    const GridFunction r3 = residual(dp3, dp3.sample(*dp3.spec().exact), 1.0);
    for (long s = 0; s < dp3.grid()->interior_count(); ++s)
        CHECK(r3[s] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("residual: inadmissible states are rejected with the offending node") {
    DiscreteProblem dp(ma_disc_problem(1.0 / 16.0));
    const GridFunction bad =
        dp.sample(ScalarField::make("radial_quad", {-0.5, 0.5}));  // concave, outside Gamma_2
    CHECK_THROWS_AS(residual(dp, bad, 1.0), NotAdmissibleError);
}

TEST_CASE("assemble_linearized: S_1 gives the discrete Laplacian") {
    DiscreteProblem dp(poisson_disc_problem(1.0 / 16.0));
    const GridFunction u = dp.subsolution();
    const auto L = assemble_linearized(dp, u, 1.0);

    const GridFunction q = GridFunction::sample(
        dp.grid(), [](Vec2 p) { return p.x * p.x + 0.5 * p.x * p.y + p.y * p.y; });
    Eigen::VectorXd v(dp.grid()->slot_count());
    for (long s = 0; s < dp.grid()->slot_count(); ++s) v(s) = q[s];
    const Eigen::VectorXd Lv = L * v;
    for (long s = 0; s < dp.grid()->interior_count(); ++s)
        CHECK(Lv(s) == doctest::Approx(4.0).epsilon(1e-9));  // Laplacian of x^2+xy/2...+y^2

    // constants are annihilated at interior rows for z-independent data
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(dp.grid()->slot_count());
    const Eigen::VectorXd Lones = L * ones;
    for (long s = 0; s < dp.grid()->interior_count(); ++s) CHECK(std::abs(Lones(s)) <= 1e-10);
}

TEST_CASE("assemble_linearized: matches Gateaux differences of the residual") {
    // drift terms included: A = quad_iso, B = quad_p, still z-independent
    ProblemSpec ps = ma_disc_problem(1.0 / 12.0);
    ps.aug = make_A("quad_iso", {0.02}, 2);
    attach_B(ps.aug, "quad_p", {0.1});
    ps.usub = ScalarField::make("radial_quad", {1.3, -0.3});
    DiscreteProblem dp(ps);

    RngStream rng(71);
    int states = 0;
    while (states < 20) {
        // random admissible state: paraboloid matching the boundary trace plus
        // a boundary-vanishing wobble
        const double a = rng.uniform(1.0, 1.4);
        const double wob = rng.uniform(-0.02, 0.02);
        const double kx = rng.uniform(1.0, 2.5), ky = rng.uniform(1.0, 2.5);
        GridFunction u = dp.sample(ScalarField::make("radial_quad", {a, 1.0 - a}));
        for (long s = 0; s < dp.grid()->interior_count(); ++s) {
            const Vec2 p = dp.grid()->position(s);
            const double cutoff = 1.0 - p.x * p.x - p.y * p.y;
            u[s] += wob * cutoff * std::sin(kx * p.x) * std::sin(ky * p.y);
        }
        GridFunction r0;
        try {
            r0 = residual(dp, u, 1.0);
        } catch (const NotAdmissibleError&) {
            continue;
        }
        ++states;

        GridFunction v = dp.sample(ScalarField::make("trig_prod", {1.0, 2.0, 1.5}));
        for (long b = dp.grid()->interior_count(); b < dp.grid()->slot_count(); ++b) v[b] = 0.0;
        const auto L = assemble_linearized(dp, u, 1.0);
        Eigen::VectorXd vv(dp.grid()->slot_count());
        for (long s = 0; s < dp.grid()->slot_count(); ++s) vv(s) = v[s];
        const Eigen::VectorXd Lv = L * vv;

        std::vector<double> errs;
        for (double eps : {1e-4, 1e-5, 1e-6}) {
            GridFunction up = u;
            for (long s = 0; s < dp.grid()->slot_count(); ++s) up[s] += eps * v[s];
            const GridFunction rp = residual(dp, up, 1.0);
            double err = 0.0;
            for (long s = 0; s < dp.grid()->interior_count(); ++s)
                err = std::max(err, std::abs((rp[s] - r0[s]) / eps - Lv(s)));
            errs.push_back(err);
        }
        // extrapolated convergence slope of the linearization error ~ 1
        const double slope01 = std::log10(errs[0] / errs[1]);
        CHECK(slope01 >= 0.8);
        CHECK(slope01 <= 1.2);
    }
}

TEST_CASE("newton_solve: linear problem converges in one step to the direct solution") {
    DiscreteProblem dp(poisson_disc_problem(1.0 / 32.0));
    SolverConfig cfg;
    const GridFunction u0 = dp.subsolution();
    auto [u, trace] = newton_solve(dp, u0, 1.0, cfg);
    CHECK(trace.iterations == 1);
    CHECK(trace.residuals.back() <= 1e-12);

    // direct linear solve of the same discrete Poisson system
    const auto L = assemble_linearized(dp, u0, 1.0);
    Eigen::VectorXd rhs(dp.grid()->slot_count());
    const GridFunction r0 = residual(dp, u0, 1.0);
    for (long s = 0; s < dp.grid()->slot_count(); ++s) rhs(s) = -r0[s];
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(L);
    const Eigen::VectorXd delta = lu.solve(rhs);
    for (long s = 0; s < dp.grid()->interior_count(); ++s)
        CHECK(std::abs(u[s] - (u0[s] + delta(s))) <= 1e-12);
}

TEST_CASE("newton_solve: manufactured Monge-Ampere on the unit square") {
    ProblemSpec ps;
    ps.op = OperatorSpec::monge_ampere_root(2);
    ps.aug = make_A("zero", {}, 2);
    attach_B(ps.aug, "const", {1.0});
    ps.domain = DomainSpec::rectangle(0, 1, 0, 1, 1.0 / 32.0);
    ps.phi = ScalarField::make("radial_quad", {0.5, 0.0});
    ps.usub = ScalarField::make("radial_quad", {0.5, 0.0});  // placeholder trace match
    DiscreteProblem dp(ps);

    // start from a 0.9-scaled paraboloid plus an interior bump that keeps admissibility
    GridFunction u0 = dp.sample(ScalarField::make("radial_quad", {0.45, 0.0}));
    for (long s = 0; s < dp.grid()->interior_count(); ++s) {
        const Vec2 p = dp.grid()->position(s);
        u0[s] += 0.1 * p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
    }
    SolverConfig cfg;
    auto [u, trace] = newton_solve(dp, u0, 1.0, cfg);
    CHECK(trace.converged);
    CHECK(max_err_vs(dp, u, ScalarField::make("radial_quad", {0.5, 0.0})) <= 5e-3);
}

TEST_CASE("newton_solve: inadmissible start fails before iterating") {
    DiscreteProblem dp(ma_disc_problem(1.0 / 16.0));
    const GridFunction bad = dp.sample(ScalarField::make("radial_quad", {-1.0, 1.0}));
    SolverConfig cfg;
    CHECK_THROWS_AS(newton_solve(dp, bad, 1.0, cfg), NotAdmissibleError);
}

TEST_CASE("continuation_solve: fixed point of the family returns the subsolution") {
    // B := F(M[usub]) = 2.2, so usub solves every member of the family
    ProblemSpec ps = ma_disc_problem(1.0 / 16.0, 2.2);
    ps.usuper.reset();
    ps.exact.reset();
    DiscreteProblem dp(ps);
    SolverConfig cfg;
    auto [u, report] = continuation_solve(dp, cfg);
    for (const auto& st : report.steps) CHECK(st.newton_iterations == 0);
    for (long s = 0; s < dp.grid()->interior_count(); ++s)
        CHECK(std::abs(u[s] - dp.subsolution()[s]) <= 1e-12);
}

TEST_CASE("continuation_solve: manufactured disc problem with comparison bounds") {
    DiscreteProblem dp(ma_disc_problem(1.0 / 32.0));
    SolverConfig cfg;
    auto [u, report] = continuation_solve(dp, cfg);

    CHECK(report.final_residual <= cfg.newton_tol);
    CHECK(max_err_vs(dp, u, *dp.spec().exact) <= 5e-3);

    // admissibility along the whole path, asserted from the traces
    for (const auto& st : report.steps) CHECK(st.min_rel_margin >= cfg.adm_margin);
    // monotone residual decrease within each accepted Newton sequence
    for (const auto& st : report.steps)
        for (size_t i = 0; i + 1 < st.residual_history.size(); ++i)
            CHECK(st.residual_history[i + 1] < st.residual_history[i] + 1e-15);

    CHECK(report.comparison_checked);
    CHECK(report.comparison_ok);
    const double slack = 10.0 * dp.grid()->h() * dp.grid()->h();
    CHECK(report.min_u_minus_usub >= -slack);
    CHECK(report.max_u_minus_usuper <= slack);

    // sup |D^2 u| = 2 for the quadratic solution; sup |Du| attained on the boundary
    CHECK(report.sup_d2u == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(report.du_ratio <= 1.0 + 1e-6);
}

TEST_CASE("continuation_solve: gradient-dependent augmentation runs to t = 1") {
    ProblemSpec ps = ma_disc_problem(1.0 / 16.0);
    ps.aug = make_A("quad_iso", {0.05}, 2);
    attach_B(ps.aug, "const", {2.0});
    ps.usub = ScalarField::make("radial_quad", {1.2, -0.2});
    ps.usuper.reset();
    ps.exact.reset();
    DiscreteProblem dp(ps);
    SolverConfig cfg;
    auto [u, report] = continuation_solve(dp, cfg);
    CHECK(report.final_residual <= cfg.newton_tol);
    for (const auto& st : report.steps) CHECK(st.min_rel_margin > 0.0);
    // the solution dominates the subsolution node-wise
    CHECK(report.min_u_minus_usub >= -10.0 * dp.grid()->h() * dp.grid()->h());
}

TEST_CASE("continuation_solve: rejects a non-subsolution") {
    ProblemSpec ps = ma_disc_problem(1.0 / 16.0);
    ps.usub = ScalarField::make("radial_quad", {0.8, 0.2});  // F(M) = 1.6 < 2 = B
    ps.usuper.reset();
    ps.exact.reset();
    DiscreteProblem dp(ps);
    SolverConfig cfg;
    CHECK_THROWS_AS(continuation_solve(dp, cfg), Error);
}

TEST_CASE("newton_solve: iteration budget is enforced") {
    // curved right side: one Newton step cannot reach tolerance
    ProblemSpec ps = ma_disc_problem(1.0 / 16.0);
    attach_B(ps.aug, "exp_radial", {1.0});
    ps.phi = ScalarField::make("const", {std::exp(0.5)});
    ps.usub = ScalarField::make("radial_quad", {1.3, std::exp(0.5) - 1.3});
    ps.usuper.reset();
    ps.exact.reset();
    DiscreteProblem dp(ps);
    SolverConfig cfg;
    cfg.max_newton = 1;
    try {
        newton_solve(dp, dp.subsolution(), 1.0, cfg);
        FAIL("expected MaxIterations");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MaxIterations);
    }
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.newton_tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
