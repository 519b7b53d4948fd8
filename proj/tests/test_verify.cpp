#include <cmath>

#include "doctest.h"
#include "hessfield/verify.hpp"

using namespace hessfield;

namespace {

ProblemSpec ma_disc(double h, double B = 2.0) {
    ProblemSpec ps;
    ps.op = OperatorSpec::monge_ampere_root(2);
    ps.aug = make_A("zero", {}, 2);
    attach_B(ps.aug, "const", {B});
    ps.domain = DomainSpec::disc({0, 0}, 1.0, h);
    ps.phi = ScalarField::make("radial_quad", {1.0, 0.0});
    ps.usub = ScalarField::make("radial_quad", {1.1, -0.1});
    ps.exact = ScalarField::make("radial_quad", {1.0, 0.0});
    return ps;
}

ProblemSpec poisson_disc(double h, double subsolution_scale = 0.5) {
    ProblemSpec ps;
    ps.op = OperatorSpec::k_hessian(1, 2);
    ps.aug = make_A("zero", {}, 2);
    attach_B(ps.aug, "const", {1.0});
    ps.domain = DomainSpec::disc({0, 0}, 1.0, h);
    ps.phi = ScalarField::make("const", {0.0});
    ps.usub = ScalarField::make("radial_quad", {subsolution_scale, -subsolution_scale});
    ps.exact = ScalarField::make("radial_quad", {0.25, -0.25});
    return ps;
}

}  // namespace

TEST_CASE("verify_lemma21: passes on Poisson and Monge-Ampere, fails degenerate") {
    SolverConfig cfg;
    {
        DiscreteProblem dp(poisson_disc(1.0 / 16.0));
        auto [u, rep] = continuation_solve(dp, cfg);
        const auto cert = verify_lemma21(dp, u);
        CHECK(cert.pass);
        CHECK(cert.epsilon > 0.0);
        CHECK(cert.K <= std::ldexp(1.0, 20));
        CHECK(cert.kind == "lemma21");
    }
    {
        DiscreteProblem dp(ma_disc(1.0 / 16.0));
        auto [u, rep] = continuation_solve(dp, cfg);
        const auto cert = verify_lemma21(dp, u);
        CHECK(cert.pass);
        CHECK(cert.epsilon > 0.0);
    }
    {
        // usub == u: the barrier is constant and L[1] = 0 for z-independent data
        ProblemSpec ps = ma_disc(1.0 / 16.0);
        ps.usub = *ps.exact;
        DiscreteProblem dp(ps);
        const GridFunction u = dp.subsolution();
        const auto cert = verify_lemma21(dp, u);
        CHECK_FALSE(cert.pass);
        CHECK(cert.epsilon <= 0.0);
    }
}

TEST_CASE("verify_lemma21: certified constant is monotone in subsolution strictness") {
    SolverConfig cfg;
    double prev_eps = -1.0;
    for (double c : {0.6, 0.8, 1.0}) {
        DiscreteProblem dp(poisson_disc(1.0 / 16.0, c));
        auto [u, rep] = continuation_solve(dp, cfg);
        const auto cert = verify_lemma21(dp, u);
        CHECK(cert.pass);
        CHECK(cert.epsilon >= prev_eps - 1e-12);
        prev_eps = cert.epsilon;
    }
}

TEST_CASE("verify_lemma22: strengthened barrier on the disc") {
    SolverConfig cfg;
    {
        DiscreteProblem dp(ma_disc(1.0 / 16.0));
        auto [u, rep] = continuation_solve(dp, cfg);
        const auto cert = verify_lemma22(dp, u);
        CHECK(cert.pass);
        CHECK(cert.epsilon > 0.0);
        CHECK(cert.kind == "lemma22");
    }
    {
        // trace operator case: T* = sum (1 + |lambda_i|)
        DiscreteProblem dp(poisson_disc(1.0 / 16.0));
        auto [u, rep] = continuation_solve(dp, cfg);
        const auto cert = verify_lemma22(dp, u);
        CHECK(cert.pass);
    }
    {
        // degenerate subsolution cannot dominate eps2 (1 + T*)
        ProblemSpec ps = ma_disc(1.0 / 16.0);
        ps.usub = *ps.exact;
        DiscreteProblem dp(ps);
        const auto cert = verify_lemma22(dp, dp.subsolution());
        CHECK_FALSE(cert.pass);
    }
    {
        // rectangles have no smooth unit normal extension
        ProblemSpec ps;
        ps.op = OperatorSpec::k_hessian(1, 2);
        ps.aug = make_A("zero", {}, 2);
        attach_B(ps.aug, "const", {1.0});
        ps.domain = DomainSpec::rectangle(0, 1, 0, 1, 1.0 / 8.0);
        ps.phi = ScalarField::make("quadratic", {1.0, 0.0, 1.0, -1.0, -1.0, 0.0});
        ps.usub = ps.phi;
        DiscreteProblem dp(ps);
        CHECK_THROWS_AS(verify_lemma22(dp, dp.subsolution()), Error);
    }
}

TEST_CASE("verify_phi: zero trace, nonpositive interior, and injected violation") {
    SolverConfig cfg;
    DiscreteProblem dp(ma_disc(1.0 / 16.0));
    auto [u, rep] = continuation_solve(dp, cfg);
    const auto cert = verify_lemma22(dp, u);
    REQUIRE(cert.pass);

    const auto phi_rep = verify_phi(dp, u, cert.K, cert.epsilon);
    CHECK(phi_rep.pass);
    CHECK(phi_rep.max_boundary_abs <= 1e-10);
    CHECK(phi_rep.max_interior <= phi_rep.tol_interior);
    CHECK(phi_rep.mixed_derivative_sup < 10.0);

    // usub == u degenerate: Phi identically zero
    {
        ProblemSpec ps = ma_disc(1.0 / 16.0);
        ps.usub = *ps.exact;
        DiscreteProblem dpd(ps);
        const auto pr = verify_phi(dpd, dpd.subsolution(), 4.0, 0.015625);
        CHECK(pr.pass);
        CHECK(pr.max_interior <= 1e-12);
    }

    // flipping the sign of K turns the exponential the wrong way
    const auto bad = verify_phi(dp, u, -cert.K, cert.epsilon);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_node >= 0);

    CHECK_THROWS_AS(verify_phi(dp, u, 0.0, cert.epsilon), Error);
}

TEST_CASE("boundary_identity_check: vanishing and perturbed cases") {
    SolverConfig cfg;
    {
        // u = phi = |x|^2: both sides vanish identically
        DiscreteProblem dp(ma_disc(1.0 / 16.0));
        const GridFunction u = dp.sample(*dp.spec().exact);
        const auto rep = boundary_identity_check(dp, u);
        CHECK(rep.max_discrepancy <= 1e-9);
    }
    {
        // B = 2.5 makes D_gamma(u - phi) = 0.5 while the solution stays quadratic,
        // so the identity holds to solver precision
        ProblemSpec ps = ma_disc(1.0 / 16.0, 2.5);
        ps.usub = ScalarField::make("radial_quad", {1.3, -0.3});
        DiscreteProblem dp(ps);
        auto [u, rep_solve] = continuation_solve(dp, cfg);
        GridFunction w(dp.grid());
        for (long s = 0; s < dp.grid()->slot_count(); ++s)
            w[s] = u[s] - dp.spec().phi(dp.grid()->position(s));
        bool nonzero_normal = false;
        for (long b = dp.grid()->interior_count(); b < dp.grid()->slot_count(); ++b)
            if (std::abs(boundary_normal_derivative(w, b)) > 0.4) nonzero_normal = true;
        CHECK(nonzero_normal);
        const auto rep = boundary_identity_check(dp, u);
        CHECK(rep.max_discrepancy <= 1e-6);
    }
    {
        ProblemSpec ps;
        ps.op = OperatorSpec::k_hessian(1, 2);
        ps.aug = make_A("zero", {}, 2);
        attach_B(ps.aug, "const", {1.0});
        ps.domain = DomainSpec::rectangle(0, 1, 0, 1, 1.0 / 8.0);
        ps.phi = ScalarField::make("quadratic", {1.0, 0.0, 1.0, -1.0, -1.0, 0.0});
        ps.usub = ps.phi;
        DiscreteProblem dp(ps);
        CHECK_THROWS_AS(boundary_identity_check(dp, dp.subsolution()), Error);
    }
}

TEST_CASE("boundary_identity_check: discrepancy falls at order >= 0.8 on a curved solution") {
    // exp-radial data keeps the solution genuinely non-quadratic
    SolverConfig cfg;
    std::vector<double> discs;
    for (double h : {1.0 / 32.0, 1.0 / 64.0}) {
        ProblemSpec ps;
        ps.op = OperatorSpec::monge_ampere_root(2);
        ps.aug = make_A("zero", {}, 2);
        attach_B(ps.aug, "exp_radial", {1.0});
        ps.domain = DomainSpec::disc({0, 0}, 1.0, h);
        ps.phi = ScalarField::make("const", {std::exp(0.5)});
        ps.usub = ScalarField::make("radial_quad", {1.3, std::exp(0.5) - 1.3});
        ps.exact = ScalarField::make("exp_half_sq", {1.0});
        DiscreteProblem dp(ps);
        auto [u, rep_solve] = continuation_solve(dp, cfg);
        discs.push_back(boundary_identity_check(dp, u).max_discrepancy);
    }
    for (size_t i = 0; i + 1 < discs.size(); ++i) {
        const double order = std::log2(discs[i] / discs[i + 1]);
        CHECK(order >= 0.8);
    }
}

TEST_CASE("g_function_scan: affine growth for S_1 and closed form for Monge-Ampere") {
    SolverConfig cfg;
    {
        DiscreteProblem dp(poisson_disc(1.0 / 16.0));
        auto [u, rep_solve] = continuation_solve(dp, cfg);
        const auto rep = g_function_scan(dp, u);
        CHECK(rep.monotone_in_R);
        CHECK(rep.pass);
        // f_R = omega + R: min g grows by the ladder increments
        for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
            CHECK(rep.rows[i + 1].min_g - rep.rows[i].min_g ==
                  doctest::Approx(rep.rows[i + 1].R - rep.rows[i].R).epsilon(1e-6));
    }
    {
        DiscreteProblem dp(ma_disc(1.0 / 16.0));
        const GridFunction u = dp.sample(*dp.spec().exact);
        const std::vector<double> ladder{4.0, 10.0, 100.0, 1000.0, 10000.0};
        const auto rep = g_function_scan(dp, u, ladder);
        CHECK(rep.monotone_in_R);
        CHECK(rep.pass);
        for (const auto& row : rep.rows) {
            // omega_tt = 2 exactly, so g = sqrt(2R) - 2 at every boundary node
            CHECK(row.min_g == doctest::Approx(std::sqrt(2.0 * row.R) - 2.0).epsilon(1e-8));
            if (row.R >= 4.0) CHECK(row.min_g > 0.0);
        }
    }
}

TEST_CASE("estimate_monitor: linear and quadratic profiles") {
    DiscreteProblem dp(ma_disc(1.0 / 16.0));
    {
        const GridFunction lin = GridFunction::sample(dp.grid(), [](Vec2 p) { return 0.3 * p.x + 0.4 * p.y; });
        const auto rep = estimate_monitor(dp, lin);
        CHECK(rep.sup_du == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.vmax_on_boundary);
        CHECK(rep.sup_d2u <= 1e-9);
    }
    {
        SolverConfig cfg;
        auto [u, rep_solve] = continuation_solve(dp, cfg);
        const auto rep = estimate_monitor(dp, u);
        CHECK(rep.sup_du_boundary == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.sup_d2u == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.vmax_on_boundary);
        CHECK(rep.ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("estimate_monitor: sup |D^2 u| stable under refinement on the disc problem") {
    SolverConfig cfg;
    std::vector<double> sups;
    for (double h : {1.0 / 16.0, 1.0 / 32.0}) {
        DiscreteProblem dp(ma_disc(h));
        auto [u, rep_solve] = continuation_solve(dp, cfg);
        sups.push_back(estimate_monitor(dp, u).sup_d2u);
    }
    CHECK(std::abs(sups[1] - sups[0]) <= 0.05 * sups[0]);
}
