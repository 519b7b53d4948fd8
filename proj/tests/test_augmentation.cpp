#include <cmath>
#include <memory>

#include "doctest.h"
#include "hessfield/augmentation.hpp"

using namespace hessfield;

TEST_CASE("augmented_hessian: shift arithmetic") {
    auto zero = make_A("zero", {}, 2);
    const SymMat h5 = SymMat::diag2(5.0, 5.0);
    CHECK(augmented_hessian(zero, {0, 0, 0}, 0.0, {0, 0, 0}, h5)(0, 0) == doctest::Approx(5.0));

    auto shift = make_A("const_shift", {2.0}, 2);
    const SymMat m = augmented_hessian(shift, {0, 0, 0}, 0.0, {0, 0, 0}, h5);
    CHECK(m(0, 0) == doctest::Approx(3.0));
    CHECK(m(1, 1) == doctest::Approx(3.0));

    auto quad = make_A("quad_iso", {1.0}, 2);
    const SymMat q = augmented_hessian(quad, {0, 0, 0}, 0.0, {1, 1, 0}, h5);
    CHECK(q(0, 0) == doctest::Approx(3.0));
    CHECK(q(1, 1) == doctest::Approx(3.0));
    CHECK(q(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("augmented_hessian: M[u] + A reconstructs the Hessian") {
    auto aug = make_A("quad_iso", {0.3}, 2);
    RngStream rng(2);
    for (int t = 0; t < 100; ++t) {
        SymMat h(2);
        h.at(0, 0) = rng.uniform(-2, 2);
        h.at(0, 1) = rng.uniform(-2, 2);
        h.at(1, 1) = rng.uniform(-2, 2);
        const Pt p{rng.uniform(-3, 3), rng.uniform(-3, 3), 0};
        SymMat m = augmented_hessian(aug, {0, 0, 0}, 0.0, p, h);
        m += aug.A({0, 0, 0}, 0.0, p);
        for (int i = 0; i < h.storage_size(); ++i)
            CHECK(m.a[static_cast<size_t>(i)] == doctest::Approx(h.a[static_cast<size_t>(i)]));
    }
}

TEST_CASE("finite-difference fallbacks agree with analytic derivatives") {
    auto analytic = make_A("quad_iso", {0.7}, 2);
    attach_B(analytic, "quad_p", {0.4});
    // strip the analytic callbacks to force the fallback path
    AugmentedData fd = analytic;
    fd.A_p = nullptr;
    fd.A_pp = nullptr;
    fd.B_p = nullptr;

    RngStream rng(5);
    for (int t = 0; t < 50; ++t) {
        const Pt x{rng.uniform(-1, 1), rng.uniform(-1, 1), 0};
        const Pt p{rng.uniform(-4, 4), rng.uniform(-4, 4), 0};
        for (int k = 0; k < 2; ++k) {
            const SymMat a = analytic.dpA(x, 0.0, p, k);
            const SymMat b = fd.dpA(x, 0.0, p, k);
            for (int i = 0; i < a.storage_size(); ++i)
                CHECK(std::abs(a.a[static_cast<size_t>(i)] - b.a[static_cast<size_t>(i)]) <=
                      1e-4 * (1.0 + std::abs(a.a[static_cast<size_t>(i)])));
            for (int l = 0; l < 2; ++l) {
                const SymMat a2 = analytic.d2pA(x, 0.0, p, k, l);
                const SymMat b2 = fd.d2pA(x, 0.0, p, k, l);
                for (int i = 0; i < a2.storage_size(); ++i)
                    CHECK(std::abs(a2.a[static_cast<size_t>(i)] - b2.a[static_cast<size_t>(i)]) <=
                          1e-4 * (1.0 + std::abs(a2.a[static_cast<size_t>(i)])));
            }
        }
        const Pt ga = analytic.dpB(x, 0.0, p);
        const Pt gb = fd.dpB(x, 0.0, p);
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(ga[static_cast<size_t>(i)] - gb[static_cast<size_t>(i)]) <=
                  1e-4 * (1.0 + std::abs(ga[static_cast<size_t>(i)])));
    }
}

TEST_CASE("regularity_check: p-independent A has identically zero form") {
    SampleBox box;
    for (const char* id : {"zero", "xz_matrix"}) {
        auto aug = make_A(id, {0.5, 0.25}, 2);
        auto rep = regularity_check(aug, box, /*strict=*/false, 300, 11);
        CHECK(rep.pass);
        CHECK(rep.fitted_constants.at("regular_without_orthogonality") == 1.0);
        CHECK(std::abs(rep.fitted_constants.at("min_form_orthogonal")) <= 1e-8);
        CHECK(std::abs(rep.fitted_constants.at("min_form_unconstrained")) <= 1e-8);

        // same conclusion through the finite-difference fallback
        AugmentedData fd = aug;
        fd.A_pp = nullptr;
        fd.A_p = nullptr;
        auto rep_fd = regularity_check(fd, box, false, 100, 11);
        CHECK(rep_fd.pass);
        CHECK(std::abs(rep_fd.fitted_constants.at("min_form_orthogonal")) <= 1e-8);
    }
}

TEST_CASE("regularity_check: quad_iso sign decides strict pass/fail") {
    SampleBox box;
    auto pos = make_A("quad_iso", {1.0}, 2);
    auto rep = regularity_check(pos, box, /*strict=*/true, 300, 13);
    CHECK(rep.pass);
    // form = 2 |xi|^2 |eta|^2 on unit vectors
    CHECK(rep.fitted_constants.at("min_form_orthogonal") == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.fitted_constants.at("regular_without_orthogonality") == 1.0);

    auto neg = make_A("quad_iso", {-1.0}, 2);
    auto rep_neg_strict = regularity_check(neg, box, true, 300, 13);
    auto rep_neg_weak = regularity_check(neg, box, false, 300, 13);
    CHECK_FALSE(rep_neg_strict.pass);
    CHECK_FALSE(rep_neg_weak.pass);
    CHECK(rep_neg_weak.worst_witness.has_value());
    CHECK(rep_neg_weak.fitted_constants.at("min_form_orthogonal") < -1e-3);
}

TEST_CASE("structure_growth_check: zero data, exact power, fractional power") {
    SampleBox xbox;
    const std::array<double, 2> zbox{-1.0, 1.0};

    auto zero = make_A("zero", {}, 2);
    attach_B(zero, "const", {2.0});
    for (auto which : {GrowthCondition::Cond_1_14, GrowthCondition::Cond_1_15, GrowthCondition::Cond_1_16}) {
        auto rep = structure_growth_check(zero, which, xbox, zbox, 200, 5);
        CHECK(rep.pass);
        for (const auto& q : rep.quantities) CHECK(std::abs(q.slope) <= 0.05);
    }

    // B = f(x): the one-sided (1.15) reduction grows like |p|, well below o(|p|^4)
    auto zero_bx = make_A("zero", {}, 2);
    attach_B(zero_bx, "linear_x", {2.0, 0.3, -0.1});
    auto rep15 = structure_growth_check(zero_bx, GrowthCondition::Cond_1_15, xbox, zbox, 200, 5);
    CHECK(rep15.pass);
    CHECK(rep15.quantities[1].slope <= 1.1);

    // A = |p|^2 I: slope exactly 2 fails the strict o(|p|^2) policy
    auto quad = make_A("quad_iso", {1.0}, 2);
    attach_B(quad, "const", {1.0});
    auto rep14 = structure_growth_check(quad, GrowthCondition::Cond_1_14, xbox, zbox, 200, 5);
    CHECK_FALSE(rep14.pass);
    CHECK(rep14.quantities[0].slope == doctest::Approx(2.0).epsilon(1e-3));
    CHECK_FALSE(rep14.quantities[0].pass);
    CHECK(rep14.quantities[1].pass);  // p . D_pA = 2|p|^2 I is still O(|p|^2)

    // A = |p|^{1.5} I passes with fitted slope 1.5
    auto pow15 = make_A("power_iso", {1.0, 1.5}, 2);
    attach_B(pow15, "const", {1.0});
    auto rep_pow = structure_growth_check(pow15, GrowthCondition::Cond_1_14, xbox, zbox, 200, 5);
    CHECK(rep_pow.pass);
    CHECK(rep_pow.quantities[0].slope == doctest::Approx(1.5).epsilon(0.034));
}

TEST_CASE("classify: admissibility and sub/supersolution flags") {
    auto grid = std::make_shared<Grid>(DomainSpec::rectangle(0, 1, 0, 1, 1.0 / 16.0));
    auto aug = make_A("zero", {}, 2);
    attach_B(aug, "const", {1.0});
    const auto op = OperatorSpec::monge_ampere_root(2);

    auto u = GridFunction::sample(grid, [](Vec2 p) { return 0.5 * (p.x * p.x + p.y * p.y); });
    auto rep = classify(aug, op, u);
    CHECK(rep.admissible);
    CHECK(rep.min_margin == doctest::Approx(1.0));
    // F(M[u]) = 1 = B: subsolution, but not strict
    CHECK(rep.subsolution);
    CHECK_FALSE(rep.strict_subsolution);
    CHECK(rep.supersolution);
    CHECK(std::abs(rep.min_residual) <= 1e-9);

    auto uneg = GridFunction::sample(grid, [](Vec2 p) { return -0.5 * (p.x * p.x + p.y * p.y); });
    auto rep_neg = classify(aug, op, uneg);
    CHECK_FALSE(rep_neg.admissible);
    CHECK(rep_neg.min_margin < 0.0);

    // strict subsolution: F(M) = 2 > 1 = B
    auto usub = GridFunction::sample(grid, [](Vec2 p) { return p.x * p.x + p.y * p.y; });
    auto rep_sub = classify(aug, op, usub);
    CHECK(rep_sub.strict_subsolution);
    CHECK(rep_sub.delta == doctest::Approx(1.0));
    CHECK_FALSE(rep_sub.supersolution);
}

TEST_CASE("classify: z-independent data makes admissibility z-free") {
    // identical flags whether values are shifted or not, since A ignores z
    auto grid = std::make_shared<Grid>(DomainSpec::disc({0, 0}, 1.0, 1.0 / 16.0));
    auto aug = make_A("quad_iso", {0.05}, 2);
    attach_B(aug, "const", {2.0});
    const auto op = OperatorSpec::monge_ampere_root(2);
    auto u = GridFunction::sample(grid, [](Vec2 p) { return 1.2 * (p.x * p.x + p.y * p.y) - 0.2; });
    auto shifted_u = u;
    for (auto& v : shifted_u.values) v += 17.0;
    const auto a = classify(aug, op, u);
    const auto b = classify(aug, op, shifted_u);
    CHECK(a.admissible == b.admissible);
    CHECK(a.min_margin == doctest::Approx(b.min_margin));
    CHECK(a.strict_subsolution == b.strict_subsolution);
}

TEST_CASE("scalar field catalog") {
    auto f = ScalarField::make("radial_quad", {1.1, -0.1});
    CHECK(f({1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(f({0.0, 0.0}) == doctest::Approx(-0.1));
    auto e = ScalarField::make("exp_half_sq", {1.0});
    CHECK(e({1.0, 0.0}) == doctest::Approx(std::exp(0.5)));
    CHECK_THROWS_AS(ScalarField::make("nope", {1.0}), Error);
    CHECK_THROWS_AS(ScalarField::make("radial_quad", {1.0}), Error);
}
