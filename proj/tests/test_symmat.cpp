#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hessfield/rng.hpp"
#include "hessfield/symmat.hpp"

using namespace hessfield;

namespace {

SymMat random_sym(RngStream& rng, int n, double scale = 1.0) {
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.at(i, j) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

// characteristic polynomial det(m - t I), expanded for n <= 3
double char_poly(const SymMat& m, double t) {
    if (m.n == 2) {
        return (m(0, 0) - t) * (m(1, 1) - t) - m(0, 1) * m(0, 1);
    }
    const double a = m(0, 0) - t, b = m(1, 1) - t, c = m(2, 2) - t;
    return a * (b * c - m(1, 2) * m(1, 2)) - m(0, 1) * (m(0, 1) * c - m(1, 2) * m(0, 2)) +
           m(0, 2) * (m(0, 1) * m(1, 2) - b * m(0, 2));
}

// independent oracle: roots of the characteristic polynomial by bisection on
// sign changes of det(m - t I)
std::vector<double> char_poly_roots(const SymMat& m) {
    const double bound = 1.0 + 3.0 * m.max_abs();
    const int cells = 4000;
    std::vector<double> roots;
    double prev_t = -bound;
    double prev_v = char_poly(m, prev_t);
    for (int i = 1; i <= cells; ++i) {
        const double t = -bound + 2.0 * bound * i / cells;
        const double v = char_poly(m, t);
        if ((prev_v <= 0.0 && v > 0.0) || (prev_v >= 0.0 && v < 0.0)) {
            double lo = prev_t, hi = t, flo = prev_v;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = char_poly(m, mid);
                if ((flo <= 0.0 && fm > 0.0) || (flo >= 0.0 && fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_v = v;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// brute-force oracle: S_k as the t^(n-k) coefficient of prod (t + lambda_i)
double poly_expand_sk(std::span<const double> lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    std::vector<double> coeff(static_cast<size_t>(n) + 1, 0.0);
    coeff[0] = 1.0;  // polynomial 1, coeff[d] multiplies t^(deg - d) as we go
    int deg = 0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> next(static_cast<size_t>(n) + 1, 0.0);
        for (int d = 0; d <= deg; ++d) {
            next[static_cast<size_t>(d)] += coeff[static_cast<size_t>(d)];          // * t
            next[static_cast<size_t>(d) + 1] += coeff[static_cast<size_t>(d)] * lambda[static_cast<size_t>(i)];
        }
        coeff = next;
        ++deg;
    }
    return coeff[static_cast<size_t>(k)];
}

SymMat random_conjugate(RngStream& rng, const SymMat& m) {
    if (m.n == 2) {
        const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double c = std::cos(th), s = std::sin(th);
        SymMat out(2);
        // Q = [[c,-s],[s,c]], out = Q m Q^T
        const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
        out.at(0, 0) = c * c * a - 2 * c * s * b + s * s * d;
        out.at(0, 1) = c * s * (a - d) + (c * c - s * s) * b;
        out.at(1, 1) = s * s * a + 2 * c * s * b + c * c * d;
        return out;
    }
    // random rotation from a normalized quaternion
    std::array<double, 4> q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    double nq = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& x : q) x /= nq;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    const double Q[3][3] = {
        {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
        {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
        {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
    SymMat out(3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) s += Q[i][k] * m(k, l) * Q[j][l];
            out.at(i, j) = s;
        }
    return out;
}

}  // namespace

TEST_CASE("eigen: fixed 2x2 cases") {
    auto s = eigen(SymMat::diag2(1.0, 1.0));
    CHECK(s.lambda[0] == doctest::Approx(1.0));
    CHECK(s.lambda[1] == doctest::Approx(1.0));

    SymMat offdiag(2);
    offdiag.at(0, 1) = 1.0;
    s = eigen(offdiag);
    CHECK(s.lambda[0] == doctest::Approx(-1.0));
    CHECK(s.lambda[1] == doctest::Approx(1.0));
}

TEST_CASE("eigen: 3x3 matches characteristic-polynomial bisection oracle") {
    RngStream rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMat m = random_sym(rng, 3, 2.0);
        const Spectrum s = eigen(m);
        const auto roots = char_poly_roots(m);
        if (roots.size() != 3) continue;  // clustered roots invisible to sign scan
        for (int k = 0; k < 3; ++k)
            CHECK(s.lambda[static_cast<size_t>(k)] ==
                  doctest::Approx(roots[static_cast<size_t>(k)]).epsilon(1e-7));
    }
}

TEST_CASE("eigen: reconstruction and orthogonality on 1000 random matrices") {
    RngStream rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = (trial % 2) ? 3 : 2;
        const SymMat m = random_sym(rng, n, (trial % 5 == 0) ? 100.0 : 1.0);
        const Spectrum s = eigen(m);
        for (int k = 0; k + 1 < n; ++k) CHECK(s.lambda[static_cast<size_t>(k)] <= s.lambda[static_cast<size_t>(k) + 1]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double dot = 0.0;
                for (int c = 0; c < n; ++c)
                    dot += s.vec[static_cast<size_t>(i)][static_cast<size_t>(c)] * s.vec[static_cast<size_t>(j)][static_cast<size_t>(c)];
                CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        std::array<double, 3> d{s.lambda[0], s.lambda[1], s.lambda[2]};
        const SymMat r = s.reassemble(std::span<const double>(d.data(), static_cast<size_t>(n)));
        const double scale = std::max(m.frobenius_norm(), 1e-30);
        for (int i = 0; i < m.storage_size(); ++i)
            CHECK(std::abs(r.a[static_cast<size_t>(i)] - m.a[static_cast<size_t>(i)]) <= 1e-10 * scale);
    }
}

TEST_CASE("eigen: near-degenerate spectra stay accurate") {
    RngStream rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<double, 3> lam{1.0, 1.0 + 1e-13 * rng.uniform(), 1.0 + 1e-12 * rng.uniform()};
        SymMat base = SymMat::diag(lam);
        const SymMat m = random_conjugate(rng, base);
        const Spectrum s = eigen(m);
        std::array<double, 3> d{s.lambda[0], s.lambda[1], s.lambda[2]};
        const SymMat r = s.reassemble(std::span<const double>(d.data(), 3));
        for (int i = 0; i < m.storage_size(); ++i)
            CHECK(std::abs(r.a[static_cast<size_t>(i)] - m.a[static_cast<size_t>(i)]) <= 1e-10);
    }
}

TEST_CASE("eigen: rejects non-finite input") {
    SymMat m(2);
    m.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(eigen(m), Error);
}

TEST_CASE("eigen: spectrum invariant under orthogonal conjugation") {
    RngStream rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = (trial % 2) ? 3 : 2;
        const SymMat m = random_sym(rng, n);
        const SymMat mc = random_conjugate(rng, m);
        const Spectrum a = eigen(m);
        const Spectrum b = eigen(mc);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(a.lambda[static_cast<size_t>(k)] - b.lambda[static_cast<size_t>(k)]) <= 1e-9);
    }
}

TEST_CASE("elem_sym: fixed values and expansion oracle") {
    const std::array<double, 3> ones{1.0, 1.0, 1.0};
    CHECK(elem_sym(ones, 2) == doctest::Approx(3.0));

    const std::array<double, 2> two_three{2.0, 3.0};
    CHECK(elem_sym(two_three, 2) == doctest::Approx(6.0));

    const std::array<double, 3> mixed{1.0, -2.0, 4.0};
    CHECK(elem_sym(mixed, 2) == doctest::Approx(poly_expand_sk(mixed, 2)));

    CHECK_THROWS_AS(elem_sym(two_three, 3), Error);
    CHECK_THROWS_AS(elem_sym(two_three, 0), Error);
}

TEST_CASE("elem_sym: matches subset expansion exactly on random input") {
    RngStream rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = (trial % 2) ? 3 : 2;
        std::vector<double> lam(static_cast<size_t>(n));
        for (double& l : lam) l = rng.uniform(-4.0, 4.0);
        for (int k = 1; k <= n; ++k)
            CHECK(elem_sym(lam, k) == doctest::Approx(poly_expand_sk(lam, k)).epsilon(1e-14));
    }
}

TEST_CASE("cone_margin: identity and trace-zero cases") {
    CHECK(cone_margin(SymMat::identity(2), ConeSpec::gamma(1, 2)) == doctest::Approx(2.0));
    CHECK(cone_margin(SymMat::identity(2), ConeSpec::gamma(2, 2)) == doctest::Approx(1.0));
    CHECK(cone_margin(SymMat::identity(3), ConeSpec::gamma(3, 3)) == doctest::Approx(1.0));
    CHECK(cone_margin(SymMat::diag2(1.0, -1.0), ConeSpec::gamma(1, 2)) == doctest::Approx(0.0));
    // P_k margins enumerate subsets
    CHECK(cone_margin(SymMat::diag3(-1.0, 2.0, 2.0), ConeSpec::pk(2, 3)) == doctest::Approx(1.0));
    CHECK(cone_margin(SymMat::diag3(-1.0, 2.0, 2.0), ConeSpec::pk(1, 3)) == doctest::Approx(-1.0));
}

TEST_CASE("cone_margin: Gamma_n implies Gamma_k implies Gamma_1 on 200 random matrices") {
    RngStream rng(13);
    int hits = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = (trial % 2) ? 3 : 2;
        const SymMat m = random_sym(rng, n, 2.0);
        bool prev_in = cone_margin(m, ConeSpec::gamma(n, n)) > 0.0;
        if (prev_in) ++hits;
        for (int k = n - 1; k >= 1; --k) {
            const bool in_k = cone_margin(m, ConeSpec::gamma(k, n)) > 0.0;
            if (prev_in) CHECK(in_k);
            prev_in = prev_in && in_k;
        }
        // P_k sits between Gamma_n and Gamma_1 as well
        if (cone_margin(m, ConeSpec::gamma(n, n)) > 0.0)
            for (int k = 1; k <= n; ++k) CHECK(cone_margin(m, ConeSpec::pk(k, n)) > 0.0);
        for (int k = 1; k <= n; ++k)
            if (cone_margin(m, ConeSpec::pk(k, n)) > 0.0) CHECK(cone_margin(m, ConeSpec::gamma(1, n)) > 0.0);
    }
    CHECK(hits > 5);  // the sampling box must actually produce positive matrices
}

TEST_CASE("min_eig_direction: fixed and random cases") {
    auto [l0, v0] = min_eig_direction(SymMat::diag2(3.0, 5.0));
    CHECK(l0 == doctest::Approx(3.0));
    CHECK(std::abs(std::abs(v0[0]) - 1.0) <= 1e-14);

    auto [l1, v1] = min_eig_direction(SymMat::diag3(-2.0, 1.0, 1.0));
    CHECK(l1 == doctest::Approx(-2.0));
    CHECK(std::abs(std::abs(v1[0]) - 1.0) <= 1e-14);

    RngStream rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMat m = random_sym(rng, 3);
        auto [lmin, v] = min_eig_direction(m);
        const Spectrum s = eigen(m);
        CHECK(lmin == doctest::Approx(s.lambda[0]));
        // residual of the eigen equation
        for (int i = 0; i < 3; ++i) {
            double mv = 0.0;
            for (int j = 0; j < 3; ++j) mv += m(i, j) * v[static_cast<size_t>(j)];
            CHECK(mv == doctest::Approx(lmin * v[static_cast<size_t>(i)]).epsilon(1e-8));
        }
    }
}
