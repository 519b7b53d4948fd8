#include "hessfield/symmat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace hessfield {

namespace {

inline int tri_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

inline std::array<double, 3> cross3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

inline double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline void normalize3(std::array<double, 3>& v) {
    const double s = norm3(v);
    if (s > 0.0)
        for (double& x : v) x /= s;
}

void sort_spectrum(Spectrum& s) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.begin() + s.n,
              [&](int a, int b) { return s.lambda[a] < s.lambda[b]; });
    Spectrum t = s;
    for (int k = 0; k < s.n; ++k) {
        s.lambda[k] = t.lambda[order[k]];
        s.vec[k] = t.vec[order[k]];
    }
}

Spectrum eigen2(const SymMat& m) {
    Spectrum s;
    s.n = 2;
    const double a = m(0, 0), b = m(1, 1), c = m(0, 1);
    const double mean = 0.5 * (a + b);
    const double disc = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
    const double l0 = mean - disc;
    const double l1 = mean + disc;
    s.lambda = {l0, l1, 0.0};

    std::array<double, 3> v{1.0, 0.0, 0.0};
    if (disc > 0.0) {
        // eigenvector for l0 from the better-conditioned row of (m - l0 I)
        if (std::abs(a - l0) > std::abs(b - l0)) {
            v = {c, l0 - a, 0.0};
        } else {
            v = {l0 - b, c, 0.0};
        }
        if (norm3(v) == 0.0) v = {1.0, 0.0, 0.0};
        normalize3(v);
    }
    s.vec[0] = v;
    s.vec[1] = {-v[1], v[0], 0.0};
    return s;
}

// One cyclic Jacobi pass; returns the remaining off-diagonal magnitude.
double jacobi_sweep(std::array<std::array<double, 3>, 3>& A, std::array<std::array<double, 3>, 3>& V) {
    for (int p = 0; p < 3; ++p) {
        for (int q = p + 1; q < 3; ++q) {
            const double apq = A[p][q];
            if (apq == 0.0) continue;
            const double theta = (A[q][q] - A[p][p]) / (2.0 * apq);
            const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                             (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double sn = t * c;
            for (int k = 0; k < 3; ++k) {
                const double akp = A[k][p], akq = A[k][q];
                A[k][p] = c * akp - sn * akq;
                A[k][q] = sn * akp + c * akq;
            }
            for (int k = 0; k < 3; ++k) {
                const double apk = A[p][k], aqk = A[q][k];
                A[p][k] = c * apk - sn * aqk;
                A[q][k] = sn * apk + c * aqk;
            }
            for (int k = 0; k < 3; ++k) {
                const double vkp = V[k][p], vkq = V[k][q];
                V[k][p] = c * vkp - sn * vkq;
                V[k][q] = sn * vkp + c * vkq;
            }
        }
    }
    return std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
}

Spectrum eigen3_jacobi(const SymMat& m) {
    std::array<std::array<double, 3>, 3> A{};
    std::array<std::array<double, 3>, 3> V{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A[i][j] = m(i, j);
    const double scale = std::max(m.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        if (jacobi_sweep(A, V) <= 1e-16 * scale) break;
    }
    Spectrum s;
    s.n = 3;
    for (int k = 0; k < 3; ++k) {
        s.lambda[k] = A[k][k];
        s.vec[k] = {V[0][k], V[1][k], V[2][k]};
        normalize3(s.vec[k]);
    }
    sort_spectrum(s);
    return s;
}

double reconstruction_error(const SymMat& m, const Spectrum& s) {
    std::array<double, 3> d{s.lambda[0], s.lambda[1], s.lambda[2]};
    const SymMat r = s.reassemble(std::span<const double>(d.data(), static_cast<size_t>(s.n)));
    double err = 0.0;
    for (int i = 0; i < m.storage_size(); ++i) err = std::max(err, std::abs(r.a[i] - m.a[i]));
    return err;
}

Spectrum eigen3(const SymMat& m) {
    const double scale = std::max(m.max_abs(), 1e-300);
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    if (p1 <= 1e-30 * scale * scale) {
        Spectrum s;
        s.n = 3;
        s.lambda = {m(0, 0), m(1, 1), m(2, 2)};
        s.vec = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        sort_spectrum(s);
        return s;
    }

    // trigonometric solution of the characteristic cubic
    const double q = m.trace() / 3.0;
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                      (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> B{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B[i][j] = (m(i, j) - (i == j ? q : 0.0)) / p;
    const double detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                        B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                        B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    const double r = std::clamp(detB / 2.0, -1.0, 1.0);

    // near-degenerate discriminant: hand over to the Jacobi path
    if (1.0 - std::abs(r) < 1e-12 || p < 1e-12 * scale) return eigen3_jacobi(m);

    const double phi = std::acos(r) / 3.0;
    const double lmax = q + 2.0 * p * std::cos(phi);
    const double lmin = q + 2.0 * p * std::cos(phi + 2.0 * 3.14159265358979323846 / 3.0);
    const double lmid = 3.0 * q - lmax - lmin;

    Spectrum s;
    s.n = 3;
    s.lambda = {lmin, lmid, lmax};

    // eigenvectors from cross products of rows of (m - lambda I)
    for (int k : {0, 2}) {
        const double l = s.lambda[k];
        std::array<std::array<double, 3>, 3> rows{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) rows[i][j] = m(i, j) - (i == j ? l : 0.0);
        std::array<double, 3> best{0, 0, 0};
        double best_norm = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                auto c = cross3(rows[i], rows[j]);
                const double cn = norm3(c);
                if (cn > best_norm) {
                    best_norm = cn;
                    best = c;
                }
            }
        if (best_norm <= 1e-14 * scale * scale) return eigen3_jacobi(m);
        normalize3(best);
        s.vec[k] = best;
    }
    s.vec[1] = cross3(s.vec[2], s.vec[0]);
    normalize3(s.vec[1]);

    if (reconstruction_error(m, s) > 1e-11 * scale) return eigen3_jacobi(m);
    return s;
}

}  // namespace

SymMat SymMat::identity(int n) {
    SymMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMat SymMat::diag(std::span<const double> d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n; ++i) m.at(i, i) = d[static_cast<size_t>(i)];
    return m;
}

SymMat SymMat::diag2(double a0, double a1) {
    const std::array<double, 2> d{a0, a1};
    return diag(d);
}

SymMat SymMat::diag3(double a0, double a1, double a2) {
    const std::array<double, 3> d{a0, a1, a2};
    return diag(d);
}

double& SymMat::at(int i, int j) { return a[static_cast<size_t>(tri_index(n, i, j))]; }
double SymMat::at(int i, int j) const { return a[static_cast<size_t>(tri_index(n, i, j))]; }

bool SymMat::finite() const {
    for (int i = 0; i < storage_size(); ++i)
        if (!std::isfinite(a[static_cast<size_t>(i)])) return false;
    return true;
}

double SymMat::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += at(i, j) * at(i, j);
    return std::sqrt(s);
}

double SymMat::max_abs() const {
    double s = 0.0;
    for (int i = 0; i < storage_size(); ++i) s = std::max(s, std::abs(a[static_cast<size_t>(i)]));
    return s;
}

double SymMat::trace() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += at(i, i);
    return s;
}

SymMat& SymMat::operator+=(const SymMat& o) {
    for (int i = 0; i < storage_size(); ++i) a[static_cast<size_t>(i)] += o.a[static_cast<size_t>(i)];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
    for (int i = 0; i < storage_size(); ++i) a[static_cast<size_t>(i)] -= o.a[static_cast<size_t>(i)];
    return *this;
}

SymMat& SymMat::operator*=(double s) {
    for (int i = 0; i < storage_size(); ++i) a[static_cast<size_t>(i)] *= s;
    return *this;
}

double SymMat::quad_form(std::span<const double> v) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += at(i, j) * v[static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
    return s;
}

double SymMat::inner(const SymMat& o) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += at(i, j) * o.at(i, j);
    return s;
}

SymMat Spectrum::reassemble(std::span<const double> d) const {
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += d[static_cast<size_t>(k)] * vec[static_cast<size_t>(k)][static_cast<size_t>(i)] *
                     vec[static_cast<size_t>(k)][static_cast<size_t>(j)];
            m.at(i, j) = s;
        }
    return m;
}

void ConeSpec::validate() const {
    if (n < 2 || n > 3) throw Error(ErrorCode::InvalidCone, "cone dimension must be 2 or 3");
    if (k < 1 || k > n) throw Error(ErrorCode::InvalidCone, "cone order k out of 1..n");
}

Spectrum eigen(const SymMat& m) {
    if (m.n != 2 && m.n != 3) throw Error(ErrorCode::InvalidMatrix, "dimension must be 2 or 3");
    if (!m.finite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entries");
    return m.n == 2 ? eigen2(m) : eigen3(m);
}

double elem_sym(std::span<const double> lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    if (k < 1 || k > n) throw Error(ErrorCode::InvalidOrder, "k out of 1..n");
    switch (k) {
        case 1: {
            double s = 0.0;
            for (double l : lambda) s += l;
            return s;
        }
        case 2: {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    s += lambda[static_cast<size_t>(i)] * lambda[static_cast<size_t>(j)];
            return s;
        }
        default:
            return lambda[0] * lambda[1] * lambda[2];
    }
}

double cone_margin(std::span<const double> lambda, const ConeSpec& cone) {
    cone.validate();
    const int n = static_cast<int>(lambda.size());
    if (n != cone.n) throw Error(ErrorCode::InvalidCone, "matrix/cone dimension mismatch");
    if (cone.kind == ConeKind::GammaK) {
        double margin = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= cone.k; ++j) margin = std::min(margin, elem_sym(lambda, j));
        return margin;
    }
    // P_k: every sum over k-element index subsets must be positive
    double margin = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << n); ++mask) {
        if (std::popcount(static_cast<unsigned>(mask)) != cone.k) continue;
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) s += lambda[static_cast<size_t>(i)];
        margin = std::min(margin, s);
    }
    return margin;
}

double cone_margin(const SymMat& m, const ConeSpec& cone) {
    const Spectrum s = eigen(m);
    return cone_margin(std::span<const double>(s.lambda.data(), static_cast<size_t>(s.n)), cone);
}

std::pair<double, std::array<double, 3>> min_eig_direction(const SymMat& m) {
    const Spectrum s = eigen(m);
    return {s.lambda[0], s.vec[0]};
}

}  // namespace hessfield
