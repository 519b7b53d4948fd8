#include "hessfield/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hessfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Pt shifted(const Pt& p, int k, double d) {
    Pt q = p;
    q[static_cast<size_t>(k)] += d;
    return q;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < xs.size(); ++i)
        if (ys[i] > 1e-12) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    if (lx.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

SymMat AugmentedData::dpA(const Pt& x, double z, const Pt& p, int k) const {
    if (A_p) return A_p(x, z, p, k);
    const double h = fd_step(p);
    SymMat d = A(x, z, shifted(p, k, h));
    d -= A(x, z, shifted(p, k, -h));
    d *= 1.0 / (2.0 * h);
    return d;
}

SymMat AugmentedData::d2pA(const Pt& x, double z, const Pt& p, int k, int l) const {
    if (A_pp) return A_pp(x, z, p, k, l);
    const double h = fd_step(p);
    if (A_p) {
        SymMat d = A_p(x, z, shifted(p, l, h), k);
        d -= A_p(x, z, shifted(p, l, -h), k);
        d *= 1.0 / (2.0 * h);
        return d;
    }
    // double differencing needs a coarser step to keep eps/h^2 noise down
    const double h2 = 1e-3 * (1.0 + pt_norm(p, n));
    if (k == l) {
        SymMat d = A(x, z, shifted(p, k, h2));
        d += A(x, z, shifted(p, k, -h2));
        SymMat c = A(x, z, p);
        c *= 2.0;
        d -= c;
        d *= 1.0 / (h2 * h2);
        return d;
    }
    SymMat d = A(x, z, shifted(shifted(p, k, h2), l, h2));
    d -= A(x, z, shifted(shifted(p, k, h2), l, -h2));
    d -= A(x, z, shifted(shifted(p, k, -h2), l, h2));
    d += A(x, z, shifted(shifted(p, k, -h2), l, -h2));
    d *= 1.0 / (4.0 * h2 * h2);
    return d;
}

SymMat AugmentedData::dzA(const Pt& x, double z, const Pt& p) const {
    if (A_z) return A_z(x, z, p);
    if (!z_dependent) return SymMat::zero(n);
    const double h = 1e-6 * (1.0 + std::abs(z));
    SymMat d = A(x, z + h, p);
    d -= A(x, z - h, p);
    d *= 1.0 / (2.0 * h);
    return d;
}

SymMat AugmentedData::dxA(const Pt& x, double z, const Pt& p, int k) const {
    if (A_x) return A_x(x, z, p, k);
    const double h = 1e-6 * (1.0 + pt_norm(x, n));
    SymMat d = A(shifted(x, k, h), z, p);
    d -= A(shifted(x, k, -h), z, p);
    d *= 1.0 / (2.0 * h);
    return d;
}

Pt AugmentedData::dpB(const Pt& x, double z, const Pt& p) const {
    if (B_p) return B_p(x, z, p);
    const double h = fd_step(p);
    Pt g{};
    for (int k = 0; k < n; ++k)
        g[static_cast<size_t>(k)] =
            (B(x, z, shifted(p, k, h)) - B(x, z, shifted(p, k, -h))) / (2.0 * h);
    return g;
}

double AugmentedData::dzB(const Pt& x, double z, const Pt& p) const {
    if (B_z) return B_z(x, z, p);
    if (!z_dependent) return 0.0;
    const double h = 1e-6 * (1.0 + std::abs(z));
    return (B(x, z + h, p) - B(x, z - h, p)) / (2.0 * h);
}

Pt AugmentedData::dxB(const Pt& x, double z, const Pt& p) const {
    if (B_x) return B_x(x, z, p);
    const double h = 1e-6 * (1.0 + pt_norm(x, n));
    Pt g{};
    for (int k = 0; k < n; ++k)
        g[static_cast<size_t>(k)] =
            (B(shifted(x, k, h), z, p) - B(shifted(x, k, -h), z, p)) / (2.0 * h);
    return g;
}

double AugmentedData::regularity_form(const Pt& x, double z, const Pt& p, const Pt& xi,
                                      const Pt& eta) const {
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const double ekl = eta[static_cast<size_t>(k)] * eta[static_cast<size_t>(l)];
            if (ekl == 0.0) continue;
            const SymMat Akl = d2pA(x, z, p, k, l);
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    q += Akl(i, j) * xi[static_cast<size_t>(i)] * xi[static_cast<size_t>(j)];
            acc += q * ekl;
        }
    return acc;
}

double ScalarField::operator()(Vec2 p) const {
    const auto& c = params;
    if (id == "const") return c.at(0);
    if (id == "radial_quad") return c.at(0) * (p.x * p.x + p.y * p.y) + c.at(1);
    if (id == "quadratic")
        return c.at(0) * p.x * p.x + c.at(1) * p.x * p.y + c.at(2) * p.y * p.y + c.at(3) * p.x +
               c.at(4) * p.y + c.at(5);
    if (id == "exp_half_sq") return c.at(0) * std::exp(0.5 * (p.x * p.x + p.y * p.y));
    if (id == "trig_prod")
        return c.at(0) * std::sin(c.at(1) * p.x) * std::sin(c.at(2) * p.y);
    throw Error(ErrorCode::ConfigError, "unknown scalar field '" + id + "'");
}

ScalarField ScalarField::make(const std::string& id, std::vector<double> params) {
    ScalarField f;
    f.id = id;
    f.params = std::move(params);
    const size_t need = id == "const"          ? 1
                        : id == "radial_quad"  ? 2
                        : id == "quadratic"    ? 6
                        : id == "exp_half_sq"  ? 1
                        : id == "trig_prod"    ? 3
                                               : 0;
    if (need == 0) throw Error(ErrorCode::ConfigError, "unknown scalar field '" + id + "'");
    if (f.params.size() != need)
        throw Error(ErrorCode::ConfigError, "field '" + id + "' needs " + std::to_string(need) +
                                                " parameters");
    return f;
}

AugmentedData make_A(const std::string& id, std::vector<double> params, int n) {
    AugmentedData aug;
    aug.n = n;
    aug.a_id = id;
    const auto zero_mat = [n](const Pt&, double, const Pt&) { return SymMat::zero(n); };
    const auto zero_mat_k = [n](const Pt&, double, const Pt&, int) { return SymMat::zero(n); };
    const auto zero_mat_kl = [n](const Pt&, double, const Pt&, int, int) { return SymMat::zero(n); };

    if (id == "zero") {
        aug.A = zero_mat;
        aug.A_p = zero_mat_k;
        aug.A_pp = zero_mat_kl;
        aug.A_z = zero_mat;
        aug.A_x = zero_mat_k;
        return aug;
    }
    if (id == "const_shift") {
        const double c = params.at(0);
        aug.A = [n, c](const Pt&, double, const Pt&) {
            SymMat m = SymMat::identity(n);
            m *= c;
            return m;
        };
        aug.A_p = zero_mat_k;
        aug.A_pp = zero_mat_kl;
        aug.A_z = zero_mat;
        aug.A_x = zero_mat_k;
        return aug;
    }
    if (id == "quad_iso") {
        // A = c |p|^2 I
        const double c = params.at(0);
        aug.A = [n, c](const Pt&, double, const Pt& p) {
            SymMat m = SymMat::identity(n);
            const double r = pt_norm(p, n);
            m *= c * r * r;
            return m;
        };
        aug.A_p = [n, c](const Pt&, double, const Pt& p, int k) {
            SymMat m = SymMat::identity(n);
            m *= 2.0 * c * p[static_cast<size_t>(k)];
            return m;
        };
        aug.A_pp = [n, c](const Pt&, double, const Pt&, int k, int l) {
            SymMat m = SymMat::identity(n);
            m *= (k == l) ? 2.0 * c : 0.0;
            return m;
        };
        aug.A_z = zero_mat;
        aug.A_x = zero_mat_k;
        return aug;
    }
    if (id == "power_iso") {
        // A = c |p|^q I
        const double c = params.at(0);
        const double q = params.at(1);
        aug.A = [n, c, q](const Pt&, double, const Pt& p) {
            SymMat m = SymMat::identity(n);
            m *= c * std::pow(pt_norm(p, n), q);
            return m;
        };
        aug.A_p = [n, c, q](const Pt&, double, const Pt& p, int k) {
            SymMat m = SymMat::identity(n);
            const double r = pt_norm(p, n);
            m *= (r < 1e-14) ? 0.0 : c * q * std::pow(r, q - 2.0) * p[static_cast<size_t>(k)];
            return m;
        };
        aug.A_pp = [n, c, q](const Pt&, double, const Pt& p, int k, int l) {
            SymMat m = SymMat::identity(n);
            const double r = pt_norm(p, n);
            if (r < 1e-14) {
                m *= 0.0;
                return m;
            }
            const double pk = p[static_cast<size_t>(k)], pl = p[static_cast<size_t>(l)];
            m *= c * q *
                 ((q - 2.0) * std::pow(r, q - 4.0) * pk * pl +
                  std::pow(r, q - 2.0) * (k == l ? 1.0 : 0.0));
            return m;
        };
        aug.A_z = zero_mat;
        aug.A_x = zero_mat_k;
        return aug;
    }
    if (id == "xz_matrix") {
        // A(x,z) = c0 [[x1, x2],[x2, -x1]] + c1 z I  (pattern repeated on the
        // diagonal for n = 3); p-independent, so regular without orthogonality
        const double c0 = params.at(0);
        const double c1 = params.at(1);
        aug.z_dependent = c1 != 0.0;
        aug.A = [n, c0, c1](const Pt& x, double z, const Pt&) {
            SymMat m(n);
            m.at(0, 0) = c0 * x[0] + c1 * z;
            m.at(0, 1) = c0 * x[1];
            m.at(1, 1) = -c0 * x[0] + c1 * z;
            if (n == 3) m.at(2, 2) = c1 * z;
            return m;
        };
        aug.A_p = zero_mat_k;
        aug.A_pp = zero_mat_kl;
        aug.A_z = [n, c1](const Pt&, double, const Pt&) {
            SymMat m = SymMat::identity(n);
            m *= c1;
            return m;
        };
        aug.A_x = [n, c0](const Pt&, double, const Pt&, int k) {
            SymMat m(n);
            if (k == 0) {
                m.at(0, 0) = c0;
                m.at(1, 1) = -c0;
            } else if (k == 1) {
                m.at(0, 1) = c0;
            }
            return m;
        };
        return aug;
    }
    throw Error(ErrorCode::ConfigError, "unknown A catalog entry '" + id + "'");
}

void attach_B(AugmentedData& aug, const std::string& id, std::vector<double> params) {
    const int n = aug.n;
    aug.b_id = id;
    const auto zero_vec = [](const Pt&, double, const Pt&) { return Pt{}; };
    const auto zero_scalar = [](const Pt&, double, const Pt&) { return 0.0; };

    if (id == "const") {
        const double c = params.at(0);
        aug.B = [c](const Pt&, double, const Pt&) { return c; };
        aug.B_p = zero_vec;
        aug.B_z = zero_scalar;
        aug.B_x = zero_vec;
        return;
    }
    if (id == "linear_x") {
        // B = c0 + c . x
        const double c0 = params.at(0);
        Pt cx{};
        for (int i = 0; i < n && i + 1 < static_cast<int>(params.size()); ++i)
            cx[static_cast<size_t>(i)] = params.at(static_cast<size_t>(i) + 1);
        aug.B = [c0, cx, n](const Pt& x, double, const Pt&) {
            double s = c0;
            for (int i = 0; i < n; ++i) s += cx[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            return s;
        };
        aug.B_p = zero_vec;
        aug.B_z = zero_scalar;
        aug.B_x = [cx](const Pt&, double, const Pt&) { return cx; };
        return;
    }
    if (id == "quad_p") {
        // B = c (1 + |p|^2), convex in p
        const double c = params.at(0);
        aug.B = [c, n](const Pt&, double, const Pt& p) {
            const double r = pt_norm(p, n);
            return c * (1.0 + r * r);
        };
        aug.B_p = [c, n](const Pt&, double, const Pt& p) {
            Pt g{};
            for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = 2.0 * c * p[static_cast<size_t>(i)];
            return g;
        };
        aug.B_z = zero_scalar;
        aug.B_x = zero_vec;
        return;
    }
    if (id == "exp_radial") {
        // B = c e^{|x|^2/2} sqrt(1+|x|^2): the right side that makes
        // u = e^{|x|^2/2} solve (det D^2 u)^{1/2} = B in the plane
        const double c = params.at(0);
        aug.B = [c, n](const Pt& x, double, const Pt&) {
            const double r2 = pt_norm(x, n) * pt_norm(x, n);
            return c * std::exp(0.5 * r2) * std::sqrt(1.0 + r2);
        };
        aug.B_p = zero_vec;
        aug.B_z = zero_scalar;
        aug.B_x = [c, n](const Pt& x, double, const Pt&) {
            Pt g{};
            const double r2 = pt_norm(x, n) * pt_norm(x, n);
            const double e = std::exp(0.5 * r2);
            const double s = std::sqrt(1.0 + r2);
            const double coeff = c * e * (s + 1.0 / s);
            for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = coeff * x[static_cast<size_t>(i)];
            return g;
        };
        return;
    }
    throw Error(ErrorCode::ConfigError, "unknown B catalog entry '" + id + "'");
}

void ProblemSpec::validate(const Grid& grid) const {
    for (long t = grid.interior_count(); t < grid.slot_count(); ++t) {
        const Vec2 pos = grid.position(t);
        if (std::abs(usub(pos) - phi(pos)) > 1e-8)
            throw Error(ErrorCode::ConfigError, "subsolution trace does not match phi on the boundary");
    }
    RngStream rng(2024);
    for (int s = 0; s < 256; ++s) {
        long node = static_cast<long>(rng.raw() % static_cast<std::uint64_t>(grid.interior_count()));
        const Vec2 pos = grid.position(node);
        const Pt x{pos.x, pos.y, 0.0};
        const double z = rng.uniform(-1.0, 1.0);
        const Pt p{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), 0.0};
        if (!(aug.B(x, z, p) > op.a0))
            throw Error(ErrorCode::ConfigError, "B does not stay above a0 on the domain");
    }
}

SymMat augmented_hessian(const AugmentedData& aug, const Pt& x, double z, const Pt& p,
                         const SymMat& hess) {
    SymMat m = hess;
    m -= aug.A(x, z, p);
    return m;
}

ConditionReport regularity_check(const AugmentedData& aug, const SampleBox& box, bool strict,
                                 int samples, std::uint64_t seed) {
    ConditionReport rep;
    rep.condition = strict ? "regular_strict" : "regular";
    rep.samples = samples;
    rep.seed = seed;
    RngStream rng(seed);
    const int n = aug.n;

    double min_orth = kInf;
    double min_free = kInf;
    Pt worst_x{};
    double worst_form = kInf;

    for (int s = 0; s < samples; ++s) {
        Pt x{}, p{};
        for (int i = 0; i < n; ++i) {
            x[static_cast<size_t>(i)] = rng.uniform(box.x_range[0], box.x_range[1]);
            p[static_cast<size_t>(i)] = rng.uniform(box.p_range[0], box.p_range[1]);
        }
        const double z = rng.uniform(box.z_range[0], box.z_range[1]);

        // unit xi, unit eta orthogonal to xi
        Pt xi{}, eta{};
        double nx = 0.0;
        while (nx < 1e-8) {
            for (int i = 0; i < n; ++i) xi[static_cast<size_t>(i)] = rng.normal();
            nx = pt_norm(xi, n);
        }
        for (int i = 0; i < n; ++i) xi[static_cast<size_t>(i)] /= nx;
        double ne = 0.0;
        while (ne < 1e-8) {
            for (int i = 0; i < n; ++i) eta[static_cast<size_t>(i)] = rng.normal();
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += eta[static_cast<size_t>(i)] * xi[static_cast<size_t>(i)];
            for (int i = 0; i < n; ++i) eta[static_cast<size_t>(i)] -= dot * xi[static_cast<size_t>(i)];
            ne = pt_norm(eta, n);
        }
        for (int i = 0; i < n; ++i) eta[static_cast<size_t>(i)] /= ne;

        const double form = aug.regularity_form(x, z, p, xi, eta);
        if (form < min_orth) {
            min_orth = form;
            worst_x = x;
            worst_form = form;
        }

        // unconstrained variant: independent random unit eta
        Pt eta2{};
        double ne2 = 0.0;
        while (ne2 < 1e-8) {
            for (int i = 0; i < n; ++i) eta2[static_cast<size_t>(i)] = rng.normal();
            ne2 = pt_norm(eta2, n);
        }
        for (int i = 0; i < n; ++i) eta2[static_cast<size_t>(i)] /= ne2;
        min_free = std::min(min_free, aug.regularity_form(x, z, p, xi, eta2));
    }

    const bool regular_pass = min_orth >= -1e-8;
    const bool strict_pass = min_orth > 0.0;
    rep.pass = strict ? strict_pass : regular_pass;
    SymMat wm(n);
    wm.at(0, 0) = worst_x[0];
    wm.at(1, 1) = worst_x[1];
    rep.worst_witness = WitnessSample{wm, worst_form, min_orth};
    rep.fitted_constants = {{"min_form_orthogonal", min_orth},
                            {"min_form_unconstrained", min_free},
                            {"regular_pass", regular_pass ? 1.0 : 0.0},
                            {"strict_pass", strict_pass ? 1.0 : 0.0},
                            {"regular_without_orthogonality", min_free >= -1e-8 ? 1.0 : 0.0},
                            {"delta_strict", strict_pass ? min_orth : 0.0}};
    return rep;
}

GrowthReport structure_growth_check(const AugmentedData& aug, GrowthCondition which,
                                    const SampleBox& x_box, std::array<double, 2> z_box,
                                    int samples, std::uint64_t seed) {
    GrowthReport rep;
    rep.samples = samples;
    rep.seed = seed;
    RngStream rng(seed);
    const int n = aug.n;
    const std::vector<double> magnitudes{10.0, 100.0, 1000.0, 10000.0};
    const int per_bin = std::max(samples / static_cast<int>(magnitudes.size()), 4);

    struct Spec {
        std::string name;
        double threshold;
        std::function<double(const Pt&, double, const Pt&)> reduce;
    };
    std::vector<Spec> specs;

    const auto max_abs_eig = [n](const SymMat& m) {
        const Spectrum s = eigen(m);
        return std::max(std::abs(s.lambda[0]), std::abs(s.lambda[static_cast<size_t>(n) - 1]));
    };
    const auto max_eig = [n](const SymMat& m) { return eigen(m).lambda[static_cast<size_t>(n) - 1]; };
    const auto min_eig = [](const SymMat& m) { return eigen(m).lambda[0]; };

    switch (which) {
        case GrowthCondition::Cond_1_14:
            rep.condition = "1.14";
            specs.push_back({"norm_A_o_p2", 2.0 - 0.1, [&aug, max_abs_eig](const Pt& x, double z, const Pt& p) {
                                 return max_abs_eig(aug.A(x, z, p));
                             }});
            specs.push_back({"p_dot_DpA_O_p2", 2.0 + 0.1,
                             [&aug, n, max_eig](const Pt& x, double z, const Pt& p) {
                                 SymMat acc = SymMat::zero(n);
                                 for (int k = 0; k < n; ++k) {
                                     SymMat d = aug.dpA(x, z, p, k);
                                     d *= p[static_cast<size_t>(k)];
                                     acc += d;
                                 }
                                 return std::max(0.0, max_eig(acc));
                             }});
            specs.push_back({"p_dot_DpB_O_p2", 2.0 + 0.1, [&aug, n](const Pt& x, double z, const Pt& p) {
                                 const Pt g = aug.dpB(x, z, p);
                                 double s = 0.0;
                                 for (int i = 0; i < n; ++i)
                                     s += p[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
                                 return std::max(0.0, s);
                             }});
            break;
        case GrowthCondition::Cond_1_15:
            rep.condition = "1.15";
            specs.push_back({"neg_part_pDxA_p2DzA_o_p4", 4.0 - 0.1,
                             [&aug, n, min_eig](const Pt& x, double z, const Pt& p) {
                                 SymMat acc = SymMat::zero(n);
                                 for (int k = 0; k < n; ++k) {
                                     SymMat d = aug.dxA(x, z, p, k);
                                     d *= p[static_cast<size_t>(k)];
                                     acc += d;
                                 }
                                 const double r = pt_norm(p, n);
                                 SymMat dz = aug.dzA(x, z, p);
                                 dz *= r * r;
                                 acc += dz;
                                 return std::max(0.0, -min_eig(acc));
                             }});
            specs.push_back({"neg_part_pDxB_p2DzB_o_p4", 4.0 - 0.1,
                             [&aug, n](const Pt& x, double z, const Pt& p) {
                                 const Pt g = aug.dxB(x, z, p);
                                 double s = 0.0;
                                 for (int i = 0; i < n; ++i)
                                     s += p[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
                                 const double r = pt_norm(p, n);
                                 s += r * r * aug.dzB(x, z, p);
                                 return std::max(0.0, -s);
                             }});
            break;
        case GrowthCondition::Cond_1_16:
            rep.condition = "1.16";
            specs.push_back({"DpA_O_p", 1.0 + 0.1,
                             [&aug, n, max_abs_eig](const Pt& x, double z, const Pt& p) {
                                 double m = 0.0;
                                 for (int k = 0; k < n; ++k)
                                     m = std::max(m, max_abs_eig(aug.dpA(x, z, p, k)));
                                 return m;
                             }});
            specs.push_back({"DpB_O_p", 1.0 + 0.1, [&aug, n](const Pt& x, double z, const Pt& p) {
                                 return pt_norm(aug.dpB(x, z, p), n);
                             }});
            break;
    }

    rep.pass = true;
    for (auto& spec : specs) {
        GrowthQuantity q;
        q.name = spec.name;
        q.slope_threshold = spec.threshold;
        for (double mag : magnitudes) {
            double sup = 0.0;
            for (int s = 0; s < per_bin; ++s) {
                Pt x{}, dir{};
                for (int i = 0; i < n; ++i)
                    x[static_cast<size_t>(i)] = rng.uniform(x_box.x_range[0], x_box.x_range[1]);
                const double z = rng.uniform(z_box[0], z_box[1]);
                double nd = 0.0;
                while (nd < 1e-8) {
                    for (int i = 0; i < n; ++i) dir[static_cast<size_t>(i)] = rng.normal();
                    nd = pt_norm(dir, n);
                }
                Pt p{};
                for (int i = 0; i < n; ++i)
                    p[static_cast<size_t>(i)] = dir[static_cast<size_t>(i)] / nd * mag;
                sup = std::max(sup, spec.reduce(x, z, p));
            }
            q.bin_p.push_back(mag);
            q.bin_value.push_back(sup);
        }
        q.slope = fit_loglog_slope(q.bin_p, q.bin_value);
        q.pass = q.slope <= q.slope_threshold;
        rep.pass = rep.pass && q.pass;
        rep.quantities.push_back(std::move(q));
    }
    return rep;
}

nlohmann::json GrowthReport::to_json() const {
    nlohmann::json qs = nlohmann::json::array();
    for (const auto& q : quantities) {
        qs.push_back({{"name", q.name},
                      {"bin_p", q.bin_p},
                      {"bin_value", q.bin_value},
                      {"slope", q.slope},
                      {"slope_threshold", q.slope_threshold},
                      {"pass", q.pass}});
    }
    return nlohmann::json{{"condition", condition},
                          {"pass", pass},
                          {"samples", samples},
                          {"seed", seed},
                          {"quantities", qs}};
}

nlohmann::json AdmissibilityReport::to_json() const {
    return nlohmann::json{{"admissible", admissible},
                          {"strictly_admissible", strictly_admissible},
                          {"subsolution", subsolution},
                          {"strict_subsolution", strict_subsolution},
                          {"supersolution", supersolution},
                          {"min_margin", min_margin},
                          {"min_rel_margin", min_rel_margin},
                          {"min_residual", min_residual},
                          {"max_residual", max_residual},
                          {"delta", delta},
                          {"worst_node", worst_node}};
}

AdmissibilityReport classify(const AugmentedData& aug, const OperatorSpec& op,
                             const GridFunction& u) {
    AdmissibilityReport rep;
    rep.min_margin = kInf;
    rep.min_rel_margin = kInf;
    rep.min_residual = kInf;
    rep.max_residual = -kInf;
    const Grid& grid = *u.grid;

    bool all_admissible = true;
    for (long s = 0; s < grid.interior_count(); ++s) {
        const Vec2 pos = grid.position(s);
        const Vec2 g = fd_gradient(u, s);
        const SymMat H = fd_hessian(u, s);
        const Pt x{pos.x, pos.y, 0.0};
        const Pt p{g.x, g.y, 0.0};
        const double z = u[s];
        const SymMat M = augmented_hessian(aug, x, z, p, H);
        if (!M.finite()) throw Error(ErrorCode::DiscretizationError, "non-finite augmented Hessian");
        const double margin = cone_margin(M, op.cone);
        const double rel = margin / (1.0 + M.frobenius_norm());
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.worst_node = s;
        }
        rep.min_rel_margin = std::min(rep.min_rel_margin, rel);
        if (margin <= 0.0) {
            all_admissible = false;
            continue;
        }
        const double resid = eigenvalue_value(op, std::span<const double>(eigen(M).lambda.data(),
                                                                          static_cast<size_t>(op.n))) -
                             aug.B(x, z, p);
        rep.min_residual = std::min(rep.min_residual, resid);
        rep.max_residual = std::max(rep.max_residual, resid);
    }

    rep.admissible = all_admissible && rep.min_margin > 0.0;
    rep.strictly_admissible = all_admissible && rep.min_rel_margin >= 1e-6;
    if (rep.admissible) {
        rep.subsolution = rep.min_residual >= -1e-9;
        rep.strict_subsolution = rep.strictly_admissible && rep.min_residual > 0.0;
        rep.delta = rep.strict_subsolution ? rep.min_residual : 0.0;
        rep.supersolution = rep.max_residual <= 1e-9;
    }
    return rep;
}

}  // namespace hessfield
