#include "hessfield/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hessfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double elem_sym_or_one(std::span<const double> lambda, int k) {
    return k == 0 ? 1.0 : elem_sym(lambda, k);
}

// S_k of lambda with entry `excl` removed
double elem_sym_excluding(std::span<const double> lambda, int k, int excl) {
    if (k == 0) return 1.0;
    std::array<double, 3> red{};
    int m = 0;
    for (int i = 0; i < static_cast<int>(lambda.size()); ++i)
        if (i != excl) red[static_cast<size_t>(m++)] = lambda[static_cast<size_t>(i)];
    return elem_sym_or_one(std::span<const double>(red.data(), static_cast<size_t>(m)), k);
}

void require_in_cone(const OperatorSpec& op, std::span<const double> lambda) {
    const double margin = cone_margin(lambda, op.cone);
    if (!(margin > 0.0)) throw NotAdmissibleError(margin);
}

}  // namespace

std::string kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::KHessian: return "k_hessian";
        case OperatorKind::MongeAmpereRoot: return "monge_ampere_root";
        case OperatorKind::LogDet: return "log_det";
        case OperatorKind::Quotient: return "quotient";
        case OperatorKind::TraceSquared: return "trace_squared";
    }
    return "unknown";
}

OperatorSpec OperatorSpec::k_hessian(int k, int n) {
    if (k < 1 || k > n) throw Error(ErrorCode::InvalidCone, "k_hessian order out of range");
    OperatorSpec op;
    op.kind = OperatorKind::KHessian;
    op.n = n;
    op.k = k;
    op.cone = ConeSpec::gamma(k, n);
    op.a0 = 0.0;
    return op;
}

OperatorSpec OperatorSpec::monge_ampere_root(int n) {
    OperatorSpec op;
    op.kind = OperatorKind::MongeAmpereRoot;
    op.n = n;
    op.k = n;
    op.cone = ConeSpec::gamma(n, n);
    op.a0 = 0.0;
    return op;
}

OperatorSpec OperatorSpec::log_det(int n) {
    OperatorSpec op;
    op.kind = OperatorKind::LogDet;
    op.n = n;
    op.k = n;
    op.cone = ConeSpec::gamma(n, n);
    op.a0 = -kInf;
    return op;
}

OperatorSpec OperatorSpec::quotient(int k, int l, int n) {
    if (!(1 <= l && l < k && k <= n)) throw Error(ErrorCode::InvalidCone, "quotient needs 1 <= l < k <= n");
    OperatorSpec op;
    op.kind = OperatorKind::Quotient;
    op.n = n;
    op.k = k;
    op.l = l;
    op.cone = ConeSpec::gamma(k, n);
    op.a0 = 0.0;
    return op;
}

OperatorSpec OperatorSpec::trace_squared(int n) {
    OperatorSpec op;
    op.kind = OperatorKind::TraceSquared;
    op.n = n;
    op.k = 1;
    op.cone = ConeSpec::gamma(1, n);
    op.a0 = 0.0;
    return op;
}

OperatorSpec OperatorSpec::from_name(const std::string& name, int n, int k, int l) {
    if (name == "k_hessian") return k_hessian(k, n);
    if (name == "monge_ampere_root") return monge_ampere_root(n);
    if (name == "log_det") return log_det(n);
    if (name == "quotient") return quotient(k, l, n);
    if (name == "trace_squared") return trace_squared(n);
    throw Error(ErrorCode::ConfigError, "unknown operator kind '" + name + "'");
}

double eigenvalue_value(const OperatorSpec& op, std::span<const double> lambda) {
    switch (op.kind) {
        case OperatorKind::KHessian:
            return std::pow(elem_sym(lambda, op.k), 1.0 / op.k);
        case OperatorKind::MongeAmpereRoot:
            return std::pow(elem_sym(lambda, op.n), 1.0 / op.n);
        case OperatorKind::LogDet: {
            double s = 0.0;
            for (double l : lambda) s += std::log(l);
            return s;
        }
        case OperatorKind::Quotient: {
            const double q = elem_sym(lambda, op.k) / elem_sym(lambda, op.l);
            return std::pow(q, 1.0 / (op.k - op.l));
        }
        case OperatorKind::TraceSquared: {
            const double s = elem_sym(lambda, 1);
            return s * s;
        }
    }
    return 0.0;
}

std::array<double, 3> eigenvalue_grad(const OperatorSpec& op, std::span<const double> lambda) {
    const int n = static_cast<int>(lambda.size());
    std::array<double, 3> g{};
    switch (op.kind) {
        case OperatorKind::KHessian:
        case OperatorKind::MongeAmpereRoot: {
            const int k = (op.kind == OperatorKind::MongeAmpereRoot) ? op.n : op.k;
            const double sk = elem_sym(lambda, k);
            const double scale = std::pow(sk, 1.0 / k - 1.0) / k;
            for (int i = 0; i < n; ++i)
                g[static_cast<size_t>(i)] = scale * elem_sym_excluding(lambda, k - 1, i);
            return g;
        }
        case OperatorKind::LogDet: {
            for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = 1.0 / lambda[static_cast<size_t>(i)];
            return g;
        }
        case OperatorKind::Quotient: {
            const double sk = elem_sym(lambda, op.k);
            const double sl = elem_sym(lambda, op.l);
            const double q = sk / sl;
            const double p = 1.0 / (op.k - op.l);
            const double scale = p * std::pow(q, p - 1.0);
            for (int i = 0; i < n; ++i) {
                const double dq = (elem_sym_excluding(lambda, op.k - 1, i) * sl -
                                   sk * elem_sym_excluding(lambda, op.l - 1, i)) /
                                  (sl * sl);
                g[static_cast<size_t>(i)] = scale * dq;
            }
            return g;
        }
        case OperatorKind::TraceSquared: {
            const double s = elem_sym(lambda, 1);
            for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = 2.0 * s;
            return g;
        }
    }
    return g;
}

double evaluate(const OperatorSpec& op, const SymMat& r) {
    if (r.n != op.n) throw Error(ErrorCode::InvalidMatrix, "matrix/operator dimension mismatch");
    const Spectrum s = eigen(r);
    const std::span<const double> lam(s.lambda.data(), static_cast<size_t>(s.n));
    require_in_cone(op, lam);
    return eigenvalue_value(op, lam);
}

OperatorDerivatives derivatives(const OperatorSpec& op, const SymMat& r) {
    if (r.n != op.n) throw Error(ErrorCode::InvalidMatrix, "matrix/operator dimension mismatch");
    const Spectrum s = eigen(r);
    const std::span<const double> lam(s.lambda.data(), static_cast<size_t>(s.n));
    require_in_cone(op, lam);

    OperatorDerivatives d;
    d.value = eigenvalue_value(op, lam);
    d.eig_grad = eigenvalue_grad(op, lam);

    // symmetrize f_i over (near-)repeated eigenvalues to remove frame ambiguity
    int i = 0;
    while (i < op.n) {
        int j = i + 1;
        while (j < op.n &&
               s.lambda[static_cast<size_t>(j)] - s.lambda[static_cast<size_t>(j) - 1] < 1e-9)
            ++j;
        if (j - i > 1) {
            double avg = 0.0;
            for (int c = i; c < j; ++c) avg += d.eig_grad[static_cast<size_t>(c)];
            avg /= (j - i);
            for (int c = i; c < j; ++c) d.eig_grad[static_cast<size_t>(c)] = avg;
        }
        i = j;
    }

    d.grad = s.reassemble(std::span<const double>(d.eig_grad.data(), static_cast<size_t>(op.n)));
    d.trace_T = 0.0;
    for (int c = 0; c < op.n; ++c) d.trace_T += d.eig_grad[static_cast<size_t>(c)];
    return d;
}

nlohmann::json to_json(const SymMat& m) {
    std::vector<double> entries(m.a.begin(), m.a.begin() + m.storage_size());
    return nlohmann::json{{"n", m.n}, {"entries", entries}};
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json j{{"condition", condition}, {"pass", pass}, {"samples", samples}, {"seed", seed}};
    if (worst_witness) {
        j["worst_witness"] = nlohmann::json{{"matrix", hessfield::to_json(worst_witness->matrix)},
                                            {"value", worst_witness->value},
                                            {"margin", worst_witness->margin}};
    } else {
        j["worst_witness"] = nullptr;
    }
    j["fitted_constants"] = fitted_constants;
    if (!bins.empty()) j["bins"] = bins;
    return j;
}

nlohmann::json F7Report::to_json() const {
    return nlohmann::json{{"condition", "F7"},  {"delta0", delta0},   {"delta1", delta1},
                          {"pass", pass},       {"vacuous", vacuous}, {"samples_used", samples_used}};
}

ConeSampler::ConeSampler(ConeSpec cone, std::uint64_t seed, double box)
    : cone_(cone), rng_(seed), box_(box) {
    cone_.validate();
}

SymMat ConeSampler::next(long max_rejections) {
    const int n = cone_.n;
    for (long attempt = 0; attempt < max_rejections; ++attempt) {
        std::array<double, 3> lam{};
        for (int i = 0; i < n; ++i) lam[static_cast<size_t>(i)] = rng_.uniform(-box_, box_);
        if (cone_margin(std::span<const double>(lam.data(), static_cast<size_t>(n)), cone_) <= 0.0)
            continue;
        // conjugate by a random rotation
        if (n == 2) {
            const double th = rng_.uniform(0.0, 2.0 * 3.14159265358979323846);
            const double c = std::cos(th), s = std::sin(th);
            SymMat out(2);
            out.at(0, 0) = c * c * lam[0] + s * s * lam[1];
            out.at(0, 1) = c * s * (lam[0] - lam[1]);
            out.at(1, 1) = s * s * lam[0] + c * c * lam[1];
            return out;
        }
        std::array<double, 4> q{rng_.normal(), rng_.normal(), rng_.normal(), rng_.normal()};
        double nq = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (nq == 0.0) continue;
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
                for (int c = 0; c < 3; ++c) s += Q[i][c] * lam[static_cast<size_t>(c)] * Q[j][c];
                out.at(i, j) = s;
            }
        return out;
    }
    throw Error(ErrorCode::InsufficientSamples, "cone rejection sampling exhausted");
}

SymMat ConeSampler::unit_direction() {
    SymMat m(cone_.n);
    for (int i = 0; i < cone_.n; ++i)
        for (int j = i; j < cone_.n; ++j) m.at(i, j) = rng_.normal();
    const double nrm = m.frobenius_norm();
    if (nrm > 0.0) m *= 1.0 / nrm;
    return m;
}

namespace {

// Shrinks the smallest eigenvalue until the cone margin hits zero; returns the
// boundary eigenvalues. The ray stays in the sample's eigenframe.
std::array<double, 3> shrink_to_boundary(std::span<const double> lambda, const ConeSpec& cone) {
    std::array<double, 3> lam{};
    std::copy(lambda.begin(), lambda.end(), lam.begin());
    const auto margin_at = [&](double shift) {
        std::array<double, 3> t = lam;
        t[0] -= shift;
        return cone_margin(std::span<const double>(t.data(), lambda.size()), cone);
    };
    double hi = 1.0;
    while (margin_at(hi) > 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (margin_at(mid) > 0.0 ? lo : hi) = mid;
    }
    lam[0] -= hi;
    return lam;
}

}  // namespace

ConditionReport check_F1_F2_F3(const OperatorSpec& op, int samples, std::uint64_t seed) {
    ConditionReport rep;
    rep.condition = "F1_F2_F3";
    rep.samples = samples;
    rep.seed = seed;
    ConeSampler sampler(op.cone, seed);

    double f1_min = kInf;
    double f2_max = -kInf;
    std::optional<WitnessSample> worst;

    for (int s = 0; s < samples; ++s) {
        const SymMat r = sampler.next();
        const OperatorDerivatives d = derivatives(op, r);

        // F1: min eigenvalue of F_r equals the smallest f_i
        double fmin = kInf;
        for (int i = 0; i < op.n; ++i) fmin = std::min(fmin, d.eig_grad[static_cast<size_t>(i)]);
        if (fmin < f1_min) {
            f1_min = fmin;
            worst = WitnessSample{r, d.value, cone_margin(r, op.cone)};
        }

        // F2: centered second difference along a random direction
        const double t = 1e-3;
        for (int attempt = 0; attempt < 16; ++attempt) {
            const SymMat eta = sampler.unit_direction();
            SymMat rp = r;
            rp += t * SymMat(eta);
            SymMat rm = r;
            rm -= t * SymMat(eta);
            if (cone_margin(rp, op.cone) <= 0.0 || cone_margin(rm, op.cone) <= 0.0) continue;
            const double second = (evaluate(op, rp) - 2.0 * d.value + evaluate(op, rm)) / (t * t);
            if (second > f2_max) {
                f2_max = second;
                if (second > 1e-6) worst = WitnessSample{r, d.value, cone_margin(r, op.cone)};
            }
            break;
        }
    }

    // F3: decay to a0 along rays toward the cone boundary, divergence along +sI
    const bool finite_a0 = std::isfinite(op.a0);
    bool f3_pass = true;
    double f3_worst_gap = 0.0;
    const int rays = std::min(samples, 50);
    for (int s = 0; s < rays; ++s) {
        const SymMat r = sampler.next();
        const Spectrum sp = eigen(r);
        std::array<double, 3> lam = {sp.lambda[0], sp.lambda[1], sp.lambda[2]};
        const std::span<const double> lam_span(lam.data(), static_cast<size_t>(op.n));
        const double F0 = eigenvalue_value(op, lam_span);
        const auto lam_b = shrink_to_boundary(lam_span, op.cone);

        double last = F0;
        bool monotone = true;
        for (int m = 1; m <= 40; ++m) {
            std::array<double, 3> lt = lam_b;
            lt[0] = lam_b[0] + std::ldexp(lam[0] - lam_b[0], -m);
            const std::span<const double> lt_span(lt.data(), static_cast<size_t>(op.n));
            if (cone_margin(lt_span, op.cone) <= 0.0) break;  // rounding crossed the boundary
            const double v = eigenvalue_value(op, lt_span);
            if (v > last + 1e-10 * (1.0 + std::abs(last))) monotone = false;
            last = v;
        }
        if (!monotone) f3_pass = false;
        if (finite_a0) {
            const double gap = (last - op.a0) / std::max(1.0, F0 - op.a0);
            f3_worst_gap = std::max(f3_worst_gap, gap);
            if (gap > 1e-3) f3_pass = false;
        } else {
            if (!(last <= F0 - 10.0)) f3_pass = false;
        }

        // divergence to +infinity along r + s I
        double prev = F0;
        bool grows = true;
        for (int m = 2; m <= 20; m += 2) {
            std::array<double, 3> lt = lam;
            const double shift = std::ldexp(1.0, m);
            for (int i = 0; i < op.n; ++i) lt[static_cast<size_t>(i)] += shift;
            const double v =
                eigenvalue_value(op, std::span<const double>(lt.data(), static_cast<size_t>(op.n)));
            if (v < prev) grows = false;
            prev = v;
        }
        if (!grows || !(prev >= F0 + 10.0)) f3_pass = false;
    }

    const bool f1_pass = f1_min > 0.0;
    const bool f2_pass = f2_max <= 1e-6;
    rep.pass = f1_pass && f2_pass && f3_pass;
    rep.worst_witness = worst;
    rep.fitted_constants = {{"f1_min_grad_eig", f1_min},
                            {"f2_max_second_diff", f2_max},
                            {"f3_worst_rel_gap", f3_worst_gap},
                            {"f1_pass", f1_pass ? 1.0 : 0.0},
                            {"f2_pass", f2_pass ? 1.0 : 0.0},
                            {"f3_pass", f3_pass ? 1.0 : 0.0}};
    return rep;
}

F7Report check_F7(const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
    F7Report rep;
    if (!(a > op.a0)) throw Error(ErrorCode::ConfigError, "F7 requires a > a0");
    if (op.cone.kind == ConeKind::GammaK && op.cone.k == op.n) {
        // Gamma_n admits no negative eigenvalue
        rep.vacuous = true;
        rep.pass = true;
        return rep;
    }

    ConeSampler sampler(op.cone, seed);
    double min_ratio = kInf;
    std::vector<std::pair<double, double>> found;  // (q, T)
    long rejections = 0;
    const long cap = 100L * samples;
    while (static_cast<int>(found.size()) < samples) {
        if (rejections++ > cap)
            throw Error(ErrorCode::InsufficientSamples,
                        "no samples with F >= a and a negative eigenvalue");
        const SymMat r = sampler.next();
        const Spectrum sp = eigen(r);
        if (sp.lambda[0] >= 0.0) continue;
        const std::span<const double> lam(sp.lambda.data(), static_cast<size_t>(op.n));
        if (eigenvalue_value(op, lam) < a) continue;
        const auto g = eigenvalue_grad(op, lam);
        double T = 0.0;
        for (int i = 0; i < op.n; ++i) T += g[static_cast<size_t>(i)];
        for (int i = 0; i < op.n && sp.lambda[static_cast<size_t>(i)] < 0.0; ++i) {
            const double q = g[static_cast<size_t>(i)];
            found.emplace_back(q, T);
            min_ratio = std::min(min_ratio, q / T);
        }
    }

    rep.samples_used = static_cast<int>(found.size());
    if (min_ratio <= 0.0) {
        rep.pass = false;
        return rep;
    }
    rep.delta1 = 0.5 * min_ratio;
    double d0 = kInf;
    for (const auto& [q, T] : found) d0 = std::min(d0, q - rep.delta1 * T);
    rep.delta0 = d0;
    rep.pass = rep.delta0 > 0.0 && rep.delta1 > 0.0;
    return rep;
}

ConditionReport check_F5inf_and_31(const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
    ConditionReport rep;
    rep.condition = "F5inf_and_3.1";
    rep.samples = samples;
    rep.seed = seed;
    if (!(a > op.a0)) throw Error(ErrorCode::ConfigError, "requires a > a0");

    ConeSampler sampler(op.cone, seed);
    double inf_T = kInf;
    long rejections = 0;
    const long cap = 100L * samples;
    int got = 0;
    while (got < samples) {
        if (rejections++ > cap) throw Error(ErrorCode::InsufficientSamples, "F5 sampling exhausted");
        const SymMat r = sampler.next();
        const Spectrum sp = eigen(r);
        const std::span<const double> lam(sp.lambda.data(), static_cast<size_t>(op.n));
        if (eigenvalue_value(op, lam) <= a) continue;
        const auto g = eigenvalue_grad(op, lam);
        double T = 0.0;
        for (int i = 0; i < op.n; ++i) T += g[static_cast<size_t>(i)];
        inf_T = std::min(inf_T, T);
        ++got;
    }
    const bool f5_pass = inf_T >= 1e-8;

    // growth ratio (r.F_r)/(|lambda_0| T), binned by |lambda_0| magnitude
    const bool can_go_negative = !(op.cone.kind == ConeKind::GammaK && op.cone.k == op.n);
    const int nbins = can_go_negative ? 4 : 1;
    bool any_negative = false;
    double first_bin_min = kInf, last_bin_min = kInf;
    for (int b = 0; b < nbins; ++b) {
        const double scale = std::pow(10.0, b);
        ConeSampler bin_sampler(op.cone, seed + 1000 + static_cast<std::uint64_t>(b), 3.0 * scale);
        double bin_min = kInf;
        double bin_l0 = 0.0;
        int bin_got = 0;
        long bin_rej = 0;
        const int per_bin = std::max(samples / nbins, 10);
        while (bin_got < per_bin && bin_rej++ < cap) {
            const SymMat r = bin_sampler.next();
            const Spectrum sp = eigen(r);
            const std::span<const double> lam(sp.lambda.data(), static_cast<size_t>(op.n));
            if (can_go_negative && !(sp.lambda[0] < 0.0 && std::abs(sp.lambda[0]) >= 0.3 * scale))
                continue;
            if (eigenvalue_value(op, lam) <= a) continue;
            const auto g = eigenvalue_grad(op, lam);
            double T = 0.0, rFr = 0.0;
            for (int i = 0; i < op.n; ++i) {
                T += g[static_cast<size_t>(i)];
                rFr += lam[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
            }
            const double denom = std::max(std::abs(sp.lambda[0]), 1e-300) * T;
            const double ratio = rFr / denom;
            if (ratio < bin_min) {
                bin_min = ratio;
                bin_l0 = sp.lambda[0];
            }
            ++bin_got;
        }
        if (bin_got == 0) continue;
        if (rep.bins.empty()) first_bin_min = bin_min;
        last_bin_min = bin_min;
        if (bin_min < -1e-6) any_negative = true;
        rep.bins.push_back({{"bin_scale", scale},
                            {"min_ratio", bin_min},
                            {"lambda0_at_min", bin_l0},
                            {"samples", static_cast<double>(bin_got)}});
    }

    rep.pass = f5_pass && !any_negative;
    rep.fitted_constants = {{"inf_T", inf_T},
                            {"f5_pass", f5_pass ? 1.0 : 0.0},
                            {"ratio_first_bin", first_bin_min},
                            {"ratio_last_bin", last_bin_min},
                            {"ratio_goes_negative", any_negative ? 1.0 : 0.0}};
    return rep;
}

bool check_eig_monotone(const OperatorSpec& op, int samples, std::uint64_t seed) {
    ConeSampler sampler(op.cone, seed);
    for (int s = 0; s < samples; ++s) {
        const SymMat r = sampler.next();
        const Spectrum sp = eigen(r);
        const std::span<const double> lam(sp.lambda.data(), static_cast<size_t>(op.n));
        const auto g = eigenvalue_grad(op, lam);
        for (int i = 0; i < op.n; ++i)
            for (int j = 0; j < op.n; ++j) {
                if (lam[static_cast<size_t>(i)] >= lam[static_cast<size_t>(j)] + 1e-9 &&
                    !(g[static_cast<size_t>(i)] <= g[static_cast<size_t>(j)] + 1e-9))
                    return false;
            }
    }
    return true;
}

ConditionReport check_2_52(const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
    ConditionReport rep;
    rep.condition = "2.52";
    rep.samples = samples;
    rep.seed = seed;
    if (!(a > op.a0)) throw Error(ErrorCode::ConfigError, "requires a > a0");

    std::vector<double> log_norm, log_sup;
    for (int b = 0; b <= 6; ++b) {
        const double scale = std::pow(10.0, b);
        ConeSampler sampler(op.cone, seed + static_cast<std::uint64_t>(b), scale);
        double sup = 0.0;
        double norm_at_sup = scale;
        int got = 0;
        long rej = 0;
        const int per_bin = std::max(samples / 7, 10);
        while (got < per_bin && rej++ < 100L * per_bin) {
            const SymMat r = sampler.next();
            const Spectrum sp = eigen(r);
            const std::span<const double> lam(sp.lambda.data(), static_cast<size_t>(op.n));
            const double F = eigenvalue_value(op, lam);
            if (F <= a) continue;
            const auto g = eigenvalue_grad(op, lam);
            double T = 0.0, rFr = 0.0;
            for (int i = 0; i < op.n; ++i) {
                T += g[static_cast<size_t>(i)];
                rFr += lam[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
            }
            const double ratio = std::abs(rFr) / (T + std::abs(F));
            if (ratio > sup) {
                sup = ratio;
                norm_at_sup = r.frobenius_norm();
            }
            ++got;
        }
        if (got == 0) continue;
        rep.bins.push_back({{"bin_scale", scale},
                            {"sup_ratio", sup},
                            {"norm_at_sup", norm_at_sup},
                            {"samples", static_cast<double>(got)}});
        if (sup > 0.0) {
            log_norm.push_back(std::log(scale));
            log_sup.push_back(std::log(sup));
        }
    }
    if (rep.bins.empty()) throw Error(ErrorCode::InsufficientSamples, "no bins populated");

    // least-squares slope of log sup vs log scale
    double slope = 0.0;
    if (log_norm.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < log_norm.size(); ++i) {
            mx += log_norm[i];
            my += log_sup[i];
        }
        mx /= static_cast<double>(log_norm.size());
        my /= static_cast<double>(log_norm.size());
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < log_norm.size(); ++i) {
            num += (log_norm[i] - mx) * (log_sup[i] - my);
            den += (log_norm[i] - mx) * (log_norm[i] - mx);
        }
        slope = den > 0.0 ? num / den : 0.0;
    }
    rep.pass = slope <= 0.05;
    rep.fitted_constants = {{"loglog_slope", slope}};
    return rep;
}

}  // namespace hessfield
