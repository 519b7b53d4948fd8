#include "hessfield/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hessfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_disc(const DiscreteProblem& dp, ErrorCode code) {
    if (dp.grid()->domain().kind != DomainKind::Disc)
        throw Error(code, "requires a smooth (disc) boundary");
}

std::vector<double> apply_operator(const Eigen::SparseMatrix<double>& L, const GridFunction& f) {
    Eigen::VectorXd v(f.grid->slot_count());
    for (long s = 0; s < f.grid->slot_count(); ++s) v(s) = f[s];
    const Eigen::VectorXd Lv = L * v;
    std::vector<double> out(static_cast<size_t>(f.grid->slot_count()));
    for (long s = 0; s < f.grid->slot_count(); ++s) out[static_cast<size_t>(s)] = Lv(s);
    return out;
}

// per-interior-node trace(F_r) and the strengthened sum F^{ii}(1+|w_ii|)
struct NodeWeights {
    std::vector<double> T;
    std::vector<double> T_star;
};

NodeWeights node_weights(const DiscreteProblem& dp, const GridFunction& u) {
    NodeWeights w;
    const long n = dp.grid()->interior_count();
    w.T.resize(static_cast<size_t>(n));
    w.T_star.resize(static_cast<size_t>(n));
    for (long s = 0; s < n; ++s) {
        const NodeLinearization nl = node_linearization(dp, u, s);
        w.T[static_cast<size_t>(s)] = nl.T;
        w.T_star[static_cast<size_t>(s)] =
            nl.f[0] * (1.0 + std::abs(nl.lambda[0])) + nl.f[1] * (1.0 + std::abs(nl.lambda[1]));
    }
    return w;
}

// |delta u|^2 on every slot (interior via the extended normal, trace via the
// boundary normal)
GridFunction tangential_sq_field(const GridFunction& u) {
    GridFunction out(u.grid);
    for (long s = 0; s < u.grid->slot_count(); ++s) {
        if (u.grid->is_trace(s) && u.grid->trace(s).corner) {
            out[s] = 0.0;
            continue;
        }
        const Vec2 d = tangential_gradient(u, s);
        out[s] = d.dot(d);
    }
    return out;
}

}  // namespace

std::vector<double> default_K_ladder() {
    std::vector<double> v;
    for (int e = 0; e <= 20; ++e) v.push_back(std::ldexp(1.0, e));
    return v;
}

std::vector<double> default_eps2_ladder() {
    std::vector<double> v;
    for (int e = 1; e <= 20; ++e) v.push_back(std::ldexp(1.0, -e));
    return v;
}

std::vector<double> default_R_ladder() { return {10.0, 100.0, 1000.0, 10000.0}; }

nlohmann::json BarrierCertificate::to_json() const {
    return nlohmann::json{
        {"K", K}, {"epsilon", epsilon}, {"kind", kind}, {"min_node", min_node}, {"pass", pass}};
}

BarrierCertificate verify_lemma21(const DiscreteProblem& dp, const GridFunction& u,
                                  std::span<const double> K_ladder) {
    const std::vector<double> default_ladder = default_K_ladder();
    if (K_ladder.empty()) K_ladder = default_ladder;

    const Grid& grid = *dp.grid();
    const NodeWeights w = node_weights(dp, u);
    const Eigen::SparseMatrix<double> L = assemble_linearized(dp, u, 1.0);

    BarrierCertificate cert;
    cert.kind = "lemma21";
    double best = -kInf;
    for (double K : K_ladder) {
        GridFunction eta(dp.grid());
        for (long s = 0; s < grid.slot_count(); ++s)
            eta[s] = std::exp(K * (dp.subsolution()[s] - u[s]));
        const auto Leta = apply_operator(L, eta);
        double min_ratio = kInf;
        long argmin = -1;
        for (long s = 0; s < grid.interior_count(); ++s) {
            const double ratio = Leta[static_cast<size_t>(s)] / (1.0 + w.T[static_cast<size_t>(s)]);
            if (ratio < min_ratio) {
                min_ratio = ratio;
                argmin = s;
            }
        }
        if (min_ratio > 0.0) {
            cert.K = K;
            cert.epsilon = min_ratio;
            cert.min_node = argmin;
            cert.pass = true;
            return cert;
        }
        if (min_ratio > best) {
            best = min_ratio;
            cert.K = K;
            cert.min_node = argmin;
        }
    }
    cert.epsilon = best;
    cert.pass = false;
    return cert;
}

BarrierCertificate verify_lemma22(const DiscreteProblem& dp, const GridFunction& u,
                                  std::span<const double> K_ladder,
                                  std::span<const double> eps2_ladder) {
    require_disc(dp, ErrorCode::MissingGammaExtension);
    const std::vector<double> dK = default_K_ladder();
    const std::vector<double> dE = default_eps2_ladder();
    if (K_ladder.empty()) K_ladder = dK;
    if (eps2_ladder.empty()) eps2_ladder = dE;

    const Grid& grid = *dp.grid();
    const NodeWeights w = node_weights(dp, u);
    const Eigen::SparseMatrix<double> L = assemble_linearized(dp, u, 1.0);
    const GridFunction delta_sq = tangential_sq_field(u);

    BarrierCertificate cert;
    cert.kind = "lemma22";
    double best = -kInf;
    for (double K : K_ladder) {
        GridFunction eta(dp.grid());
        for (long s = 0; s < grid.slot_count(); ++s)
            eta[s] = std::exp(K * (dp.subsolution()[s] - u[s]));
        const auto Leta = apply_operator(L, eta);
        const auto Ldelta = apply_operator(L, delta_sq);
        for (double eps2 : eps2_ladder) {
            double min_slack = kInf;
            long argmin = -1;
            for (long s = 0; s < grid.interior_count(); ++s) {
                const double lhs =
                    Leta[static_cast<size_t>(s)] + 0.5 * eps2 * Ldelta[static_cast<size_t>(s)];
                const double slack = lhs - eps2 * (1.0 + w.T_star[static_cast<size_t>(s)]);
                if (slack < min_slack) {
                    min_slack = slack;
                    argmin = s;
                }
            }
            if (min_slack >= 0.0) {
                cert.K = K;
                cert.epsilon = eps2;
                cert.min_node = argmin;
                cert.pass = true;
                return cert;
            }
            if (min_slack > best) {
                best = min_slack;
                cert.K = K;
                cert.min_node = argmin;
            }
        }
    }
    cert.epsilon = best;
    cert.pass = false;
    return cert;
}

nlohmann::json PhiReport::to_json() const {
    return nlohmann::json{{"K", K},
                          {"eps2", eps2},
                          {"max_boundary_abs", max_boundary_abs},
                          {"max_interior", max_interior},
                          {"tol_interior", tol_interior},
                          {"mixed_derivative_sup", mixed_derivative_sup},
                          {"worst_node", worst_node},
                          {"pass", pass}};
}

PhiReport verify_phi(const DiscreteProblem& dp, const GridFunction& u, double K, double eps2) {
    // negative K is an injected sign violation and produces a failing report;
    // a missing certificate (K = 0 or eps2 <= 0) is an error
    if (K == 0.0 || !(eps2 > 0.0))
        throw Error(ErrorCode::CertificateMissing, "verify_phi needs a (K, eps2) certificate");
    require_disc(dp, ErrorCode::MissingGammaExtension);

    const Grid& grid = *dp.grid();
    GridFunction diff(dp.grid());
    for (long s = 0; s < grid.slot_count(); ++s) diff[s] = u[s] - dp.subsolution()[s];
    const GridFunction dsq = tangential_sq_field(diff);

    PhiReport rep;
    rep.K = K;
    rep.eps2 = eps2;
    rep.tol_interior = 10.0 * grid.h() * grid.h();

    for (long s = 0; s < grid.interior_count(); ++s) {
        const double phi_val = std::exp(-K * diff[s]) - 1.0 + 0.5 * eps2 * dsq[s];
        if (phi_val > rep.max_interior) {
            rep.max_interior = phi_val;
            rep.worst_node = s;
        }
    }

    // boundary trace: u = usub = phi there, and the trace of the difference
    // vanishes, so Phi must be zero up to rounding; the tangential part is
    // differenced along the boundary cycle
    const auto& cyc = grid.boundary_cycle();
    const long nb = static_cast<long>(cyc.size());
    for (long k = 0; k < nb; ++k) {
        const long b = cyc[static_cast<size_t>(k)];
        const long prev = cyc[static_cast<size_t>((k + nb - 1) % nb)];
        const long next = cyc[static_cast<size_t>((k + 1) % nb)];
        const double arc = (grid.trace(next).pos - grid.trace(prev).pos).norm();
        const double slope = arc > 0.0 ? (diff[next] - diff[prev]) / arc : 0.0;
        const double phi_val = std::exp(-K * diff[b]) - 1.0 + 0.5 * eps2 * slope * slope;
        rep.max_boundary_abs = std::max(rep.max_boundary_abs, std::abs(phi_val));
    }

    // implied mixed-derivative bound: tangential differencing of D_gamma(u-usub)
    std::vector<double> dn(static_cast<size_t>(nb));
    for (long k = 0; k < nb; ++k)
        dn[static_cast<size_t>(k)] = boundary_normal_derivative(diff, cyc[static_cast<size_t>(k)]);
    for (long k = 0; k < nb; ++k) {
        const long prev = (k + nb - 1) % nb;
        const long next = (k + 1) % nb;
        const double arc = (grid.trace(cyc[static_cast<size_t>(next)]).pos -
                            grid.trace(cyc[static_cast<size_t>(prev)]).pos)
                               .norm();
        if (arc > 0.0)
            rep.mixed_derivative_sup =
                std::max(rep.mixed_derivative_sup,
                         std::abs(dn[static_cast<size_t>(next)] - dn[static_cast<size_t>(prev)]) / arc);
    }

    rep.pass = rep.max_boundary_abs <= 1e-10 && rep.max_interior <= rep.tol_interior;
    return rep;
}

nlohmann::json BoundaryIdentityReport::to_json() const {
    return nlohmann::json{{"max_discrepancy", max_discrepancy},
                          {"mean_discrepancy", mean_discrepancy},
                          {"argmax_trace", argmax_trace}};
}

BoundaryIdentityReport boundary_identity_check(const DiscreteProblem& dp, const GridFunction& u) {
    require_disc(dp, ErrorCode::CornerDomain);
    const Grid& grid = *dp.grid();

    GridFunction w(dp.grid());
    for (long s = 0; s < grid.slot_count(); ++s)
        w[s] = u[s] - dp.spec().phi(grid.position(s));

    BoundaryIdentityReport rep;
    double sum = 0.0;
    long count = 0;
    for (long b = grid.interior_count(); b < grid.slot_count(); ++b) {
        const TraceNode& t = grid.trace(b);
        const SymMat H = fd_hessian(w, t.owner);
        const Vec2 tau = t.normal.rot90();
        const double lhs = H(0, 0) * tau.x * tau.x + 2.0 * H(0, 1) * tau.x * tau.y +
                           H(1, 1) * tau.y * tau.y;
        const double rhs = t.curvature * boundary_normal_derivative(w, b);
        const double disc = std::abs(lhs - rhs);
        sum += disc;
        ++count;
        if (disc > rep.max_discrepancy) {
            rep.max_discrepancy = disc;
            rep.argmax_trace = b;
        }
    }
    rep.mean_discrepancy = count > 0 ? sum / static_cast<double>(count) : 0.0;
    return rep;
}

nlohmann::json GScanReport::to_json() const {
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& r : rows)
        rows_j.push_back({{"R", r.R}, {"min_g", r.min_g}, {"max_g", r.max_g}, {"argmin_trace", r.argmin_trace}});
    return nlohmann::json{{"rows", rows_j}, {"monotone_in_R", monotone_in_R}, {"pass", pass}};
}

GScanReport g_function_scan(const DiscreteProblem& dp, const GridFunction& u,
                            std::span<const double> R_ladder) {
    require_disc(dp, ErrorCode::CornerDomain);
    const std::vector<double> dR = default_R_ladder();
    if (R_ladder.empty()) R_ladder = dR;

    const Grid& grid = *dp.grid();
    const auto& aug = dp.spec().aug;
    const auto& op = dp.spec().op;

    // tangential block omega_tt at each boundary node (owner Hessian, O(h))
    std::vector<double> omega, bval;
    std::vector<long> nodes;
    for (long b = grid.interior_count(); b < grid.slot_count(); ++b) {
        const TraceNode& t = grid.trace(b);
        const Vec2 pos = t.pos;
        const Vec2 du = trace_gradient(u, b);
        const SymMat H = fd_hessian(u, t.owner);
        const SymMat M = augmented_hessian(aug, {pos.x, pos.y, 0.0}, u[b], {du.x, du.y, 0.0}, H);
        const Vec2 tau = t.normal.rot90();
        omega.push_back(M(0, 0) * tau.x * tau.x + 2.0 * M(0, 1) * tau.x * tau.y +
                        M(1, 1) * tau.y * tau.y);
        bval.push_back(aug.B({pos.x, pos.y, 0.0}, u[b], {du.x, du.y, 0.0}));
        nodes.push_back(b);
    }

    GScanReport rep;
    std::vector<double> prev_fr(omega.size(), -kInf);
    for (double R : R_ladder) {
        GScanRow row;
        row.R = R;
        row.min_g = kInf;
        row.max_g = -kInf;
        for (size_t i = 0; i < omega.size(); ++i) {
            std::array<double, 2> lam{std::min(omega[i], R), std::max(omega[i], R)};
            const std::span<const double> lam_span(lam.data(), 2);
            double fr;
            if (cone_margin(lam_span, op.cone) > 0.0) {
                fr = eigenvalue_value(op, lam_span);
            } else {
                fr = -kInf;  // tangential block outside the projected cone
            }
            if (fr < prev_fr[i] - 1e-12 * (1.0 + std::abs(fr))) rep.monotone_in_R = false;
            prev_fr[i] = fr;
            const double g = fr - bval[i];
            row.max_g = std::max(row.max_g, g);
            if (g < row.min_g) {
                row.min_g = g;
                row.argmin_trace = nodes[i];
            }
        }
        rep.rows.push_back(row);
    }
    rep.pass = !rep.rows.empty() && rep.rows.back().min_g > 0.0;
    return rep;
}

nlohmann::json EstimateReport::to_json() const {
    return nlohmann::json{{"sup_du", sup_du},
                          {"sup_du_boundary", sup_du_boundary},
                          {"ratio", ratio},
                          {"sup_d2u", sup_d2u},
                          {"alpha", alpha},
                          {"vmax_x", vmax_location.x},
                          {"vmax_y", vmax_location.y},
                          {"vmax_on_boundary", vmax_on_boundary}};
}

EstimateReport estimate_monitor(const DiscreteProblem& dp, const GridFunction& u) {
    const Grid& grid = *dp.grid();
    EstimateReport rep;

    double umin = kInf, umax = -kInf;
    for (long s = 0; s < grid.slot_count(); ++s) {
        umin = std::min(umin, u[s]);
        umax = std::max(umax, u[s]);
    }
    const double osc = umax - umin;
    rep.alpha = osc > 1e-300 ? 1.0 / (2.0 * osc) : 0.0;

    std::vector<double> du_sq(static_cast<size_t>(grid.slot_count()), 0.0);
    for (long s = 0; s < grid.interior_count(); ++s) {
        const Vec2 g = fd_gradient(u, s);
        du_sq[static_cast<size_t>(s)] = g.dot(g);
        rep.sup_du = std::max(rep.sup_du, g.norm());
        const Spectrum sp = eigen(fd_hessian(u, s));
        rep.sup_d2u =
            std::max(rep.sup_d2u, std::max(std::abs(sp.lambda[0]), std::abs(sp.lambda[1])));
    }
    for (long b = grid.interior_count(); b < grid.slot_count(); ++b) {
        if (grid.trace(b).corner) continue;
        const Vec2 g = trace_gradient(u, b);
        du_sq[static_cast<size_t>(b)] = g.dot(g);
        rep.sup_du_boundary = std::max(rep.sup_du_boundary, g.norm());
    }
    rep.ratio = rep.sup_du_boundary > 0.0 ? rep.sup_du / rep.sup_du_boundary : 0.0;

    const double m1 = std::max(rep.sup_du, rep.sup_du_boundary);
    double vmax = -kInf;
    long argmax = -1;
    for (long s = 0; s < grid.slot_count(); ++s) {
        if (grid.is_trace(s) && grid.trace(s).corner) continue;
        const double v = du_sq[static_cast<size_t>(s)] + rep.alpha * m1 * m1 * (u[s] - umin);
        if (v > vmax) {
            vmax = v;
            argmax = s;
        }
    }
    if (argmax >= 0) {
        rep.vmax_location = grid.position(argmax);
        rep.vmax_on_boundary = grid.is_trace(argmax);
    }
    return rep;
}

}  // namespace hessfield
