#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "hessfield/config.hpp"
#include "hessfield/verify.hpp"

namespace hessfield {

namespace {

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
    out << j.dump(2) << "\n";
}

SampleBox domain_box(const DomainSpec& d) {
    SampleBox box;
    if (d.kind == DomainKind::Disc) {
        box.x_range = {std::min(d.center.x, d.center.y) - d.radius,
                       std::max(d.center.x, d.center.y) + d.radius};
    } else {
        box.x_range = {std::min(d.x0, d.y0), std::max(d.x1, d.y1)};
    }
    return box;
}

bool wants(const std::vector<std::string>& conds, const std::string& name) {
    for (const auto& c : conds)
        if (c == name) return true;
    return false;
}

double max_error_vs_exact(const DiscreteProblem& dp, const GridFunction& u) {
    double err = 0.0;
    for (long s = 0; s < dp.grid()->interior_count(); ++s)
        err = std::max(err, std::abs(u[s] - (*dp.spec().exact)(dp.grid()->position(s))));
    return err;
}

}  // namespace

int run_actions(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string out = cfg.output_dir + "/";

    bool all_pass = true;
    nlohmann::json report{{"schema_version", cfg.schema_version}};
    nlohmann::json timing = nlohmann::json::object();

    std::optional<DiscreteProblem> dp;
    std::optional<GridFunction> solution;

    for (const std::string& action : cfg.actions) {
        if (action == "solve") {
            dp.emplace(cfg.problem);
            auto [u, solve_report] = continuation_solve(*dp, cfg.solver);
            solution = std::move(u);
            report["solve"] = solve_report.to_json();
            timing["solve_seconds"] = solve_report.wall_time_seconds;
            report["estimates"] = estimate_monitor(*dp, *solution).to_json();
            if (dp->spec().exact) {
                const double err = max_error_vs_exact(*dp, *solution);
                report["solve"]["max_error_vs_exact"] = err;
            }
            if (solve_report.final_residual > cfg.solver.newton_tol || !solve_report.comparison_ok)
                all_pass = false;
            dump_csv(*solution, out + "solution.csv");
        } else if (action == "check-conditions") {
            nlohmann::json conds{{"schema_version", cfg.schema_version}};
            const auto& op = cfg.problem.op;
            const auto seed = cfg.seed;
            if (wants(cfg.conditions, "F1") || wants(cfg.conditions, "F2") ||
                wants(cfg.conditions, "F3")) {
                const auto rep = check_F1_F2_F3(op, cfg.check_samples, seed);
                conds["F1_F2_F3"] = rep.to_json();
                all_pass = all_pass && rep.pass;
            }
            if (wants(cfg.conditions, "F7")) {
                const auto rep = check_F7(op, cfg.check_a, cfg.check_samples, seed + 1);
                conds["F7"] = rep.to_json();
                all_pass = all_pass && rep.pass;
            }
            if (wants(cfg.conditions, "F5") || wants(cfg.conditions, "31")) {
                const auto rep = check_F5inf_and_31(op, cfg.check_a, cfg.check_samples, seed + 2);
                conds["F5inf_and_3.1"] = rep.to_json();
                all_pass = all_pass && rep.pass;
            }
            if (wants(cfg.conditions, "252")) {
                const auto rep = check_2_52(op, cfg.check_a, cfg.check_samples, seed + 3);
                conds["2.52"] = rep.to_json();
                all_pass = all_pass && rep.pass;
            }
            if (wants(cfg.conditions, "monotone")) {
                const bool ok = check_eig_monotone(op, cfg.check_samples, seed + 4);
                conds["eig_monotone"] = {{"condition", "remark_3.1"}, {"pass", ok}};
                all_pass = all_pass && ok;
            }
            if (wants(cfg.conditions, "regular")) {
                const SampleBox box = domain_box(cfg.problem.domain);
                const auto weak = regularity_check(cfg.problem.aug, box, false, cfg.check_samples,
                                                   seed + 5);
                const auto strict = regularity_check(cfg.problem.aug, box, true, cfg.check_samples,
                                                     seed + 5);
                conds["regular"] = weak.to_json();
                conds["regular_strict"] = strict.to_json();
                all_pass = all_pass && weak.pass;
            }
            if (wants(cfg.conditions, "growth")) {
                const SampleBox box = domain_box(cfg.problem.domain);
                nlohmann::json growth = nlohmann::json::object();
                for (const std::string& which : cfg.growth_conditions) {
                    GrowthCondition gc;
                    if (which == "1.14")
                        gc = GrowthCondition::Cond_1_14;
                    else if (which == "1.15")
                        gc = GrowthCondition::Cond_1_15;
                    else if (which == "1.16")
                        gc = GrowthCondition::Cond_1_16;
                    else
                        throw Error(ErrorCode::ConfigError, "unknown growth condition " + which);
                    const auto rep = structure_growth_check(cfg.problem.aug, gc, box, cfg.z_box,
                                                            cfg.check_samples, seed + 6);
                    growth[which] = rep.to_json();
                    all_pass = all_pass && rep.pass;
                }
                conds["growth"] = growth;
            }
            write_json(out + "conditions.json", conds);
        } else if (action == "verify-barriers") {
            if (!solution)
                throw Error(ErrorCode::ConfigError, "verify-barriers requires a prior solve action");
            nlohmann::json barriers{{"schema_version", cfg.schema_version}};
            const auto l21 = verify_lemma21(*dp, *solution);
            barriers["lemma21"] = l21.to_json();
            all_pass = all_pass && l21.pass;
            if (cfg.problem.domain.kind == DomainKind::Disc) {
                const auto l22 = verify_lemma22(*dp, *solution);
                barriers["lemma22"] = l22.to_json();
                all_pass = all_pass && l22.pass;
                if (l22.pass) {
                    const auto phi = verify_phi(*dp, *solution, l22.K, l22.epsilon);
                    barriers["phi"] = phi.to_json();
                    all_pass = all_pass && phi.pass;
                }
            }
            write_json(out + "barriers.json", barriers);
        } else if (action == "boundary-scan") {
            if (!solution)
                throw Error(ErrorCode::ConfigError, "boundary-scan requires a prior solve action");
            const auto identity = boundary_identity_check(*dp, *solution);
            const auto gscan = g_function_scan(*dp, *solution);
            report["boundary"] = {{"identity", identity.to_json()}, {"g_scan", gscan.to_json()}};
            all_pass = all_pass && gscan.pass;
        } else if (action == "sweep-h") {
            if (cfg.sweep_h.size() < 2)
                throw Error(ErrorCode::ConfigError, "sweep-h needs at least two spacings");
            const int rc = run_sweep(cfg, cfg.sweep_h);
            all_pass = all_pass && rc == 0;
        } else {
            throw Error(ErrorCode::ConfigError, "unknown action '" + action + "'");
        }
    }

    write_json(out + "report.json", report);
    write_json(out + "timing.json", timing);
    return all_pass ? 0 : 2;
}

int run_sweep(RunConfig cfg, const std::vector<double>& h_list) {
    namespace fs = std::filesystem;
    if (h_list.size() < 2) throw Error(ErrorCode::ConfigError, "sweep needs at least two spacings");
    if (!cfg.problem.exact)
        throw Error(ErrorCode::ConfigError, "sweep needs a manufactured exact solution in config");
    fs::create_directories(cfg.output_dir);

    struct Row {
        double h, err, sup_d2u, sup_du;
    };
    std::vector<Row> rows;
    for (double h : h_list) {
        RunConfig local = cfg;
        local.problem.domain.h = h;
        DiscreteProblem dp(local.problem);
        auto [u, rep] = continuation_solve(dp, local.solver);
        const auto est = estimate_monitor(dp, u);
        rows.push_back({h, max_error_vs_exact(dp, u), est.sup_d2u, est.sup_du});
    }

    // machine-precision errors make log2 ratios meaningless; mark them exact
    const double exact_floor = 1e-7;
    std::ofstream out(cfg.output_dir + "/convergence.csv");
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write convergence.csv");
    out << "h,err_max,order,sup_D2u,sup_Du\n";
    char buf[256];
    for (size_t i = 0; i < rows.size(); ++i) {
        std::string order = "";
        if (i > 0) {
            if (rows[i - 1].err <= exact_floor && rows[i].err <= exact_floor)
                order = "exact";
            else {
                std::snprintf(buf, sizeof buf, "%.6g", std::log2(rows[i - 1].err / rows[i].err));
                order = buf;
            }
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g\n", rows[i].h, rows[i].err,
                      order.c_str(), rows[i].sup_d2u, rows[i].sup_du);
        out << buf;
    }
    return 0;
}

}  // namespace hessfield
