// Python bindings for the main operations: small symmetric-matrix algebra,
// operator evaluation and condition certificates, problem solves driven by
// TOML configs, and the barrier verifications.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hessfield/config.hpp"
#include "hessfield/verify.hpp"

namespace py = pybind11;
using namespace hessfield;

namespace {

SymMat mat_from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n < 2 || n > 3) throw Error(ErrorCode::InvalidMatrix, "dimension must be 2 or 3");
    SymMat m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != n)
            throw Error(ErrorCode::InvalidMatrix, "matrix rows must have length n");
        for (int j = i; j < n; ++j) {
            const double a = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
            const double b = rows[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a)))
                throw Error(ErrorCode::InvalidMatrix, "matrix is not symmetric");
            m.at(i, j) = 0.5 * (a + b);
        }
    }
    return m;
}

std::vector<std::vector<double>> mat_to_rows(const SymMat& m) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(m.n),
                                          std::vector<double>(static_cast<size_t>(m.n)));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
    return rows;
}

ConeSpec cone_from_args(const std::string& kind, int k, int n) {
    if (kind == "gamma") return ConeSpec::gamma(k, n);
    if (kind == "pk") return ConeSpec::pk(k, n);
    throw Error(ErrorCode::InvalidCone, "cone kind must be 'gamma' or 'pk'");
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_hessfield, m) {
    m.doc() = "augmented Hessian equation solver and structural-condition certifier";

    py::register_exception<Error>(m, "HessfieldError");

    py::class_<OperatorSpec>(m, "OperatorSpec")
        .def_readonly("n", &OperatorSpec::n)
        .def_readonly("k", &OperatorSpec::k)
        .def_readonly("l", &OperatorSpec::l)
        .def_property_readonly("a0", [](const OperatorSpec& op) { return op.a0; })
        .def_property_readonly("name", &OperatorSpec::name)
        .def("__repr__", [](const OperatorSpec& op) {
            return "<OperatorSpec " + op.name() + " n=" + std::to_string(op.n) + ">";
        });

    m.def("k_hessian", &OperatorSpec::k_hessian, py::arg("k"), py::arg("n"));
    m.def("monge_ampere_root", &OperatorSpec::monge_ampere_root, py::arg("n"));
    m.def("log_det", &OperatorSpec::log_det, py::arg("n"));
    m.def("quotient", &OperatorSpec::quotient, py::arg("k"), py::arg("l"), py::arg("n"));
    m.def("trace_squared", &OperatorSpec::trace_squared, py::arg("n"));

    m.def(
        "eigen",
        [](const std::vector<std::vector<double>>& rows) {
            const Spectrum s = eigen(mat_from_rows(rows));
            std::vector<double> lam(s.lambda.begin(), s.lambda.begin() + s.n);
            std::vector<std::vector<double>> vec;
            for (int k = 0; k < s.n; ++k)
                vec.emplace_back(s.vec[static_cast<size_t>(k)].begin(),
                                 s.vec[static_cast<size_t>(k)].begin() + s.n);
            return py::make_tuple(lam, vec);
        },
        py::arg("matrix"), "eigenvalues (ascending) and orthonormal eigenvectors");

    m.def(
        "elem_sym",
        [](const std::vector<double>& lam, int k) {
            return elem_sym(std::span<const double>(lam.data(), lam.size()), k);
        },
        py::arg("eigenvalues"), py::arg("k"));

    m.def(
        "cone_margin",
        [](const std::vector<std::vector<double>>& rows, const std::string& kind, int k) {
            const SymMat mm = mat_from_rows(rows);
            return cone_margin(mm, cone_from_args(kind, k, mm.n));
        },
        py::arg("matrix"), py::arg("cone") = "gamma", py::arg("k") = 1);

    m.def(
        "min_eig_direction",
        [](const std::vector<std::vector<double>>& rows) {
            const SymMat mm = mat_from_rows(rows);
            const auto [lam, v] = min_eig_direction(mm);
            return py::make_tuple(lam, std::vector<double>(v.begin(), v.begin() + mm.n));
        },
        py::arg("matrix"));

    m.def(
        "evaluate",
        [](const OperatorSpec& op, const std::vector<std::vector<double>>& rows) {
            return evaluate(op, mat_from_rows(rows));
        },
        py::arg("operator"), py::arg("matrix"));

    m.def(
        "derivatives",
        [](const OperatorSpec& op, const std::vector<std::vector<double>>& rows) {
            const auto d = derivatives(op, mat_from_rows(rows));
            py::dict out;
            out["value"] = d.value;
            out["grad"] = mat_to_rows(d.grad);
            out["eig_grad"] = std::vector<double>(d.eig_grad.begin(), d.eig_grad.begin() + op.n);
            out["trace_T"] = d.trace_T;
            return out;
        },
        py::arg("operator"), py::arg("matrix"));

    m.def(
        "check_f1_f2_f3",
        [](const OperatorSpec& op, int samples, std::uint64_t seed) {
            return json_to_py(check_F1_F2_F3(op, samples, seed).to_json());
        },
        py::arg("operator"), py::arg("samples") = 500, py::arg("seed") = 0);

    m.def(
        "check_f7",
        [](const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
            return json_to_py(check_F7(op, a, samples, seed).to_json());
        },
        py::arg("operator"), py::arg("a") = 0.5, py::arg("samples") = 500, py::arg("seed") = 0);

    m.def(
        "check_f5inf_and_31",
        [](const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
            return json_to_py(check_F5inf_and_31(op, a, samples, seed).to_json());
        },
        py::arg("operator"), py::arg("a") = 0.5, py::arg("samples") = 500, py::arg("seed") = 0);

    m.def("check_eig_monotone", &check_eig_monotone, py::arg("operator"),
          py::arg("samples") = 500, py::arg("seed") = 0);

    m.def(
        "check_2_52",
        [](const OperatorSpec& op, double a, int samples, std::uint64_t seed) {
            return json_to_py(check_2_52(op, a, samples, seed).to_json());
        },
        py::arg("operator"), py::arg("a") = 0.5, py::arg("samples") = 500, py::arg("seed") = 0);

    m.def(
        "regularity_check",
        [](const std::string& a_id, const std::vector<double>& params, int n, bool strict,
           int samples, std::uint64_t seed) {
            const auto aug = make_A(a_id, params, n);
            return json_to_py(regularity_check(aug, SampleBox{}, strict, samples, seed).to_json());
        },
        py::arg("a_id"), py::arg("params") = std::vector<double>{}, py::arg("n") = 2,
        py::arg("strict") = false, py::arg("samples") = 500, py::arg("seed") = 0);

    m.def(
        "solve_config",
        [](const std::string& config_path) {
            const RunConfig cfg = RunConfig::from_file(config_path);
            DiscreteProblem dp(cfg.problem);
            auto [u, report] = continuation_solve(dp, cfg.solver);
            py::dict out;
            std::vector<double> xs, ys, vals;
            std::vector<std::string> cls;
            for (long s = 0; s < dp.grid()->slot_count(); ++s) {
                const Vec2 p = dp.grid()->position(s);
                xs.push_back(p.x);
                ys.push_back(p.y);
                vals.push_back(u[s]);
                cls.push_back(dp.grid()->is_interior(s) ? "interior" : "trace");
            }
            out["x"] = xs;
            out["y"] = ys;
            out["value"] = vals;
            out["node_class"] = cls;
            out["report"] = json_to_py(report.to_json());
            auto l21 = verify_lemma21(dp, u);
            out["lemma21"] = json_to_py(l21.to_json());
            if (cfg.problem.exact) {
                double err = 0.0;
                for (long s = 0; s < dp.grid()->interior_count(); ++s)
                    err = std::max(err,
                                   std::abs(u[s] - (*cfg.problem.exact)(dp.grid()->position(s))));
                out["max_error_vs_exact"] = err;
            }
            return out;
        },
        py::arg("config_path"),
        "continuation-solve the configured problem; returns nodes, values and reports");

    m.def(
        "run_config",
        [](const std::string& config_path, const std::string& out_dir, long long seed) {
            RunConfig cfg = RunConfig::from_file(config_path);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            return run_actions(cfg);
        },
        py::arg("config_path"), py::arg("out_dir") = "", py::arg("seed") = -1,
        "execute the configured actions; returns the CLI exit code");
}
