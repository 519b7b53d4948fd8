#include "hessfield/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hessfield {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// strips a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw Error(ErrorCode::ConfigError,
                origin + ":" + std::to_string(line) + ": " + msg);
}

bool parse_number(const std::string& tok, double& out) {
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size() && !tok.empty();
}

ConfigTree::Value parse_scalar(const std::string& tok, const std::string& origin, int line) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return tok.substr(1, tok.size() - 2);
    if (tok == "true") return true;
    if (tok == "false") return false;
    double num;
    if (parse_number(tok, num)) return num;
    fail(origin, line, "cannot parse value '" + tok + "'");
}

}  // namespace

ConfigTree ConfigTree::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

ConfigTree ConfigTree::parse_string(const std::string& text, const std::string& origin) {
    ConfigTree tree;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, lineno, "empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        const std::string full = section.empty() ? key : section + "." + key;

        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') fail(origin, lineno, "unterminated array");
            const std::string body = trim(val.substr(1, val.size() - 2));
            std::vector<std::string> toks;
            std::string cur;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                if (c == ',' && !in_str) {
                    toks.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur.push_back(c);
                }
            }
            if (!trim(cur).empty()) toks.push_back(trim(cur));
            if (toks.empty()) {
                tree.values_[full] = std::vector<double>{};
                continue;
            }
            if (toks.front().front() == '"') {
                std::vector<std::string> out;
                for (const auto& t : toks) {
                    const auto v = parse_scalar(t, origin, lineno);
                    if (!std::holds_alternative<std::string>(v))
                        fail(origin, lineno, "mixed array types");
                    out.push_back(std::get<std::string>(v));
                }
                tree.values_[full] = out;
            } else {
                std::vector<double> out;
                for (const auto& t : toks) {
                    double num;
                    if (!parse_number(t, num)) fail(origin, lineno, "non-numeric array entry '" + t + "'");
                    out.push_back(num);
                }
                tree.values_[full] = out;
            }
            continue;
        }
        tree.values_[full] = parse_scalar(val, origin, lineno);
    }
    return tree;
}

const ConfigTree::Value& ConfigTree::at(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigError, "missing config key '" + key + "'");
    return it->second;
}

double ConfigTree::number(const std::string& key) const {
    const auto& v = at(key);
    if (!std::holds_alternative<double>(v))
        throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a number");
    return std::get<double>(v);
}

double ConfigTree::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::string ConfigTree::str(const std::string& key) const {
    const auto& v = at(key);
    if (!std::holds_alternative<std::string>(v))
        throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a string");
    return std::get<std::string>(v);
}

std::string ConfigTree::str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

bool ConfigTree::boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!std::holds_alternative<bool>(v))
        throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a boolean");
    return std::get<bool>(v);
}

std::vector<double> ConfigTree::numbers(const std::string& key) const {
    const auto& v = at(key);
    if (std::holds_alternative<std::vector<double>>(v)) return std::get<std::vector<double>>(v);
    if (std::holds_alternative<double>(v)) return {std::get<double>(v)};
    throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a numeric array");
}

std::vector<double> ConfigTree::numbers_or(const std::string& key,
                                           std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
}

std::vector<std::string> ConfigTree::strings_or(const std::string& key,
                                                std::vector<std::string> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (std::holds_alternative<std::vector<std::string>>(v))
        return std::get<std::vector<std::string>>(v);
    if (std::holds_alternative<std::string>(v)) return {std::get<std::string>(v)};
    throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a string array");
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_tree(ConfigTree::parse_file(path));
}

RunConfig RunConfig::from_tree(const ConfigTree& t) {
    RunConfig cfg;
    cfg.schema_version = static_cast<int>(t.number_or("schema_version", 1));

    const int n = static_cast<int>(t.number_or("problem.n", 2));
    cfg.problem.op = OperatorSpec::from_name(t.str("problem.operator"), n,
                                             static_cast<int>(t.number_or("problem.k", 0)),
                                             static_cast<int>(t.number_or("problem.l", 0)));

    // the admissibility cone is determined by the operator kind; an explicit
    // cone key is accepted only as confirmation of the natural Gamma cone
    if (t.has("problem.cone")) {
        const std::string cone = t.str("problem.cone");
        if (cone != "gamma" && cone != "gamma_k")
            throw Error(ErrorCode::ConfigError,
                        "only the operator's natural Gamma cone is supported");
    }

    cfg.problem.aug =
        make_A(t.str_or("problem.A.id", "zero"), t.numbers_or("problem.A.params", {}), n);
    attach_B(cfg.problem.aug, t.str_or("problem.B.id", "const"),
             t.numbers_or("problem.B.params", {1.0}));
    cfg.problem.z_dependence = cfg.problem.aug.z_dependent;

    const std::string dom = t.str_or("problem.domain.kind", "disc");
    const double h = t.number("problem.domain.h");
    if (dom == "disc") {
        const auto c = t.numbers_or("problem.domain.center", {0.0, 0.0});
        cfg.problem.domain =
            DomainSpec::disc({c.at(0), c.at(1)}, t.number_or("problem.domain.radius", 1.0), h);
    } else if (dom == "rectangle") {
        cfg.problem.domain = DomainSpec::rectangle(
            t.number_or("problem.domain.x0", 0.0), t.number_or("problem.domain.x1", 1.0),
            t.number_or("problem.domain.y0", 0.0), t.number_or("problem.domain.y1", 1.0), h);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown domain kind '" + dom + "'");
    }

    cfg.problem.phi = ScalarField::make(t.str("problem.phi.id"), t.numbers("problem.phi.params"));
    cfg.problem.usub =
        ScalarField::make(t.str("problem.subsolution.id"), t.numbers("problem.subsolution.params"));
    if (t.has("problem.supersolution.id"))
        cfg.problem.usuper = ScalarField::make(t.str("problem.supersolution.id"),
                                               t.numbers("problem.supersolution.params"));
    if (t.has("problem.exact.id"))
        cfg.problem.exact =
            ScalarField::make(t.str("problem.exact.id"), t.numbers("problem.exact.params"));

    cfg.solver.newton_tol = t.number_or("solver.newton_tol", 1e-9);
    cfg.solver.max_newton = static_cast<int>(t.number_or("solver.max_newton", 50));
    cfg.solver.continuation_steps = static_cast<int>(t.number_or("solver.continuation_steps", 10));
    cfg.solver.damping_min = t.number_or("solver.damping_min", 1.0 / 1024.0);
    cfg.solver.adm_margin = t.number_or("solver.adm_margin", 1e-8);
    const std::string lin = t.str_or("solver.linear_solver", "direct_band");
    if (lin == "direct_band")
        cfg.solver.linear_solver = SolverConfig::Linear::DirectBand;
    else if (lin == "iterative_bicg")
        cfg.solver.linear_solver = SolverConfig::Linear::IterativeBicg;
    else
        throw Error(ErrorCode::ConfigError, "unknown linear solver '" + lin + "'");
    cfg.solver.validate();

    cfg.actions = t.strings_or("run.actions", {"solve"});
    cfg.output_dir = t.str_or("run.output_dir", "out");
    cfg.seed = static_cast<std::uint64_t>(t.number_or("run.seed", 0));

    cfg.check_samples = static_cast<int>(t.number_or("check.samples", 500));
    cfg.check_a = t.number_or("check.a", 0.5);
    const auto zb = t.numbers_or("check.z_box", {-1.0, 1.0});
    cfg.z_box = {zb.at(0), zb.at(1)};
    cfg.growth_conditions = t.strings_or("check.growth_conditions", {"1.14", "1.15", "1.16"});
    cfg.conditions = t.strings_or("check.conditions",
                                  {"F1", "F2", "F3", "F7", "F5", "31", "252", "monotone",
                                   "regular", "growth"});
    cfg.sweep_h = t.numbers_or("sweep.h", {});
    return cfg;
}

}  // namespace hessfield
