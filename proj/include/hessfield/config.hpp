// Run configuration: a TOML-compatible key/value config format (sections,
// scalars, flat arrays), the RunConfig it populates, and the batch runner.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hessfield/solver.hpp"

namespace hessfield {

// Parsed config values keyed by dotted path ("problem.domain.h"). Supported
// value forms: numbers, strings, booleans, arrays of numbers or strings.
class ConfigTree {
  public:
    using Value = std::variant<double, std::string, bool, std::vector<double>,
                               std::vector<std::string>>;

    static ConfigTree parse_file(const std::string& path);
    static ConfigTree parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> strings_or(const std::string& key,
                                        std::vector<std::string> fallback) const;

  private:
    const Value& at(const std::string& key) const;
    std::map<std::string, Value> values_;
};

struct RunConfig {
    int schema_version = 1;
    ProblemSpec problem;
    SolverConfig solver;
    std::vector<std::string> actions{"solve"};
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    // check-conditions parameters
    int check_samples = 500;
    double check_a = 0.5;
    std::array<double, 2> z_box{-1.0, 1.0};
    std::vector<std::string> growth_conditions{"1.14", "1.15", "1.16"};
    std::vector<std::string> conditions{"F1", "F2",  "F3",      "F7",    "F5",
                                        "31", "252", "monotone", "regular", "growth"};
    std::vector<double> sweep_h;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_tree(const ConfigTree& t);
};

// Executes the configured actions in order; writes solution.csv, report.json,
// conditions.json, barriers.json and timing.json into output_dir.
// Returns 0 when everything passes, 2 on a certificate/solve failure.
int run_actions(const RunConfig& cfg);

// h-refinement study; writes convergence.csv (columns h, err_max, order,
// sup_D2u, sup_Du). Machine-precision errors mark the order column "exact".
int run_sweep(RunConfig cfg, const std::vector<double>& h_list);

}  // namespace hessfield
