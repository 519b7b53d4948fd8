// Concrete operators F on Garding cones: evaluation through the symmetric
// eigenvalue function f, matrix derivatives F_r reconstructed in the
// eigenframe, and sampling-based certification of the structural conditions
// F1, F2, F3, F5(inf), F7, the |r.F_r| growth bound and the eigenvalue
// monotonicity of D_i f.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hessfield/rng.hpp"
#include "hessfield/symmat.hpp"
#include "json.hpp"

namespace hessfield {

enum class OperatorKind {
    KHessian,         // F = (S_k)^{1/k} on Gamma_k
    MongeAmpereRoot,  // F = (det)^{1/n} on Gamma_n
    LogDet,           // F = log det on Gamma_n
    Quotient,         // F = (S_k/S_l)^{1/(k-l)} on Gamma_k, l < k
    TraceSquared,     // F = (S_1)^2 on Gamma_1; convex counterexample to F2
};

std::string kind_name(OperatorKind k);

struct OperatorSpec {
    OperatorKind kind = OperatorKind::KHessian;
    int n = 2;
    int k = 1;  // order for KHessian / Quotient numerator
    int l = 0;  // Quotient denominator order
    ConeSpec cone = ConeSpec::gamma(1, 2);
    double a0 = 0.0;  // lower endpoint of F(Gamma); -inf for LogDet

    static OperatorSpec k_hessian(int k, int n);
    static OperatorSpec monge_ampere_root(int n);
    static OperatorSpec log_det(int n);
    static OperatorSpec quotient(int k, int l, int n);
    static OperatorSpec trace_squared(int n);
    static OperatorSpec from_name(const std::string& name, int n, int k = 0, int l = 0);

    std::string name() const { return kind_name(kind); }
};

struct OperatorDerivatives {
    double value = 0.0;
    SymMat grad;                       // F_r = Q diag(f_i) Q^T
    std::array<double, 3> eig_grad{};  // f_i in ascending-eigenvalue order
    double trace_T = 0.0;              // trace(F_r) = sum f_i
};

// f(lambda) for the operator's eigenvalue function; lambda must lie in the cone.
double eigenvalue_value(const OperatorSpec& op, std::span<const double> lambda);
// D_i f(lambda), no degeneracy symmetrization.
std::array<double, 3> eigenvalue_grad(const OperatorSpec& op, std::span<const double> lambda);

double evaluate(const OperatorSpec& op, const SymMat& r);
OperatorDerivatives derivatives(const OperatorSpec& op, const SymMat& r);

// A sampled witness (matrix, F value, cone margin) attached to reports.
struct WitnessSample {
    SymMat matrix;
    double value = 0.0;
    double margin = 0.0;
};

// Statistical certificate for one condition. Serialized schema:
// {condition, pass, samples, seed, worst_witness, fitted_constants} plus an
// optional per-bin table for the growth-style checks.
struct ConditionReport {
    std::string condition;
    bool pass = false;
    int samples = 0;
    std::uint64_t seed = 0;
    std::optional<WitnessSample> worst_witness;
    std::map<std::string, double> fitted_constants;
    std::vector<std::map<std::string, double>> bins;

    nlohmann::json to_json() const;
};

nlohmann::json to_json(const SymMat& m);

// Draws matrices Q diag(lambda) Q^T with lambda uniform in a box, rejected to
// the operator's cone. The certificates are only as strong as this measure.
class ConeSampler {
  public:
    ConeSampler(ConeSpec cone, std::uint64_t seed, double box = 3.0);

    // next matrix with positive cone margin; throws InsufficientSamples after
    // max_rejections consecutive misses
    SymMat next(long max_rejections = 1000000);
    // random symmetric matrix with unit Frobenius norm, no cone constraint
    SymMat unit_direction();
    RngStream& rng() { return rng_; }
    void set_box(double box) { box_ = box; }

  private:
    ConeSpec cone_;
    RngStream rng_;
    double box_;
};

ConditionReport check_F1_F2_F3(const OperatorSpec& op, int samples, std::uint64_t seed);

struct F7Report {
    double delta0 = 0.0;
    double delta1 = 0.0;
    bool pass = false;
    bool vacuous = false;  // cone admits no negative eigenvalue
    int samples_used = 0;

    nlohmann::json to_json() const;
};

F7Report check_F7(const OperatorSpec& op, double a, int samples, std::uint64_t seed);

ConditionReport check_F5inf_and_31(const OperatorSpec& op, double a, int samples, std::uint64_t seed);

bool check_eig_monotone(const OperatorSpec& op, int samples, std::uint64_t seed);

ConditionReport check_2_52(const OperatorSpec& op, double a, int samples, std::uint64_t seed);

}  // namespace hessfield
