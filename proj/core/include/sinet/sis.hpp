#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sinet/interp.hpp"
#include "sinet/net.hpp"

namespace sinet {

using IVec = std::vector<long>;

// Compactly supported generator phi on R^d. phi vanishes unless
// support_lo[m] < x_m < support_hi[m] for every m.
struct Generator {
    std::string name;
    int dim = 1;
    std::function<double(const Vec&)> phi;
    std::function<Rational(const RVec&)> phi_exact;  // optional
    RVec support_lo;
    RVec support_hi;
    Rational sup_norm;

    double operator()(const Vec& x) const { return phi(x); }
    Rational operator()(const RVec& x) const;
    bool has_exact() const { return static_cast<bool>(phi_exact); }

    // {n : phi(. - n) is not identically zero on [0,1)^d}, lexicographic.
    std::vector<IVec> shift_set() const;
    std::size_t C() const { return shift_set().size(); }

    // x -> phi(x + t).
    Generator shifted(const RVec& t) const;
};

struct SisFunction {
    int j = 0;
    std::map<IVec, Rational> coeffs;
    Rational bound_M = 1;
    Generator generator;

    int d() const { return generator.dim; }
    Rational coeff(const IVec& n) const;
    // Throws InvariantError unless |c_n| < M for every n.
    void validate() const;
};

// Direct sum over the active shifts.
double eval_sis(const SisFunction& g, const Vec& x);
Rational eval_sis(const SisFunction& g, const RVec& x);

// 2^j x = m + r with m integer and r in [0,1)^d; x must lie in [0,1)^d.
std::pair<IVec, RVec> m_r_split(const RVec& x, int j);
std::pair<IVec, Vec> m_r_split(const Vec& x, int j);

// sum_{k in shift set} c_{m+k} phi(r - k).
double localize(const SisFunction& g, const Vec& x);
Rational localize(const SisFunction& g, const RVec& x);

// Leading `depth` bits of (c/M)/2 + 1/2 where c = c_{m+shift}, one row per
// m in [0, 2^j - 1]^d (lexicographic).
BitTable coeff_bits(const SisFunction& g, int depth, const IVec& shift = {});

// Truncated reconstruction sum_i 2^{1-i} b_i - 1.
Rational bits_to_coefficient(const std::vector<int>& bits);

// 1 + lo_1 + sum_{m>=2} 2^{sum_{n<m}(j-k_n)} lo_m, where lo_m is the integer
// spelled by low_bits[m] (the j - k_m bits after position k_m).
long q_index(const std::vector<std::vector<int>>& low_bits, const std::vector<int>& split_points, int j, int s);

// k_m for a total of s low bits, spread as evenly as possible with the
// remainder on the leading coordinates. s is capped at j d.
std::vector<int> split_points(int j, int d, int s);

struct ApproxParams {
    int r = 1;
    int s = 1;
    int r_tilde = 1;
    int s_tilde = 1;
    Rational epsilon;
    Rational delta;

    // ceil(log2(1/epsilon)) + 1
    int coefficient_bits() const;
    void validate(int j, int d) const;
};

// Network for x -> c_{m_j(x)+k} phi(r_j(x) - k) on Q(j, delta, d), given phi0
// with sup |phi - phi0| = phi0_err <= epsilon * ||phi||.
ReluNet build_term_net(const SisFunction& g, const IVec& k, const ApproxParams& params, const ReluNet& phi0,
                       const Rational& phi0_err);

// Sum of term nets over the generator's shift set.
ReluNet build_q_net(const SisFunction& g, const ApproxParams& params, const ReluNet& phi0, const Rational& phi0_err);

// Uniform approximant on [0,1]^d via mid-of-three lifts, one per axis.
// Needs delta < 2^-j / 3.
ReluNet build_uniform_net(const SisFunction& g, const ApproxParams& params, const ReluNet& phi0,
                          const Rational& phi0_err);

// Quoted size budgets for the three constructions above.
SizeBudget term_budget(int d, const ApproxParams& params, const ReluNet& phi0);
SizeBudget q_budget(const Generator& gen, const ApproxParams& params, const ReluNet& phi0);
SizeBudget uniform_budget(const Generator& gen, const ApproxParams& params, const ReluNet& phi0);

// Predicted error scale for f = g o h with orders alpha (outer) and beta
// (inner): (NL/(log2 N log2 L))^{-2 beta/d} if alpha >= 2 beta/d, else
// (NL)^{-alpha}. Needs N, L >= 2.
double rate_compose(double alpha, double beta, int d, int N, int L);

// Generators addressable by name in SisFunction JSON ("custom:NAME").
void register_generator(const std::string& name, std::function<Generator(int dim)> factory);
Generator generator_by_name(const std::string& name, int dim);

// {"j":3,"d":1,"M":1.0,"generator":"bspline:k=2","coeffs":[{"n":[0],"c":0.5}]}
SisFunction read_sis_json(const std::string& text);
std::string write_sis_json(const SisFunction& g);

}  // namespace sinet
