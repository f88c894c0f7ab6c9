#pragma once

#include <functional>

#include "sinet/net.hpp"
#include "sinet/sis.hpp"

namespace sinet {

struct BsplineSpec {
    int k = 2;  // order; support [0,k]
    int d = 1;
};

// Cardinal B-spline N_k from the truncated-power formula. N_1 is the
// indicator of [0,1), so integer shifts of every N_k sum to one.
double bspline(int k, double x);
Rational bspline(int k, const Rational& x);

// Independent oracle: N_k(x) = (x N_{k-1}(x) + (k - x) N_{k-1}(x - 1)) / (k - 1).
Rational bspline_recurrence(int k, const Rational& x);

// Tensor product prod_i N_k(x_i).
double bspline_d(int k, const Vec& x);
Rational bspline_d(int k, const RVec& x);

// N_k^d as a generator named "bspline:k=K", support (0,k)^d and
// sup norm N_k(k/2)^d.
Generator bspline_generator(int k, int d);

// Network approximant of N_k^d for k >= 3; vanishes off [0,k+1]^d.
ReluNet bspline_net(int k, int d, int N, int L);
Rational bspline_net_error_bound(int k, int d, int N, int L);
SizeBudget bspline_net_budget(int k, int d, int N, int L);

struct GeneratorNet {
    ReluNet net;
    Rational error;  // certified sup |N_k^d - net|
};

// phi0 for the SIS constructions. k = 2 uses exact hats (tensorized through
// the product network when d >= 2); k >= 3 uses bspline_net.
GeneratorNet bspline_phi0(int k, int d, int N, int L);
Rational bspline_phi0_error(int k, int d, int N, int L);

// Weights w_0..w_{k-1} of the coefficient functional
// c_n(f) = sum_i w_i f(2^-j (n + i)), exact on polynomials of degree < k.
RVec quasi_weights(int k);

// Coefficients c_n for n in [-(k-1), 2^j - 1]^d, i.e. every shift active on
// [0,1]^d. f must accept points slightly outside the cube. With M = 0 the
// bound is the smallest power of two exceeding max |c_n| (at least 1).
SisFunction quasi_interpolate(const std::function<double(const Vec&)>& f, int j, const BsplineSpec& spec,
                              const Rational& M = 0);

}  // namespace sinet
