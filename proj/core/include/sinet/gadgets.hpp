#pragma once

#include "sinet/net.hpp"

namespace sinet {

struct IndicatorSpec {
    Rational a;
    Rational b;
    Rational delta;
};

// 1 on [a,b], 0 off (a-delta, b+delta), linear ramps between. Width 2, depth 3.
ReluNet soft_indicator(const IndicatorSpec& spec);

// (a, b) -> 4 relu(b/4 + a - 1/2) - 2a, equal to a*b for a in {0,1} and
// b in [-2,2]. Width 2, depth 2.
ReluNet binary_gate();

ReluNet max2();
ReluNet min2();
ReluNet max3();
ReluNet min3();
// Middle value of three reals. Width 10, depth 3.
ReluNet mid3();

// Unit hat 2relu(x) - 4relu(x-1/2) + 2relu(x-1).
ReluNet hat();
// i-fold composition of the hat.
ReluNet teeth(int i);

// x - sum_{i<=s} T_i(x)/4^i on [0,1]. Each hidden layer resolves up to
// `levels_per_layer` teeth levels with 2^levels + 1 ramps.
ReluNet square_approx(int s, int levels_per_layer = 1);

// Polarized product on [0, range]^2 from three square blocks.
ReluNet mul_approx(int s, const Rational& range, int levels_per_layer = 1);

struct ProductPlan {
    int s;                 // teeth levels in every square block
    int levels_per_layer;  // teeth levels per hidden layer
};

// Smallest s with 2^{-2s-2} <= (N+1)^{-7kL}, and floor(log2(3N)) levels per layer.
ProductPlan product_plan(int k, int N, int L);

// Phi_k(x_1..x_k) = Phi_2(Phi_{k-1}(x_1..x_{k-1}), x_k) on [0,1]^k.
ReluNet product_approx(int k, int N, int L);

// chi(x) = relu(1 - relu(-x)) + relu(1 - relu(x - k)) - 1.
ReluNet support_window(int k);

// Exact value of T_i at a rational point (0 outside [0,1]).
Rational teeth_value(int i, Rational x);

}  // namespace sinet
