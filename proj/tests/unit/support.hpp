#pragma once

#include <random>
#include <string>
#include <vector>

#include "sinet/net.hpp"

namespace testing_support {

using sinet::Rational;
using sinet::ReluNet;

inline Rational q(const std::string& s) { return sinet::parse_rational(s); }

inline Rational eval1(const ReluNet& net, const sinet::RVec& x) { return net.eval(x).at(0); }
inline double eval1(const ReluNet& net, const sinet::Vec& x) { return net.eval(x).at(0); }

// Dense random net with small dyadic coefficients.
inline ReluNet random_net(std::mt19937_64& rng, std::size_t in, const std::vector<std::size_t>& dims) {
    std::uniform_int_distribution<int> coef(-16, 16);
    std::vector<sinet::AffineLayer> layers;
    std::size_t prev = in;
    for (std::size_t rows : dims) {
        std::vector<sinet::RVec> w(rows, sinet::RVec(prev));
        sinet::RVec b(rows);
        for (auto& row : w)
            for (auto& x : row) x = sinet::frac(coef(rng), 8);
        for (auto& x : b) x = sinet::frac(coef(rng), 8);
        layers.push_back(sinet::AffineLayer::dense(w, b));
        prev = rows;
    }
    return ReluNet(in, std::move(layers));
}

}  // namespace testing_support
