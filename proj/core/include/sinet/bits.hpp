#pragma once

#include <vector>

#include "sinet/net.hpp"

namespace sinet {

// Terminating binary expansion Bin 0.b_1 b_2 ... b_n of a value in [0,1).
class DyadicPoint {
public:
    explicit DyadicPoint(std::vector<int> bits);
    // x must be a dyadic rational in [0,1).
    static DyadicPoint from_value(const Rational& x);

    const std::vector<int>& bits() const { return bits_; }
    // b_i for i >= 1; zero past the stored expansion.
    int bit(std::size_t i) const { return i >= 1 && i <= bits_.size() ? bits_[i - 1] : 0; }
    Rational value() const;

private:
    std::vector<int> bits_;
};

// [0,1)^d with the open slabs (k 2^-j - delta, k 2^-j), 1 <= k < 2^j, removed
// along every axis.
class QDomain {
public:
    QDomain(int j, Rational delta, int d);

    int j() const { return j_; }
    int d() const { return d_; }
    const Rational& delta() const { return delta_; }

    bool contains(const Rational& x) const;
    bool contains(const RVec& x) const;
    // Points i/2^level, 0 <= i < 2^level, that lie in the 1-D domain.
    std::vector<Rational> axis_grid(int level) const;
    // Lebesgue measure of [0,1]^d minus the domain.
    Rational complement_measure() const;

private:
    int j_;
    Rational delta_;
    int d_;
};

// x -> (x_1, ..., x_r, 2^r x - sum_i 2^{r-i} x_i), exact on Q(j, delta, 1).
// Width 2^{r+1}+1, depth 3.
ReluNet extract_bits(int j, const Rational& delta, int r);

// x -> (sum_{i<=k} 2^{j-i} x_i, sum_{k<i<=j} 2^{j-i} x_i, Bin 0.x_{j+1}...),
// exact on Q(j, delta, 1). Width 2^{r+1}+3, depth 2 ceil(j/r) + 1.
ReluNet split_weighted_bits(int j, const Rational& delta, int r, int k);

// (x, k) -> x_k for x = Bin 0.x_1...x_K and integer 1 <= k <= K.
// Width 2^{r+1}+3, depth 4 ceil(K/r) + 1.
ReluNet select_bit(int r, int K);

}  // namespace sinet
