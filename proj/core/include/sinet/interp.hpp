#pragma once

#include <iosfwd>
#include <vector>

#include "sinet/net.hpp"

namespace sinet {

struct SampleSet {
    std::vector<RVec> points;  // distinct, all of one dimension
    RVec values;               // nonnegative
};

struct BitTable {
    std::vector<RVec> points;
    std::vector<std::vector<int>> bits;  // one row of 0/1 entries per point
};

// Exact interpolant through at most N^2 L samples. Width 4N+4, depth L+2.
ReluNet fit_point_samples(const SampleSet& samples, int N, int L);

// (x, k) -> bits[i][k-1] at every x = points[i], k = 1..L.
// Width 4N+5, depth 5L+2.
ReluNet fit_bit_samples(const BitTable& table, int N, int L);

// Linear functional mapping the points to distinct reals.
RVec separating_functional(const std::vector<RVec>& points);

// CSV with header x_1,...,x_d,b_1,...,b_L.
BitTable read_bit_table_csv(std::istream& in);
void write_bit_table_csv(std::ostream& out, const BitTable& table);

}  // namespace sinet
