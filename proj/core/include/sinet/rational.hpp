#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace sinet {

using Rational = mpq_class;
using RVec = std::vector<Rational>;
using Vec = std::vector<double>;

// n/d in lowest terms. mpq_class(n, d) does not reduce, and GMP arithmetic
// assumes reduced operands.
inline Rational frac(long n, long d) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// 2^e as an exact rational (e may be negative).
Rational pow2(long e);

inline double to_double(const Rational& q) { return q.get_d(); }

// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double v);

// Parses "3/8", "-2", "0.125" or "1e-3" exactly.
Rational parse_rational(const std::string& text);

RVec to_rational(const Vec& v);
Vec to_double(const RVec& v);

// floor(log2(q)) for q > 0.
long floor_log2(const Rational& q);

// Largest power of two not exceeding q (q > 0).
Rational pow2_floor(const Rational& q);

// Smallest power of two not below q (q > 0).
Rational pow2_ceil(const Rational& q);

// Arithmetic mode selected by SINET_MODE (float unless set to "rational").
enum class Mode { Float, Rational };
Mode mode_from_env();

}  // namespace sinet
