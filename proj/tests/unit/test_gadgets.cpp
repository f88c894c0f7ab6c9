#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sinet/gadgets.hpp"
#include "support.hpp"

using namespace sinet;
using testing_support::eval1;
using testing_support::q;

namespace {

// Sawtooth with 2^{i-1} teeth, written from its periodic form rather than
// by composition.
Rational sawtooth(int i, const Rational& x) {
    if (x < 0 || x > 1) return 0;
    Rational y = x * pow2(i - 1);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    Rational f = y - Rational(fl);
    return f <= frac(1, 2) ? Rational(2 * f) : Rational(2 * (1 - f));
}

// Piecewise linear interpolant of x^2 on the grid of step 2^{-s}.
Rational square_interpolant(int s, const Rational& x) {
    Rational y = x * pow2(s);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    Rational a = Rational(fl) / pow2(s), b = Rational(fl + 1) / pow2(s);
    Rational t = (x - a) * pow2(s);
    return (1 - t) * a * a + t * b * b;
}

}  // namespace

TEST_CASE("soft indicator") {
    Rational d = q("1/64");
    ReluNet f = soft_indicator({q("1/4"), q("1/2"), d});
    CHECK(f.width() == 2);
    CHECK(f.depth() == 3);
    CHECK(eval1(f, RVec{q("3/10")}) == 1);
    CHECK(eval1(f, RVec{q("1/4") - d}) == 0);
    CHECK(eval1(f, RVec{q("1/4") - d / 2}) == q("1/2"));
    CHECK(eval1(f, RVec{q("1/2") + d}) == 0);
    CHECK(eval1(f, RVec{q("1/2")}) == 1);
    for (int i = -200; i <= 300; ++i) {
        Rational y = eval1(f, RVec{frac(i, 256)});
        CHECK(y >= 0);
        CHECK(y <= 1);
    }
    CHECK_THROWS_AS(soft_indicator({1, 0, d}), ValidationError);
    CHECK_THROWS_AS(soft_indicator({0, 1, 0}), ValidationError);
}

TEST_CASE("binary gate") {
    ReluNet g = binary_gate();
    CHECK(g.width() == 2);
    CHECK(g.depth() == 2);
    CHECK(eval1(g, RVec{0, q("17/10")}) == 0);
    CHECK(eval1(g, RVec{1, -2}) == -2);
    CHECK(eval1(g, RVec{1, q("3/10")}) == q("3/10"));
    for (int a = 0; a <= 1; ++a)
        for (int i = -2000; i <= 2000; ++i) {
            Rational b = frac(i, 1000);
            CHECK(eval1(g, RVec{a, b}) == a * b);
            CHECK(std::abs(eval1(g, Vec{double(a), i / 1000.0}) - a * i / 1000.0) <= 1e-15);
        }
}

TEST_CASE("min, max and mid") {
    ReluNet mx = max2(), mn = min2();
    ReluNet mx3 = max3(), mn3 = min3(), md = mid3();
    CHECK(mx3.width() == 6);
    CHECK(mx3.depth() == 3);
    CHECK(mn3.width() == 6);
    CHECK(md.width() <= 14);
    CHECK(md.depth() == 3);
    CHECK(eval1(md, Vec{1, 2, 3}) == 2);
    CHECK(eval1(md, Vec{5, 5, 0}) == 5);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(-40, 40);
    for (int t = 0; t < 1000; ++t) {
        RVec x{frac(pick(rng), 7), frac(pick(rng), 5), frac(pick(rng), 3)};
        if (t % 10 == 0) x[2] = x[0];
        RVec s = x;
        std::sort(s.begin(), s.end());
        CHECK(eval1(md, x) == s[1]);
        CHECK(eval1(mx3, x) == s[2]);
        CHECK(eval1(mn3, x) == s[0]);
        CHECK(eval1(mx, RVec{x[0], x[1]}) == std::max(x[0], x[1]));
        CHECK(eval1(mn, RVec{x[0], x[1]}) == std::min(x[0], x[1]));
    }
}

TEST_CASE("teeth") {
    CHECK(eval1(teeth(1), RVec{q("1/2")}) == 1);
    CHECK(eval1(teeth(2), RVec{q("1/4")}) == 1);
    CHECK(eval1(teeth(2), RVec{q("1/2")}) == 0);
    CHECK(eval1(teeth(3), RVec{q("5/8")}) == 1);
    for (int i = 1; i <= 6; ++i) {
        ReluNet t = teeth(i);
        CHECK(t.width() == 3);
        CHECK(t.depth() == static_cast<std::size_t>(i + 1));
        for (int j = 0; j <= (1 << i); ++j) CHECK(eval1(t, RVec{Rational(j) / pow2(i)}) == j % 2);
        for (int j = -5; j <= 133; ++j) {
            Rational x = frac(j, 128);
            CHECK(eval1(t, RVec{x}) == sawtooth(i, x));
            CHECK(teeth_value(i, x) == sawtooth(i, x));
        }
    }
}

TEST_CASE("square approximation") {
    CHECK(eval1(square_approx(1), RVec{q("1/2")}) == q("1/4"));
    CHECK(eval1(square_approx(3), RVec{0}) == 0);
    for (int s = 1; s <= 6; ++s) {
        for (int m : {1, 2, 3}) {
            ReluNet sq = square_approx(s, m);
            CHECK(sq.depth() == static_cast<std::size_t>((s + m - 1) / m + 1));
            CHECK(sq.width() <= (std::size_t{1} << std::min(s, m)) + 3);
            for (int j = 0; j <= 300; ++j) {
                Rational x = frac(j, 300);
                CHECK(eval1(sq, RVec{x}) == square_interpolant(s, x));
            }
            for (int j = 0; j <= (1 << s); ++j) {
                Rational x = Rational(j) / pow2(s);
                CHECK(eval1(sq, RVec{x}) == x * x);
            }
        }
        ReluNet sq = square_approx(s);
        double worst = 0;
        for (int j = 0; j < 10000; ++j) {
            double x = j / 9999.0;
            worst = std::max(worst, std::abs(eval1(sq, Vec{x}) - x * x));
        }
        CHECK(worst <= std::ldexp(1.0, -2 * s - 2) + 1e-15);
    }
}

TEST_CASE("multiplication") {
    for (int s = 2; s <= 5; ++s) CHECK(eval1(mul_approx(s, 1), RVec{q("1/2"), q("1/2")}) == q("1/4"));
    for (int s = 1; s <= 5; ++s) {
        ReluNet m = mul_approx(s, 1);
        CHECK(eval1(m, RVec{0, q("3/7")}) == 0);
        CHECK(eval1(m, RVec{q("3/7"), 0}) == 0);
        double bound = 6 * std::ldexp(1.0, -2 * s - 2);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                double x = i / 40.0, y = j / 40.0;
                CHECK(std::abs(eval1(m, Vec{x, y}) - x * y) <= bound + 1e-12);
            }
        ReluNet wide = mul_approx(s, 3);
        double wbound = 6 * 9 * std::ldexp(1.0, -2 * s - 2);
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                double x = 3 * i / 20.0, y = 3 * j / 20.0;
                CHECK(std::abs(eval1(wide, Vec{x, y}) - x * y) <= wbound + 1e-12);
            }
    }
}

TEST_CASE("product plan") {
    // 2^{-2s-2} <= (N+1)^{-7kL} with s minimal
    for (int k = 2; k <= 5; ++k)
        for (int N = 1; N <= 4; ++N)
            for (int L = 1; L <= 3; ++L) {
                ProductPlan p = product_plan(k, N, L);
                double need = 7.0 * k * L * std::log2(N + 1.0);
                CHECK(2 * p.s + 2 >= need - 1e-9);
                if (p.s > 1) CHECK(2 * (p.s - 1) + 2 < need + 1e-9);
                CHECK((1 << p.levels_per_layer) <= 3 * N);
                CHECK((1 << (p.levels_per_layer + 1)) > 3 * N);
            }
    CHECK(product_plan(2, 1, 1).s == 6);
}

TEST_CASE("product approximation") {
    for (int k = 2; k <= 4; ++k)
        for (int N = 1; N <= 2; ++N)
            for (int L = 1; L <= 2; ++L) {
                ReluNet phi = product_approx(k, N, L);
                CAPTURE(k);
                CAPTURE(N);
                CAPTURE(L);
                CHECK(phi.input_dim() == static_cast<std::size_t>(k));
                CHECK(phi.width() <= static_cast<std::size_t>(9 * N + k + 7));
                CHECK(phi.depth() <= static_cast<std::size_t>(7 * k * (k - 1) * L));
                Rational bound;
                mpz_class p;
                mpz_ui_pow_ui(p.get_mpz_t(), N + 1, 7 * k * L);
                bound = Rational(9 * (k - 1)) / Rational(p);
                RVec ones(k, 1);
                Rational diff = eval1(phi, ones) - 1;
                CHECK(abs(diff) <= bound);
                RVec x(k);
                for (int t = 0; t < 6; ++t) {
                    Rational prod = 1;
                    for (int i = 0; i < k; ++i) {
                        x[i] = frac((t * 7 + i * 13) % 17, 16);
                        prod *= x[i];
                    }
                    CHECK(abs(eval1(phi, x) - prod) <= bound);
                    x[t % k] = 0;
                    CHECK(eval1(phi, x) == 0);
                }
            }
    CHECK(eval1(product_approx(3, 1, 1), RVec{q("1/2"), 0, q("9/10")}) == 0);
}

TEST_CASE("support window") {
    for (int k = 1; k <= 5; ++k) {
        ReluNet chi = support_window(k);
        CHECK(eval1(chi, RVec{frac(k, 2)}) == 1);
        CHECK(eval1(chi, RVec{q("-3/2")}) == 0);
        CHECK(eval1(chi, RVec{q("-1/2")}) == q("1/2"));
        CHECK(eval1(chi, RVec{Rational(k + 1)}) == 0);
        CHECK(chi.width() == 2);
        CHECK(chi.depth() == 3);
    }
}
