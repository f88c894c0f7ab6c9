#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sinet/splines.hpp"
#include "support.hpp"

using namespace sinet;
using testing_support::eval1;
using testing_support::q;

namespace {

double sup_interior(const SisFunction& g, const std::function<double(double)>& f) {
    double worst = 0.0;
    for (int i = 0; i <= 512; ++i) {
        double x = 0.25 + 0.5 * i / 512.0;
        worst = std::max(worst, std::abs(eval_sis(g, Vec{x}) - f(x)));
    }
    return worst;
}

}  // namespace

TEST_CASE("bspline examples") {
    CHECK(bspline(2, Rational(1)) == 1);
    CHECK(bspline_recurrence(2, Rational(1)) == 1);
    CHECK(bspline(1, Rational(0)) == 1);
    CHECK(bspline(1, Rational(1)) == 0);
    CHECK(bspline(3, q("3/2")) == q("3/4"));
    for (int k = 1; k <= 5; ++k) {
        CHECK(bspline(k, Rational(-1)) == 0);
        CHECK(bspline(k, Rational(k)) == 0);
        CHECK(bspline(k, Rational(k + 3)) == 0);
        CHECK(bspline(k, -0.5) == 0.0);
        Rational peak = 0;
        for (int i = -8; i <= 8 * (k + 1); ++i) peak = std::max(peak, bspline(k, frac(i, 8)));
        CHECK(peak <= 1);
        if (k == 2) CHECK(peak == 1);
    }
}

TEST_CASE("power formula agrees with the recurrence") {
    for (int k = 1; k <= 5; ++k) {
        for (int i = -64; i <= 64 * (k + 1); ++i) {
            Rational x = frac(i, 64);
            REQUIRE(bspline(k, x) == bspline_recurrence(k, x));
            CHECK(std::abs(bspline(k, to_double(x)) - to_double(bspline_recurrence(k, x))) <= 1e-12);
        }
    }
}

TEST_CASE("tensor products and partition of unity") {
    CHECK(bspline_d(2, RVec{1, 1}) == 1);
    CHECK(bspline_d(3, RVec{1, -q("1/4")}) == 0);
    CHECK(bspline_d(3, Vec{4.5, 1.0}) == 0.0);
    for (int k = 1; k <= 4; ++k) {
        for (int i = 0; i < 40; ++i) {
            const double x = i / 13.0 - 1.0;
            double s1 = 0.0;
            for (int n = -8; n <= 8; ++n) s1 += bspline(k, x - n);
            CHECK(std::abs(s1 - 1.0) <= 1e-12);
            const double y = 0.37 * i - 3.1;
            double s2 = 0.0;
            for (int a = -8; a <= 8; ++a)
                for (int b = -16; b <= 16; ++b) s2 += bspline_d(k, Vec{x - a, y - b});
            CHECK(std::abs(s2 - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("bspline generator") {
    Generator hat = bspline_generator(2, 1);
    CHECK(hat.name == "bspline:k=2");
    CHECK(hat.sup_norm == 1);
    CHECK(hat.C() == 2);
    CHECK(bspline_generator(3, 1).sup_norm == q("3/4"));
    CHECK(bspline_generator(3, 2).sup_norm == q("9/16"));
    CHECK(bspline_generator(4, 2).C() == 16);
}

TEST_CASE("bspline network") {
    const Rational bound = bspline_net_error_bound(3, 1, 1, 1);
    CHECK(bound == Rational(9 * 512, 2) * pow2(-14));

    ReluNet n = bspline_net(3, 1, 1, 1);
    SizeBudget b = bspline_net_budget(3, 1, 1, 1);
    CHECK(n.width() <= b.width_bound);
    CHECK(n.depth() <= b.depth_bound);
    CHECK(eval1(n, RVec{-5}) == 0);
    CHECK(eval1(n, RVec{5}) == 0);
    CHECK(eval1(n, RVec{4}) == 0);
    CHECK(eval1(n, RVec{-1}) == 0);
    double worst = 0.0;
    for (int i = 0; i <= 1024; ++i) {
        const Rational x = frac(i * 6 - 1024, 1024);  // [-1, 5]
        const Rational y = eval1(n, RVec{x});
        CHECK(sgn(y) >= 0);
        CHECK(y <= 1);
        worst = std::max(worst, std::abs(to_double(y - bspline(3, x))));
    }
    CHECK(worst <= to_double(bound));

    for (int k = 3; k <= 4; ++k)
        for (int d = 1; d <= 2; ++d)
            for (int N = 1; N <= 2; ++N) {
                ReluNet m = bspline_net(k, d, N, 1);
                SizeBudget mb = bspline_net_budget(k, d, N, 1);
                CHECK(m.width() <= mb.width_bound);
                CHECK(m.depth() <= mb.depth_bound);
            }

    ReluNet two = bspline_net(3, 2, 1, 1);
    CHECK(eval1(two, RVec{q("3/2"), 7}) == 0);
    CHECK(eval1(two, RVec{-2, q("1/3")}) == 0);
    CHECK_THROWS_AS(bspline_net(2, 1, 1, 1), ValidationError);
}

TEST_CASE("phi0 certificates") {
    GeneratorNet hat = bspline_phi0(2, 1, 1, 1);
    CHECK(hat.error == 0);
    for (int i = -16; i <= 48; ++i) CHECK(eval1(hat.net, RVec{frac(i, 8)}) == bspline(2, frac(i, 8)));

    GeneratorNet hat2 = bspline_phi0(2, 2, 1, 1);
    for (int i = -4; i <= 12; ++i)
        for (int k = -4; k <= 12; ++k) {
            RVec x{frac(i, 4), frac(k, 4)};
            CHECK(abs(eval1(hat2.net, x) - bspline_d(2, x)) <= hat2.error);
        }
}

TEST_CASE("quasi-interpolant weights") {
    // k = 2 interpolates at the hat peaks
    CHECK(quasi_weights(2) == RVec{0, 1});
    CHECK(quasi_weights(1) == RVec{1});
    for (int k = 1; k <= 5; ++k) {
        RVec w = quasi_weights(k);
        Rational total = 0;
        for (const auto& x : w) total += x;
        CHECK(total == 1);
    }

    // exact reproduction of monomials, checked by synthesizing the spline
    for (int k = 2; k <= 4; ++k) {
        const RVec w = quasi_weights(k);
        for (int e = 0; e < k; ++e) {
            for (int i = 0; i <= 16; ++i) {
                const Rational x = frac(i, 16) * 3 + 2;
                Rational s = 0;
                for (long n = -k - 3; n <= 8; ++n) {
                    Rational c = 0;
                    for (int t = 0; t < k; ++t) {
                        Rational p = 1;
                        for (int r = 0; r < e; ++r) p *= Rational(n + t);
                        c += w[t] * p;
                    }
                    s += c * bspline(k, x - n);
                }
                Rational want = 1;
                for (int r = 0; r < e; ++r) want *= x;
                CHECK(s == want);
            }
        }
    }
}

TEST_CASE("quasi-interpolation") {
    auto one = [](const Vec&) { return 1.0; };
    SisFunction g1 = quasi_interpolate(one, 3, {3, 1});
    CHECK(g1.coeffs.size() == 10);
    for (const auto& [n, c] : g1.coeffs) CHECK(c == 1);
    CHECK(g1.bound_M == 2);

    for (int k = 2; k <= 4; ++k)
        for (int e = 0; e < k; ++e) {
            auto mono = [e](double x) { return std::pow(x, e); };
            SisFunction g = quasi_interpolate([&](const Vec& x) { return mono(x[0]); }, 4, {k, 1});
            CHECK(sup_interior(g, mono) <= 1e-10);
        }

    auto poly2 = [](const Vec& x) { return x[0] * x[1] - 0.5 * x[1]; };
    SisFunction g2 = quasi_interpolate(poly2, 3, {2, 2});
    CHECK(std::abs(eval_sis(g2, Vec{0.3, 0.6}) - poly2({0.3, 0.6})) <= 1e-12);

    auto wave = [](double x) { return std::sin(2 * std::numbers::pi * x); };
    double prev = 0.0;
    for (int j = 5; j <= 7; ++j) {
        SisFunction g = quasi_interpolate([&](const Vec& x) { return wave(x[0]); }, j, {3, 1});
        const double err = std::log2(sup_interior(g, wave));
        if (j > 5) CHECK(std::abs((prev - err) - 3.0) <= 0.5);
        prev = err;
    }
}
