// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "sinet/bits.hpp"
#include "sinet/gadgets.hpp"
#include "sinet/harness.hpp"
#include "sinet/interp.hpp"
#include "sinet/sis.hpp"
#include "sinet/splines.hpp"

using namespace sinet;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int bit_of(const Rational& x, int i) {
    Rational y = x * pow2(i);
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    return mpz_odd_p(f.get_mpz_t()) ? 1 : 0;
}

Rational ipow(Rational b, int e) {
    Rational p = 1;
    while (e-- > 0) p *= b;
    return p;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. extraction nets on every leading pattern with random tails
Outcome bit_extraction() {
    Outcome o;
    const int j = 6;
    const Rational delta = pow2(-8);
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<long> tail(0, (1L << 30) - 1);
    std::vector<Rational> xs;
    for (long lead = 0; lead < (1L << j); ++lead)
        for (int t = 0; t < 8; ++t)
            xs.push_back(Rational(lead) * pow2(-j) + (pow2(-j) - delta) * tail(rng) * pow2(-30));
    for (int r = 1; r <= 3; ++r) {
        ReluNet ex = extract_bits(j, delta, r);
        o.require(ex.width() <= (1UL << (r + 1)) + 1 && ex.depth() <= 3, "extract_bits budget");
        for (const auto& x : xs) {
            RVec got = ex.eval(RVec{x});
            Rational lead = 0;
            for (int i = 1; i <= r; ++i) {
                o.require(got[i - 1] == bit_of(x, i), "extract_bits bit");
                lead += bit_of(x, i) * pow2(r - i);
            }
            o.require(got[r] == x * pow2(r) - lead, "extract_bits tail");
        }
        for (int k = 0; k <= j; ++k) {
            ReluNet sp = split_weighted_bits(j, delta, r, k);
            o.require(sp.width() <= (1UL << (r + 1)) + 3 && sp.depth() <= 2UL * ((j + r - 1) / r) + 1,
                      "split_weighted_bits budget");
            for (const auto& x : xs) {
                Rational hi = 0, lo = 0;
                for (int i = 1; i <= j; ++i) (i <= k ? hi : lo) += bit_of(x, i) * pow2(j - i);
                o.require(sp.eval(RVec{x}) == RVec{hi, lo, x * pow2(j) - hi - lo}, "split_weighted_bits value");
            }
        }
    }
    return o;
}

// 2. select_bit on all patterns and positions
Outcome select_exhaustive() {
    Outcome o;
    for (int K = 1; K <= 10; ++K)
        for (int r = 1; r <= std::min(K, 3); ++r) {
            ReluNet net = select_bit(r, K);
            o.require(net.width() <= (1UL << (r + 1)) + 3 && net.depth() <= 4UL * ((K + r - 1) / r) + 1,
                      "select_bit budget");
            for (long pat = 0; pat < (1L << K); ++pat)
                for (int k = 1; k <= K; ++k) {
                    RVec got = net.eval(RVec{Rational(pat) * pow2(-K), Rational(k)});
                    o.require(got[0] == ((pat >> (K - k)) & 1), "select_bit value");
                }
        }
    return o;
}

// 3. interpolation through point and bit samples
Outcome interpolation() {
    Outcome o;
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<long> coord(-200, 200), val(0, 1 << 16);
    std::bernoulli_distribution coin(0.5);
    for (int N = 1; N <= 4; ++N)
        for (int L = 1; L <= 4; ++L)
            for (int d = 1; d <= 2; ++d) {
                const std::size_t cap = static_cast<std::size_t>(N) * N * L;
                for (std::size_t n : {cap, std::max<std::size_t>(1, cap / 2 + 1)}) {
                    std::set<RVec> seen;
                    std::vector<RVec> pts;
                    while (pts.size() < n) {
                        RVec p(d);
                        for (auto& c : p) c = frac(coord(rng), 8);
                        if (seen.insert(p).second) pts.push_back(p);
                    }
                    SampleSet s{pts, {}};
                    for (std::size_t i = 0; i < n; ++i) s.values.push_back(frac(val(rng), 32));
                    ReluNet f = fit_point_samples(s, N, L);
                    o.require(f.width() <= 4UL * N + 4 && f.depth() <= L + 2UL, "fit_point_samples budget");
                    for (std::size_t i = 0; i < n; ++i)
                        o.require(f.eval(s.points[i])[0] == s.values[i], "fit_point_samples value");

                    BitTable t{pts, {}};
                    for (std::size_t i = 0; i < n; ++i) {
                        std::vector<int> row(L);
                        for (auto& b : row) b = coin(rng);
                        t.bits.push_back(row);
                    }
                    ReluNet b = fit_bit_samples(t, N, L);
                    o.require(b.width() <= 4UL * N + 5 && b.depth() <= 5UL * L + 2, "fit_bit_samples budget");
                    for (std::size_t i = 0; i < n; ++i)
                        for (int k = 1; k <= L; ++k) {
                            RVec x = pts[i];
                            x.emplace_back(k);
                            o.require(b.eval(x)[0] == t.bits[i][k - 1], "fit_bit_samples value");
                        }
                }
            }
    return o;
}

// 4. gadget bounds
Outcome gadgets() {
    Outcome o;
    for (int s = 1; s <= 6; ++s) {
        ReluNet sq = square_approx(s);
        Rational worst = 0;
        for (int i = 0; i < 4096; ++i) {
            const Rational x = frac(i, 4095);
            worst = std::max(worst, Rational(abs(sq.eval(RVec{x})[0] - x * x)));
        }
        o.require(worst <= pow2(-2 * s - 2), "square_approx bound s=" + std::to_string(s));
    }

    ReluNet gate = binary_gate();
    for (int a = 0; a <= 1; ++a)
        for (int i = -2000; i <= 2000; ++i) {
            const Rational b = frac(i, 1000);
            o.require(gate.eval(RVec{Rational(a), b})[0] == a * b, "binary_gate value");
        }

    ReluNet mid = mid3();
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<long> u(-(1L << 16), 1L << 16);
    for (int i = 0; i < 100000; ++i) {
        RVec t{frac(u(rng), 256), frac(u(rng), 256), frac(u(rng), 256)};
        if (i % 10 == 0) t[2] = t[i % 20 == 0 ? 0 : 1];  // ties
        RVec sorted = t;
        std::sort(sorted.begin(), sorted.end());
        o.require(mid.eval(t)[0] == sorted[1], "mid3 value");
    }

    for (int k = 2; k <= 4; ++k)
        for (int N = 1; N <= 2; ++N)
            for (int L = 1; L <= 2; ++L) {
                ReluNet phi = product_approx(k, N, L);
                const Rational bound = 9 * (k - 1) / ipow(Rational(N + 1), 7 * k * L);
                o.require(phi.width() <= 9UL * N + k + 7 && phi.depth() <= 7UL * k * (k - 1) * L,
                          "product_approx budget");
                const int per = k == 2 ? 17 : k == 3 ? 7 : 5;
                std::vector<int> idx(k, 0);
                while (true) {
                    RVec x(k);
                    Rational prod = 1;
                    bool zero = false;
                    for (int m = 0; m < k; ++m) {
                        // uneven spacing so points are not all dyadic
                        x[m] = frac(idx[m] * idx[m] + idx[m], (per - 1) * per);
                        prod *= x[m];
                        zero = zero || idx[m] == 0;
                    }
                    const Rational got = phi.eval(x)[0];
                    o.require(abs(got - prod) <= bound, "product_approx bound k=" + std::to_string(k));
                    if (zero) o.require(sgn(got) == 0, "product_approx zero absorption");
                    int m = k - 1;
                    while (m >= 0 && ++idx[m] == per) idx[m--] = 0;
                    if (m < 0) break;
                }
            }
    return o;
}

// 5. B-spline network bound and support
Outcome bspline_nets() {
    Outcome o;
    for (int k = 3; k <= 4; ++k)
        for (int d = 1; d <= 2; ++d)
            for (int N = 1; N <= 2; ++N) {
                ReluNet net = bspline_net(k, d, N, 1);
                SizeBudget b = bspline_net_budget(k, d, N, 1);
                o.require(audit_budget(net, b), "bspline_net budget");
                const double bound = to_double(bspline_net_error_bound(k, d, N, 1)) + kFloatSlack;
                const int per = d == 1 ? 10000 : 100;
                const double lo = -1.0, hi = k + 2.0;
                double worst = 0.0;
                std::vector<int> idx(d, 0);
                while (true) {
                    Vec x(d);
                    for (int m = 0; m < d; ++m) x[m] = lo + (hi - lo) * idx[m] / (per - 1);
                    worst = std::max(worst, std::abs(net.eval(x)[0] - bspline_d(k, x)));
                    int m = d - 1;
                    while (m >= 0 && ++idx[m] == per) idx[m--] = 0;
                    if (m < 0) break;
                }
                o.require(worst <= bound, "bspline_net bound k=" + std::to_string(k) + " d=" + std::to_string(d));
                // exact zero off [0, k+1]^d
                for (int i = 0; i <= 40; ++i) {
                    const Rational out = i < 20 ? frac(-i - 1, 8) : Rational(k + 1) + frac(i - 19, 8);
                    RVec x(d, frac(3, 2));
                    x[i % d] = out;
                    o.require(sgn(net.eval(x)[0]) == 0, "bspline_net support");
                }
            }
    return o;
}

SisFunction random_sis(std::mt19937_64& rng, int k, int d, int j, int den_bits) {
    SisFunction g;
    g.j = j;
    g.generator = bspline_generator(k, d);
    const long den = 1L << den_bits;
    std::uniform_int_distribution<long> c(-den + 1, den - 1);
    const long lo = -(k - 1), hi = (1L << j) - 1;
    IVec n(d, lo);
    while (true) {
        g.coeffs[n] = frac(c(rng), den);
        int m = d - 1;
        while (m >= 0 && ++n[m] > hi) n[m--] = lo;
        if (m < 0) break;
    }
    return g;
}

ApproxParams desk_params(int j, const Rational& eps, const Rational& delta) {
    ApproxParams p;
    p.r = p.s = 2;
    p.r_tilde = p.s_tilde = 4;
    p.epsilon = eps;
    p.delta = delta;
    (void)j;
    return p;
}

// 6 and 7 share their configurations.
Outcome sis_networks(bool uniform) {
    Outcome o;
    std::mt19937_64 rng(uniform ? 707 : 606);
    GeneratorNet hat = bspline_phi0(2, 1, 1, 1);
    for (int j = 3; j <= 4; ++j)
        for (int e : {4, 6}) {
            const Rational eps = pow2(-e);
            const ApproxParams p = desk_params(j, eps, pow2(-j - 2));
            const std::size_t inner = std::max<std::size_t>(7 * 4 * 4, hat.net.width());
            SisFunction g = random_sis(rng, 2, 1, j, 40);
            ReluNet qn = build_q_net(g, p, hat.net, hat.error);
            o.require(qn.width() <= 2 * (inner + 4) && qn.depth() <= 14UL * 4 * 4 + hat.net.depth(),
                      "Q-net budget");
            const double c_phi = static_cast<double>(g.generator.C());
            o.require(c_phi == 2, "C_phi");
            if (!uniform) {
                double worst = 0.0;
                QDomain dom(j, p.delta, 1);
                for (const auto& x : dom.axis_grid(12))
                    worst = std::max(worst, std::abs(qn.eval(Vec{to_double(x)})[0] - eval_sis(g, Vec{to_double(x)})));
                o.require(worst <= 3 * c_phi * to_double(eps) + kFloatSlack, "Q-net error j=" + std::to_string(j));

                // coefficients with e - 1 fractional bits need e bits of c/2 + 1/2
                SisFunction dy = random_sis(rng, 2, 1, j, e - 1);
                ReluNet dn = build_q_net(dy, p, hat.net, hat.error);
                for (const auto& x : dom.axis_grid(j + 5))
                    o.require(dn.eval(RVec{x})[0] == eval_sis(dy, RVec{x}), "exact Q-net value");
            } else {
                ReluNet un = build_uniform_net(g, p, hat.net, hat.error);
                o.require(un.depth() == qn.depth() + 2, "uniform depth is Q depth + 2d");
                o.require(un.width() <= 3 * 2 * 2 * (inner + 4), "uniform width budget");
                double worst = 0.0;
                for (int i = 0; i <= 10000; ++i) {
                    const double x = i / 10000.0;
                    worst = std::max(worst, std::abs(un.eval(Vec{x})[0] - eval_sis(g, Vec{x})));
                }
                // every gap point at a finer dyadic level, and 1
                for (long i = 0; i <= (1L << (j + 6)); ++i) {
                    const double x = std::ldexp(static_cast<double>(i), -(j + 6));
                    worst = std::max(worst, std::abs(un.eval(Vec{x})[0] - eval_sis(g, Vec{x})));
                }
                o.require(worst <= 6 * c_phi * to_double(eps) + kFloatSlack,
                          "uniform error j=" + std::to_string(j) + " eps=2^-" + std::to_string(e));
            }
        }
    return o;
}

// 8. localized sum against the direct sum
Outcome localization() {
    Outcome o;
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> dim(1, 2), lev(2, 4), order(1, 4);
    std::uniform_int_distribution<long> num(0, 1L << 40);
    std::uniform_int_distribution<long> den(1, 997);
    for (int f = 0; f < 20; ++f) {
        const int d = dim(rng), j = lev(rng), k = order(rng);
        SisFunction g = random_sis(rng, k, d, j, 24);
        for (int t = 0; t < 10000; ++t) {
            RVec x(d);
            for (auto& c : x) {
                if (t % 4 == 0) {
                    c = frac(static_cast<long>(num(rng) % (1L << j)), 1L << j);  // cell corners
                } else {
                    const long q = den(rng);
                    c = frac(static_cast<long>(num(rng) % q), q);
                }
            }
            if (localize(g, x) != eval_sis(g, x)) {
                std::ostringstream msg;
                msg << "localize differs from eval_sis (k=" << k << " d=" << d << " j=" << j << " x=";
                for (const auto& c : x) msg << c << ' ';
                msg << ')';
                o.require(false, msg.str());
            }
        }
    }
    return o;
}

// 9. quasi-interpolation
Outcome quasi_interpolation() {
    Outcome o;
    for (int k = 2; k <= 4; ++k) {
        for (int e = 0; e < k; ++e) {
            auto mono = [e](const Vec& x) { return std::pow(x[0], e); };
            SisFunction g = quasi_interpolate(mono, 4, {k, 1});
            for (int i = 0; i <= 1000; ++i) {
                const Vec x{0.25 + 0.5 * i / 1000.0};
                o.require(std::abs(eval_sis(g, x) - mono(x)) <= 1e-10, "1-D reproduction k=" + std::to_string(k));
            }
        }
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                auto mono = [a, b](const Vec& x) { return std::pow(x[0], a) * std::pow(x[1], b); };
                SisFunction g = quasi_interpolate(mono, 3, {k, 2});
                for (int i = 0; i <= 20; ++i)
                    for (int l = 0; l <= 20; ++l) {
                        const Vec x{0.25 + 0.5 * i / 20.0, 0.25 + 0.5 * l / 20.0};
                        o.require(std::abs(eval_sis(g, x) - mono(x)) <= 1e-10, "2-D reproduction");
                    }
            }
    }
    auto wave = [](const Vec& x) { return std::sin(2 * std::numbers::pi * x[0]); };
    RateFit fit = rate_experiment(wave, {3, 1}, {4, 5, 6, 7});
    o.require(fit.verdict == "fit" && fit.slope <= -2.5, "sin slope " + fmt(fit.slope));
    if (o.pass) o.detail = "slope " + fmt(fit.slope);
    return o;
}

// 10. rate_compose branches
Outcome compose_rates() {
    Outcome o;
    struct Tuple {
        double alpha, beta;
        int d, N, L;
    };
    std::vector<Tuple> tuples;
    const double alphas[] = {0.25, 0.5, 1.0, 2.0, 3.0};
    const double betas[] = {0.5, 1.0, 2.0, 3.0};
    const int dims[] = {1, 2, 3, 4};
    for (int i = 0; i < 20; ++i) tuples.push_back({alphas[i % 5], betas[(i / 5) % 4], dims[i % 4], 2 + i % 7, 2 + (i * 3) % 5});
    int case1 = 0, case2 = 0;
    for (const auto& t : tuples) {
        const double nl = static_cast<double>(t.N) * t.L;
        const double logs = std::log(t.N) / std::log(2.0) * (std::log(t.L) / std::log(2.0));
        const double order = 2 * t.beta / t.d;
        double want;
        if (t.alpha > order) {
            want = std::exp(-order * std::log(nl / logs));
            ++case1;
        } else if (t.alpha < order) {
            want = std::exp(-t.alpha * std::log(nl));
            ++case2;
        } else {
            want = std::max(std::exp(-order * std::log(nl / logs)), std::exp(-t.alpha * std::log(nl)));
            ++case1;
        }
        const double got = rate_compose(t.alpha, t.beta, t.d, t.N, t.L);
        o.require(std::abs(got - want) <= 1e-12 * want, "rate_compose value");
    }
    // two values worked by hand
    o.require(std::abs(rate_compose(3, 1, 1, 4, 4) - 0.0625) <= 1e-15, "hand case I");
    o.require(std::abs(rate_compose(0.5, 1, 1, 8, 2) - 0.25) <= 1e-15, "hand case II");
    o.require(case1 > 0 && case2 > 0, "tuples cover both branches");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<Outcome()> run;
        double limit_s;  // 0 = no runtime limit
    };
    const std::vector<Criterion> criteria{
        {1, "bit extraction exact, j=6, r=1..3", bit_extraction, 10},
        {2, "select_bit exhaustive, K<=10", select_exhaustive, 30},
        {3, "interpolation exact, (N,L) in {1..4}^2", interpolation, 0},
        {4, "gadget bounds: square, gate, mid3, product", gadgets, 0},
        {5, "B-spline net bound and support", bspline_nets, 0},
        {6, "Q-domain net, d=1, N_2, j in {3,4}", [] { return sis_networks(false); }, 120},
        {7, "uniform net on [0,1], gaps and endpoint", [] { return sis_networks(true); }, 0},
        {8, "localized sum equals direct sum", localization, 0},
        {9, "quasi-interpolation reproduction and rate", quasi_interpolation, 0},
        {10, "rate_compose branches", compose_rates, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            o.pass = false;
            o.detail = "over the " + fmt(c.limit_s) + " s limit";
        }
        std::printf("criterion %2d %s  %s [%.2f s]%s%s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                    o.detail.empty() ? "" : "  ", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
