#include "sinet/splines.hpp"

#include <cmath>

#include "forms.hpp"
#include "sinet/gadgets.hpp"

namespace sinet {

using detail::Form;
using detail::Rows;

namespace {

void check_order(int k) {
    if (k < 1) throw ValidationError("B-spline order must be >= 1");
}

Rational factorial(int n) {
    Rational f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Rational binomial(int n, int r) { return factorial(n) / (factorial(r) * factorial(n - r)); }

Rational power(const Rational& x, int e) {
    Rational p = 1;
    for (int i = 0; i < e; ++i) p *= x;
    return p;
}

ReluNet layers_net(std::size_t input_dim, const std::vector<Rows>& rows) {
    std::vector<AffineLayer> layers;
    for (const auto& r : rows) layers.push_back(r.build());
    return ReluNet(input_dim, std::move(layers));
}

// Solves A x = b exactly; A is square and nonsingular.
RVec solve(std::vector<RVec> a, RVec b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && sgn(a[piv][c]) == 0) ++piv;
        if (piv == n) throw InvariantError("singular system");
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || sgn(a[r][c]) == 0) continue;
            Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    RVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Univariate clamped approximant min(relu(phi~), chi) of N_k.
ReluNet bspline_net_1d(int k, int N, int L) {
    const Rational a = k + 1;
    ReluNet prod = product_approx(k - 1, N, L);

    Rows ramps(1), spread(k + 1);
    for (int l = 0; l <= k; ++l) ramps.push(Form::var(0) - Rational(l));
    for (int l = 0; l <= k; ++l)
        for (int c = 0; c < k - 1; ++c) spread.push(Form::var(l, 1 / a));
    std::vector<ReluNet> copies(k + 1, prod);

    Rows mix(k + 1);
    Form sum;
    const Rational scale = power(a, k - 1) / factorial(k - 1);
    for (int l = 0; l <= k; ++l) sum += Form::var(l, (l % 2 ? -1 : 1) * binomial(k, l) * scale);
    mix.push(sum);

    ReluNet raw = compose({layers_net(1, {ramps, spread}), stack(copies), affine(mix.build())});
    ReluNet lifted = compose(raw, passthrough(1, Sign::Nonneg, 2));
    return compose(parallel({lifted, support_window(k)}, Pad::Nonneg), min2());
}

ReluNet exact_hat() {
    Rows l1(1), out(3);
    l1.push(Form::var(0));
    l1.push(Form::var(0) - Rational(1));
    l1.push(Form::var(0) - Rational(2));
    out.push(Form::var(0) - Form::var(1, 2) + Form::var(2));
    return layers_net(1, {l1, out});
}

ReluNet tensorize(const ReluNet& univariate, int d, int N, int L) {
    if (d == 1) return univariate;
    std::vector<ReluNet> axes(d, univariate);
    return compose(stack(axes), product_approx(d, N, L));
}

}  // namespace

double bspline(int k, double x) {
    check_order(k);
    if (k == 1) return x >= 0.0 && x < 1.0 ? 1.0 : 0.0;
    if (!(x > 0.0) || !(x < k)) return 0.0;
    double sum = 0.0, binom = 1.0;
    for (int l = 0; l <= k && l < x; ++l) {
        sum += (l % 2 ? -binom : binom) * std::pow(x - l, k - 1);
        binom = binom * (k - l) / (l + 1);
    }
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i;
    return sum / fact;
}

Rational bspline(int k, const Rational& x) {
    check_order(k);
    if (k == 1) return sgn(x) >= 0 && x < 1 ? Rational(1) : Rational(0);
    if (sgn(x) <= 0 || x >= k) return 0;
    Rational sum = 0;
    for (int l = 0; l <= k && x > l; ++l) {
        Rational t = binomial(k, l) * power(x - l, k - 1);
        if (l % 2) sum -= t;
        else sum += t;
    }
    return sum / factorial(k - 1);
}

Rational bspline_recurrence(int k, const Rational& x) {
    check_order(k);
    if (k == 1) return sgn(x) >= 0 && x < 1 ? Rational(1) : Rational(0);
    Rational v = (x * bspline_recurrence(k - 1, x) + (k - x) * bspline_recurrence(k - 1, x - 1)) / (k - 1);
    return v;
}

double bspline_d(int k, const Vec& x) {
    double p = 1.0;
    for (double xi : x) {
        p *= bspline(k, xi);
        if (p == 0.0) break;
    }
    return p;
}

Rational bspline_d(int k, const RVec& x) {
    Rational p = 1;
    for (const auto& xi : x) {
        p *= bspline(k, xi);
        if (sgn(p) == 0) break;
    }
    return p;
}

Generator bspline_generator(int k, int d) {
    check_order(k);
    if (d < 1) throw ValidationError("dimension must be >= 1");
    Generator g;
    g.name = "bspline:k=" + std::to_string(k);
    g.dim = d;
    g.phi = [k](const Vec& x) { return bspline_d(k, x); };
    g.phi_exact = [k](const RVec& x) { return bspline_d(k, x); };
    g.support_lo.assign(d, Rational(0));
    g.support_hi.assign(d, Rational(k));
    // N_k peaks at k/2; N_1 is constant on its support
    g.sup_norm = power(bspline(k, Rational(k) / 2), d);
    return g;
}

ReluNet bspline_net(int k, int d, int N, int L) {
    if (k < 3) throw ValidationError("bspline_net needs k >= 3");
    if (d < 1 || N < 1 || L < 1) throw ValidationError("bspline_net needs d, N, L >= 1");
    return tensorize(bspline_net_1d(k, N, L), d, N, L);
}

Rational bspline_net_error_bound(int k, int d, int N, int L) {
    const Rational base = N + 1;
    Rational inner = 9 * d * power(Rational(2 * k + 2), k) / factorial(k - 1) / power(base, 7 * (k - 1) * L);
    Rational outer = Rational(9 * (d - 1)) / power(base, 7 * d * L);
    return inner + outer;
}

SizeBudget bspline_net_budget(int k, int d, int N, int L) {
    return SizeBudget(static_cast<std::size_t>(d) * (k + 1) * (9 * (N + 1) + k),
                      7UL * (static_cast<std::size_t>(k) * k + static_cast<std::size_t>(d) * d) * L);
}

Rational bspline_phi0_error(int k, int d, int N, int L) {
    if (k < 2) throw ValidationError("no network generator for k = 1");
    if (k == 2) return Rational(9 * (d - 1)) / power(Rational(N + 1), 7 * d * L);
    return bspline_net_error_bound(k, d, N, L);
}

GeneratorNet bspline_phi0(int k, int d, int N, int L) {
    const Rational err = bspline_phi0_error(k, d, N, L);
    if (k == 2) return {tensorize(exact_hat(), d, N, L), err};
    return {bspline_net(k, d, N, L), err};
}

RVec quasi_weights(int k) {
    check_order(k);
    // mu_e: coefficient of N_k(x) in the B-spline expansion of x^e, from
    // collocation on (0,1) where only the shifts n = -(k-1)..0 are active.
    std::vector<RVec> colloc(k, RVec(k));
    for (int t = 0; t < k; ++t) {
        const Rational x = frac(t + 1, k + 1);
        for (int c = 0; c < k; ++c) colloc[t][c] = bspline(k, x + (k - 1 - c));
    }
    RVec mu(k);
    for (int e = 0; e < k; ++e) {
        RVec rhs(k);
        for (int t = 0; t < k; ++t) rhs[t] = power(frac(t + 1, k + 1), e);
        mu[e] = solve(colloc, rhs)[k - 1];
    }
    // sum_i w_i i^e = mu_e
    std::vector<RVec> vander(k, RVec(k));
    for (int e = 0; e < k; ++e)
        for (int i = 0; i < k; ++i) vander[e][i] = power(Rational(i), e);
    return solve(vander, mu);
}

SisFunction quasi_interpolate(const std::function<double(const Vec&)>& f, int j, const BsplineSpec& spec,
                              const Rational& M) {
    check_order(spec.k);
    if (spec.d < 1 || j < 0) throw ValidationError("quasi_interpolate needs d >= 1 and j >= 0");
    const int k = spec.k, d = spec.d;
    const Vec w = to_double(quasi_weights(k));
    const double h = std::ldexp(1.0, -j);

    SisFunction g;
    g.j = j;
    g.generator = bspline_generator(k, d);

    const long lo = -(k - 1), hi = (1L << j) - 1;
    IVec n(d, lo);
    std::vector<int> node(d, 0);
    Vec x(d);
    Rational biggest = 0;
    while (true) {
        double c = 0.0;
        std::fill(node.begin(), node.end(), 0);
        while (true) {
            double weight = 1.0;
            for (int m = 0; m < d; ++m) {
                weight *= w[node[m]];
                x[m] = h * static_cast<double>(n[m] + node[m]);
            }
            c += weight * f(x);
            int m = d - 1;
            while (m >= 0 && ++node[m] == k) node[m--] = 0;
            if (m < 0) break;
        }
        Rational cq = from_double(c);
        if (sgn(cq) != 0) {
            g.coeffs[n] = cq;
            if (abs(cq) > biggest) biggest = abs(cq);
        }
        int m = d - 1;
        while (m >= 0 && ++n[m] > hi) n[m--] = lo;
        if (m < 0) break;
    }
    if (sgn(M) > 0) {
        g.bound_M = M;
    } else {
        g.bound_M = sgn(biggest) == 0 ? Rational(1) : 2 * pow2_floor(biggest);
        if (g.bound_M < 1) g.bound_M = 1;
    }
    g.validate();
    return g;
}

}  // namespace sinet
