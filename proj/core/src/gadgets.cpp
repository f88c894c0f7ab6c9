#include "sinet/gadgets.hpp"

#include <algorithm>

#include "forms.hpp"

namespace sinet {

using detail::Form;
using detail::Rows;

namespace {

ReluNet net_of(std::size_t in, std::vector<Rows> rows) {
    std::vector<AffineLayer> layers;
    for (auto& r : rows) layers.push_back(r.build());
    return ReluNet(in, std::move(layers));
}

Form v(std::size_t i, const Rational& c = 1) { return Form::var(i, c); }

}  // namespace

ReluNet soft_indicator(const IndicatorSpec& spec) {
    if (spec.a > spec.b) throw ValidationError("soft_indicator needs a <= b");
    if (sgn(spec.delta) <= 0) throw ValidationError("soft_indicator needs delta > 0");
    const Rational inv = 1 / spec.delta;
    Rows l1(1), l2(2), out(2);
    l1.push(v(0, -inv) + spec.a * inv);
    l1.push(v(0, inv) - spec.b * inv);
    l2.push(-v(0) + Rational(1));
    l2.push(-v(1) + Rational(1));
    out.push(v(0) + v(1) - Rational(1));
    return net_of(1, {l1, l2, out});
}

ReluNet binary_gate() {
    // a is carried through relu(a); the operating range has a >= 0.
    Rows l1(2), out(2);
    l1.push(v(1, Rational(1, 4)) + v(0) - Rational(1, 2));
    l1.push(v(0));
    out.push(v(0, 4) + v(1, -2));
    return net_of(2, {l1, out});
}

namespace {

// relu(x+y), relu(-x-y), relu(x-y), relu(y-x) for forms x, y.
void push_pair_basis(Rows& rows, const Form& x, const Form& y) {
    rows.push(x + y);
    rows.push(-(x + y));
    rows.push(x - y);
    rows.push(y - x);
}

// max = (h0 - h1 + h2 + h3)/2, min = (h0 - h1 - h2 - h3)/2 over the basis at `at`.
Form max_of(std::size_t at) {
    const Rational h(1, 2);
    return v(at, h) + v(at + 1, -h) + v(at + 2, h) + v(at + 3, h);
}
Form min_of(std::size_t at) {
    const Rational h(1, 2);
    return v(at, h) + v(at + 1, -h) + v(at + 2, -h) + v(at + 3, -h);
}

ReluNet pair_net(bool want_max) {
    Rows l1(2), out(4);
    push_pair_basis(l1, v(0), v(1));
    out.push(want_max ? max_of(0) : min_of(0));
    return net_of(2, {l1, out});
}

ReluNet triple_net(bool want_max) {
    Rows l1(3), l2(6), out(4);
    push_pair_basis(l1, v(0), v(1));
    l1.push(v(2));
    l1.push(-v(2));
    Form m = want_max ? max_of(0) : min_of(0);
    Form z = v(4) - v(5);
    push_pair_basis(l2, m, z);
    out.push(want_max ? max_of(0) : min_of(0));
    return net_of(3, {l1, l2, out});
}

}  // namespace

ReluNet max2() { return pair_net(true); }
ReluNet min2() { return pair_net(false); }
ReluNet max3() { return triple_net(true); }
ReluNet min3() { return triple_net(false); }

ReluNet mid3() {
    // mid = (x+y+z) - max - min; the pair basis of (x, y) serves both.
    Rows l1(3), l2(8), out(10);
    push_pair_basis(l1, v(0), v(1));
    l1.push(v(2));
    l1.push(-v(2));
    l1.push(v(0) + v(1) + v(2));
    l1.push(-(v(0) + v(1) + v(2)));
    Form z = v(4) - v(5);
    push_pair_basis(l2, max_of(0), z);
    push_pair_basis(l2, min_of(0), z);
    l2.push(v(6));
    l2.push(v(7));
    out.push(v(8) - v(9) - max_of(0) - min_of(4));
    return net_of(3, {l1, l2, out});
}

ReluNet hat() {
    Rows l1(1), out(3);
    l1.push(v(0));
    l1.push(v(0) - Rational(1, 2));
    l1.push(v(0) - Rational(1));
    out.push(v(0, 2) + v(1, -4) + v(2, 2));
    return net_of(1, {l1, out});
}

ReluNet teeth(int i) {
    if (i < 1) throw ValidationError("teeth needs i >= 1");
    ReluNet t = hat();
    ReluNet out = t;
    for (int n = 1; n < i; ++n) out = compose(out, t);
    return out;
}

Rational teeth_value(int i, Rational x) {
    for (int n = 0; n < i; ++n) {
        if (x < 0 || x > 1) return 0;
        x = x <= Rational(1, 2) ? Rational(2 * x) : Rational(2 * (1 - x));
    }
    return x;
}

namespace {

// Ramp coefficients c_p with F(u) = sum_p c_p relu(u - p/2^l) for the
// piecewise linear F interpolating values[p] at p/2^l, F(0) = 0, F flat
// past 1.
RVec ramp_coefficients(const RVec& values, int l) {
    const std::size_t n = values.size() - 1;
    const Rational scale = pow2(l);
    RVec slope(n);
    for (std::size_t p = 0; p < n; ++p) slope[p] = (values[p + 1] - values[p]) * scale;
    RVec c(n + 1);
    c[0] = slope[0];
    for (std::size_t p = 1; p < n; ++p) c[p] = slope[p] - slope[p - 1];
    c[n] = -slope[n - 1];
    return c;
}

}  // namespace

ReluNet square_approx(int s, int levels_per_layer) {
    if (s < 1) throw ValidationError("square_approx needs s >= 1");
    if (levels_per_layer < 1) throw ValidationError("levels_per_layer must be >= 1");

    std::vector<Rows> layers;
    Form u = v(0), x = v(0), acc;
    bool have_acc = false;
    std::size_t cols = 1;
    for (int done = 0; done < s;) {
        const int l = std::min(levels_per_layer, s - done);
        const std::size_t n = std::size_t{1} << l;
        Rows rows(cols);
        for (std::size_t p = 0; p <= n; ++p) rows.push(u - Rational(static_cast<long>(p)) / pow2(l));
        const std::size_t xi = rows.push(x);
        std::size_t ai = 0;
        if (have_acc) ai = rows.push(acc);

        RVec next_vals(n + 1), acc_vals(n + 1);
        for (std::size_t p = 0; p <= n; ++p) {
            Rational node = Rational(static_cast<long>(p)) / pow2(l);
            next_vals[p] = teeth_value(l, node);
            for (int i = 1; i <= l; ++i) acc_vals[p] += teeth_value(i, node) / pow2(2 * (done + i));
        }
        RVec cu = ramp_coefficients(next_vals, l);
        RVec ca = ramp_coefficients(acc_vals, l);
        Form nu, na;
        for (std::size_t p = 0; p <= n; ++p) {
            nu += v(p, cu[p]);
            na += v(p, ca[p]);
        }
        if (have_acc) na += v(ai);
        u = nu;
        acc = na;
        x = v(xi);
        have_acc = true;
        cols = rows.size();
        layers.push_back(std::move(rows));
        done += l;
    }
    Rows out(cols);
    out.push(x - acc);
    layers.push_back(std::move(out));
    return net_of(1, std::move(layers));
}

ReluNet mul_approx(int s, const Rational& range, int levels_per_layer) {
    if (sgn(range) <= 0) throw ValidationError("mul_approx needs a positive range");
    ReluNet sq = square_approx(s, levels_per_layer);
    const Rational h = 1 / (2 * range);
    Rows pre(2), post(3);
    pre.push(v(0, h) + v(1, h));
    pre.push(v(0, h));
    pre.push(v(1, h));
    const Rational g = 2 * range * range;
    post.push(v(0, g) + v(1, -g) + v(2, -g));
    return compose({affine(pre.build()), stack({sq, sq, sq}), affine(post.build())});
}

ProductPlan product_plan(int k, int N, int L) {
    if (k < 2 || N < 1 || L < 1) throw ValidationError("product_approx needs k >= 2, N >= 1, L >= 1");
    // t = ceil(log2((N+1)^{7kL})), then 2s + 2 >= t.
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(N + 1), static_cast<unsigned long>(7 * k * L));
    mpz_class pm1 = p - 1;
    long t = pm1 == 0 ? 0 : static_cast<long>(mpz_sizeinbase(pm1.get_mpz_t(), 2));
    int s = static_cast<int>(std::max<long>(1, (t - 2 + 1) / 2));
    int m = static_cast<int>(floor_log2(Rational(3 * N)));
    return {s, std::max(1, m)};
}

ReluNet product_approx(int k, int N, int L) {
    ProductPlan plan = product_plan(k, N, L);
    ReluNet phi2 = mul_approx(plan.s, 1, plan.levels_per_layer);
    ReluNet phi = phi2;
    for (int n = 3; n <= k; ++n)
        phi = compose(stack({phi, passthrough(1, Sign::Nonneg, phi.depth())}), phi2);
    return phi;
}

ReluNet support_window(int k) {
    if (k < 1) throw ValidationError("support_window needs k >= 1");
    return soft_indicator({0, k, 1});
}

}  // namespace sinet
