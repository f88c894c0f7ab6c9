#include "sinet/bits.hpp"

#include <algorithm>

#include "forms.hpp"

namespace sinet {

using detail::Form;
using detail::Rows;

DyadicPoint::DyadicPoint(std::vector<int> bits) : bits_(std::move(bits)) {
    for (int b : bits_)
        if (b != 0 && b != 1) throw ValidationError("DyadicPoint bits must be 0 or 1");
    while (!bits_.empty() && bits_.back() == 0) bits_.pop_back();
}

DyadicPoint DyadicPoint::from_value(const Rational& x) {
    if (x < 0 || x >= 1) throw DomainError("DyadicPoint value must lie in [0,1)");
    const mpz_class& den = x.get_den();
    if (mpz_popcount(den.get_mpz_t()) != 1) throw DomainError("value " + x.get_str() + " is not dyadic");
    std::size_t n = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    std::vector<int> bits(n);
    const mpz_class& num = x.get_num();
    for (std::size_t i = 0; i < n; ++i) bits[i] = mpz_tstbit(num.get_mpz_t(), n - 1 - i);
    return DyadicPoint(std::move(bits));
}

Rational DyadicPoint::value() const {
    Rational v;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) v += pow2(-static_cast<long>(i + 1));
    return v;
}

QDomain::QDomain(int j, Rational delta, int d) : j_(j), delta_(std::move(delta)), d_(d) {
    if (j_ < 1) throw ValidationError("QDomain needs j >= 1");
    if (d_ < 1) throw ValidationError("QDomain needs d >= 1");
    if (sgn(delta_) <= 0 || delta_ >= pow2(-j_)) throw ValidationError("QDomain needs 0 < delta < 2^-j");
}

bool QDomain::contains(const Rational& x) const {
    if (x < 0 || x >= 1) return false;
    Rational y = x * pow2(j_);
    mpz_class m;
    mpz_fdiv_q(m.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    if (m + 1 > (mpz_class(1) << j_) - 1) return true;
    Rational edge = Rational(m + 1) / pow2(j_);
    return !(x > edge - delta_);
}

bool QDomain::contains(const RVec& x) const {
    if (x.size() != static_cast<std::size_t>(d_)) return false;
    return std::all_of(x.begin(), x.end(), [&](const Rational& t) { return contains(t); });
}

std::vector<Rational> QDomain::axis_grid(int level) const {
    std::vector<Rational> out;
    const long n = 1L << level;
    for (long i = 0; i < n; ++i) {
        Rational x = Rational(i) / pow2(level);
        if (contains(x)) out.push_back(x);
    }
    return out;
}

Rational QDomain::complement_measure() const {
    Rational kept = 1 - (pow2(j_) - 1) * delta_;
    Rational p = 1;
    for (int i = 0; i < d_; ++i) p *= kept;
    return 1 - p;
}

namespace {

ReluNet net_of(std::size_t in, std::vector<Rows> rows) {
    std::vector<AffineLayer> layers;
    for (auto& r : rows) layers.push_back(r.build());
    return ReluNet(in, std::move(layers));
}

// r-bit extraction; valid on inputs avoiding the delta-gaps left of the
// multiples of 2^-r.
ReluNet extract_stage(int r, const Rational& delta) {
    const std::size_t cells = std::size_t{1} << r;
    const Rational inv = 1 / delta;
    const Rational step = pow2(-r);
    Rows l1(1);
    for (std::size_t k = 0; k < cells; ++k) {
        Rational a = Rational(static_cast<long>(k)) * step;
        Rational b = k + 1 == cells ? Rational(1) : Rational(Rational(static_cast<long>(k + 1)) * step - delta);
        l1.push(Form::var(0, -inv) + a * inv);
        l1.push(Form::var(0, inv) - b * inv);
    }
    const std::size_t xi = l1.push(Form::var(0));

    Rows l2(l1.size());
    for (std::size_t n = 0; n < 2 * cells; ++n) l2.push(-Form::var(n) + Rational(1));
    const std::size_t x2 = l2.push(Form::var(xi));

    Rows out(l2.size());
    std::vector<Form> bits(r);
    for (std::size_t k = 0; k < cells; ++k) {
        Form f = Form::var(2 * k) + Form::var(2 * k + 1) - Rational(1);
        for (int i = 1; i <= r; ++i)
            if ((k >> (r - i)) & 1) bits[i - 1] += f;
    }
    Form tail = Form::var(x2, pow2(r));
    for (int i = 1; i <= r; ++i) {
        out.push(bits[i - 1]);
        tail += bits[i - 1] * -pow2(r - i);
    }
    out.push(tail);
    return net_of(1, {l1, l2, out});
}

void check_delta(int j, const Rational& delta) {
    if (j < 1) throw ValidationError("bit extraction needs j >= 1");
    if (sgn(delta) <= 0 || delta >= pow2(-j)) throw ValidationError("bit extraction needs 0 < delta < 2^-j");
}

}  // namespace

ReluNet extract_bits(int j, const Rational& delta, int r) {
    check_delta(j, delta);
    if (r < 1 || r > j) throw ValidationError("extract_bits needs 1 <= r <= j");
    return extract_stage(r, delta);
}

ReluNet split_weighted_bits(int j, const Rational& delta, int r, int k) {
    check_delta(j, delta);
    if (r < 1) throw ValidationError("split_weighted_bits needs r >= 1");
    if (k < 0 || k > j) throw ValidationError("split_weighted_bits needs 0 <= k <= j");
    r = std::min(r, j);

    std::vector<ReluNet> chain;
    for (int done = 0; done < j;) {
        const int rho = std::min(r, j - done);
        ReluNet stage = extract_stage(rho, delta);
        const bool first = done == 0;
        if (!first) stage = stack({stage, passthrough(2, Sign::Nonneg, 3)});
        // outputs: bits (rho), tail, [hi, lo]  ->  tail, hi, lo
        Rows mix(stage.output_dim());
        Form hi, lo;
        if (!first) {
            hi = Form::var(rho + 1);
            lo = Form::var(rho + 2);
        }
        for (int i = 1; i <= rho; ++i) {
            const int g = done + i;
            (g <= k ? hi : lo) += Form::var(i - 1, pow2(j - g));
        }
        mix.push(Form::var(rho));
        mix.push(hi);
        mix.push(lo);
        chain.push_back(compose(stage, affine(mix.build())));
        done += rho;
    }
    Rows order(3);
    order.push(Form::var(1));
    order.push(Form::var(2));
    order.push(Form::var(0));
    chain.push_back(affine(order.build()));
    return compose(chain);
}

ReluNet select_bit(int r, int K) {
    if (r < 1 || K < r) throw ValidationError("select_bit needs 1 <= r <= K");
    // K-bit inputs sit on the left ends of their cells, so any gap narrower
    // than 2^-K is never hit.
    const Rational delta = pow2(-K - 1);

    Rows seed(2);
    seed.push(Form::var(0));
    seed.push(Form::var(1));
    seed.push(Form{});
    std::vector<ReluNet> chain{affine(seed.build())};

    for (int done = 0; done < K;) {
        const int rho = std::min(r, K - done);
        // (tail, k, acc) -> (bits, tail', k, acc)
        ReluNet a = stack({extract_stage(rho, delta), passthrough(2, Sign::Nonneg, 3)});
        const std::size_t in = static_cast<std::size_t>(rho) + 3;
        const std::size_t t_in = rho, k_in = rho + 1, acc_in = rho + 2;

        Rows h3(in);
        for (int i = 1; i <= rho; ++i) {
            const long g = done + i;
            h3.push(Form::var(k_in) - Rational(g - 1));
            h3.push(Form::var(k_in) - Rational(g + 1));
            h3.push(Form::var(k_in) - Rational(g));
        }
        const std::size_t bits_at = h3.size();
        for (int i = 0; i < rho; ++i) h3.push(Form::var(i));
        const std::size_t t3 = h3.push(Form::var(t_in));
        const std::size_t k3 = h3.push(Form::var(k_in));
        const std::size_t a3 = h3.push(Form::var(acc_in));

        Rows h4(h3.size());
        for (int i = 0; i < rho; ++i) {
            Form kronecker = Form::var(3 * i) + Form::var(3 * i + 1) + Form::var(3 * i + 2, -2);
            h4.push(kronecker + Form::var(bits_at + i) - Rational(1));
        }
        const std::size_t t4 = h4.push(Form::var(t3));
        const std::size_t k4 = h4.push(Form::var(k3));
        const std::size_t a4 = h4.push(Form::var(a3));

        Rows out(h4.size());
        out.push(Form::var(t4));
        out.push(Form::var(k4));
        Form acc = Form::var(a4);
        for (int i = 0; i < rho; ++i) acc += Form::var(i);
        out.push(acc);

        ReluNet b = net_of(in, {h3, h4, out});
        chain.push_back(compose(a, b));
        done += rho;
    }
    Rows pick(3);
    pick.push(Form::var(2));
    chain.push_back(affine(pick.build()));
    return compose(chain);
}

}  // namespace sinet
