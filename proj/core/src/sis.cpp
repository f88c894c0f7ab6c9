#include "sinet/sis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "forms.hpp"
#include "sinet/bits.hpp"
#include "sinet/gadgets.hpp"
#include "sinet/splines.hpp"

namespace sinet {

using detail::Form;
using detail::Rows;
using json = nlohmann::json;

namespace {

Rational floor_q(const Rational& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(f);
}

Rational ceil_q(const Rational& x) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(c);
}

long to_long(const Rational& integral) { return integral.get_num().get_si(); }

// Visits every integer vector in the box [lo_m, hi_m], last coordinate fastest.
template <class F>
void for_each_box(const IVec& lo, const IVec& hi, F&& f) {
    const std::size_t d = lo.size();
    for (std::size_t m = 0; m < d; ++m)
        if (lo[m] > hi[m]) return;
    IVec n = lo;
    while (true) {
        f(static_cast<const IVec&>(n));
        std::size_t m = d;
        while (m > 0) {
            --m;
            if (++n[m] <= hi[m]) break;
            n[m] = lo[m];
            if (m == 0) return;
        }
        if (d == 0) return;
    }
}

ReluNet layers_net(std::size_t input_dim, const std::vector<Rows>& rows) {
    std::vector<AffineLayer> layers;
    for (const auto& r : rows) layers.push_back(r.build());
    return ReluNet(input_dim, std::move(layers));
}

std::map<std::string, std::function<Generator(int)>>& registry() {
    static std::map<std::string, std::function<Generator(int)>> r;
    return r;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

// Generator

Rational Generator::operator()(const RVec& x) const {
    if (!phi_exact) throw ValidationError("generator '" + name + "' has no exact evaluator");
    return phi_exact(x);
}

std::vector<IVec> Generator::shift_set() const {
    // phi(x - n) != 0 for some x in [0,1) iff lo < x - n < hi, i.e.
    // -hi < n < 1 - lo coordinatewise.
    IVec lo(dim), hi(dim);
    for (int m = 0; m < dim; ++m) {
        lo[m] = to_long(floor_q(-support_hi[m])) + 1;
        hi[m] = to_long(ceil_q(1 - support_lo[m])) - 1;
    }
    std::vector<IVec> out;
    for_each_box(lo, hi, [&](const IVec& n) { out.push_back(n); });
    return out;
}

Generator Generator::shifted(const RVec& t) const {
    if (static_cast<int>(t.size()) != dim) throw ShapeError("generator shift has the wrong dimension");
    Generator g = *this;
    const Vec tf = to_double(t);
    auto base = phi;
    g.phi = [base, tf](const Vec& x) {
        Vec y = x;
        for (std::size_t m = 0; m < y.size(); ++m) y[m] += tf[m];
        return base(y);
    };
    if (phi_exact) {
        auto base_exact = phi_exact;
        g.phi_exact = [base_exact, t](const RVec& x) {
            RVec y = x;
            for (std::size_t m = 0; m < y.size(); ++m) y[m] += t[m];
            return base_exact(y);
        };
    }
    for (int m = 0; m < dim; ++m) {
        g.support_lo[m] -= t[m];
        g.support_hi[m] -= t[m];
    }
    return g;
}

// SisFunction

Rational SisFunction::coeff(const IVec& n) const {
    auto it = coeffs.find(n);
    return it == coeffs.end() ? Rational(0) : it->second;
}

void SisFunction::validate() const {
    if (j < 0) throw ValidationError("dilation level must be nonnegative");
    if (sgn(bound_M) <= 0) throw ValidationError("coefficient bound M must be positive");
    for (const auto& [n, c] : coeffs) {
        if (static_cast<int>(n.size()) != d()) throw ShapeError("coefficient index has the wrong dimension");
        if (abs(c) >= bound_M) throw InvariantError("coefficient magnitude reaches the bound M");
    }
}

namespace {

template <class T>
T scale_pow2(const T& x, int j);

template <>
double scale_pow2(const double& x, int j) {
    return std::ldexp(x, j);
}

template <>
Rational scale_pow2(const Rational& x, int j) {
    return x * pow2(j);
}

template <class T>
T phi_at(const Generator& gen, const std::vector<T>& y) {
    if constexpr (std::is_same_v<T, double>)
        return gen.phi(y);
    else
        return gen(y);
}

template <class T>
T eval_sis_impl(const SisFunction& g, const std::vector<T>& x) {
    const int d = g.d();
    if (static_cast<int>(x.size()) != d) throw ShapeError("point has the wrong dimension");
    std::vector<T> y(d);
    IVec lo(d), hi(d);
    for (int m = 0; m < d; ++m) {
        y[m] = scale_pow2(x[m], g.j);
        // closed box: N_1 is nonzero on its lower face
        if constexpr (std::is_same_v<T, double>) {
            lo[m] = static_cast<long>(std::floor(y[m] - to_double(g.generator.support_hi[m])));
            hi[m] = static_cast<long>(std::ceil(y[m] - to_double(g.generator.support_lo[m])));
        } else {
            lo[m] = to_long(floor_q(y[m] - g.generator.support_hi[m]));
            hi[m] = to_long(ceil_q(y[m] - g.generator.support_lo[m]));
        }
    }
    T sum = 0;
    std::vector<T> arg(d);
    for_each_box(lo, hi, [&](const IVec& n) {
        auto it = g.coeffs.find(n);
        if (it == g.coeffs.end() || sgn(it->second) == 0) return;
        for (int m = 0; m < d; ++m) arg[m] = y[m] - T(n[m]);
        if constexpr (std::is_same_v<T, double>)
            sum += to_double(it->second) * phi_at(g.generator, arg);
        else
            sum += it->second * phi_at(g.generator, arg);
    });
    return sum;
}

template <class T>
T localize_impl(const SisFunction& g, const std::vector<T>& x) {
    auto [m, r] = m_r_split(x, g.j);
    const int d = g.d();
    if (static_cast<int>(m.size()) != d) throw ShapeError("point has the wrong dimension");
    T sum = 0;
    std::vector<T> arg(d);
    IVec idx(d);
    for (const IVec& k : g.generator.shift_set()) {
        for (int i = 0; i < d; ++i) idx[i] = m[i] + k[i];
        auto it = g.coeffs.find(idx);
        if (it == g.coeffs.end() || sgn(it->second) == 0) continue;
        for (int i = 0; i < d; ++i) arg[i] = r[i] - T(k[i]);
        if constexpr (std::is_same_v<T, double>)
            sum += to_double(it->second) * phi_at(g.generator, arg);
        else
            sum += it->second * phi_at(g.generator, arg);
    }
    return sum;
}

}  // namespace

double eval_sis(const SisFunction& g, const Vec& x) { return eval_sis_impl(g, x); }
Rational eval_sis(const SisFunction& g, const RVec& x) { return eval_sis_impl(g, x); }

std::pair<IVec, RVec> m_r_split(const RVec& x, int j) {
    IVec m;
    RVec r;
    for (const auto& xi : x) {
        if (sgn(xi) < 0 || xi >= 1) throw DomainError("m_r_split needs coordinates in [0,1)");
        Rational y = xi * pow2(j);
        Rational f = floor_q(y);
        m.push_back(to_long(f));
        r.push_back(y - f);
    }
    return {m, r};
}

std::pair<IVec, Vec> m_r_split(const Vec& x, int j) {
    IVec m;
    Vec r;
    for (double xi : x) {
        if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("m_r_split needs coordinates in [0,1)");
        double y = std::ldexp(xi, j);
        double f = std::floor(y);
        m.push_back(static_cast<long>(f));
        r.push_back(y - f);
    }
    return {m, r};
}

double localize(const SisFunction& g, const Vec& x) { return localize_impl(g, x); }
Rational localize(const SisFunction& g, const RVec& x) { return localize_impl(g, x); }

// Coefficient bits

BitTable coeff_bits(const SisFunction& g, int depth, const IVec& shift) {
    if (depth < 1) throw ValidationError("coeff_bits needs depth >= 1");
    const int d = g.d();
    IVec k = shift.empty() ? IVec(d, 0) : shift;
    if (static_cast<int>(k.size()) != d) throw ShapeError("shift has the wrong dimension");
    if (sgn(g.bound_M) <= 0) throw ValidationError("coefficient bound M must be positive");

    BitTable table;
    const long top = (1L << g.j) - 1;
    IVec idx(d);
    for_each_box(IVec(d, 0), IVec(d, top), [&](const IVec& m) {
        for (int i = 0; i < d; ++i) idx[i] = m[i] + k[i];
        Rational c = g.coeff(idx) / g.bound_M;
        if (abs(c) >= 1) throw InvariantError("coefficient magnitude reaches the bound M");
        Rational v = c / 2 + frac(1, 2);
        std::vector<int> bits(depth);
        for (int i = 0; i < depth; ++i) {
            v *= 2;
            bits[i] = v >= 1 ? 1 : 0;
            if (bits[i]) v -= 1;
        }
        RVec point;
        for (long mi : m) point.emplace_back(mi);
        table.points.push_back(std::move(point));
        table.bits.push_back(std::move(bits));
    });
    return table;
}

Rational bits_to_coefficient(const std::vector<int>& bits) {
    Rational c = -1;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) c += pow2(-static_cast<long>(i));
    return c;
}

long q_index(const std::vector<std::vector<int>>& low_bits, const std::vector<int>& split_points, int j, int s) {
    if (low_bits.size() != split_points.size()) throw ShapeError("one bit list per split point expected");
    int total = 0;
    for (int k : split_points) {
        if (k < 0 || k > j) throw ValidationError("split points must lie in [0, j]");
        total += j - k;
    }
    if (total != s) throw ValidationError("split points do not account for s low bits");
    long q = 1;
    int offset = 0;
    for (std::size_t m = 0; m < split_points.size(); ++m) {
        const int len = j - split_points[m];
        if (static_cast<int>(low_bits[m].size()) != len) throw ShapeError("low bit list has the wrong length");
        long lo = 0;
        for (int b : low_bits[m]) lo = 2 * lo + (b ? 1 : 0);
        q += lo << offset;
        offset += len;
    }
    return q;
}

std::vector<int> split_points(int j, int d, int s) {
    if (j < 0 || d < 1 || s < 0) throw ValidationError("split_points needs j >= 0, d >= 1, s >= 0");
    const int total = std::min(s, j * d);
    std::vector<int> k(d);
    for (int m = 0; m < d; ++m) {
        const int low = total / d + (m < total % d ? 1 : 0);
        k[m] = j - low;
    }
    return k;
}

// Parameters and budgets

int ApproxParams::coefficient_bits() const {
    if (sgn(epsilon) <= 0) throw ValidationError("epsilon must be positive");
    return static_cast<int>(-floor_log2(epsilon)) + 1;
}

void ApproxParams::validate(int j, int d) const {
    if (r < 1 || s < 1 || r_tilde < 1 || s_tilde < 1) throw ValidationError("r, s, r~, s~ must be positive");
    if (sgn(epsilon) <= 0 || epsilon >= 1) throw ValidationError("epsilon must lie in (0,1)");
    if (sgn(delta) <= 0 || delta >= pow2(-j)) throw ValidationError("delta must lie in (0, 2^-j)");
    if (2 * (s + r) < d * j) throw ValidationError("need 2(s+r) >= d j");
    if (r_tilde * s_tilde < coefficient_bits()) throw ValidationError("need r~ s~ >= ceil(log2(1/eps)) + 1");
}

SizeBudget term_budget(int d, const ApproxParams& p, const ReluNet& phi0) {
    const std::size_t inner = std::max<std::size_t>(7UL * d * p.r_tilde * (1UL << p.r), phi0.width());
    return SizeBudget(inner + 4UL * d, 14UL * p.s_tilde * (1UL << p.s) + phi0.depth());
}

SizeBudget q_budget(const Generator& gen, const ApproxParams& p, const ReluNet& phi0) {
    SizeBudget t = term_budget(gen.dim, p, phi0);
    return SizeBudget(gen.C() * t.width_bound, t.depth_bound);
}

SizeBudget uniform_budget(const Generator& gen, const ApproxParams& p, const ReluNet& phi0) {
    SizeBudget q = q_budget(gen, p, phi0);
    std::size_t pow3 = 1;
    for (int m = 0; m < gen.dim; ++m) pow3 *= 3;
    return SizeBudget(pow3 * 2 * q.width_bound, q.depth_bound + 2UL * gen.dim);
}

// Term network

namespace {

void check_construction(const SisFunction& g, const ApproxParams& p, const ReluNet& phi0, const Rational& err) {
    g.validate();
    p.validate(g.j, g.d());
    if (g.j < 1) throw ValidationError("the term network needs j >= 1");
    if (static_cast<int>(phi0.input_dim()) != g.d() || phi0.output_dim() != 1)
        throw ShapeError("phi0 must map R^d to R");
    if (sgn(err) < 0) throw ValidationError("phi0 certificate must be nonnegative");
    if (err > p.epsilon * g.generator.sup_norm)
        throw ValidationError("phi0 certificate exceeds epsilon * ||phi||");
}

// (hi, q, phi0c, sumc) -> same, with sumc += sum_i 2^{1-i} b_i (phi0c - 2)
// over the bits in [first, first + count).
ReluNet bit_block(const std::vector<BitTable>& tables, int first, int count, int d, int n_fit, int l_fit) {
    const std::size_t carry = d + 3;
    const std::size_t key = d + 1;  // (hi, q)

    std::vector<ReluNet> parts;
    for (int i = 0; i < count; ++i) parts.push_back(fit_bit_samples(tables[first + i], n_fit, l_fit));
    const std::size_t fit_depth = parts.front().depth();
    parts.push_back(passthrough(carry, Sign::Nonneg, fit_depth));

    Rows fan(carry);
    for (int i = 0; i < count; ++i)
        for (std::size_t c = 0; c < key; ++c) fan.push(Form::var(c));
    for (std::size_t c = 0; c < carry; ++c) fan.push(Form::var(c));

    // gate input: a_1..a_count, hi, q, phi0c, sumc
    const std::size_t base = count;
    const std::size_t phi_at = base + d + 1;
    Rows gate(count + carry), out(2 * count + carry);
    for (int i = 0; i < count; ++i) {
        gate.push(Form::var(phi_at, frac(1, 4)) + Form::var(i) - Rational(1));
        gate.push(Form::var(i));
    }
    for (std::size_t c = 0; c < carry; ++c) gate.push(Form::var(base + c));
    const std::size_t held = 2 * count;
    for (std::size_t c = 0; c + 1 < carry; ++c) out.push(Form::var(held + c));
    Form sum = Form::var(held + carry - 1);
    for (int i = 0; i < count; ++i) {
        const Rational w = pow2(-(first + i));  // 2^{1-i} for the 1-based bit index first+i+1
        sum += Form::var(2 * i, 4 * w) - Form::var(2 * i + 1, 2 * w);
    }
    out.push(sum);

    return compose({affine(fan.build()), stack(parts), layers_net(count + carry, {gate, out})});
}

}  // namespace

ReluNet build_term_net(const SisFunction& g, const IVec& k, const ApproxParams& p, const ReluNet& phi0,
                       const Rational& phi0_err) {
    check_construction(g, p, phi0, phi0_err);
    const int d = g.d(), j = g.j;
    if (static_cast<int>(k.size()) != d) throw ShapeError("shift has the wrong dimension");

    const std::vector<int> splits = split_points(j, d, p.s);
    const int s_eff = std::min(p.s, j * d);
    const long l_fit = 1L << s_eff;
    const long n_points = 1L << (j * d - s_eff);
    int n_fit = 1;
    while (static_cast<long>(n_fit) * n_fit * l_fit < n_points) ++n_fit;
    const int n_bits = p.coefficient_bits();

    // stage 1: per-coordinate (hi, lo, tail), packed into (hi, q, r - k)
    std::vector<ReluNet> splitters;
    for (int m = 0; m < d; ++m) splitters.push_back(split_weighted_bits(j, p.delta, p.r, splits[m]));
    Rows pack(3 * d);
    for (int m = 0; m < d; ++m) pack.push(Form::var(3 * m));
    Form q = Form::constant(1);
    int offset = 0;
    for (int m = 0; m < d; ++m) {
        q += Form::var(3 * m + 1, pow2(offset));
        offset += j - splits[m];
    }
    pack.push(q);
    for (int m = 0; m < d; ++m) pack.push(Form::var(3 * m + 2) - Rational(k[m]));
    ReluNet stage1 = compose(stack(splitters), affine(pack.build()));

    // stage 2: phi0 on r - k, normalized to ||phi|| = 1 and offset by 2
    Rows norm(1);
    norm.push(Form::var(0, 1 / g.generator.sup_norm) + Rational(2));
    ReluNet phi0c = compose(phi0, affine(norm.build()));
    ReluNet stage2 = stack({passthrough(d + 1, Sign::Nonneg, phi0c.depth()), phi0c});
    Rows seed(d + 2);
    for (int c = 0; c < d + 2; ++c) seed.push(Form::var(c));
    seed.push(Form::constant(4));

    // bit tables: row per hi tuple, column q-1 holds bit i of c_{hi+lo(q)+k}
    std::vector<BitTable> tables(n_bits);
    {
        IVec hi_top(d), idx(d);
        for (int m = 0; m < d; ++m) hi_top[m] = (1L << splits[m]) - 1;
        for_each_box(IVec(d, 0), hi_top, [&](const IVec& a) {
            RVec point(d);
            IVec hi(d);
            for (int m = 0; m < d; ++m) {
                hi[m] = a[m] << (j - splits[m]);
                point[m] = Rational(hi[m]);
            }
            std::vector<std::vector<int>> rows(n_bits, std::vector<int>(l_fit));
            for (long col = 0; col < l_fit; ++col) {
                long rest = col;
                for (int m = 0; m < d; ++m) {
                    const int len = j - splits[m];
                    idx[m] = hi[m] + (rest & ((1L << len) - 1)) + k[m];
                    rest >>= len;
                }
                Rational v = g.coeff(idx) / g.bound_M / 2 + frac(1, 2);
                for (int i = 0; i < n_bits; ++i) {
                    v *= 2;
                    const int b = v >= 1 ? 1 : 0;
                    if (b) v -= 1;
                    rows[i][col] = b;
                }
            }
            for (int i = 0; i < n_bits; ++i) {
                tables[i].points.push_back(point);
                tables[i].bits.push_back(std::move(rows[i]));
            }
        });
    }

    std::vector<ReluNet> chain{stage1, stage2, affine(seed.build())};
    for (int first = 0; first < n_bits; first += p.r_tilde) {
        const int count = std::min(p.r_tilde, n_bits - first);
        chain.push_back(bit_block(tables, first, count, d, n_fit, static_cast<int>(l_fit)));
    }

    // M ||phi|| ((sumc - 4) - (phi0c - 2))
    Rows fin(d + 3);
    const Rational scale = g.bound_M * g.generator.sup_norm;
    fin.push(Form::var(d + 2, scale) - Form::var(d + 1, scale) - Rational(2 * scale));
    chain.push_back(affine(fin.build()));
    return compose(chain);
}

ReluNet build_q_net(const SisFunction& g, const ApproxParams& p, const ReluNet& phi0, const Rational& phi0_err) {
    check_construction(g, p, phi0, phi0_err);
    std::vector<ReluNet> terms;
    for (const IVec& k : g.generator.shift_set()) terms.push_back(build_term_net(g, k, p, phi0, phi0_err));
    if (terms.empty()) throw ValidationError("generator has an empty shift set");
    ReluNet all = parallel(terms);
    Rows sum(terms.size());
    Form total;
    for (std::size_t i = 0; i < terms.size(); ++i) total += Form::var(i);
    sum.push(total);
    return compose(all, affine(sum.build()));
}

namespace {

ReluNet shift_input(const ReluNet& net, int axis, const Rational& by, int d) {
    Rows pre(d);
    for (int m = 0; m < d; ++m) pre.push(m == axis ? Form::var(m) + by : Form::var(m));
    return compose(affine(pre.build()), net);
}

ReluNet lift(const SisFunction& g, const ApproxParams& p, const ReluNet& phi0, const Rational& err, int level) {
    if (level == 0) return build_q_net(g, p, phi0, err);
    const int d = g.d(), axis = level - 1;
    RVec t(d, Rational(0));
    t[axis] = p.delta * pow2(g.j);

    auto shifted_fn = [&](const Rational& sign) {
        SisFunction h = g;
        RVec ts = t;
        ts[axis] *= sign;
        h.generator = g.generator.shifted(ts);
        h.generator.name = g.generator.name + "+shift";
        // phi0(. + t) for the shifted generator
        ReluNet phi0s = shift_input(phi0, axis, ts[axis], d);
        return lift(h, p, phi0s, err, level - 1);
    };

    ReluNet centre = lift(g, p, phi0, err, level - 1);
    ReluNet plus = shift_input(shifted_fn(Rational(1)), axis, -p.delta, d);
    ReluNet minus = shift_input(shifted_fn(Rational(-1)), axis, p.delta, d);
    return compose(parallel({centre, plus, minus}), mid3());
}

}  // namespace

ReluNet build_uniform_net(const SisFunction& g, const ApproxParams& p, const ReluNet& phi0,
                          const Rational& phi0_err) {
    check_construction(g, p, phi0, phi0_err);
    if (3 * p.delta >= pow2(-g.j)) throw ValidationError("the uniform network needs delta < 2^-j / 3");
    return lift(g, p, phi0, phi0_err, g.d());
}

// Rates

double rate_compose(double alpha, double beta, int d, int N, int L) {
    if (N < 2 || L < 2) throw ValidationError("rate_compose needs N, L >= 2");
    if (!(alpha > 0) || !(beta > 0) || d < 1) throw ValidationError("rate_compose needs alpha, beta > 0, d >= 1");
    const double nl = static_cast<double>(N) * L;
    const double order = 2.0 * beta / d;
    const double case1 = std::pow(nl / (std::log2(N) * std::log2(L)), -order);
    const double case2 = std::pow(nl, -alpha);
    if (alpha == order) return std::max(case1, case2);
    return alpha > order ? case1 : case2;
}

// Registry and JSON

void register_generator(const std::string& name, std::function<Generator(int)> factory) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[name] = std::move(factory);
}

Generator generator_by_name(const std::string& name, int dim) {
    const std::string bs = "bspline:k=";
    if (name.rfind(bs, 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(name.substr(bs.size()), &used);
            if (used != name.size() - bs.size()) throw std::invalid_argument(name);
        } catch (const std::exception&) {
            throw ParseError("bad B-spline generator name: " + name);
        }
        return bspline_generator(k, dim);
    }
    const std::string custom = "custom:";
    if (name.rfind(custom, 0) == 0) {
        std::function<Generator(int)> f;
        {
            std::lock_guard<std::mutex> lock(registry_mutex());
            auto it = registry().find(name.substr(custom.size()));
            if (it != registry().end()) f = it->second;
        }
        if (!f) throw ParseError("unregistered generator: " + name);
        return f(dim);
    }
    throw ParseError("unknown generator: " + name);
}

namespace {

Rational json_rational(const json& v, const char* what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number()) return from_double(v.get<double>());
    throw ParseError(std::string("expected a number for ") + what);
}

json rational_json(const Rational& q) {
    const double f = to_double(q);
    if (from_double(f) == q) return f;
    return q.get_str();
}

}  // namespace

SisFunction read_sis_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid SisFunction JSON: ") + e.what());
    }
    try {
        SisFunction g;
        g.j = doc.at("j").get<int>();
        const int d = doc.at("d").get<int>();
        if (d < 1) throw ParseError("d must be positive");
        g.bound_M = json_rational(doc.at("M"), "M");
        g.generator = generator_by_name(doc.at("generator").get<std::string>(), d);
        for (const auto& entry : doc.at("coeffs")) {
            IVec n = entry.at("n").get<IVec>();
            if (static_cast<int>(n.size()) != d) throw ParseError("coefficient index has the wrong dimension");
            Rational c = json_rational(entry.at("c"), "c");
            if (sgn(c) != 0) g.coeffs[n] += c;
        }
        g.validate();
        return g;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed SisFunction: ") + e.what());
    }
}

std::string write_sis_json(const SisFunction& g) {
    json doc;
    doc["j"] = g.j;
    doc["d"] = g.d();
    doc["M"] = rational_json(g.bound_M);
    doc["generator"] = g.generator.name;
    json coeffs = json::array();
    for (const auto& [n, c] : g.coeffs) coeffs.push_back({{"n", n}, {"c", rational_json(c)}});
    doc["coeffs"] = coeffs;
    return doc.dump();
}

}  // namespace sinet
