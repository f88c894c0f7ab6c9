#include "sinet/checks.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sinet/bits.hpp"
#include "sinet/gadgets.hpp"
#include "sinet/interp.hpp"
#include "sinet/sis.hpp"
#include "sinet/splines.hpp"

namespace sinet {

using json = nlohmann::json;

int CheckOptions::get_int(const std::string& key, int fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("--" + key + " expects an integer");
    }
}

Rational CheckOptions::get_rational(const std::string& key, const Rational& fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        return parse_rational(it->second);
    } catch (const std::exception&) {
        throw ValidationError("--" + key + " expects a number");
    }
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{"lemma-5.1", "lemma-5.2", "lemma-5.3",  "lemma-5.4",
                                                "lemma-5.5", "lemma-6.2", "lemma-7.1",  "lemma-4.3",
                                                "prop-5.1",  "theorem-3.2", "theorem-3.3"};
    return names;
}

namespace {

std::string mode_name(Mode m) { return m == Mode::Rational ? "rational" : "float"; }

json qjson(const Rational& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
    return q.get_str();
}

// Max deviation between a vector-valued net and expected outputs over a point
// list; exact in rational mode.
struct Deviation {
    Rational exact = 0;
    double approx = 0.0;

    void add(const ReluNet& net, const RVec& x, const RVec& want, Mode mode) {
        if (mode == Mode::Rational) {
            RVec got = net.eval(x);
            for (std::size_t i = 0; i < want.size(); ++i) exact = std::max(exact, Rational(abs(got[i] - want[i])));
        } else {
            Vec got = net.eval(to_double(x));
            for (std::size_t i = 0; i < want.size(); ++i) {
                const double e = std::abs(got[i] - to_double(want[i]));
                approx = std::isnan(e) ? INFINITY : std::max(approx, e);
            }
        }
    }
    double value(Mode mode) const { return mode == Mode::Rational ? to_double(exact) : approx; }
    bool within(const Rational& bound, Mode mode) const {
        return mode == Mode::Rational ? exact <= bound : approx <= to_double(bound) + kFloatSlack;
    }
};

CsvRow make_row(const std::string& construct, json params, const ReluNet& net, const SizeBudget& budget,
                double err, const Rational& bound, bool ok, Mode mode) {
    params["mode"] = mode_name(mode);
    params["budget"] = {budget.width_bound, budget.depth_bound};
    CsvRow r;
    r.construct = construct;
    r.param_json = params.dump();
    r.width = net.width();
    r.depth = net.depth();
    r.params = net.param_count();
    r.sup_error = err;
    r.bound = to_double(bound);
    r.pass = ok && audit_budget(net, budget);
    return r;
}

int bit_of(const Rational& x, int i) {
    Rational y = x * pow2(i);
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    return mpz_odd_p(f.get_mpz_t()) ? 1 : 0;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Points of Q(j, delta, 1): every leading j-bit pattern with `tails` tail
// offsets, evenly spaced unless a seed asks for random dyadic ones.
std::vector<Rational> q_points(int j, const Rational& delta, int tails, std::optional<std::uint64_t> seed) {
    std::vector<Rational> pts;
    const Rational room = pow2(-j) - delta;
    std::mt19937_64 rng(seed.value_or(0));
    std::uniform_int_distribution<long> u(0, (1L << 24) - 1);
    for (long lead = 0; lead < (1L << j); ++lead)
        for (int t = 0; t < tails; ++t) {
            Rational off = seed ? room * u(rng) / (1L << 24) : room * t / tails;
            pts.push_back(Rational(lead) * pow2(-j) + off);
        }
    return pts;
}

std::vector<CsvRow> check_extract(const CheckOptions& o) {
    const int j = o.get_int("j", 6), r = o.get_int("r", 3);
    const Rational delta = o.get_rational("delta", pow2(-j - 2));
    if (r > j) throw ValidationError("lemma-5.1 needs r <= j");
    ReluNet net = extract_bits(j, delta, r);
    Deviation dev;
    for (const auto& x : q_points(j, delta, o.get_int("tails", 8), o.seed)) {
        RVec want;
        Rational lead = 0;
        for (int i = 1; i <= r; ++i) {
            want.emplace_back(bit_of(x, i));
            lead += want.back() * pow2(r - i);
        }
        want.push_back(x * pow2(r) - lead);
        dev.add(net, {x}, want, o.mode);
    }
    SizeBudget b((1UL << (r + 1)) + 1, 3);
    json p{{"j", j}, {"r", r}, {"delta", qjson(delta)}};
    return {make_row("extract_bits", p, net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

std::vector<CsvRow> check_split(const CheckOptions& o) {
    const int j = o.get_int("j", 6), r = o.get_int("r", 3), k = o.get_int("k", j / 2);
    const Rational delta = o.get_rational("delta", pow2(-j - 2));
    ReluNet net = split_weighted_bits(j, delta, r, k);
    Deviation dev;
    for (const auto& x : q_points(j, delta, o.get_int("tails", 8), o.seed)) {
        Rational hi = 0, lo = 0;
        for (int i = 1; i <= j; ++i) (i <= k ? hi : lo) += bit_of(x, i) * pow2(j - i);
        dev.add(net, {x}, {hi, lo, x * pow2(j) - hi - lo}, o.mode);
    }
    SizeBudget b((1UL << (r + 1)) + 3, 2 * ceil_div(j, r) + 1);
    json p{{"j", j}, {"r", r}, {"k", k}, {"delta", qjson(delta)}};
    return {make_row("split_weighted_bits", p, net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

std::vector<CsvRow> check_select(const CheckOptions& o) {
    const int r = o.get_int("r", 2), K = o.get_int("K", 8);
    if (K > 16) throw ValidationError("lemma-5.3 sweeps 2^K patterns; keep K <= 16");
    ReluNet net = select_bit(r, K);
    Deviation dev;
    for (long pat = 0; pat < (1L << K); ++pat) {
        const Rational x = Rational(pat) * pow2(-K);
        for (int k = 1; k <= K; ++k) dev.add(net, {x, Rational(k)}, {Rational((pat >> (K - k)) & 1)}, o.mode);
    }
    SizeBudget b((1UL << (r + 1)) + 3, 4 * ceil_div(K, r) + 1);
    json p{{"r", r}, {"K", K}};
    return {make_row("select_bit", p, net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

std::vector<RVec> distinct_points(std::mt19937_64& rng, std::size_t n, int d) {
    std::uniform_int_distribution<long> u(-64, 64);
    std::set<RVec> seen;
    std::vector<RVec> pts;
    while (pts.size() < n) {
        RVec p(d);
        for (auto& c : p) c = frac(u(rng), 4);
        if (seen.insert(p).second) pts.push_back(p);
    }
    return pts;
}

std::vector<CsvRow> check_fit_points(const CheckOptions& o) {
    const int N = o.get_int("N", 3), L = o.get_int("L", 2), d = o.get_int("d", 1);
    std::mt19937_64 rng(o.seed.value_or(0));
    SampleSet s;
    s.points = distinct_points(rng, static_cast<std::size_t>(N) * N * L, d);
    std::uniform_int_distribution<long> v(0, 1 << 12);
    for (std::size_t i = 0; i < s.points.size(); ++i) s.values.push_back(frac(v(rng), 64));
    ReluNet net = fit_point_samples(s, N, L);
    Deviation dev;
    for (std::size_t i = 0; i < s.points.size(); ++i) dev.add(net, s.points[i], {s.values[i]}, o.mode);
    SizeBudget b(4UL * N + 4, L + 2UL);
    json p{{"N", N}, {"L", L}, {"d", d}, {"samples", s.points.size()}};
    return {make_row("fit_point_samples", p, net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

std::vector<CsvRow> check_fit_bits(const CheckOptions& o) {
    const int N = o.get_int("N", 2), L = o.get_int("L", 3), d = o.get_int("d", 1);
    std::mt19937_64 rng(o.seed.value_or(0));
    BitTable t;
    t.points = distinct_points(rng, static_cast<std::size_t>(N) * N * L, d);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        std::vector<int> row(L);
        for (auto& b : row) b = coin(rng) ? 1 : 0;
        t.bits.push_back(row);
    }
    ReluNet net = fit_bit_samples(t, N, L);
    Deviation dev;
    for (std::size_t i = 0; i < t.points.size(); ++i)
        for (int k = 1; k <= L; ++k) {
            RVec x = t.points[i];
            x.emplace_back(k);
            dev.add(net, x, {Rational(t.bits[i][k - 1])}, o.mode);
        }
    SizeBudget b(4UL * N + 5, 5UL * L + 2);
    json p{{"N", N}, {"L", L}, {"d", d}, {"points", t.points.size()}};
    return {make_row("fit_bit_samples", p, net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

std::vector<CsvRow> check_mid(const CheckOptions& o) {
    ReluNet net = mid3();
    Deviation dev;
    auto middle = [](RVec t) {
        std::sort(t.begin(), t.end());
        return t[1];
    };
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b)
            for (int c = -8; c <= 8; ++c) {
                RVec t{frac(a, 4), frac(b, 4), frac(c, 4)};
                dev.add(net, t, {middle(t)}, o.mode);
            }
    if (o.seed) {
        std::mt19937_64 rng(*o.seed);
        std::uniform_int_distribution<long> u(-(1L << 20), 1L << 20);
        for (int i = 0; i < 10000; ++i) {
            RVec t{frac(u(rng), 1024), frac(u(rng), 1024), frac(u(rng), 1024)};
            dev.add(net, t, {middle(t)}, o.mode);
        }
    }
    SizeBudget b(14, 3);
    return {make_row("mid3", json::object(), net, b, dev.value(o.mode), 0, dev.within(0, o.mode), o.mode)};
}

Oracle product_oracle() {
    return {[](const Vec& x) {
                double p = 1;
                for (double v : x) p *= v;
                return p;
            },
            [](const RVec& x) {
                Rational p = 1;
                for (const auto& v : x) p *= v;
                return p;
            }};
}

std::vector<CsvRow> check_product(const CheckOptions& o) {
    std::vector<CsvRow> rows;
    const int s = o.get_int("s", 3);
    {
        ReluNet sq = square_approx(s);
        Oracle sqo{[](const Vec& x) { return x[0] * x[0]; }, [](const RVec& x) { return x[0] * x[0]; }};
        const Rational bound = pow2(-2 * s - 2);
        ErrorReport rep = measure(sq, sqo, MeasureDomain::cube(1, 12), bound, o.mode);
        // the square block has no quoted size formula of its own
        SizeBudget b(sq.width(), sq.depth());
        rows.push_back(make_row("square_approx", {{"s", s}, {"grid", rep.grid_size}}, sq, b, rep.sup_error, bound,
                                rep.bound_satisfied, o.mode));
    }
    const int k = o.get_int("k", 2), N = o.get_int("N", 1), L = o.get_int("L", 1);
    ReluNet phi = product_approx(k, N, L);
    Rational bound = 9 * (k - 1);
    for (int i = 0; i < 7 * k * L; ++i) bound /= N + 1;
    const int level = k == 2 ? 6 : k == 3 ? 4 : 3;
    ErrorReport rep = measure(phi, product_oracle(), MeasureDomain::cube(k, level), bound, o.mode);
    // zero absorption on every grid point with a zero coordinate
    bool absorbs = true;
    for (const auto& p : MeasureDomain::cube(k, level).points()) {
        if (std::none_of(p.begin(), p.end(), [](const Rational& v) { return sgn(v) == 0; })) continue;
        const bool zero = o.mode == Mode::Rational ? sgn(phi.eval(p)[0]) == 0 : phi.eval(to_double(p))[0] == 0.0;
        absorbs = absorbs && zero;
    }
    SizeBudget b(9UL * N + k + 7, 7UL * k * (k - 1) * L);
    json p{{"k", k}, {"N", N}, {"L", L}, {"grid", rep.grid_size}, {"zero_absorbing", absorbs}};
    rows.push_back(
        make_row("product_approx", p, phi, b, rep.sup_error, bound, rep.bound_satisfied && absorbs, o.mode));
    return rows;
}

std::vector<CsvRow> check_bspline(const CheckOptions& o) {
    const int k = o.get_int("k", 3), d = o.get_int("d", 1), N = o.get_int("N", 1), L = o.get_int("L", 1);
    ReluNet net = bspline_net(k, d, N, L);
    const Rational bound = bspline_net_error_bound(k, d, N, L);
    Oracle oracle{[k](const Vec& x) { return bspline_d(k, x); }, [k](const RVec& x) { return bspline_d(k, x); }};
    MeasureDomain dom = MeasureDomain::cube(d, o.get_int("level", d == 1 ? 13 : 7), Rational(-1), Rational(k + 2));
    ErrorReport rep = measure(net, oracle, dom, bound, o.mode);
    bool vanishes = true;
    for (const auto& p : dom.points()) {
        bool outside = false;
        for (const auto& v : p) outside = outside || sgn(v) < 0 || v > k + 1;
        if (!outside) continue;
        const bool zero = o.mode == Mode::Rational ? sgn(net.eval(p)[0]) == 0 : net.eval(to_double(p))[0] == 0.0;
        vanishes = vanishes && zero;
    }
    json p{{"k", k}, {"d", d}, {"N", N}, {"L", L}, {"grid", rep.grid_size}, {"vanishes_outside", vanishes}};
    return {make_row("bspline_net", p, net, bspline_net_budget(k, d, N, L), rep.sup_error, bound,
                     rep.bound_satisfied && vanishes, o.mode)};
}

struct SisSetup {
    SisFunction g;
    ApproxParams params;
    GeneratorNet phi0;
    json info;
};

SisSetup sis_setup(const CheckOptions& o, bool uniform) {
    SisFunction g = o.sis_json.empty() ? sample_sis(o.get_int("k", 2), o.get_int("d", 1), o.get_int("j", 3), o.seed)
                                       : read_sis_json(o.sis_json);
    const int j = g.j, d = g.d();
    const Rational eps = o.get_rational("eps", pow2(-4));
    ApproxParams p = default_params(j, d, eps);
    p.r = o.get_int("r", p.r);
    p.s = o.get_int("s", p.s);
    p.r_tilde = o.get_int("rt", p.r_tilde);
    p.s_tilde = o.get_int("st", p.s_tilde);
    p.delta = o.get_rational("delta", p.delta);
    if (uniform && 3 * p.delta >= pow2(-j)) throw ValidationError("delta must be below 2^-j / 3");
    GeneratorNet phi0 = phi0_for(g.generator, eps);
    json info{{"j", j},
              {"d", d},
              {"generator", g.generator.name},
              {"M", qjson(g.bound_M)},
              {"eps", qjson(eps)},
              {"r", p.r},
              {"s", p.s},
              {"r_tilde", p.r_tilde},
              {"s_tilde", p.s_tilde},
              {"delta", qjson(p.delta)},
              {"C_phi", g.generator.C()},
              {"phi0_err", to_double(phi0.error)}};
    return SisSetup{std::move(g), p, std::move(phi0), std::move(info)};
}

Rational scale_of(const SisFunction& g) { return g.bound_M * g.generator.sup_norm; }

std::vector<CsvRow> check_term(const CheckOptions& o) {
    SisSetup s = sis_setup(o, false);
    const SisFunction& g = s.g;
    MeasureDomain dom = MeasureDomain::on_q(QDomain(g.j, s.params.delta, g.d()), o.get_int("level", 0));
    const Rational bound = 3 * s.params.epsilon * scale_of(g);
    std::vector<CsvRow> rows;
    for (const IVec& k : g.generator.shift_set()) {
        ReluNet net = build_term_net(g, k, s.params, s.phi0.net, s.phi0.error);
        auto term = [&g, k](const auto& x) {
            auto [m, r] = m_r_split(x, g.j);
            IVec idx(m.size());
            using T = typename std::decay_t<decltype(r)>::value_type;
            std::vector<T> arg(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) {
                idx[i] = m[i] + k[i];
                arg[i] = r[i] - static_cast<T>(k[i]);
            }
            if constexpr (std::is_same_v<T, double>)
                return to_double(g.coeff(idx)) * g.generator.phi(arg);
            else
                return Rational(g.coeff(idx) * g.generator(arg));
        };
        Oracle oracle{[term](const Vec& x) { return term(x); }, [term](const RVec& x) { return term(x); }};
        ErrorReport rep = measure(net, oracle, dom, bound, o.mode);
        json p = s.info;
        p["shift"] = k;
        p["grid"] = rep.grid_size;
        rows.push_back(make_row("term_net", p, net, term_budget(g.d(), s.params, s.phi0.net), rep.sup_error, bound,
                                rep.bound_satisfied, o.mode));
    }
    return rows;
}

Oracle sis_oracle(const SisFunction& g) {
    return {[&g](const Vec& x) { return eval_sis(g, x); }, [&g](const RVec& x) { return eval_sis(g, x); }};
}

std::vector<CsvRow> check_q(const CheckOptions& o) {
    SisSetup s = sis_setup(o, false);
    const SisFunction& g = s.g;
    ReluNet net = build_q_net(g, s.params, s.phi0.net, s.phi0.error);
    const Rational bound = 3 * static_cast<long>(g.generator.C()) * s.params.epsilon * scale_of(g);
    MeasureDomain dom = MeasureDomain::on_q(QDomain(g.j, s.params.delta, g.d()), o.get_int("level", 0));
    ErrorReport rep = measure(net, sis_oracle(g), dom, bound, o.mode);
    json p = s.info;
    p["grid"] = rep.grid_size;
    p["domain"] = rep.domain;
    return {make_row("q_net", p, net, q_budget(g.generator, s.params, s.phi0.net), rep.sup_error, bound,
                     rep.bound_satisfied, o.mode)};
}

std::vector<CsvRow> check_uniform(const CheckOptions& o) {
    SisSetup s = sis_setup(o, true);
    const SisFunction& g = s.g;
    ReluNet net = build_uniform_net(g, s.params, s.phi0.net, s.phi0.error);
    const Rational bound = 6 * static_cast<long>(g.generator.C()) * s.params.epsilon * scale_of(g);
    MeasureDomain dom = MeasureDomain::cube(g.d(), o.get_int("level", 0));
    ErrorReport rep = measure(net, sis_oracle(g), dom, bound, o.mode);
    json p = s.info;
    p["grid"] = rep.grid_size;
    p["domain"] = rep.domain;
    return {make_row("uniform_net", p, net, uniform_budget(g.generator, s.params, s.phi0.net), rep.sup_error, bound,
                     rep.bound_satisfied, o.mode)};
}

}  // namespace

SisFunction sample_sis(int k, int d, int j, std::optional<std::uint64_t> seed) {
    SisFunction g;
    g.j = j;
    g.generator = bspline_generator(k, d);
    std::mt19937_64 rng(seed.value_or(0));
    std::uniform_int_distribution<long> u(-(1L << 20) + 1, (1L << 20) - 1);
    const long lo = -(k - 1), hi = (1L << j) - 1;
    IVec n(d, lo);
    unsigned long t = 0;
    while (true) {
        // without a seed: a fixed multiplicative-hash pattern
        const long c = seed ? u(rng) : static_cast<long>((++t * 2654435761UL) % (1UL << 21)) - (1L << 20);
        if (c != 0 && c > -(1L << 20)) g.coeffs[n] = frac(c, 1L << 20);
        int m = d - 1;
        while (m >= 0 && ++n[m] > hi) n[m--] = lo;
        if (m < 0) break;
    }
    g.bound_M = 1;
    g.validate();
    return g;
}

std::vector<CsvRow> run_check(const std::string& name, const CheckOptions& o) {
    if (name == "lemma-5.1") return check_extract(o);
    if (name == "lemma-5.2") return check_split(o);
    if (name == "lemma-5.3") return check_select(o);
    if (name == "lemma-5.4") return check_fit_points(o);
    if (name == "lemma-5.5") return check_fit_bits(o);
    if (name == "lemma-6.2") return check_mid(o);
    if (name == "lemma-7.1") return check_product(o);
    if (name == "lemma-4.3") return check_bspline(o);
    if (name == "prop-5.1") return check_term(o);
    if (name == "theorem-3.2") return check_q(o);
    if (name == "theorem-3.3") return check_uniform(o);
    throw ValidationError("unknown check: " + name);
}

}  // namespace sinet
