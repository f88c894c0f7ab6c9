#include "sinet/interp.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "forms.hpp"
#include "sinet/bits.hpp"

namespace sinet {

using detail::Form;
using detail::Rows;

namespace {

std::size_t common_dim(const std::vector<RVec>& points) {
    if (points.empty()) return 0;
    std::size_t d = points.front().size();
    if (d == 0) throw ValidationError("sample points must have at least one coordinate");
    for (const auto& p : points)
        if (p.size() != d) throw ValidationError("sample points differ in dimension");
    return d;
}

void check_distinct(const std::vector<RVec>& points) {
    std::vector<const RVec*> order;
    for (const auto& p : points) order.push_back(&p);
    auto less = [](const RVec* a, const RVec* b) {
        return std::lexicographical_compare(a->begin(), a->end(), b->begin(), b->end());
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < order.size(); ++i)
        if (*order[i] == *order[i - 1]) throw ValidationError("duplicate sample point");
}

Rational dot(const RVec& w, const RVec& x) {
    Rational s;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

// One block of consecutive sorted samples, split into groups of <= N points.
struct Block {
    std::size_t lo, hi;                           // sample range [lo, hi)
    std::vector<std::pair<Rational, Rational>> steps;  // (left point, ramp width)
    int base = 0;                                 // virtual index left of every step
    std::size_t groups = 0;
    std::size_t pairs = 0;
    std::vector<Rational> scale;                  // C_b per pair
    std::vector<RVec> alpha, beta;                // [pair][virtual index 0..groups+1]
};

Block plan_block(const std::vector<Rational>& z, const RVec& y, std::size_t lo, std::size_t hi, std::size_t N) {
    Block b;
    b.lo = lo;
    b.hi = hi;
    const std::size_t n = z.size();
    b.groups = (hi - lo + N - 1) / N;
    auto step_between = [&](std::size_t left) {
        Rational gap = z[left + 1] - z[left];
        b.steps.push_back({z[left], pow2_floor(gap)});
    };
    b.base = lo > 0 ? 0 : 1;
    if (lo > 0) step_between(lo - 1);
    for (std::size_t g = 1; g < b.groups; ++g) step_between(lo + g * N - 1);
    if (hi < n) step_between(hi - 1);

    for (std::size_t g = 0; g < b.groups; ++g) b.pairs = std::max(b.pairs, std::min(N, hi - (lo + g * N)));
    b.scale.assign(b.pairs, 1);
    for (std::size_t p = 1; p < b.pairs; ++p) {
        Rational worst;
        for (std::size_t g = 0; g < b.groups; ++g) {
            std::size_t at = lo + g * N + p;
            if (at >= std::min(hi, lo + (g + 1) * N)) continue;
            Rational slope = abs(y[at] - y[at - 1]) / (z[at] - z[at - 1]);
            worst = std::max(worst, slope);
        }
        if (sgn(worst) > 0) b.scale[p] = pow2_ceil(worst);
    }

    b.alpha.assign(b.pairs, RVec(b.groups + 2));
    b.beta.assign(b.pairs, RVec(b.groups + 2));
    for (std::size_t g = 0; g < b.groups; ++g) {
        const std::size_t first = lo + g * N;
        const std::size_t last = std::min(hi, first + N);
        for (std::size_t p = 0; p < last - first; ++p) {
            const std::size_t at = first + p;
            Rational a, c;
            if (p == 0) {
                a = z[at] - y[at];
                c = z[at];
            } else {
                Rational h = (y[at] - y[at - 1]) / b.scale[p];
                if (sgn(h) >= 0) {
                    a = z[at - 1];
                    c = z[at - 1] + h;
                } else {
                    a = z[at - 1] - h;
                    c = z[at - 1];
                }
            }
            b.alpha[p][g + 1] = a;
            b.beta[p][g + 1] = c;
        }
    }
    return b;
}

// Threshold as a function of the previous layer: t(v_base) + sum_a
// (t(v_a + 1) - t(v_a)) * step_a, where step_a = relu(rho) - relu(rho - 1).
Form threshold_form(const RVec& t, const Block& b, const std::vector<std::size_t>& ramp_at) {
    Form f = Form::constant(t[b.base]);
    for (std::size_t a = 0; a < b.steps.size(); ++a) {
        Rational jump = t[b.base + a + 1] - t[b.base + a];
        if (sgn(jump) == 0) continue;
        f += Form::var(ramp_at[a], jump);
        f += Form::var(ramp_at[a] + 1, -jump);
    }
    return f;
}

}  // namespace

RVec separating_functional(const std::vector<RVec>& points) {
    std::size_t d = common_dim(points);
    if (d <= 1) return RVec(std::max<std::size_t>(d, 1), 1);
    Rational spread;
    for (std::size_t m = 0; m < d; ++m) {
        Rational lo = points[0][m], hi = points[0][m];
        for (const auto& p : points) {
            lo = std::min(lo, p[m]);
            hi = std::max(hi, p[m]);
        }
        spread = std::max(spread, Rational(hi - lo));
    }
    mpz_class base;
    mpz_cdiv_q(base.get_mpz_t(), spread.get_num_mpz_t(), spread.get_den_mpz_t());
    base += 1;
    // Each colliding pair rules out at most d-1 values of t, so this ends.
    for (mpz_class t = base;; ++t) {
        RVec w(d);
        Rational pw = 1;
        for (std::size_t m = 0; m < d; ++m) {
            w[m] = pw;
            pw *= Rational(t);
        }
        std::vector<Rational> z;
        for (const auto& p : points) z.push_back(dot(w, p));
        std::sort(z.begin(), z.end());
        if (std::adjacent_find(z.begin(), z.end()) == z.end()) return w;
    }
}

ReluNet fit_point_samples(const SampleSet& samples, int N, int L) {
    if (N < 1 || L < 1) throw ValidationError("fit_point_samples needs N, L >= 1");
    if (samples.points.size() != samples.values.size())
        throw ValidationError("sample set has " + std::to_string(samples.points.size()) + " points but " +
                              std::to_string(samples.values.size()) + " values");
    const std::size_t n = samples.points.size();
    const std::size_t per_block = static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
    if (n > per_block * static_cast<std::size_t>(L))
        throw CapacityError(std::to_string(n) + " samples exceed the capacity N^2 L = " +
                            std::to_string(per_block * L));
    for (const auto& y : samples.values)
        if (sgn(y) < 0) throw ValidationError("sample values must be nonnegative");
    std::size_t d = common_dim(samples.points);
    check_distinct(samples.points);

    if (n == 0) {
        // Nothing to fit; the zero map on R^1.
        return ReluNet(1, {AffineLayer(1, 1, {}, RVec(1)), AffineLayer(1, 1, {}, RVec(1))});
    }

    RVec w = separating_functional(samples.points);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Rational> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = dot(w, samples.points[i]);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    const Rational shift = raw[order.front()];
    std::vector<Rational> z(n);
    RVec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = raw[order[i]] - shift;
        y[i] = samples.values[order[i]];
    }

    std::vector<Block> blocks;
    for (std::size_t lo = 0; lo < n; lo += per_block)
        blocks.push_back(plan_block(z, y, lo, std::min(n, lo + per_block), static_cast<std::size_t>(N)));
    const std::size_t nb = blocks.size();

    // Hidden layer t (1-based) holds: the projected input z (t <= nb), the
    // ramps of block t, the pairs of block t-1 and the running sum of blocks
    // up to t-2. Everything carried is nonnegative.
    Form z_prev;
    for (std::size_t m = 0; m < d; ++m) z_prev += Form::var(m, w[m]);
    z_prev = z_prev - shift;
    Form sum_prev;
    bool have_sum = false;
    std::vector<std::size_t> ramps_prev;
    Form contribution_prev;
    std::vector<Rows> layers;
    std::size_t cols = d;

    for (std::size_t t = 1; t <= nb + 1; ++t) {
        Rows h(cols);
        std::size_t zi = 0;
        if (t <= nb) zi = h.push(z_prev);

        std::vector<std::size_t> ramps;
        if (t <= nb) {
            for (const auto& [q, width] : blocks[t - 1].steps) {
                Form rho = (z_prev - q) * (1 / width);
                ramps.push_back(h.push(rho));
                h.push(rho - Rational(1));
            }
        }

        Form contribution;
        if (t >= 2) {
            const Block& b = blocks[t - 2];
            for (std::size_t p = 0; p < b.pairs; ++p) {
                std::size_t ia = h.push(z_prev - threshold_form(b.alpha[p], b, ramps_prev));
                std::size_t ib = h.push(z_prev - threshold_form(b.beta[p], b, ramps_prev));
                contribution += Form::var(ia, b.scale[p]);
                contribution += Form::var(ib, -b.scale[p]);
            }
        }

        std::size_t si = 0;
        const bool sum_here = t >= 3;
        if (sum_here) si = h.push((have_sum ? sum_prev : Form{}) + contribution_prev);

        cols = h.size();
        layers.push_back(std::move(h));
        z_prev = Form::var(zi);
        ramps_prev = std::move(ramps);
        contribution_prev = std::move(contribution);
        if (sum_here) {
            sum_prev = Form::var(si);
            have_sum = true;
        }
    }

    Rows out(cols);
    out.push((have_sum ? sum_prev : Form{}) + contribution_prev);
    layers.push_back(std::move(out));

    std::vector<AffineLayer> built;
    for (auto& r : layers) built.push_back(r.build());
    return ReluNet(d, std::move(built));
}

ReluNet fit_bit_samples(const BitTable& table, int N, int L) {
    if (N < 1 || L < 1) throw ValidationError("fit_bit_samples needs N, L >= 1");
    if (table.points.size() != table.bits.size()) throw ValidationError("bit table rows differ from point count");
    SampleSet packed;
    packed.points = table.points;
    for (const auto& row : table.bits) {
        if (row.size() > static_cast<std::size_t>(L))
            throw ValidationError("bit table has more than L = " + std::to_string(L) + " columns");
        Rational v;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] != 0 && row[k] != 1) throw ValidationError("bit table entries must be 0 or 1");
            if (row[k]) v += pow2(-static_cast<long>(k + 1));
        }
        packed.values.push_back(v);
    }
    ReluNet values = fit_point_samples(packed, N, L);
    if (table.points.empty()) {
        // Input is (x, k) with an unknown x dimension; treat x as scalar.
        values = ReluNet(1, {AffineLayer(1, 1, {}, RVec(1)), AffineLayer(1, 1, {}, RVec(1))});
    }
    ReluNet lifted = stack({values, passthrough(1, Sign::Nonneg, values.depth())});
    return compose(lifted, select_bit(1, L));
}

BitTable read_bit_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("bit table CSV is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
            header.push_back(cell);
        }
    }
    std::size_t d = 0, L = 0;
    for (const auto& h : header) {
        if (h == "x_" + std::to_string(d + 1) && L == 0)
            ++d;
        else if (h == "b_" + std::to_string(L + 1))
            ++L;
        else
            throw ParseError("unexpected bit table column '" + h + "'");
    }
    if (d == 0) throw ParseError("bit table needs at least one x_ column");

    BitTable table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != d + L)
            throw ParseError("bit table line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(d + L));
        RVec x;
        for (std::size_t m = 0; m < d; ++m) x.push_back(parse_rational(cells[m]));
        std::vector<int> bits;
        for (std::size_t k = 0; k < L; ++k) {
            Rational b = parse_rational(cells[d + k]);
            if (b != 0 && b != 1) throw ParseError("bit table line " + std::to_string(lineno) + " has a non-binary bit");
            bits.push_back(b == 1);
        }
        table.points.push_back(std::move(x));
        table.bits.push_back(std::move(bits));
    }
    return table;
}

void write_bit_table_csv(std::ostream& out, const BitTable& table) {
    std::size_t d = table.points.empty() ? 1 : table.points.front().size();
    std::size_t L = table.bits.empty() ? 0 : table.bits.front().size();
    for (std::size_t m = 0; m < d; ++m) out << (m ? "," : "") << "x_" << m + 1;
    for (std::size_t k = 0; k < L; ++k) out << ",b_" << k + 1;
    out << "\n";
    for (std::size_t i = 0; i < table.points.size(); ++i) {
        for (std::size_t m = 0; m < d; ++m) out << (m ? "," : "") << table.points[i][m].get_str();
        for (int b : table.bits[i]) out << "," << b;
        out << "\n";
    }
}

}  // namespace sinet
