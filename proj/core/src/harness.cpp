#include "sinet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sinet {

// Domains

MeasureDomain MeasureDomain::cube(int d, int level, Rational lo, Rational hi) {
    if (d < 1) throw ValidationError("domain dimension must be >= 1");
    if (level < 0) throw ValidationError("grid level must be nonnegative");
    if (!(lo < hi)) throw ValidationError("empty cube");
    MeasureDomain m;
    m.d_ = d;
    m.level_ = level;
    m.lo_ = lo;
    m.hi_ = hi;
    return m;
}

MeasureDomain MeasureDomain::on_q(const QDomain& q, int level) {
    if (level < 0) throw ValidationError("grid level must be nonnegative");
    MeasureDomain m;
    m.d_ = q.d();
    m.level_ = level;
    m.q_ = q;
    return m;
}

int default_resolution(int d) { return d == 1 ? 12 : d == 2 ? 7 : 4; }

int MeasureDomain::resolution() const { return level_ > 0 ? level_ : default_resolution(d_); }

std::vector<Rational> MeasureDomain::axis() const {
    const int level = resolution();
    if (q_) return q_->axis_grid(level);
    std::vector<Rational> pts;
    const long n = 1L << level;
    const Rational step = (hi_ - lo_) / n;
    for (long i = 0; i <= n; ++i) pts.push_back(lo_ + step * i);
    return pts;
}

std::vector<RVec> MeasureDomain::points() const {
    const std::vector<Rational> ax = axis();
    std::vector<RVec> out;
    if (ax.empty()) return out;
    std::vector<std::size_t> idx(d_, 0);
    while (true) {
        RVec p(d_);
        for (int m = 0; m < d_; ++m) p[m] = ax[idx[m]];
        out.push_back(std::move(p));
        int m = d_ - 1;
        while (m >= 0 && ++idx[m] == ax.size()) idx[m--] = 0;
        if (m < 0) break;
    }
    return out;
}

// Measurement

ErrorReport measure(const ReluNet& net, const Oracle& oracle, const MeasureDomain& domain, const Rational& bound,
                    Mode mode) {
    if (static_cast<int>(net.input_dim()) != domain.dim()) throw ShapeError("net input dim does not match the domain");
    if (net.output_dim() != 1) throw ShapeError("measure needs a scalar net");
    const std::vector<RVec> pts = domain.points();
    if (pts.empty()) throw ValidationError("measurement grid is empty");

    ErrorReport rep;
    rep.grid_size = pts.size();
    rep.domain = domain.name();
    rep.resolution = domain.resolution();
    rep.width = net.width();
    rep.depth = net.depth();
    rep.bound_claimed = to_double(bound);
    rep.mode = mode;

    double l1 = 0.0, l2 = 0.0, sup = 0.0;
    if (mode == Mode::Rational) {
        if (!oracle.exact) throw ValidationError("rational mode needs an exact oracle");
        Rational worst = 0;
        for (const auto& p : pts) {
            Rational e = abs(net.eval(p).front() - oracle.exact(p));
            if (e > worst) worst = e;
            const double ed = to_double(e);
            l1 += ed;
            l2 += ed * ed;
        }
        sup = to_double(worst);
        rep.bound_satisfied = worst <= bound;
    } else {
        for (const auto& p : pts) {
            const Vec x = to_double(p);
            const double e = std::abs(net.eval(x).front() - oracle.f(x));
            if (!(e <= sup)) sup = std::isnan(e) ? std::numeric_limits<double>::infinity() : std::max(sup, e);
            l1 += e;
            l2 += e * e;
        }
        rep.bound_satisfied = sup <= rep.bound_claimed + kFloatSlack;
    }
    const double n = static_cast<double>(pts.size());
    rep.sup_error = sup;
    rep.lp_errors = {{"1", l1 / n}, {"2", std::sqrt(l2 / n)}, {"inf", sup}};
    return rep;
}

bool audit_budget(const ReluNet& net, const SizeBudget& budget) {
    return net.width() <= budget.width_bound && net.depth() <= budget.depth_bound;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError("slope fit needs matching samples");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw ValidationError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

// Construction defaults

ApproxParams default_params(int j, int d, const Rational& epsilon) {
    ApproxParams p;
    p.epsilon = epsilon;
    p.r = p.s = std::max(1, (d * j + 3) / 4);
    const int bits = p.coefficient_bits();
    p.r_tilde = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(bits))));
    p.s_tilde = (bits + p.r_tilde - 1) / p.r_tilde;
    p.delta = pow2(-j - 2);
    return p;
}

GeneratorNet phi0_for(const Generator& gen, const Rational& epsilon) {
    const std::string prefix = "bspline:k=";
    if (gen.name.rfind(prefix, 0) != 0) throw ValidationError("no phi0 network for generator '" + gen.name + "'");
    const int k = std::stoi(gen.name.substr(prefix.size()));
    const Rational budget = epsilon * gen.sup_norm;
    for (int L = 1; L <= 8; ++L)
        if (bspline_phi0_error(k, gen.dim, 2, L) <= budget) return bspline_phi0(k, gen.dim, 2, L);
    throw ValidationError("epsilon too small for a phi0 certificate");
}

// Rates

RateFit rate_experiment(const std::function<double(const Vec&)>& target, const BsplineSpec& spec,
                        const std::vector<int>& levels, const RatePolicy& policy) {
    if (levels.size() < 3) throw ValidationError("rate experiment needs at least three levels");
    RateFit fit;
    fit.levels = levels;
    fit.slope_expected = -spec.k;
    Oracle oracle{target, {}};
    for (int j : levels) {
        SisFunction g = quasi_interpolate(target, j, spec);
        const Rational eps = pow2(-(spec.k * j + policy.extra_bits));
        ApproxParams p = default_params(j, spec.d, eps);
        GeneratorNet phi0 = phi0_for(g.generator, eps);
        ReluNet net = build_uniform_net(g, p, phi0.net, phi0.error);
        const Rational floor_q = 6 * static_cast<long>(g.generator.C()) * g.bound_M * g.generator.sup_norm * eps;
        MeasureDomain dom = MeasureDomain::cube(spec.d, policy.grid_level, policy.lo, policy.hi);
        ErrorReport rep = measure(net, oracle, dom, floor_q, Mode::Float);
        fit.errors.push_back(rep.sup_error);
        fit.floors.push_back(to_double(floor_q));
    }
    bool exact = true;
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (fit.errors[i] > fit.floors[i] + kFloatSlack) exact = false;
    if (exact) {
        fit.verdict = "exact";
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    std::vector<double> xs(levels.begin(), levels.end()), ys;
    for (double e : fit.errors) ys.push_back(std::log2(std::max(e, 1e-300)));
    fit.slope = fit_slope(xs, ys);
    fit.verdict = "fit";
    return fit;
}

// CSV and SVG

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string csv_header() { return "construct,param_json,width,depth,params,sup_error,bound,pass"; }

std::string csv_line(const CsvRow& r) {
    return quote(r.construct) + "," + quote(r.param_json) + "," + std::to_string(r.width) + "," +
           std::to_string(r.depth) + "," + std::to_string(r.params) + "," + num(r.sup_error) + "," + num(r.bound) +
           "," + (r.pass ? "true" : "false");
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << csv_header() << "\n";
    for (const auto& r : rows) out << csv_line(r) << "\n";
}

std::vector<CsvRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) throw ParseError("missing report CSV header");
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split_csv(line);
        if (c.size() != 8) throw ParseError("report CSV row needs 8 cells");
        try {
            CsvRow r;
            r.construct = c[0];
            r.param_json = c[1];
            r.width = std::stoul(c[2]);
            r.depth = std::stoul(c[3]);
            r.params = std::stoul(c[4]);
            r.sup_error = std::stod(c[5]);
            r.bound = std::stod(c[6]);
            if (c[7] != "true" && c[7] != "false") throw ParseError("pass must be true or false");
            r.pass = c[7] == "true";
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw ParseError("bad number in report CSV");
        }
    }
    return rows;
}

std::string render_svg(const std::vector<CsvRow>& rows) {
    const int bar = 18, gap = 10, left = 260, plot = 420, top = 30;
    const int height = top + static_cast<int>(rows.size()) * (2 * bar + gap) + 30;
    // log10 scale from 1e-18 to 1e1
    auto x_of = [&](double v) {
        const double lv = std::log10(std::max(v, 1e-18));
        const double t = std::clamp((lv + 18.0) / 19.0, 0.0, 1.0);
        return left + static_cast<int>(std::lround(t * plot));
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + plot + 40 << "\" height=\"" << height
       << "\" font-family=\"monospace\" font-size=\"11\">\n";
    os << "<text x=\"10\" y=\"18\">sup error (dark) vs bound (light), log10 axis 1e-18 .. 1e1</text>\n";
    int y = top;
    for (const auto& r : rows) {
        os << "<text x=\"10\" y=\"" << y + bar << "\">" << xml_escape(r.construct) << (r.pass ? "" : " FAIL")
           << "</text>\n";
        os << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << x_of(r.bound) - left << "\" height=\"" << bar
           << "\" fill=\"#9ecae1\"/>\n";
        os << "<rect x=\"" << left << "\" y=\"" << y + bar << "\" width=\"" << x_of(r.sup_error) - left
           << "\" height=\"" << bar << "\" fill=\"" << (r.pass ? "#3182bd" : "#de2d26") << "\"/>\n";
        y += 2 * bar + gap;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace sinet
