#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sinet/bits.hpp"
#include "sinet/checks.hpp"
#include "sinet/gadgets.hpp"
#include "sinet/harness.hpp"
#include "sinet/interp.hpp"
#include "sinet/sis.hpp"
#include "sinet/splines.hpp"

using namespace sinet;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

RVec parse_vector(const std::string& text) {
    RVec v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(parse_rational(cell));
    if (v.empty()) throw ValidationError("empty input vector");
    return v;
}

Mode pick_mode(const std::string& flag) {
    if (flag.empty()) return mode_from_env();
    if (flag == "float") return Mode::Float;
    if (flag == "rational") return Mode::Rational;
    throw ValidationError("--mode must be float or rational");
}

// Scalar targets for `rate` and `build spline --quasi`.
std::function<double(const Vec&)> target_by_name(const std::string& name) {
    if (name == "sin")
        return [](const Vec& x) {
            double p = 1;
            for (double v : x) p *= std::sin(2 * std::numbers::pi * v);
            return p;
        };
    if (name == "poly")
        return [](const Vec& x) {
            double p = 1;
            for (double v : x) p *= v * (1 - v);
            return p;
        };
    if (name == "kink")
        return [](const Vec& x) {
            double s = 0;
            for (double v : x) s += std::abs(v - 1.0 / 3.0);
            return s;
        };
    if (name == "zero") return [](const Vec&) { return 0.0; };
    throw ValidationError("unknown target '" + name + "' (sin, poly, kink, zero)");
}

// Flags shared by build and verify, forwarded as strings.
struct Knobs {
    std::map<std::string, std::string> values;
    std::string sis_path;
    std::string mode;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* app) {
        for (const char* key : {"j", "r", "k", "K", "N", "L", "d", "s", "eps", "delta", "rt", "st", "tails", "level",
                                "a", "b", "i", "range", "shift"})
            app->add_option_function<std::string>(
                std::string("--") + key, [this, key](const std::string& v) { values[key] = v; }, "");
        app->add_option("--sis", sis_path, "SisFunction JSON file");
        app->add_option("--mode", mode, "float or rational (default: SINET_MODE)");
        app->add_option_function<std::uint64_t>("--seed", [this](std::uint64_t v) { seed = v; },
                                                "randomize inputs with this seed");
    }

    CheckOptions options() const {
        CheckOptions o;
        o.values = values;
        o.seed = seed;
        o.mode = pick_mode(mode);
        if (!sis_path.empty()) o.sis_json = slurp(sis_path);
        return o;
    }
};

ReluNet build_gadget(const std::string& name, const CheckOptions& o) {
    if (name == "indicator")
        return soft_indicator({o.get_rational("a", 0), o.get_rational("b", 1), o.get_rational("delta", pow2(-4))});
    if (name == "gate") return binary_gate();
    if (name == "max2") return max2();
    if (name == "min2") return min2();
    if (name == "max3") return max3();
    if (name == "min3") return min3();
    if (name == "mid") return mid3();
    if (name == "hat") return hat();
    if (name == "teeth") return teeth(o.get_int("i", 1));
    if (name == "square") return square_approx(o.get_int("s", 3));
    if (name == "mul") return mul_approx(o.get_int("s", 3), o.get_rational("range", 1));
    if (name == "product") return product_approx(o.get_int("k", 2), o.get_int("N", 1), o.get_int("L", 1));
    if (name == "window") return support_window(o.get_int("k", 3));
    throw ValidationError("unknown gadget '" + name + "'");
}

ReluNet build_bits(const std::string& kind, const CheckOptions& o) {
    const int j = o.get_int("j", 6), r = o.get_int("r", 3);
    const Rational delta = o.get_rational("delta", pow2(-j - 2));
    if (kind == "extract") return extract_bits(j, delta, r);
    if (kind == "split") return split_weighted_bits(j, delta, r, o.get_int("k", j / 2));
    if (kind == "select") return select_bit(r, o.get_int("K", 8));
    throw ValidationError("unknown bits kind '" + kind + "' (extract, split, select)");
}

SampleSet read_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("sample CSV is empty");
    SampleSet s;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        RVec row = parse_vector(line);
        if (row.size() < 2) throw ParseError("sample rows need x_1..x_d,y");
        s.values.push_back(row.back());
        row.pop_back();
        s.points.push_back(std::move(row));
    }
    return s;
}

void print_rows(const std::vector<CsvRow>& rows) {
    for (const auto& r : rows)
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.construct << " width=" << r.width << " depth=" << r.depth
                  << " params=" << r.params << " sup_error=" << std::setprecision(6) << r.sup_error
                  << " bound=" << r.bound << " " << r.param_json << "\n";
}

bool all_pass(const std::vector<CsvRow>& rows) {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return !rows.empty();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit ReLU network constructions for shift-invariant spaces"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "construct a network (or a SisFunction) and write it as JSON");
    build->require_subcommand(1);
    std::string out_path;
    bool exact = false;
    Knobs bk;

    auto* b_gadget = build->add_subcommand("gadget", "soft indicator, gate, min/max/mid, teeth, square, product");
    std::string gadget_name;
    b_gadget->add_option("--name", gadget_name, "indicator|gate|max2|min2|max3|min3|mid|hat|teeth|square|mul|product|window")
        ->required();
    auto* b_bits = build->add_subcommand("bits", "bit extraction nets");
    std::string bits_kind = "extract";
    b_bits->add_option("--kind", bits_kind, "extract|split|select");
    auto* b_interp = build->add_subcommand("interp", "interpolation nets from CSV samples");
    std::string interp_kind = "points", interp_in;
    b_interp->add_option("--kind", interp_kind, "points (x_1..x_d,y) or bits (x_1..x_d,b_1..b_L)");
    b_interp->add_option("--in", interp_in, "CSV file")->required();
    auto* b_sis = build->add_subcommand("sis", "term, Q-domain or uniform net for a SisFunction");
    std::string sis_kind = "uniform";
    b_sis->add_option("--kind", sis_kind, "term|q|uniform");
    auto* b_spline = build->add_subcommand("spline", "B-spline net, or a quasi-interpolant SisFunction with --quasi");
    std::string quasi;
    b_spline->add_option("--quasi", quasi, "target (sin, poly, kink, zero); writes SisFunction JSON");

    for (auto* sub : {b_gadget, b_bits, b_interp, b_sis, b_spline}) {
        sub->add_option("--out", out_path, "output file")->required();
        sub->add_flag("--exact", exact, "write non-double coefficients as p/q strings");
        bk.attach(sub);
    }

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a serialized net at one point");
    std::string net_path, in_vec, eval_mode;
    eval->add_option("--net", net_path, "network JSON")->required();
    eval->add_option("--in", in_vec, "comma-separated input, e.g. 1,2,3 or 1/3,0.5")->required();
    eval->add_option("--mode", eval_mode, "float or rational (default: SINET_MODE)");

    // verify
    auto* verify = app.add_subcommand("verify", "run a named check; exit 1 if a bound or budget fails");
    std::string check_name;
    verify->add_option("target", check_name, "check name")->required()->check(CLI::IsMember(check_names()));
    Knobs vk;
    vk.attach(verify);

    // rate
    auto* rate = app.add_subcommand("rate", "empirical approximation rate through the uniform net");
    std::string rate_target = "sin", rate_levels = "4,5,6,7";
    int rate_k = 3, rate_d = 1;
    rate->add_option("--target", rate_target, "sin|poly|kink|zero");
    rate->add_option("--k", rate_k, "B-spline order");
    rate->add_option("--d", rate_d, "dimension");
    rate->add_option("--levels", rate_levels, "comma-separated dilation levels");

    // report
    auto* report = app.add_subcommand("report", "run a named check and write CSV (and SVG)");
    std::string report_name, csv_path, svg_path;
    report->add_option("target", report_name, "check name")->required()->check(CLI::IsMember(check_names()));
    report->add_option("--csv", csv_path, "CSV output")->required();
    report->add_option("--svg", svg_path, "SVG output rendered from the CSV");
    Knobs rk;
    rk.attach(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*build) {
            const CheckOptions o = bk.options();
            if (*b_spline && !quasi.empty()) {
                SisFunction g = quasi_interpolate(target_by_name(quasi), o.get_int("j", 4),
                                                  {o.get_int("k", 3), o.get_int("d", 1)});
                spill(out_path, write_sis_json(g) + "\n");
                return kOk;
            }
            ReluNet net = identity(1);
            if (*b_gadget) net = build_gadget(gadget_name, o);
            if (*b_bits) net = build_bits(bits_kind, o);
            if (*b_interp) {
                std::ifstream in(interp_in);
                if (!in) throw ValidationError("cannot read " + interp_in);
                const int N = o.get_int("N", 2), L = o.get_int("L", 1);
                if (interp_kind == "points")
                    net = fit_point_samples(read_samples(in), N, L);
                else if (interp_kind == "bits")
                    net = fit_bit_samples(read_bit_table_csv(in), N, L);
                else
                    throw ValidationError("--kind must be points or bits");
            }
            if (*b_sis) {
                if (o.sis_json.empty()) throw ValidationError("build sis needs --sis FILE");
                SisFunction g = read_sis_json(o.sis_json);
                const Rational eps = o.get_rational("eps", pow2(-4));
                ApproxParams p = default_params(g.j, g.d(), eps);
                p.r = o.get_int("r", p.r);
                p.s = o.get_int("s", p.s);
                p.r_tilde = o.get_int("rt", p.r_tilde);
                p.s_tilde = o.get_int("st", p.s_tilde);
                p.delta = o.get_rational("delta", p.delta);
                GeneratorNet phi0 = phi0_for(g.generator, eps);
                if (sis_kind == "term") {
                    IVec k(g.d(), 0);
                    if (o.has("shift")) {
                        k.clear();
                        for (const auto& c : parse_vector(o.values.at("shift"))) k.push_back(c.get_num().get_si());
                    }
                    net = build_term_net(g, k, p, phi0.net, phi0.error);
                } else if (sis_kind == "q") {
                    net = build_q_net(g, p, phi0.net, phi0.error);
                } else if (sis_kind == "uniform") {
                    net = build_uniform_net(g, p, phi0.net, phi0.error);
                } else {
                    throw ValidationError("--kind must be term, q or uniform");
                }
            }
            if (*b_spline)
                net = bspline_net(o.get_int("k", 3), o.get_int("d", 1), o.get_int("N", 1), o.get_int("L", 1));
            spill(out_path, serialize(net, exact) + "\n");
            std::cerr << "wrote " << out_path << " (width " << net.width() << ", depth " << net.depth() << ")\n";
            return kOk;
        }

        if (*eval) {
            ReluNet net = deserialize(slurp(net_path));
            RVec x = parse_vector(in_vec);
            if (x.size() != net.input_dim()) throw ShapeError("input has the wrong dimension");
            std::string sep;
            if (pick_mode(eval_mode) == Mode::Rational) {
                for (const auto& y : net.eval(x)) {
                    std::cout << sep << y.get_str();
                    sep = ",";
                }
            } else {
                std::cout << std::setprecision(17);
                for (double y : net.eval(to_double(x))) {
                    std::cout << sep << y;
                    sep = ",";
                }
            }
            std::cout << "\n";
            return kOk;
        }

        if (*verify) {
            auto rows = run_check(check_name, vk.options());
            print_rows(rows);
            return all_pass(rows) ? kOk : kFailed;
        }

        if (*rate) {
            std::vector<int> levels;
            for (const auto& v : parse_vector(rate_levels)) levels.push_back(static_cast<int>(v.get_num().get_si()));
            RateFit fit = rate_experiment(target_by_name(rate_target), {rate_k, rate_d}, levels);
            for (std::size_t i = 0; i < levels.size(); ++i)
                std::cout << "j=" << levels[i] << " sup_error=" << std::setprecision(6) << fit.errors[i]
                          << " floor=" << fit.floors[i] << "\n";
            if (fit.verdict == "exact") {
                std::cout << "verdict=exact (errors at the construction floor; no slope fitted)\n";
                return kOk;
            }
            std::cout << "verdict=fit slope=" << fit.slope << " expected=" << fit.slope_expected << "\n";
            return fit.slope <= fit.slope_expected + 0.5 ? kOk : kFailed;
        }

        if (*report) {
            auto rows = run_check(report_name, rk.options());
            {
                std::ofstream out(csv_path);
                if (!out) throw ValidationError("cannot write " + csv_path);
                write_csv(out, rows);
            }
            if (!svg_path.empty()) {
                std::ifstream back(csv_path);
                spill(svg_path, render_svg(read_csv(back)));
            }
            print_rows(rows);
            return all_pass(rows) ? kOk : kFailed;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
