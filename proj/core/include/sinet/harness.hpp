#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sinet/bits.hpp"
#include "sinet/net.hpp"
#include "sinet/sis.hpp"
#include "sinet/splines.hpp"

namespace sinet {

// Ground truth for a measurement. `exact` is required in rational mode.
struct Oracle {
    std::function<double(const Vec&)> f;
    std::function<Rational(const RVec&)> exact;
};

// Grid to measure on: the dyadic points of Q(j, delta, d) at some level, or a
// uniform grid of [lo, hi]^d with both ends included.
class MeasureDomain {
public:
    static MeasureDomain cube(int d, int level = 0, Rational lo = 0, Rational hi = 1);
    static MeasureDomain on_q(const QDomain& q, int level = 0);

    int dim() const { return d_; }
    bool is_q() const { return q_.has_value(); }
    // level if set, else 12 for d = 1, 7 for d = 2 and 4 beyond
    int resolution() const;
    std::string name() const { return is_q() ? "Q" : "full-cube"; }
    std::vector<Rational> axis() const;
    // Cartesian product of axis(), last coordinate fastest.
    std::vector<RVec> points() const;

private:
    int d_ = 1;
    int level_ = 0;
    Rational lo_ = 0;
    Rational hi_ = 1;
    std::optional<QDomain> q_;
};

int default_resolution(int d);

struct ErrorReport {
    double sup_error = 0.0;
    std::map<std::string, double> lp_errors;  // "1", "2", "inf"
    std::size_t grid_size = 0;
    std::string domain;
    int resolution = 0;
    std::size_t width = 0;
    std::size_t depth = 0;
    double bound_claimed = 0.0;
    bool bound_satisfied = false;
    Mode mode = Mode::Float;
};

// Absolute slack added to bounds in float mode.
inline constexpr double kFloatSlack = 1e-9;

ErrorReport measure(const ReluNet& net, const Oracle& oracle, const MeasureDomain& domain, const Rational& bound,
                    Mode mode = mode_from_env());

bool audit_budget(const ReluNet& net, const SizeBudget& budget);

// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Parameters used when a caller gives only j, d and epsilon:
// r = s = max(1, ceil(d j / 4)), r~ = ceil(sqrt(bits)), s~ = ceil(bits / r~),
// delta = 2^{-j-2}.
ApproxParams default_params(int j, int d, const Rational& epsilon);

// phi0 for a B-spline generator: N = 2 and the smallest L whose certificate
// is within epsilon ||phi||.
GeneratorNet phi0_for(const Generator& gen, const Rational& epsilon);

struct RatePolicy {
    int extra_bits = 8;         // epsilon = 2^{-(k j + extra_bits)}
    Rational lo = Rational(1, 4);  // measured on [lo, hi]^d
    Rational hi = Rational(3, 4);
    int grid_level = 10;
};

struct RateFit {
    std::vector<int> levels;
    std::vector<double> errors;
    std::vector<double> floors;  // 6 C M ||phi|| epsilon per level
    double slope = 0.0;          // NaN when the verdict is "exact"
    double slope_expected = 0.0;
    std::string verdict;         // "fit" or "exact"
};

// Quasi-interpolate, build the uniform net and measure, for each level.
RateFit rate_experiment(const std::function<double(const Vec&)>& target, const BsplineSpec& spec,
                        const std::vector<int>& levels, const RatePolicy& policy = {});

// Report rows: construct,param_json,width,depth,params,sup_error,bound,pass
struct CsvRow {
    std::string construct;
    std::string param_json;
    std::size_t width = 0;
    std::size_t depth = 0;
    std::size_t params = 0;
    double sup_error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(std::istream& in);
// Bar chart of sup_error against bound per row, log scale. Depends only on
// the rows.
std::string render_svg(const std::vector<CsvRow>& rows);

}  // namespace sinet
