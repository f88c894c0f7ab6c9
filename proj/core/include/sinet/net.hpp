#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sinet/errors.hpp"
#include "sinet/rational.hpp"

namespace sinet {

struct SizeInfo {
    std::size_t width = 0;
    std::size_t depth = 0;
    std::size_t params = 0;
};

struct SizeBudget {
    std::size_t width_bound;
    std::size_t depth_bound;

    SizeBudget(std::size_t width, std::size_t depth) : width_bound(width), depth_bound(depth) {
        if (width < 1 || depth < 1) throw ValidationError("size budget bounds must be >= 1");
    }
};

struct Entry {
    std::size_t row;
    std::size_t col;
    Rational value;
};

// x -> A x + b, with A held in compressed-row form. Coefficients are exact
// rationals; a double copy is kept for the float evaluator.
class AffineLayer {
public:
    AffineLayer() = default;
    // Duplicate (row, col) entries are summed, zeros dropped.
    AffineLayer(std::size_t rows, std::size_t cols, std::vector<Entry> entries, RVec bias);

    static AffineLayer dense(const std::vector<RVec>& weights, RVec bias);
    static AffineLayer identity(std::size_t dim);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nonzeros() const { return col_.size(); }

    Rational weight(std::size_t r, std::size_t c) const;
    const Rational& bias(std::size_t r) const { return bias_[r]; }
    const RVec& bias() const { return bias_; }

    // Entries of row r live at positions [row_begin(r), row_end(r)).
    std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }
    std::size_t row_end(std::size_t r) const { return row_ptr_[r + 1]; }
    std::size_t col_at(std::size_t k) const { return col_[k]; }
    const Rational& value_at(std::size_t k) const { return val_[k]; }

    std::vector<RVec> dense_weights() const;
    std::vector<Entry> entries() const;

    void apply(const double* in, double* out) const;
    void apply(const Rational* in, Rational* out) const;

    double frobenius_norm() const;

    bool operator==(const AffineLayer& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    RVec val_;
    Vec fval_;
    RVec bias_;
    Vec fbias_;
};

// Accumulates sparse entries for one affine layer.
class LayerBuilder {
public:
    LayerBuilder(std::size_t rows, std::size_t cols);

    LayerBuilder& add(std::size_t r, std::size_t c, const Rational& v);
    LayerBuilder& add_bias(std::size_t r, const Rational& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    AffineLayer build();

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Entry> entries_;
    RVec bias_;
};

// T_L o relu o ... o relu o T_1. Immutable once built.
class ReluNet {
public:
    ReluNet(std::size_t input_dim, std::vector<AffineLayer> layers);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return layers_.back().rows(); }
    std::size_t depth() const { return layers_.size(); }
    std::size_t width() const;
    std::size_t param_count() const;
    SizeInfo size() const { return {width(), depth(), param_count()}; }

    const std::vector<AffineLayer>& layers() const { return layers_; }

    Vec eval(const Vec& x) const;
    RVec eval(const RVec& x) const;

    // Product of layer Frobenius norms; a Lipschitz constant for the
    // Euclidean norm since relu is 1-Lipschitz.
    double lipschitz_bound() const;

    bool operator==(const ReluNet& other) const;

private:
    template <class T>
    std::vector<T> run(const std::vector<T>& x) const;

    std::size_t input_dim_;
    std::vector<AffineLayer> layers_;
};

enum class Sign { Nonneg, Signed };
enum class Pad { Off, Signed, Nonneg };

// Depth-1 net x -> A x + b.
ReluNet affine(AffineLayer layer);
ReluNet identity(std::size_t dim);

// Identity map carried through depth-1 hidden layers. Nonneg uses relu(x) and
// is exact only for x >= 0; Signed uses relu(x) - relu(-x).
ReluNet passthrough(std::size_t dim, Sign sign, std::size_t depth = 2);

// second o first, merging the boundary affine pair.
ReluNet compose(const ReluNet& first, const ReluNet& second);
ReluNet compose(const std::vector<ReluNet>& chain);

// Block-diagonal placement. With padding, shallower nets are extended by a
// passthrough on their outputs.
ReluNet stack(const std::vector<ReluNet>& nets, Pad pad = Pad::Off);

// Same as stack, but every block reads the one shared input vector.
ReluNet parallel(const std::vector<ReluNet>& nets, Pad pad = Pad::Off);

// Identical dims and (double-rounded) coefficients.
bool structurally_equal(const ReluNet& a, const ReluNet& b);

// Wire format. With exact=true, coefficients that are not doubles are written
// as "p/q" strings; the reader accepts both.
std::string serialize(const ReluNet& net, bool exact = false);
ReluNet deserialize(const std::string& text);

}  // namespace sinet
