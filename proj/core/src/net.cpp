#include "sinet/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sinet {

AffineLayer::AffineLayer(std::size_t rows, std::size_t cols, std::vector<Entry> entries, RVec bias)
    : rows_(rows), cols_(cols), bias_(std::move(bias)) {
    if (bias_.size() != rows_)
        throw ShapeError("bias length " + std::to_string(bias_.size()) + " != rows " + std::to_string(rows_));
    if (cols_ > std::numeric_limits<std::uint32_t>::max()) throw ShapeError("layer too wide");
    for (const auto& e : entries)
        if (e.row >= rows_ || e.col >= cols_) throw ShapeError("weight entry outside the layer shape");

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    row_ptr_.assign(rows_ + 1, 0);
    for (std::size_t k = 0; k < entries.size();) {
        std::size_t r = entries[k].row, c = entries[k].col;
        Rational sum = entries[k].value;
        std::size_t m = k + 1;
        for (; m < entries.size() && entries[m].row == r && entries[m].col == c; ++m) sum += entries[m].value;
        if (sgn(sum) != 0) {
            col_.push_back(static_cast<std::uint32_t>(c));
            fval_.push_back(sum.get_d());
            val_.push_back(std::move(sum));
            ++row_ptr_[r + 1];
        }
        k = m;
    }
    for (std::size_t r = 0; r < rows_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    fbias_ = to_double(bias_);
}

AffineLayer AffineLayer::dense(const std::vector<RVec>& weights, RVec bias) {
    std::size_t rows = weights.size();
    std::size_t cols = rows ? weights[0].size() : 0;
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        if (weights[r].size() != cols) throw ShapeError("ragged weight matrix");
        for (std::size_t c = 0; c < cols; ++c)
            if (sgn(weights[r][c]) != 0) entries.push_back({r, c, weights[r][c]});
    }
    return AffineLayer(rows, cols, std::move(entries), std::move(bias));
}

AffineLayer AffineLayer::identity(std::size_t dim) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < dim; ++i) entries.push_back({i, i, 1});
    return AffineLayer(dim, dim, std::move(entries), RVec(dim));
}

Rational AffineLayer::weight(std::size_t r, std::size_t c) const {
    auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
    if (it == last || *it != c) return 0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<RVec> AffineLayer::dense_weights() const {
    std::vector<RVec> w(rows_, RVec(cols_));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) w[r][col_[k]] = val_[k];
    return w;
}

std::vector<Entry> AffineLayer::entries() const {
    std::vector<Entry> out;
    out.reserve(col_.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_[k], val_[k]});
    return out;
}

void AffineLayer::apply(const double* in, double* out) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = fbias_[r];
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += fval_[k] * in[col_[k]];
        out[r] = acc;
    }
}

void AffineLayer::apply(const Rational* in, Rational* out) const {
    Rational t;
    for (std::size_t r = 0; r < rows_; ++r) {
        Rational& acc = out[r];
        acc = bias_[r];
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const Rational& x = in[col_[k]];
            if (sgn(x) == 0) continue;
            mpq_mul(t.get_mpq_t(), val_[k].get_mpq_t(), x.get_mpq_t());
            mpq_add(acc.get_mpq_t(), acc.get_mpq_t(), t.get_mpq_t());
        }
    }
}

double AffineLayer::frobenius_norm() const {
    double s = 0;
    for (double v : fval_) s += v * v;
    return std::sqrt(s);
}

bool AffineLayer::operator==(const AffineLayer& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && row_ptr_ == o.row_ptr_ && col_ == o.col_ && val_ == o.val_ &&
           bias_ == o.bias_;
}

LayerBuilder::LayerBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bias_(rows) {}

LayerBuilder& LayerBuilder::add(std::size_t r, std::size_t c, const Rational& v) {
    if (r >= rows_ || c >= cols_) throw ShapeError("builder entry outside the layer shape");
    if (sgn(v) != 0) entries_.push_back({r, c, v});
    return *this;
}

LayerBuilder& LayerBuilder::add_bias(std::size_t r, const Rational& v) {
    if (r >= rows_) throw ShapeError("builder bias outside the layer shape");
    bias_[r] += v;
    return *this;
}

AffineLayer LayerBuilder::build() {
    return AffineLayer(rows_, cols_, std::move(entries_), std::move(bias_));
}

ReluNet::ReluNet(std::size_t input_dim, std::vector<AffineLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
    if (input_dim_ == 0) throw ShapeError("input_dim must be positive");
    if (layers_.empty()) throw ShapeError("a net needs at least one affine layer");
    std::size_t prev = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].cols() != prev)
            throw ShapeError("layer " + std::to_string(l) + " expects " + std::to_string(layers_[l].cols()) +
                             " inputs but receives " + std::to_string(prev));
        if (layers_[l].rows() == 0) throw ShapeError("layer " + std::to_string(l) + " has no outputs");
        prev = layers_[l].rows();
    }
}

std::size_t ReluNet::width() const {
    if (layers_.size() == 1) return std::max(input_dim_, output_dim());
    std::size_t w = 0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) w = std::max(w, layers_[l].rows());
    return w;
}

std::size_t ReluNet::param_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.rows() * layer.cols() + layer.rows();
    return n;
}

template <class T>
std::vector<T> ReluNet::run(const std::vector<T>& x) const {
    if (x.size() != input_dim_)
        throw ShapeError("input has length " + std::to_string(x.size()) + ", net expects " +
                         std::to_string(input_dim_));
    std::vector<T> cur = x, next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        next.resize(layers_[l].rows());
        layers_[l].apply(cur.data(), next.data());
        if (l + 1 < layers_.size())
            for (auto& v : next)
                if (v < 0) v = 0;
        std::swap(cur, next);
    }
    return cur;
}

Vec ReluNet::eval(const Vec& x) const { return run(x); }
RVec ReluNet::eval(const RVec& x) const { return run(x); }

double ReluNet::lipschitz_bound() const {
    double p = 1;
    for (const auto& layer : layers_) p *= layer.frobenius_norm();
    return p;
}

bool ReluNet::operator==(const ReluNet& o) const { return input_dim_ == o.input_dim_ && layers_ == o.layers_; }

ReluNet affine(AffineLayer layer) {
    std::size_t in = layer.cols();
    std::vector<AffineLayer> layers;
    layers.push_back(std::move(layer));
    return ReluNet(in, std::move(layers));
}

ReluNet identity(std::size_t dim) { return affine(AffineLayer::identity(dim)); }

ReluNet passthrough(std::size_t dim, Sign sign, std::size_t depth) {
    if (dim == 0) throw ShapeError("passthrough needs a positive dimension");
    if (depth == 0) throw ValidationError("passthrough depth must be >= 1");
    if (depth == 1) return identity(dim);
    std::vector<AffineLayer> layers;
    if (sign == Sign::Nonneg) {
        for (std::size_t l = 0; l < depth; ++l) layers.push_back(AffineLayer::identity(dim));
        return ReluNet(dim, std::move(layers));
    }
    LayerBuilder first(2 * dim, dim);
    for (std::size_t i = 0; i < dim; ++i) first.add(i, i, 1).add(dim + i, i, -1);
    layers.push_back(first.build());
    for (std::size_t l = 1; l + 1 < depth; ++l) layers.push_back(AffineLayer::identity(2 * dim));
    LayerBuilder last(dim, 2 * dim);
    for (std::size_t i = 0; i < dim; ++i) last.add(i, i, 1).add(i, dim + i, -1);
    layers.push_back(last.build());
    return ReluNet(dim, std::move(layers));
}

namespace {

// (A2, b2) o (A1, b1) = (A2 A1, A2 b1 + b2).
AffineLayer merge(const AffineLayer& inner, const AffineLayer& outer) {
    std::size_t n = inner.cols();
    std::vector<Entry> entries;
    RVec bias(outer.rows());
    RVec acc(n);
    std::vector<char> touched(n, 0);
    std::vector<std::size_t> cols;
    Rational t;
    for (std::size_t r = 0; r < outer.rows(); ++r) {
        bias[r] = outer.bias(r);
        cols.clear();
        for (std::size_t k = outer.row_begin(r); k < outer.row_end(r); ++k) {
            const Rational& a = outer.value_at(k);
            std::size_t mid = outer.col_at(k);
            mpq_mul(t.get_mpq_t(), a.get_mpq_t(), inner.bias(mid).get_mpq_t());
            bias[r] += t;
            for (std::size_t m = inner.row_begin(mid); m < inner.row_end(mid); ++m) {
                std::size_t c = inner.col_at(m);
                if (!touched[c]) {
                    touched[c] = 1;
                    acc[c] = 0;
                    cols.push_back(c);
                }
                mpq_mul(t.get_mpq_t(), a.get_mpq_t(), inner.value_at(m).get_mpq_t());
                acc[c] += t;
            }
        }
        for (std::size_t c : cols) {
            if (sgn(acc[c]) != 0) entries.push_back({r, c, acc[c]});
            touched[c] = 0;
        }
    }
    return AffineLayer(outer.rows(), n, std::move(entries), std::move(bias));
}

}  // namespace

ReluNet compose(const ReluNet& first, const ReluNet& second) {
    if (first.output_dim() != second.input_dim())
        throw ShapeError("compose: first net outputs " + std::to_string(first.output_dim()) +
                         " values, second expects " + std::to_string(second.input_dim()));
    const auto& a = first.layers();
    const auto& b = second.layers();
    std::vector<AffineLayer> layers;
    layers.reserve(a.size() + b.size() - 1);
    layers.insert(layers.end(), a.begin(), a.end() - 1);
    layers.push_back(merge(a.back(), b.front()));
    layers.insert(layers.end(), b.begin() + 1, b.end());
    return ReluNet(first.input_dim(), std::move(layers));
}

ReluNet compose(const std::vector<ReluNet>& chain) {
    if (chain.empty()) throw ShapeError("compose: empty chain");
    ReluNet out = chain.front();
    for (std::size_t i = 1; i < chain.size(); ++i) out = compose(out, chain[i]);
    return out;
}

ReluNet stack(const std::vector<ReluNet>& nets, Pad pad) {
    if (nets.empty()) throw ShapeError("stack: no nets");
    std::size_t depth = 0;
    for (const auto& n : nets) depth = std::max(depth, n.depth());

    std::vector<ReluNet> blocks;
    blocks.reserve(nets.size());
    for (const auto& n : nets) {
        if (n.depth() == depth) {
            blocks.push_back(n);
            continue;
        }
        if (pad == Pad::Off)
            throw ShapeError("stack: depths differ (" + std::to_string(n.depth()) + " vs " + std::to_string(depth) +
                             ") and padding is off");
        Sign s = pad == Pad::Nonneg ? Sign::Nonneg : Sign::Signed;
        blocks.push_back(compose(n, passthrough(n.output_dim(), s, depth - n.depth() + 1)));
    }

    std::size_t in = 0;
    for (const auto& b : blocks) in += b.input_dim();

    std::vector<AffineLayer> layers;
    for (std::size_t l = 0; l < depth; ++l) {
        std::size_t rows = 0, cols = 0;
        for (const auto& b : blocks) {
            rows += b.layers()[l].rows();
            cols += b.layers()[l].cols();
        }
        std::vector<Entry> entries;
        RVec bias;
        bias.reserve(rows);
        std::size_t ro = 0, co = 0;
        for (const auto& b : blocks) {
            const AffineLayer& layer = b.layers()[l];
            for (auto& e : layer.entries()) entries.push_back({e.row + ro, e.col + co, e.value});
            bias.insert(bias.end(), layer.bias().begin(), layer.bias().end());
            ro += layer.rows();
            co += layer.cols();
        }
        layers.emplace_back(rows, cols, std::move(entries), std::move(bias));
    }
    return ReluNet(in, std::move(layers));
}

ReluNet parallel(const std::vector<ReluNet>& nets, Pad pad) {
    if (nets.empty()) throw ShapeError("parallel: no nets");
    std::size_t in = nets.front().input_dim();
    for (const auto& n : nets)
        if (n.input_dim() != in) throw ShapeError("parallel: nets disagree on input dimension");
    LayerBuilder fan(in * nets.size(), in);
    for (std::size_t b = 0; b < nets.size(); ++b)
        for (std::size_t i = 0; i < in; ++i) fan.add(b * in + i, i, 1);
    return compose(affine(fan.build()), stack(nets, pad));
}

bool structurally_equal(const ReluNet& a, const ReluNet& b) {
    if (a.input_dim() != b.input_dim() || a.depth() != b.depth()) return false;
    for (std::size_t l = 0; l < a.depth(); ++l) {
        const auto& x = a.layers()[l];
        const auto& y = b.layers()[l];
        if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
        auto ex = x.entries(), ey = y.entries();
        if (ex.size() != ey.size()) return false;
        for (std::size_t k = 0; k < ex.size(); ++k)
            if (ex[k].row != ey[k].row || ex[k].col != ey[k].col || ex[k].value.get_d() != ey[k].value.get_d())
                return false;
        for (std::size_t r = 0; r < x.rows(); ++r)
            if (x.bias(r).get_d() != y.bias(r).get_d()) return false;
    }
    return true;
}

}  // namespace sinet
