#pragma once

// Affine forms over the previous layer's outputs, used to assemble layers
// neuron by neuron.

#include <map>
#include <vector>

#include "sinet/net.hpp"

namespace sinet::detail {

struct Form {
    std::map<std::size_t, Rational> w;
    Rational c;

    static Form var(std::size_t i, const Rational& coef = 1) {
        Form f;
        f.w[i] = coef;
        return f;
    }
    static Form constant(const Rational& v) {
        Form f;
        f.c = v;
        return f;
    }

    Form& operator+=(const Form& o) {
        for (const auto& [i, v] : o.w) w[i] += v;
        c += o.c;
        return *this;
    }
    Form& operator*=(const Rational& s) {
        for (auto& [i, v] : w) v *= s;
        c *= s;
        return *this;
    }
};

inline Form operator+(Form a, const Form& b) { return a += b; }
inline Form operator*(Form a, const Rational& s) { return a *= s; }
inline Form operator*(const Rational& s, Form a) { return a *= s; }
inline Form operator-(Form a) { return a *= Rational(-1); }
inline Form operator-(Form a, const Form& b) { return a += -b; }
inline Form operator+(Form a, const Rational& v) {
    a.c += v;
    return a;
}
inline Form operator-(Form a, const Rational& v) {
    a.c -= v;
    return a;
}

// Collects one row per neuron (or output) of a layer reading `cols` inputs.
class Rows {
public:
    explicit Rows(std::size_t cols) : cols_(cols) {}

    std::size_t push(const Form& f) {
        rows_.push_back(f);
        return rows_.size() - 1;
    }
    std::size_t size() const { return rows_.size(); }

    AffineLayer build() const {
        std::vector<Entry> entries;
        RVec bias;
        bias.reserve(rows_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (const auto& [c, v] : rows_[r].w)
                if (sgn(v) != 0) entries.push_back({r, c, v});
            bias.push_back(rows_[r].c);
        }
        return AffineLayer(rows_.size(), cols_, std::move(entries), std::move(bias));
    }

private:
    std::size_t cols_;
    std::vector<Form> rows_;
};

}  // namespace sinet::detail
