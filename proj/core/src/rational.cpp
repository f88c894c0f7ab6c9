#include "sinet/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sinet/errors.hpp"

namespace sinet {

Rational pow2(long e) {
    mpz_class p = 1;
    if (e >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        return Rational(p);
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return Rational(mpz_class(1), p);
}

Rational from_double(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value has no rational form");
    return Rational(v);
}

Rational parse_rational(const std::string& text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    std::string body;
    std::size_t end = text.size();
    while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    body = text.substr(i, end - i);
    if (body.empty()) throw ParseError("empty number");

    if (auto slash = body.find('/'); slash != std::string::npos) {
        Rational q;
        std::string num = body.substr(0, slash);
        std::string den = body.substr(slash + 1);
        if (!num.empty() && num[0] == '+') num.erase(0, 1);
        mpz_class n, d;
        if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0 || d == 0)
            throw ParseError("bad rational '" + body + "'");
        q = Rational(n, d);
        q.canonicalize();
        return q;
    }

    std::size_t k = 0;
    bool neg = false;
    if (body[k] == '+' || body[k] == '-') neg = body[k++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (; k < body.size(); ++k) {
        char c = body[k];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw ParseError("bad number '" + body + "'");
    long exponent = 0;
    if (k < body.size()) {
        if (body[k] != 'e' && body[k] != 'E') throw ParseError("bad number '" + body + "'");
        ++k;
        std::string exp = body.substr(k);
        char* stop = nullptr;
        exponent = std::strtol(exp.c_str(), &stop, 10);
        if (exp.empty() || *stop != '\0') throw ParseError("bad exponent in '" + body + "'");
    }
    mpz_class mant(digits, 10);
    if (neg) mant = -mant;
    long e10 = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e10)));
    Rational q = e10 >= 0 ? Rational(mant * scale) : Rational(mant, scale);
    q.canonicalize();
    return q;
}

RVec to_rational(const Vec& v) {
    RVec out;
    out.reserve(v.size());
    for (double x : v) out.push_back(from_double(x));
    return out;
}

Vec to_double(const RVec& v) {
    Vec out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(q.get_d());
    return out;
}

long floor_log2(const Rational& q) {
    if (sgn(q) <= 0) throw DomainError("floor_log2 needs a positive argument");
    long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
    while (pow2(e) > q) --e;
    while (pow2(e + 1) <= q) ++e;
    return e;
}

Rational pow2_floor(const Rational& q) { return pow2(floor_log2(q)); }

Rational pow2_ceil(const Rational& q) {
    Rational p = pow2_floor(q);
    return p == q ? p : p * 2;
}

Mode mode_from_env() {
    const char* v = std::getenv("SINET_MODE");
    if (v == nullptr) return Mode::Float;
    std::string s(v);
    if (s == "rational") return Mode::Rational;
    if (s == "float" || s.empty()) return Mode::Float;
    throw ValidationError("SINET_MODE must be 'float' or 'rational', got '" + s + "'");
}

}  // namespace sinet
