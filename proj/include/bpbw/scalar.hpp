#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bpbw {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact rational from numerator/denominator (normalized: lowest terms,
/// positive denominator). Boost 1.74's two-argument constructor is unusable,
/// so we divide.
inline Rational make_rational(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational r(num);
    r /= Rational(den);
    return r;
}

inline std::string rational_str(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

struct parse_error : std::runtime_error {
    std::size_t position;
    parse_error(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct context_error : std::runtime_error {
    explicit context_error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Integer polynomial helpers (little-endian coefficient vectors).

inline std::vector<Int> poly_mul(const std::vector<Int>& a, const std::vector<Int>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Int> out(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

/// Exact division of integer polynomials; `den` must be monic and divide `num`.
inline std::vector<Int> poly_div_exact(std::vector<Int> num, const std::vector<Int>& den) {
    if (den.empty() || den.back() != 1)
        throw std::invalid_argument("poly_div_exact: divisor must be monic");
    if (num.size() < den.size())
        throw std::invalid_argument("poly_div_exact: degree underflow");
    std::vector<Int> quot(num.size() - den.size() + 1, Int(0));
    for (std::size_t k = quot.size(); k-- > 0;) {
        Int c = num[k + den.size() - 1];
        quot[k] = c;
        if (c == 0) continue;
        for (std::size_t i = 0; i < den.size(); ++i)
            num[k + i] -= c * den[i];
    }
    for (const Int& c : num)
        if (c != 0) throw std::invalid_argument("poly_div_exact: nonzero remainder");
    return quot;
}

/// Coefficients of the n-th cyclotomic polynomial, little-endian, via
/// x^n - 1 = prod_{d|n} Phi_d.
inline std::vector<Int> cyclotomic_poly(unsigned n) {
    if (n == 0) throw std::invalid_argument("cyclotomic_poly: n must be positive");
    std::vector<Int> prod{Int(1)};
    for (unsigned d = 1; d < n; ++d)
        if (n % d == 0) prod = poly_mul(prod, cyclotomic_poly(d));
    std::vector<Int> xn1(n + 1, Int(0));
    xn1[0] = -1;
    xn1[n] = 1;
    return poly_div_exact(std::move(xn1), prod);
}

// ---------------------------------------------------------------------------

/// Shared, immutable coefficient context: the formal parameters q_1..q_k and
/// an optional root of unity zeta of order n (reduced modulo Phi_n).
class ScalarContext {
public:
    static std::shared_ptr<const ScalarContext> make(std::vector<std::string> params,
                                                     unsigned zeta_order) {
        return std::shared_ptr<const ScalarContext>(
            new ScalarContext(std::move(params), zeta_order));
    }

    const std::vector<std::string>& params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }
    unsigned zeta_order() const { return zeta_order_; }
    bool has_zeta() const { return zeta_order_ != 0; }
    /// deg Phi_n; 0 when no zeta is declared.
    unsigned zeta_degree() const { return zeta_degree_; }
    const std::vector<Int>& phi() const { return phi_; }

    /// zeta^e reduced modulo Phi_n, little-endian of length zeta_degree(),
    /// for 0 <= e < zeta_order().
    const std::vector<Int>& zeta_power(unsigned e) const { return zeta_pow_.at(e); }

    int param_index(std::string_view name) const {
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i] == name) return static_cast<int>(i);
        return -1;
    }

    bool compatible(const ScalarContext& o) const {
        return zeta_order_ == o.zeta_order_ && params_ == o.params_;
    }

private:
    ScalarContext(std::vector<std::string> params, unsigned zeta_order)
        : params_(std::move(params)), zeta_order_(zeta_order) {
        for (std::size_t i = 0; i < params_.size(); ++i) {
            const std::string& p = params_[i];
            if (p.empty() || (!std::isalpha(static_cast<unsigned char>(p[0])) && p[0] != '_'))
                throw std::invalid_argument("parameter name is not an identifier: '" + p + "'");
            for (char c : p)
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                    throw std::invalid_argument("parameter name is not an identifier: '" + p + "'");
            if (zeta_order_ != 0 && p == "z")
                throw std::invalid_argument("parameter name 'z' collides with the zeta token");
            for (std::size_t j = i + 1; j < params_.size(); ++j)
                if (params_[j] == p)
                    throw std::invalid_argument("duplicate parameter name: '" + p + "'");
        }
        if (zeta_order_ != 0) {
            phi_ = cyclotomic_poly(zeta_order_);
            zeta_degree_ = static_cast<unsigned>(phi_.size() - 1);
            // table of x^e mod Phi_n for e in [0, n)
            std::vector<Int> cur(zeta_degree_, Int(0));
            cur[0] = 1;
            zeta_pow_.reserve(zeta_order_);
            for (unsigned e = 0; e < zeta_order_; ++e) {
                zeta_pow_.push_back(cur);
                // multiply by x, reduce the overflow coefficient (Phi monic)
                Int top = cur.back();
                for (std::size_t i = cur.size(); i-- > 1;) cur[i] = cur[i - 1];
                cur[0] = 0;
                if (top != 0)
                    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= top * phi_[i];
            }
        }
    }

    std::vector<std::string> params_;
    unsigned zeta_order_ = 0;
    unsigned zeta_degree_ = 0;
    std::vector<Int> phi_;
    std::vector<std::vector<Int>> zeta_pow_;
};

using ScalarContextPtr = std::shared_ptr<const ScalarContext>;

/// One Laurent monomial zeta^zeta_exp * q_1^e_1 ... q_k^e_k. After
/// normalization zeta_exp lies in [0, deg Phi_n).
struct ScalarMonomial {
    long long zeta_exp = 0;
    std::vector<long long> q_exps;

    auto operator<=>(const ScalarMonomial&) const = default;

    bool trivial() const {
        if (zeta_exp != 0) return false;
        for (long long e : q_exps)
            if (e != 0) return false;
        return true;
    }
};

/// Exact element of Q[zeta]/Phi_n tensored with the Laurent ring in the
/// declared parameters. Canonical form: no zero coefficients, zeta exponents
/// below deg Phi_n, rationals in lowest terms.
class Scalar {
public:
    using TermMap = std::map<ScalarMonomial, Rational>;

    static Scalar zero(ScalarContextPtr ctx) { return Scalar(std::move(ctx)); }

    static Scalar one(ScalarContextPtr ctx) { return from_rational(std::move(ctx), Rational(1)); }

    static Scalar from_rational(ScalarContextPtr ctx, Rational r) {
        Scalar s(std::move(ctx));
        s.add_term(ScalarMonomial{0, std::vector<long long>(s.ctx_->param_count(), 0)},
                   std::move(r));
        return s;
    }

    static Scalar from_int(ScalarContextPtr ctx, long long v) {
        return from_rational(std::move(ctx), Rational(v));
    }

    static Scalar parameter(ScalarContextPtr ctx, std::size_t idx, long long exp = 1) {
        Scalar s(std::move(ctx));
        if (idx >= s.ctx_->param_count())
            throw std::out_of_range("parameter index out of range");
        ScalarMonomial m{0, std::vector<long long>(s.ctx_->param_count(), 0)};
        m.q_exps[idx] = exp;
        s.add_term(std::move(m), Rational(1));
        return s;
    }

    static Scalar zeta(ScalarContextPtr ctx, long long exp = 1) {
        Scalar s(std::move(ctx));
        if (!s.ctx_->has_zeta())
            throw std::domain_error("zeta used but no zeta order declared");
        s.add_term(ScalarMonomial{exp, std::vector<long long>(s.ctx_->param_count(), 0)},
                   Rational(1));
        return s;
    }

    static Scalar from_term(ScalarContextPtr ctx, ScalarMonomial m, Rational r) {
        Scalar s(std::move(ctx));
        if (m.q_exps.size() != s.ctx_->param_count())
            throw std::invalid_argument("monomial exponent vector has wrong length");
        s.add_term(std::move(m), std::move(r));
        return s;
    }

    const ScalarContextPtr& context() const { return ctx_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    bool is_one() const {
        return terms_.size() == 1 && terms_.begin()->first.trivial() &&
               terms_.begin()->second == 1;
    }

    /// Single term with rational part +-1 (the monomial part is a pure power
    /// by representation). These are exactly the invertible-without-division
    /// scalars accepted as bicharacter values.
    bool is_unit() const {
        if (terms_.size() != 1) return false;
        const Rational& r = terms_.begin()->second;
        return r == 1 || r == -1;
    }

    Scalar operator-() const {
        Scalar s(ctx_);
        for (const auto& [m, r] : terms_) s.terms_.emplace(m, -r);
        return s;
    }

    Scalar& operator+=(const Scalar& o) {
        require_same_context(o);
        for (const auto& [m, r] : o.terms_) add_canonical(m, r);
        return *this;
    }

    Scalar& operator-=(const Scalar& o) {
        require_same_context(o);
        for (const auto& [m, r] : o.terms_) add_canonical(m, -r);
        return *this;
    }

    Scalar& operator*=(const Scalar& o) {
        require_same_context(o);
        Scalar out(ctx_);
        for (const auto& [ma, ra] : terms_) {
            for (const auto& [mb, rb] : o.terms_) {
                ScalarMonomial m;
                m.zeta_exp = ma.zeta_exp + mb.zeta_exp;
                m.q_exps.resize(ma.q_exps.size());
                for (std::size_t i = 0; i < m.q_exps.size(); ++i)
                    m.q_exps[i] = ma.q_exps[i] + mb.q_exps[i];
                out.add_term(std::move(m), ra * rb);
            }
        }
        terms_ = std::move(out.terms_);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }

    bool operator==(const Scalar& o) const {
        if (ctx_ != o.ctx_ && !ctx_->compatible(*o.ctx_)) return false;
        return terms_ == o.terms_;
    }

    /// Exact power. Nonnegative exponents work for any scalar; negative
    /// exponents require a unit.
    Scalar pow(long long m) const {
        if (m >= 0) return pow_nonneg(*this, static_cast<unsigned long long>(m));
        if (!is_unit())
            throw std::domain_error("negative power of a non-unit scalar");
        const auto& [mono, r] = *terms_.begin();
        ScalarMonomial inv;
        inv.zeta_exp = -mono.zeta_exp;
        inv.q_exps.resize(mono.q_exps.size());
        for (std::size_t i = 0; i < inv.q_exps.size(); ++i) inv.q_exps[i] = -mono.q_exps[i];
        Scalar base = from_term(ctx_, std::move(inv), r);  // 1/(+-1) = +-1
        unsigned long long k = static_cast<unsigned long long>(-(m + 1)) + 1;
        return pow_nonneg(base, k);
    }

    /// Canonical text form in the scalar grammar; "0" for zero.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, r] : terms_) {
            bool neg = r < 0;
            if (first) {
                if (neg) out += "-";
            } else {
                out += neg ? " - " : " + ";
            }
            first = false;
            Rational a = neg ? Rational(-r) : r;
            out += term_str(a, m);
        }
        return out;
    }

    /// Magnitude-and-monomial rendering of a single term (no sign), shared
    /// with the element printer.
    std::string term_str(const Rational& magnitude, const ScalarMonomial& m) const {
        std::vector<std::string> factors;
        if (magnitude != 1 || m.trivial()) factors.push_back(rational_str(magnitude));
        if (m.zeta_exp != 0)
            factors.push_back(m.zeta_exp == 1 ? "z" : "z^" + std::to_string(m.zeta_exp));
        for (std::size_t i = 0; i < m.q_exps.size(); ++i) {
            if (m.q_exps[i] == 0) continue;
            const std::string& name = ctx_->params()[i];
            factors.push_back(m.q_exps[i] == 1 ? name
                                                : name + "^" + std::to_string(m.q_exps[i]));
        }
        std::string out;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i) out += "*";
            out += factors[i];
        }
        return out;
    }

private:
    explicit Scalar(ScalarContextPtr ctx) : ctx_(std::move(ctx)) {
        if (!ctx_) throw std::invalid_argument("null scalar context");
    }

    void require_same_context(const Scalar& o) const {
        if (ctx_ != o.ctx_ && !ctx_->compatible(*o.ctx_))
            throw context_error("scalar context mismatch");
    }

    static Scalar pow_nonneg(Scalar base, unsigned long long m) {
        Scalar acc = one(base.ctx_);
        while (m) {
            if (m & 1) acc *= base;
            if (m >>= 1) base *= base;
        }
        return acc;
    }

    // Insert a possibly-unnormalized term, reducing the zeta exponent
    // modulo Phi_n (which may split one monomial into several).
    void add_term(ScalarMonomial m, Rational r) {
        if (r == 0) return;
        if (!ctx_->has_zeta()) {
            if (m.zeta_exp != 0)
                throw std::domain_error("zeta used but no zeta order declared");
            add_canonical(std::move(m), std::move(r));
            return;
        }
        long long n = ctx_->zeta_order();
        long long e = ((m.zeta_exp % n) + n) % n;
        const std::vector<Int>& rep = ctx_->zeta_power(static_cast<unsigned>(e));
        for (std::size_t j = 0; j < rep.size(); ++j) {
            if (rep[j] == 0) continue;
            ScalarMonomial mj = m;
            mj.zeta_exp = static_cast<long long>(j);
            add_canonical(std::move(mj), r * Rational(rep[j]));
        }
    }

    void add_canonical(ScalarMonomial m, Rational r) {
        if (r == 0) return;
        auto [it, inserted] = terms_.emplace(std::move(m), std::move(r));
        if (!inserted) {
            it->second += r;
            if (it->second == 0) terms_.erase(it);
        }
    }

    ScalarContextPtr ctx_;
    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Scalar grammar:
//   scalar   := term (("+" | "-") term)*
//   term     := [sign] factor ("*" factor)*
//   factor   := rational | param "^" int | param | "z" "^" int | "z"
//   rational := int [ "/" posint ]
// Whitespace insignificant.

namespace detail {

class ScalarParser {
public:
    ScalarParser(std::string_view text, ScalarContextPtr ctx)
        : text_(text), ctx_(std::move(ctx)) {}

    Scalar parse_full() {
        Scalar s = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return s;
    }

    Scalar parse_sum() {
        Scalar s = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                s += parse_term();
            } else if (peek() == '-') {
                ++pos_;
                s -= parse_term();
            } else {
                return s;
            }
        }
    }

    /// A single signed product of factors (no top-level +/-).
    Scalar parse_term() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        } else if (peek() == '+') {
            ++pos_;
        }
        Scalar s = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() != '*') break;
            ++pos_;
            s *= parse_factor();
        }
        return neg ? -s : s;
    }

    /// True when the next token can begin a factor: a digit, or an
    /// identifier naming a parameter (or "z" with zeta declared).
    bool at_factor() {
        skip_ws();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
        std::string id = peek_identifier();
        if (id == "z" && ctx_->has_zeta()) return true;
        return ctx_->param_index(id) >= 0;
    }

    std::size_t position() const { return pos_; }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    std::string peek_identifier() {
        std::size_t p = pos_;
        std::string id;
        while (p < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) {
            id += text_[p];
            ++p;
        }
        return id;
    }

    std::string take_identifier() {
        std::string id = peek_identifier();
        pos_ += id.size();
        return id;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

private:
    Scalar parse_factor() {
        skip_ws();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_rational();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t at = pos_;
            std::string id = take_identifier();
            if (id == "z" && ctx_->has_zeta()) return Scalar::zeta(ctx_, parse_opt_exponent());
            int idx = ctx_->param_index(id);
            if (idx >= 0)
                return Scalar::parameter(ctx_, static_cast<std::size_t>(idx),
                                         parse_opt_exponent());
            if (id == "z") throw parse_error("zeta used but no zeta order declared", at);
            throw parse_error("unknown parameter '" + id + "'", at);
        }
        fail("expected a factor");
    }

    Scalar parse_rational() {
        Int num = parse_digits();
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("expected a positive denominator");
            Int den = parse_digits();
            if (den == 0) fail("zero denominator");
            return Scalar::from_rational(ctx_, make_rational(num, den));
        }
        return Scalar::from_rational(ctx_, Rational(num));
    }

    Int parse_digits() {
        std::string digits;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            digits += text_[pos_];
            ++pos_;
        }
        if (digits.empty()) fail("expected digits");
        return Int(digits);
    }

    long long parse_opt_exponent() {
        skip_ws();
        if (peek() != '^') return 1;
        ++pos_;
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an exponent");
        Int v = parse_digits();
        if (v > Int(std::numeric_limits<long long>::max() / 4)) fail("exponent too large");
        long long e = v.convert_to<long long>();
        return neg ? -e : e;
    }

    std::string_view text_;
    ScalarContextPtr ctx_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Scalar parse_scalar(std::string_view text, ScalarContextPtr ctx) {
    return detail::ScalarParser(text, std::move(ctx)).parse_full();
}

}  // namespace bpbw
