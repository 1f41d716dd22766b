#pragma once

#include <algorithm>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace csflow {

using Rational = mpq_class;
using cplx = std::complex<double>;

// Indeterminates. z: chart coordinates, w: weight parameters, eps: Hamiltonian coefficients.
enum class VarKind : std::uint8_t { eps = 0, w = 1, z = 2 };

struct Var {
    VarKind kind = VarKind::z;
    std::uint16_t index = 0;

    static Var z(int i) { return {VarKind::z, static_cast<std::uint16_t>(i)}; }
    static Var w(int i) { return {VarKind::w, static_cast<std::uint16_t>(i)}; }
    static Var eps(int i) { return {VarKind::eps, static_cast<std::uint16_t>(i)}; }

    auto operator<=>(const Var&) const = default;
};

struct VarNames {
    std::vector<std::string> z;
    std::vector<std::string> w;
    std::vector<std::string> eps;

    std::string operator()(Var v) const;
};

class Monomial {
public:
    using Factor = std::pair<Var, int>;

    Monomial() = default;
    explicit Monomial(Var v, int e = 1) {
        if (e > 0) f_.push_back({v, e});
    }

    const std::vector<Factor>& factors() const { return f_; }
    bool is_one() const { return f_.empty(); }
    int degree() const;
    int degree_in(VarKind k) const;
    int exponent(Var v) const;

    Monomial operator*(const Monomial& o) const;
    // Drops one power of v; caller checks exponent(v) > 0.
    Monomial without(Var v, int times = 1) const;

    std::string to_string(const VarNames& names) const;

    // Graded order: total degree, then lexicographic on exponents.
    friend bool operator<(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }

private:
    std::vector<Factor> f_;
};

namespace detail {
inline bool is_zero(const Rational& c) { return sgn(c) == 0; }
inline bool is_zero(const cplx& c) { return c == cplx(0.0, 0.0); }
std::string coeff_string(const Rational& c);
std::string coeff_string(const cplx& c);
} // namespace detail

template <class C>
class Polynomial {
public:
    using Terms = std::map<Monomial, C>;

    Polynomial() = default;
    Polynomial(const C& c) { add_term(Monomial{}, c); } // NOLINT: constants convert implicitly
    Polynomial(int c) : Polynomial(C(c)) {}              // NOLINT
    Polynomial(double) = delete;
    static Polynomial var(Var v) {
        Polynomial p;
        p.add_term(Monomial(v), C(1));
        return p;
    }
    static Polynomial term(const Monomial& m, const C& c) {
        Polynomial p;
        p.add_term(m, c);
        return p;
    }

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    void add_term(const Monomial& m, const C& c) {
        if (detail::is_zero(c)) return;
        auto it = t_.find(m);
        if (it == t_.end()) {
            t_.emplace(m, c);
            return;
        }
        it->second += c;
        if (detail::is_zero(it->second)) t_.erase(it);
    }

    C coeff(const Monomial& m) const {
        auto it = t_.find(m);
        return it == t_.end() ? C(0) : it->second;
    }
    C constant_term() const { return coeff(Monomial{}); }

    int degree() const {
        int d = -1;
        for (const auto& [m, c] : t_) d = std::max(d, m.degree());
        return d;
    }
    int degree_in(VarKind k) const {
        int d = -1;
        for (const auto& [m, c] : t_) d = std::max(d, m.degree_in(k));
        return d;
    }
    bool is_homogeneous_in(VarKind k) const {
        int d = -2;
        for (const auto& [m, c] : t_) {
            int e = m.degree_in(k);
            if (d == -2) d = e;
            else if (d != e) return false;
        }
        return true;
    }
    bool depends_on(Var v) const {
        for (const auto& [m, c] : t_)
            if (m.exponent(v) > 0) return true;
        return false;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.t_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.t_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const C& s) {
        if (detail::is_zero(s)) {
            t_.clear();
            return *this;
        }
        for (auto& [m, c] : t_) c *= s;
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [m, c] : a.t_) c = -c;
        return a;
    }
    friend Polynomial operator*(Polynomial a, const C& s) { return a *= s; }
    friend Polynomial operator*(const C& s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.t_)
            for (const auto& [mb, cb] : b.t_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.t_ == b.t_; }

    Polynomial pow(int e) const {
        Polynomial r(C(1)), b = *this;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    Polynomial derivative(Var v) const {
        Polynomial r;
        for (const auto& [m, c] : t_) {
            int e = m.exponent(v);
            if (e > 0) r.add_term(m.without(v), c * C(e));
        }
        return r;
    }

    // Simultaneous substitution; variables without an entry stay as they are.
    Polynomial substitute(const std::map<Var, Polynomial>& s) const {
        Polynomial r;
        std::map<std::pair<Var, int>, Polynomial> powers;
        for (const auto& [m, c] : t_) {
            Polynomial acc(c);
            Monomial keep;
            for (const auto& [v, e] : m.factors()) {
                auto it = s.find(v);
                if (it == s.end()) {
                    keep = keep * Monomial(v, e);
                    continue;
                }
                auto key = std::make_pair(v, e);
                auto pw = powers.find(key);
                if (pw == powers.end()) pw = powers.emplace(key, it->second.pow(e)).first;
                acc *= pw->second;
            }
            if (!keep.is_one()) acc = acc * Polynomial::term(keep, C(1));
            r += acc;
        }
        return r;
    }
    Polynomial substitute(Var v, const Polynomial& p) const { return substitute({{v, p}}); }
    Polynomial substitute_zero(Var v) const { return substitute(v, Polynomial{}); }

    template <class D, class F>
    Polynomial<D> map_coeffs(F&& f) const {
        Polynomial<D> r;
        for (const auto& [m, c] : t_) r.add_term(m, f(c));
        return r;
    }

    // Numerical evaluation; value(v) supplies each indeterminate, lift converts coefficients.
    template <class T, class F, class L>
    T evaluate(F&& value, L&& lift) const {
        T acc(0);
        for (const auto& [m, c] : t_) {
            T term = lift(c);
            for (const auto& [v, e] : m.factors()) {
                T x = value(v);
                for (int k = 0; k < e; ++k) term *= x;
            }
            acc += term;
        }
        return acc;
    }

    // Descending graded order, e.g. "-z12^2 + w1*z12 - 3/2".
    std::string to_string(const VarNames& names) const {
        if (t_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
            std::string cs = detail::coeff_string(it->second);
            bool neg = !cs.empty() && cs[0] == '-';
            if (neg) cs = cs.substr(1);
            if (first) out += neg ? "-" : "";
            else out += neg ? " - " : " + ";
            first = false;
            if (it->first.is_one()) {
                out += cs;
            } else {
                if (cs != "1") out += cs + "*";
                out += it->first.to_string(names);
            }
        }
        return out;
    }

private:
    Terms t_;
};

using Poly = Polynomial<Rational>;
using ComplexPoly = Polynomial<cplx>;

ComplexPoly to_complex(const Poly& p);

// Flat evaluator for hot loops (ODE right-hand sides). Only z variables are allowed.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const ComplexPoly& p);
    cplx operator()(const cplx* z) const;

private:
    std::vector<cplx> coef_;
    std::vector<std::uint32_t> start_;
    std::vector<std::pair<std::uint16_t, std::uint16_t>> factors_;
};

} // namespace csflow
