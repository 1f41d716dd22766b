#include "csflow/poly.hpp"

#include <cmath>
#include <cstdio>

namespace csflow {

std::string VarNames::operator()(Var v) const {
    const std::vector<std::string>* table = nullptr;
    const char* fallback = "";
    switch (v.kind) {
    case VarKind::z: table = &z; fallback = "z#"; break;
    case VarKind::w: table = &w; fallback = "w"; break;
    case VarKind::eps: table = &eps; fallback = "eps#"; break;
    }
    if (v.index < table->size()) return (*table)[v.index];
    int shown = v.kind == VarKind::w ? v.index + 1 : v.index;
    return fallback + std::to_string(shown);
}

int Monomial::degree() const {
    int d = 0;
    for (const auto& f : f_) d += f.second;
    return d;
}

int Monomial::degree_in(VarKind k) const {
    int d = 0;
    for (const auto& f : f_)
        if (f.first.kind == k) d += f.second;
    return d;
}

int Monomial::exponent(Var v) const {
    for (const auto& f : f_)
        if (f.first == v) return f.second;
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.f_.reserve(f_.size() + o.f_.size());
    auto a = f_.begin(), b = o.f_.begin();
    while (a != f_.end() || b != o.f_.end()) {
        if (b == o.f_.end() || (a != f_.end() && a->first < b->first)) {
            r.f_.push_back(*a++);
        } else if (a == f_.end() || b->first < a->first) {
            r.f_.push_back(*b++);
        } else {
            r.f_.push_back({a->first, a->second + b->second});
            ++a;
            ++b;
        }
    }
    return r;
}

Monomial Monomial::without(Var v, int times) const {
    Monomial r;
    for (const auto& f : f_) {
        if (f.first == v) {
            if (f.second > times) r.f_.push_back({v, f.second - times});
        } else {
            r.f_.push_back(f);
        }
    }
    return r;
}

std::string Monomial::to_string(const VarNames& names) const {
    std::string out;
    for (const auto& [v, e] : f_) {
        if (!out.empty()) out += "*";
        out += names(v);
        if (e > 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
}

bool operator<(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    // Same degree: the monomial carrying an earlier variable to a higher power is larger.
    std::size_t n = std::min(a.f_.size(), b.f_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fa = a.f_[i];
        const auto& fb = b.f_[i];
        if (fa.first != fb.first) return fb.first < fa.first;
        if (fa.second != fb.second) return fa.second < fb.second;
    }
    return a.f_.size() < b.f_.size();
}

namespace detail {

std::string coeff_string(const Rational& c) { return c.get_str(); }

std::string coeff_string(const cplx& c) {
    char buf[96];
    if (c.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", c.real());
    } else if (c.real() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17gi", c.imag());
    } else {
        std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", c.real(), c.imag());
    }
    return buf;
}

} // namespace detail

ComplexPoly to_complex(const Poly& p) {
    return p.map_coeffs<cplx>([](const Rational& c) { return cplx(c.get_d(), 0.0); });
}

CompiledPoly::CompiledPoly(const ComplexPoly& p) {
    for (const auto& [m, c] : p.terms()) {
        coef_.push_back(c);
        start_.push_back(static_cast<std::uint32_t>(factors_.size()));
        for (const auto& [v, e] : m.factors())
            factors_.push_back({v.index, static_cast<std::uint16_t>(e)});
    }
    start_.push_back(static_cast<std::uint32_t>(factors_.size()));
}

cplx CompiledPoly::operator()(const cplx* z) const {
    cplx acc(0.0, 0.0);
    for (std::size_t t = 0; t < coef_.size(); ++t) {
        cplx term = coef_[t];
        for (auto k = start_[t]; k < start_[t + 1]; ++k) {
            const auto& [i, e] = factors_[k];
            for (int j = 0; j < e; ++j) term *= z[i];
        }
        acc += term;
    }
    return acc;
}

} // namespace csflow
