#include "csflow/diffop.hpp"

#include <set>
#include <stdexcept>

namespace csflow {

Poly DiffOp::coefficient(int var) const {
    auto it = partials_.find(var);
    return it == partials_.end() ? Poly{} : it->second;
}

void DiffOp::add_partial(int var, const Poly& q) {
    if (q.is_zero()) return;
    auto& slot = partials_[var];
    slot += q;
    if (slot.is_zero()) partials_.erase(var);
}

int DiffOp::max_partial_degree(VarKind k) const {
    int d = -1;
    for (const auto& [v, q] : partials_) d = std::max(d, q.degree_in(k));
    return d;
}

Poly DiffOp::apply(const Poly& f) const {
    Poly r = scalar_ * f;
    for (const auto& [v, q] : partials_) r += q * f.derivative(Var::z(v));
    return r;
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
    scalar_ += o.scalar_;
    for (const auto& [v, q] : o.partials_) add_partial(v, q);
    return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
    scalar_ -= o.scalar_;
    for (const auto& [v, q] : o.partials_) add_partial(v, -q);
    return *this;
}

DiffOp& DiffOp::operator*=(const Rational& s) {
    if (sgn(s) == 0) {
        *this = DiffOp{};
        return *this;
    }
    scalar_ *= s;
    for (auto& [v, q] : partials_) q *= s;
    return *this;
}

DiffOp DiffOp::times(const Poly& p) const {
    DiffOp r(scalar_ * p);
    for (const auto& [v, q] : partials_) r.add_partial(v, q * p);
    return r;
}

DiffOp DiffOp::substitute(const std::map<Var, Poly>& s) const {
    DiffOp r(scalar_.substitute(s));
    for (const auto& [v, q] : partials_) r.add_partial(v, q.substitute(s));
    return r;
}

std::string DiffOp::to_string(const VarNames& names) const {
    std::string out;
    if (!scalar_.is_zero()) out = scalar_.to_string(names);
    for (const auto& [v, q] : partials_) {
        std::string d = "d_" + names(Var::z(v));
        std::string term;
        if (q == Poly(1)) term = d;
        else if (q == Poly(-1)) term = "-" + d;
        else term = "(" + q.to_string(names) + ")*" + d;
        if (out.empty()) out = term;
        else if (term[0] == '-') out += " - " + term.substr(1);
        else out += " + " + term;
    }
    return out.empty() ? "0" : out;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) {
    DiffOp r;
    Poly scalar;
    for (const auto& [v, q] : a.partials()) scalar += q * b.scalar().derivative(Var::z(v));
    for (const auto& [v, q] : b.partials()) scalar -= q * a.scalar().derivative(Var::z(v));
    r.set_scalar(scalar);

    std::set<int> targets;
    for (const auto& [v, q] : a.partials()) targets.insert(v);
    for (const auto& [v, q] : b.partials()) targets.insert(v);
    for (int g : targets) {
        Poly qa = a.coefficient(g), qb = b.coefficient(g), acc;
        for (const auto& [v, q] : a.partials()) acc += q * qb.derivative(Var::z(v));
        for (const auto& [v, q] : b.partials()) acc -= q * qa.derivative(Var::z(v));
        r.add_partial(g, acc);
    }

    // Second-order parts: sum over b<=c of (Qa_b Qb_c + Qa_c Qb_b - Qb_b Qa_c - Qb_c Qa_b).
    for (const auto& [u, qu] : a.partials()) {
        for (const auto& [v, qv] : b.partials()) {
            Poly sym = qu * qv - b.coefficient(u) * a.coefficient(v);
            Poly swapped = a.coefficient(v) * b.coefficient(u) - qv * qu;
            if (!(sym + swapped).is_zero())
                throw std::logic_error("commutator: second-order terms did not cancel");
        }
    }
    return r;
}

} // namespace csflow
