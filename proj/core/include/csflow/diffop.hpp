#pragma once

#include <map>
#include <string>

#include "csflow/poly.hpp"

namespace csflow {

// First-order operator P(z) + sum_b Q_b(z) d/dz_b; keys index chart variables.
class DiffOp {
public:
    DiffOp() = default;
    explicit DiffOp(Poly scalar) : scalar_(std::move(scalar)) {}

    static DiffOp partial(int var) {
        DiffOp d;
        d.partials_[var] = Poly(1);
        return d;
    }

    const Poly& scalar() const { return scalar_; }
    const std::map<int, Poly>& partials() const { return partials_; }
    Poly coefficient(int var) const;

    void set_scalar(Poly p) { scalar_ = std::move(p); }
    void add_partial(int var, const Poly& q);

    bool is_zero() const { return scalar_.is_zero() && partials_.empty(); }
    int max_partial_degree(VarKind k = VarKind::z) const;

    Poly apply(const Poly& f) const;

    DiffOp& operator+=(const DiffOp& o);
    DiffOp& operator-=(const DiffOp& o);
    DiffOp& operator*=(const Rational& s);
    // Multiplies every coefficient by a polynomial (not an operator composition).
    DiffOp times(const Poly& p) const;
    friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
    friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
    friend DiffOp operator*(DiffOp a, const Rational& s) { return a *= s; }
    friend DiffOp operator*(const Rational& s, DiffOp a) { return a *= s; }
    friend DiffOp operator-(DiffOp a) { return a *= Rational(-1); }
    friend bool operator==(const DiffOp& a, const DiffOp& b) {
        return a.scalar_ == b.scalar_ && a.partials_ == b.partials_;
    }

    DiffOp substitute(const std::map<Var, Poly>& s) const;

    // e.g. "w1 - w2 + (z12^2)*d_z12"
    std::string to_string(const VarNames& names) const;

private:
    Poly scalar_;
    std::map<int, Poly> partials_;
};

DiffOp commutator(const DiffOp& a, const DiffOp& b);
inline bool op_equal(const DiffOp& a, const DiffOp& b) { return a == b; }

} // namespace csflow
