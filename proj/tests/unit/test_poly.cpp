#include <random>

#include <gtest/gtest.h>

#include "csflow/diffop.hpp"
#include "csflow/synth.hpp"

using namespace csflow;

namespace {

// A2 chart order: z12, z23, z13
Poly z12() { return Poly::var(Var::z(0)); }
Poly z23() { return Poly::var(Var::z(1)); }
Poly z13() { return Poly::var(Var::z(2)); }

VarNames a2_names() { return {{"z12", "z23", "z13"}, {"w1", "w2", "w3"}, {}}; }

Poly random_poly(std::mt19937& rng, int nvars, int max_deg) {
    std::uniform_int_distribution<int> coef(-3, 3), var(0, nvars - 1), deg(0, max_deg), count(0, 3);
    Poly p;
    int n = count(rng);
    for (int t = 0; t < n; ++t) {
        Monomial m;
        int d = deg(rng);
        for (int k = 0; k < d; ++k) m = m * Monomial(Var::z(var(rng)));
        p.add_term(m, Rational(coef(rng)));
    }
    return p;
}

DiffOp random_op(std::mt19937& rng, int nvars) {
    DiffOp d(random_poly(rng, nvars, 3));
    for (int v = 0; v < nvars; ++v) d.add_partial(v, random_poly(rng, nvars, 3));
    return d;
}

} // namespace

TEST(Poly, ProductAndZero) {
    Poly p = z12() * z23() + Poly{};
    EXPECT_EQ(p.to_string(a2_names()), "z12*z23");
    EXPECT_EQ(p.degree(), 2);
}

TEST(Poly, SubstituteZero) {
    Poly p = z12() * z23() - z13();
    EXPECT_EQ(p.substitute_zero(Var::z(1)), -z13());
}

TEST(Poly, Square) {
    Poly s = (z12() + z13()).pow(2);
    Poly expect = z12() * z12() + z12() * z13() * Rational(2) + z13() * z13();
    EXPECT_EQ(s, expect);
    EXPECT_TRUE(s.is_homogeneous_in(VarKind::z));
}

TEST(Poly, ExactRationalCancellation) {
    Poly p = z12() * Rational(1, 3) + z12() * Rational(2, 3) - z12();
    EXPECT_TRUE(p.is_zero());
    EXPECT_EQ(p.to_string(a2_names()), "0");
}

TEST(Poly, SimultaneousSubstitution) {
    // swap z12 <-> z23
    Poly p = z12() * z12() + z23();
    Poly q = p.substitute({{Var::z(0), z23()}, {Var::z(1), z12()}});
    EXPECT_EQ(q, z23() * z23() + z12());
}

TEST(Poly, DerivativeAndDegree) {
    Poly p = z12().pow(3) * z13() - z23() * Rational(5, 2);
    EXPECT_EQ(p.derivative(Var::z(0)), z12().pow(2) * z13() * Rational(3));
    EXPECT_EQ(p.derivative(Var::z(1)), Poly(Rational(-5, 2)));
    EXPECT_EQ(p.degree(), 4);
    EXPECT_FALSE(p.is_homogeneous_in(VarKind::z));
}

TEST(Poly, CanonicalTextIsDeterministic) {
    Poly a = z13() + z12() * z12() - Poly::var(Var::w(0)) * z12() + Poly(Rational(3, 2));
    Poly b = Poly(Rational(3, 2)) - Poly::var(Var::w(0)) * z12() + z13() + z12() * z12();
    EXPECT_EQ(a.to_string(a2_names()), b.to_string(a2_names()));
    EXPECT_EQ(a.to_string(a2_names()), "-w1*z12 + z12^2 + z13 + 3/2");
}

TEST(DiffOp, ConstantCoefficientsCommute) {
    EXPECT_TRUE(commutator(DiffOp::partial(0), DiffOp::partial(2)).is_zero());
}

TEST(DiffOp, OneVariableLeibniz) {
    DiffOp zd;
    zd.add_partial(0, z12());
    EXPECT_EQ(commutator(zd, DiffOp::partial(0)), -DiffOp::partial(0));
}

TEST(DiffOp, CommutatorWithLoweringOperator) {
    Poly w1 = Poly::var(Var::w(0)), w2 = Poly::var(Var::w(1));
    DiffOp c21((w1 - w2) * z12());
    c21.add_partial(0, -z12() * z12());
    c21.add_partial(2, -z12() * z13());
    c21.add_partial(1, z12() * z23() - z13());

    DiffOp expect(w1 - w2);
    expect.add_partial(0, z12() * Rational(-2));
    expect.add_partial(2, -z13());
    expect.add_partial(1, z23());
    EXPECT_EQ(commutator(DiffOp::partial(0), c21), expect);

    auto golden = golden_tables().su3;
    EXPECT_EQ(expect, golden.at("C11").op - golden.at("C22").op);
}

TEST(DiffOp, OpEqual) {
    auto golden = golden_tables().su3;
    const DiffOp& a = golden.at("C21").op;
    EXPECT_TRUE(op_equal(a, a));
    EXPECT_FALSE(op_equal(DiffOp::partial(0), DiffOp::partial(2)));
    DiffOp c22(Poly::var(Var::w(1)));
    c22.add_partial(0, z12());
    c22.add_partial(1, -z23());
    EXPECT_TRUE(op_equal(golden.at("C22").op, c22));
}

TEST(DiffOp, ApplyMatchesCommutatorAction) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        DiffOp a = random_op(rng, 3), b = random_op(rng, 3);
        Poly f = random_poly(rng, 3, 3) + z12() * z13();
        EXPECT_EQ(commutator(a, b).apply(f), a.apply(b.apply(f)) - b.apply(a.apply(f)));
    }
}

TEST(DiffOp, RandomJacobiBilinearAntisymmetric) {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 120; ++trial) {
        DiffOp a = random_op(rng, 3), b = random_op(rng, 3), c = random_op(rng, 3);
        DiffOp jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                     commutator(c, commutator(a, b));
        ASSERT_TRUE(jac.is_zero()) << "trial " << trial;
        ASSERT_EQ(commutator(a, b), -commutator(b, a));
        Rational s(3, 7);
        ASSERT_EQ(commutator(a * s + c, b), commutator(a, b) * s + commutator(c, b));
    }
}

TEST(DiffOp, TextRendering) {
    DiffOp d(Poly::var(Var::w(0)) - Poly::var(Var::w(1)));
    d.add_partial(0, -z12() * z12());
    d.add_partial(1, Poly(1));
    EXPECT_EQ(d.to_string(a2_names()), "w1 - w2 + (-z12^2)*d_z12 + d_z23");
}
