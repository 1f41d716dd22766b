#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "csflow/error.hpp"
#include "csflow/root_system.hpp"

using namespace csflow;

namespace {

// Element of gl(n) as an explicit integer matrix, C_ij = e_i e_j^T.
Eigen::MatrixXi to_matrix(const RootSystem& rs, const Element& e) {
    int n = rs.gl_n();
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
    for (const auto& [g, c] : e) {
        EXPECT_EQ(c.get_den(), 1);
        int v = static_cast<int>(c.get_num().get_si());
        if (g.is_cartan()) {
            m(g.index, g.index) += v;
        } else {
            auto [i, j] = *rs.ambient(g.index);
            m(i - 1, j - 1) += v;
        }
    }
    return m;
}

std::string table_json(const RootSystem& rs, int flip_a = 0, int flip_b = 0, int drop_a = 0, int drop_b = 0,
                       bool break_antisymmetry = false) {
    std::string s = "{\"series\": \"custom\", \"rank\": " + std::to_string(rs.rank()) + ", \"roots\": [";
    for (int k = 0; k < rs.num_positive(); ++k) {
        if (k) s += ", ";
        s += "[";
        for (int i = 0; i < rs.rank(); ++i) s += (i ? ", " : "") + std::to_string(rs.positive_roots()[k].coeffs[i]);
        s += "]";
    }
    s += "], \"n\": [";
    bool first = true;
    int N = rs.num_positive();
    for (int a = -N; a <= N; ++a)
        for (int b = -N; b <= N; ++b) {
            if (!a || !b) continue;
            Rational v = rs.n(a, b);
            if (sgn(v) == 0) continue;
            if (a == drop_a && b == drop_b) continue;
            if ((a == flip_a && b == flip_b) || (a == flip_b && b == flip_a && !break_antisymmetry)) v = -v;
            s += std::string(first ? "" : ", ") + "[" + std::to_string(a) + ", " + std::to_string(b) + ", " +
                 v.get_str() + "]";
            first = false;
        }
    return s + "]}";
}

} // namespace

TEST(RootSystem, A1) {
    auto rs = build_a_series(1);
    EXPECT_EQ(rs.num_positive(), 1);
    EXPECT_EQ(rs.nu(), 0);
    EXPECT_EQ(rs.n(1, -1), Rational(0));
    EXPECT_EQ(rs.n(1, 1), Rational(0));
}

TEST(RootSystem, A2StructureConstants) {
    auto rs = build_a_series(2);
    RootId a1 = rs.simple(0), a2 = rs.simple(1);
    EXPECT_EQ(rs.label(Generator::root(a1)), "C12");
    EXPECT_EQ(rs.label(Generator::root(a2)), "C23");
    EXPECT_EQ(rs.n(a1, a2), Rational(1));
    EXPECT_EQ(rs.n(a2, a1), Rational(-1));
    EXPECT_EQ(rs.nu(), 1);
}

TEST(RootSystem, RootOrdering) {
    auto rs = build_a_series(2);
    EXPECT_EQ(rs.z_name(1), "z12");
    EXPECT_EQ(rs.z_name(2), "z23");
    EXPECT_EQ(rs.z_name(3), "z13");
    auto r3 = build_a_series(3);
    std::vector<std::string> names;
    for (int k = 1; k <= r3.num_positive(); ++k) names.push_back(r3.z_name(k));
    EXPECT_EQ(names, (std::vector<std::string>{"z12", "z23", "z34", "z13", "z24", "z14"}));
}

TEST(RootSystem, PositiveRootCounts) {
    for (int l = 1; l <= 6; ++l) EXPECT_EQ(build_a_series(l).num_positive(), l * (l + 1) / 2);
}

TEST(RootSystem, StructureChain) {
    auto rs = build_a_series(2);
    RootId a1 = rs.simple(0), a2 = rs.simple(1);
    EXPECT_EQ(structure_chain(rs, {}, a1), Rational(1));
    EXPECT_EQ(structure_chain(rs, {a2}, a1), Rational(-1));
    EXPECT_EQ(structure_chain(rs, {a1}, a1), Rational(0));
}

TEST(RootSystem, BracketMatchesMatrixCommutators) {
    for (int l = 1; l <= 3; ++l) {
        auto rs = build_a_series(l);
        auto gens = rs.generators();
        ASSERT_EQ(static_cast<int>(gens.size()), (l + 1) * (l + 1));
        for (const auto& x : gens)
            for (const auto& y : gens) {
                Eigen::MatrixXi X = to_matrix(rs, {{x, 1}}), Y = to_matrix(rs, {{y, 1}});
                Eigen::MatrixXi expect = X * Y - Y * X;
                EXPECT_EQ(to_matrix(rs, rs.bracket(x, y)), expect) << rs.label(x) << "," << rs.label(y);
            }
    }
}

TEST(RootSystem, AntisymmetryAndJacobi) {
    for (int l = 1; l <= 3; ++l) {
        auto rs = build_a_series(l);
        int N = rs.num_positive();
        for (int a = -N; a <= N; ++a)
            for (int b = -N; b <= N; ++b) {
                if (!a || !b) continue;
                EXPECT_EQ(rs.n(a, b), -rs.n(b, a));
                Rational v = rs.n(a, b);
                EXPECT_TRUE(v == 0 || v == 1 || v == -1);
            }
        EXPECT_TRUE(jacobi_violations(rs).empty()) << "A" << l;
    }
}

TEST(RootSystem, NuTable) {
    EXPECT_EQ(nu_for(Series::A, 4), 3);
    EXPECT_EQ(nu_for(Series::B, 3), 4);
    EXPECT_EQ(nu_for(Series::C, 3), 4);
    EXPECT_EQ(nu_for(Series::D, 4), 4);
    EXPECT_EQ(nu_for(Series::E, 6), 10);
    EXPECT_EQ(nu_for(Series::E, 7), 16);
    EXPECT_EQ(nu_for(Series::E, 8), 28);
    EXPECT_EQ(nu_for(Series::F, 4), 10);
    EXPECT_EQ(nu_for(Series::G, 2), 4);
    // nu is the highest-root height minus one (Coxeter number minus two)
    struct Row {
        Series s;
        int l, coxeter;
    };
    for (Row r : {Row{Series::A, 5, 6}, Row{Series::B, 4, 8}, Row{Series::C, 4, 8}, Row{Series::D, 5, 8},
                  Row{Series::E, 6, 12}, Row{Series::E, 7, 18}, Row{Series::E, 8, 30}, Row{Series::F, 4, 12},
                  Row{Series::G, 2, 6}})
        EXPECT_EQ(nu_for(r.s, r.l), r.coxeter - 2);
    for (int l = 1; l <= 5; ++l) {
        auto rs = build_a_series(l);
        int h = 0;
        for (const auto& r : rs.positive_roots()) h = std::max(h, r.height());
        EXPECT_EQ(rs.nu(), h - 1);
    }
}

TEST(RootSystem, CustomRoundTrip) {
    for (int l = 2; l <= 3; ++l) {
        auto builtin = build_a_series(l);
        auto custom = load_custom_json(table_json(builtin));
        ASSERT_EQ(custom.num_positive(), builtin.num_positive());
        EXPECT_EQ(custom.nu(), builtin.nu());
        int N = builtin.num_positive();
        for (int k = 1; k <= N; ++k) EXPECT_EQ(custom.root(k), builtin.root(k));
        for (int a = -N; a <= N; ++a)
            for (int b = -N; b <= N; ++b)
                if (a && b) EXPECT_EQ(custom.n(a, b), builtin.n(a, b));
        for (int k = 1; k <= N; ++k)
            for (int m = 1; m <= N; ++m) EXPECT_EQ(custom.form(k, m), builtin.form(k, m));
        EXPECT_EQ(custom.label(Generator::root(1)), "E[1,0" + std::string(l == 3 ? ",0]" : "]"));
    }
}

TEST(RootSystem, CustomAntisymmetryViolation) {
    auto rs = build_a_series(2);
    try {
        load_custom_json(table_json(rs, 1, 2, 0, 0, true));
        FAIL() << "expected AntisymmetryViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AntisymmetryViolation);
        EXPECT_NE(std::string(e.what()).find("E[1,0]"), std::string::npos);
    }
}

TEST(RootSystem, CustomJacobiViolation) {
    auto rs = build_a_series(2);
    try {
        load_custom_json(table_json(rs, rs.simple(0), rs.simple(1)));
        FAIL() << "expected JacobiViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::JacobiViolation);
        EXPECT_NE(std::string(e.what()).find("E["), std::string::npos);
    }
}

TEST(RootSystem, CustomClosureViolation) {
    auto rs = build_a_series(2);
    try {
        load_custom_json(table_json(rs, 0, 0, 1, 2));
        FAIL() << "expected ClosureViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ClosureViolation);
    }
    std::string bogus = R"({"rank": 2, "roots": [[1,0],[0,1],[1,1]], "n": [[1,3,1],[3,1,-1]]})";
    try {
        load_custom_json(bogus);
        FAIL() << "expected ClosureViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ClosureViolation);
    }
}

TEST(RootSystem, CustomDefaultFormIsSymmetrizedCartan) {
    auto rs = load_custom_json(table_json(build_a_series(2)));
    EXPECT_EQ(rs.form(1, 1), Rational(2));
    EXPECT_EQ(rs.form(1, 2), Rational(-1));
    EXPECT_EQ(rs.pairing(3, 0), Rational(1)); // (a1+a2, a1)
}
