#pragma once

#include <compare>
#include <map>
#include <optional>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "csflow/poly.hpp"

namespace csflow {

enum class Series { A, B, C, D, E, F, G, Custom };

Series parse_series(const std::string& s);
std::string series_name(Series s);

// Tabulated truncation degree nu for the simple Lie algebras (always max root height - 1).
int nu_for(Series s, int rank);

struct Root {
    std::vector<int> coeffs; // over the simple roots

    int height() const;
    bool positive() const;
    Root operator-() const;
    Root operator+(const Root& o) const;
    bool operator==(const Root&) const = default;
};

// Signed, 1-based: k > 0 is the k-th positive root, -k its negative. 0 is never a root.
using RootId = int;

struct Generator {
    enum class Kind : std::uint8_t { Cartan, Root };
    Kind kind = Kind::Cartan;
    int index = 0; // Cartan: 0-based; Root: RootId

    static Generator cartan(int i) { return {Kind::Cartan, i}; }
    static Generator root(RootId r) { return {Kind::Root, r}; }
    bool is_cartan() const { return kind == Kind::Cartan; }
    auto operator<=>(const Generator&) const = default;
};

// Element of the algebra in the Cartan-Weyl basis, exact coefficients.
using Element = std::map<Generator, Rational>;

void add_to(Element& e, const Generator& g, const Rational& c);
Element scaled(const Element& e, const Rational& c);

class RootSystem {
public:
    Series series() const { return series_; }
    int rank() const { return rank_; }
    int cartan_dim() const { return cartan_dim_; }
    int num_positive() const { return static_cast<int>(pos_.size()); }
    const std::vector<Root>& positive_roots() const { return pos_; }

    Root root(RootId r) const;
    std::optional<RootId> find(const Root& r) const;
    std::optional<RootId> sum(RootId a, RootId b) const;
    RootId simple(int i) const { return simple_[i]; } // i is 0-based
    std::optional<int> simple_index(RootId r) const;  // 0-based, positive simple roots only
    int height(RootId r) const { return root(r).height(); }

    // alpha(H_i)
    Rational pairing(RootId a, int cartan_index) const;
    // (alpha, beta) in the invariant form
    Rational form(RootId a, RootId b) const;
    // [E_a, E_-a] expressed in the Cartan basis
    const std::vector<Rational>& coroot(RootId a) const;
    // (alpha, w) for a weight given by its values on the Cartan basis
    Poly weight_pairing(RootId a, const std::vector<Poly>& weight) const;

    // n_{a,b}; zero when a+b is not a root
    Rational n(RootId a, RootId b) const;
    int nu() const { return nu_; }

    // A-series only: E_{e_i - e_j} = C_ij, 1-based (i, j).
    std::optional<std::pair<int, int>> ambient(RootId r) const;
    std::optional<RootId> from_ambient(int i, int j) const;
    // Custom tables carry no matrix realization, even when tagged A.
    int gl_n() const { return ambient_.empty() ? 0 : rank_ + 1; }

    std::string label(const Generator& g) const;
    std::string z_name(RootId positive) const;
    std::optional<Generator> parse_label(const std::string& s) const;

    // All basis generators: Cartan first, then positive and negative roots.
    // A-series lists C_ij row by row instead.
    std::vector<Generator> generators() const;

    Element bracket(const Generator& x, const Generator& y) const;
    Element bracket(const Element& x, const Element& y) const;

    // Exact numeric data, for building custom systems.
    struct Table {
        Series series = Series::Custom;
        int rank = 0;
        std::vector<Root> positive;                        // any order
        std::vector<std::tuple<int, int, Rational>> n;     // signed 1-based into `positive`
        std::optional<std::vector<std::vector<Rational>>> form; // on simple roots
    };

private:
    friend RootSystem build_a_series(int l);
    friend RootSystem load_custom(const Table& t, bool validate);
    void index_roots();

    Series series_ = Series::Custom;
    int rank_ = 0;
    int cartan_dim_ = 0;
    int nu_ = 0;
    std::vector<Root> pos_;
    std::vector<RootId> simple_;
    std::map<std::vector<int>, RootId> lookup_;
    std::map<std::pair<RootId, RootId>, Rational> n_;
    std::vector<std::vector<Rational>> form_simple_; // (alpha_i, alpha_j)
    // alpha(H_k) for positive roots, row per root
    std::vector<std::vector<Rational>> pair_;
    std::vector<std::vector<Rational>> coroot_pos_, coroot_neg_;
    std::vector<std::pair<int, int>> ambient_;
};

RootSystem build_a_series(int l);

// n_{a1,a} n_{a2,a+a1} ... ; zero if a partial sum leaves the root system.
Rational structure_chain(const RootSystem& rs, const std::vector<RootId>& chain, RootId alpha);

// Validates antisymmetry, closure, and (rank <= 3) Jacobi on all basis triples.
RootSystem load_custom(const RootSystem::Table& t, bool validate = true);
// JSON: {series, rank, roots: [[int]], n: [[a, b, value]], form?: [[num]]}; values may be "p/q" strings.
RootSystem load_custom_json(const std::string& text, bool validate = true);

struct JacobiFailure {
    Generator x, y, z;
};
std::vector<JacobiFailure> jacobi_violations(const RootSystem& rs);

} // namespace csflow
