#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "csflow/diffop.hpp"
#include "csflow/root_system.hpp"

namespace csflow {

// Exponential: z = exponential (first-kind) coordinates of exp(sum z_a E_a).
// Matrix: A-series only, z = entries of that unipotent matrix.
enum class Chart { Exponential, Matrix };
// Function: X f_psi = f_{X psi}, a homomorphism. Vector: X e_z = D e_z, an anti-homomorphism.
enum class Action { Function, Vector };

struct RepGenerator {
    std::string label;
    Element element;
    DiffOp op;
};

struct Representation {
    std::shared_ptr<const RootSystem> system;
    std::vector<Poly> weight; // values on the Cartan basis
    std::vector<RootId> chart_roots;
    Chart chart = Chart::Exponential;
    Action action = Action::Function;
    VarNames names;
    std::vector<RepGenerator> generators;

    const RepGenerator* find(const std::string& label) const;
    const RepGenerator& at(const std::string& label) const;
    int num_vars() const { return static_cast<int>(chart_roots.size()); }
    int var_of(RootId positive) const; // -1 if not a chart variable

    // Linear combination of generator operators matching `e`; throws NotInSpan.
    DiffOp op_of(const Element& e) const;

    std::string to_text() const;
    std::string to_json() const;
};

// Conjugation E_a -> E_-a, H -> H (real coefficients).
Element dagger(const Element& e);

Element single(const Generator& g, const Rational& c = 1);

// Weight symbols w1..wn as polynomials.
std::vector<Poly> weight_symbols(int n);

class Synthesizer {
public:
    // degenerate: 0-based simple roots with (alpha_s, w) = 0; they span the Levi part.
    Synthesizer(std::shared_ptr<const RootSystem> rs, std::vector<Poly> weight,
                std::vector<int> degenerate = {});

    const RootSystem& system() const { return *rs_; }
    const std::vector<RootId>& chart_roots() const { return chart_; }
    int var_of(RootId positive) const;
    bool in_levi(RootId r) const;

    DiffOp raising(RootId alpha, int depth = -1) const;
    DiffOp cartan(int i) const;
    DiffOp orthogonal(RootId alpha) const;
    DiffOp lowering_simple(RootId gamma) const;
    DiffOp lowering_general(RootId gamma) const;
    // Every decomposition gamma = -alpha_s + gamma2 of a non-simple negative root.
    std::vector<DiffOp> lowering_all_decompositions(RootId gamma) const;
    DiffOp op(const Generator& g) const;

    // Independent route: expand exp(ad Z) X and read off the action directly.
    DiffOp direct(const Generator& g) const;

    // p_{k,alpha,beta}: coefficient of d_beta in ad_Z^k E_alpha.
    std::map<RootId, Poly> ad_power(RootId alpha, int k) const;

    Representation representation(Chart chart = Chart::Exponential, const VarNames* names = nullptr) const;

    // A-series: pushes an exponential-chart operator to matrix-entry coordinates.
    DiffOp to_matrix_chart(const DiffOp& d) const;

private:
    using NVec = std::map<RootId, Poly>;
    using FVec = std::map<Generator, Poly>;

    NVec ad(const NVec& v) const;
    FVec ad_full(const FVec& v) const;
    DiffOp from_nvec(const NVec& v) const;
    Poly zvar(RootId positive) const;

    std::shared_ptr<const RootSystem> rs_;
    std::vector<Poly> weight_;
    std::vector<int> degenerate_;
    std::vector<RootId> chart_;
    std::map<RootId, int> var_;
    std::vector<Rational> c_, d_;

    mutable std::recursive_mutex mu_;
    mutable std::map<Generator, DiffOp> cache_;
    mutable std::optional<std::pair<std::map<Var, Poly>, std::vector<Poly>>> matrix_maps_;
};

struct HomFailure {
    std::string x, y;
};

// Checks [DX, DY] = s D[X,Y] for every ordered pair, s = +1 (function) or -1 (vector).
std::vector<HomFailure> verify_homomorphism(const Representation& rep);

// Re-labels a function-action representation as the vector action X -> D(X^dagger).
Representation to_vector_action(const Representation& fn,
                                const std::vector<std::pair<std::string, Element>>& labels);

struct GoldenTables {
    Representation su2; // J0, J+, J- with spin j, vector action
    Representation su3; // C_ij with weights w1, w2, w3, function action, matrix chart
};
GoldenTables golden_tables();

// Synthesized counterparts under the documented mapping.
Representation synth_su2();
Representation synth_su3(Chart chart = Chart::Matrix);

// A-series representation in its natural labels, e.g. A_2 with symbolic weights.
Representation synth_a_series(int l, Chart chart = Chart::Matrix, std::vector<Poly> weight = {},
                              std::vector<int> degenerate = {});

} // namespace csflow
