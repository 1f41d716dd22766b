#include "csflow/synth.hpp"

#include <stdexcept>

#include <json.hpp>

#include "csflow/coeffs.hpp"
#include "csflow/error.hpp"

namespace csflow {

Element single(const Generator& g, const Rational& c) {
    Element e;
    add_to(e, g, c);
    return e;
}

Element dagger(const Element& e) {
    Element r;
    for (const auto& [g, c] : e) add_to(r, g.is_cartan() ? g : Generator::root(-g.index), c);
    return r;
}

std::vector<Poly> weight_symbols(int n) {
    std::vector<Poly> w;
    for (int i = 0; i < n; ++i) w.push_back(Poly::var(Var::w(i)));
    return w;
}

// ---------------------------------------------------------------- Synthesizer

Synthesizer::Synthesizer(std::shared_ptr<const RootSystem> rs, std::vector<Poly> weight, std::vector<int> degenerate)
    : rs_(std::move(rs)), weight_(std::move(weight)), degenerate_(std::move(degenerate)) {
    if (static_cast<int>(weight_.size()) != rs_->cartan_dim())
        throw Error(ErrorKind::Config, "weight needs " + std::to_string(rs_->cartan_dim()) + " components");
    for (int s : degenerate_) {
        if (s < 0 || s >= rs_->rank()) throw Error(ErrorKind::Config, "degenerate simple root out of range");
        RootId a = rs_->simple(s);
        if (!rs_->weight_pairing(a, weight_).is_zero())
            throw Error(ErrorKind::WeightPairingNonzero,
                        "(" + rs_->label(Generator::root(a)) + ", w) is not zero; it cannot be degenerate");
    }
    for (int k = 1; k <= rs_->num_positive(); ++k)
        if (!in_levi(k)) {
            var_[k] = static_cast<int>(chart_.size());
            chart_.push_back(k);
        }
    int depth = 0;
    for (const auto& r : rs_->positive_roots()) depth = std::max(depth, r.height());
    c_ = c_coeffs(depth + 8);
    d_ = d_coeffs(depth + 8);
}

int Synthesizer::var_of(RootId r) const {
    auto it = var_.find(r);
    return it == var_.end() ? -1 : it->second;
}

bool Synthesizer::in_levi(RootId r) const {
    Root root = rs_->root(r);
    for (int i = 0; i < rs_->rank(); ++i) {
        if (root.coeffs[i] == 0) continue;
        bool deg = false;
        for (int s : degenerate_) deg = deg || s == i;
        if (!deg) return false;
    }
    return true;
}

Poly Synthesizer::zvar(RootId r) const { return Poly::var(Var::z(var_of(r))); }

Synthesizer::NVec Synthesizer::ad(const NVec& v) const {
    NVec r;
    for (RootId mu : chart_) {
        Poly zm = zvar(mu);
        for (const auto& [g, f] : v) {
            auto s = rs_->sum(mu, g);
            if (!s || var_of(*s) < 0) continue;
            Rational n = rs_->n(mu, g);
            if (sgn(n) == 0) continue;
            auto& slot = r[*s];
            slot += zm * f * n;
            if (slot.is_zero()) r.erase(*s);
        }
    }
    return r;
}

Synthesizer::FVec Synthesizer::ad_full(const FVec& v) const {
    FVec r;
    for (RootId mu : chart_) {
        Poly zm = zvar(mu);
        for (const auto& [g, f] : v)
            for (const auto& [h, c] : rs_->bracket(Generator::root(mu), g)) {
                auto& slot = r[h];
                slot += zm * f * c;
                if (slot.is_zero()) r.erase(h);
            }
    }
    return r;
}

DiffOp Synthesizer::from_nvec(const NVec& v) const {
    DiffOp d;
    for (const auto& [r, p] : v) d.add_partial(var_of(r), p);
    return d;
}

std::map<RootId, Poly> Synthesizer::ad_power(RootId alpha, int k) const {
    NVec v{{alpha, Poly(1)}};
    for (int i = 0; i < k && !v.empty(); ++i) v = ad(v);
    return v;
}

DiffOp Synthesizer::raising(RootId alpha, int depth) const {
    if (alpha <= 0 || var_of(alpha) < 0)
        throw Error(ErrorKind::NotPositiveRoot, rs_->label(Generator::root(alpha)) + " is not a positive chart root");
    if (depth < 0) depth = rs_->nu();
    std::vector<Rational> c = depth < static_cast<int>(c_.size()) ? c_ : c_coeffs(depth);
    NVec v{{alpha, Poly(1)}};
    DiffOp out;
    for (int k = 0; k <= depth && !v.empty(); ++k) {
        out += from_nvec(v) * c[k];
        v = ad(v);
    }
    return out;
}

DiffOp Synthesizer::cartan(int i) const {
    DiffOp d(weight_.at(i));
    for (RootId b : chart_) d.add_partial(var_of(b), zvar(b) * Rational(-rs_->pairing(b, i)));
    return d;
}

DiffOp Synthesizer::orthogonal(RootId alpha) const {
    std::string name = rs_->label(Generator::root(alpha));
    if (!rs_->weight_pairing(alpha, weight_).is_zero())
        throw Error(ErrorKind::WeightPairingNonzero, "(" + name + ", w) is not zero");
    if (!in_levi(alpha))
        throw Error(ErrorKind::WeightPairingNonzero,
                    name + " is not spanned by the degenerate simple roots of this chart");
    DiffOp d;
    for (RootId b : chart_) {
        auto mu = rs_->find(rs_->root(b) + (-rs_->root(alpha)));
        if (!mu || var_of(*mu) < 0) continue;
        d.add_partial(var_of(b), zvar(*mu) * rs_->n(*mu, alpha));
    }
    return d;
}

DiffOp Synthesizer::lowering_simple(RootId gamma) const {
    if (gamma >= 0 || !rs_->simple_index(-gamma) || var_of(-gamma) < 0)
        throw Error(ErrorKind::NotSimpleNegativeRoot,
                    rs_->label(Generator::root(gamma)) + " is not the negative of a simple chart root");
    RootId as = -gamma;
    Poly zs = zvar(as);
    DiffOp out(rs_->weight_pairing(as, weight_) * zs);

    // Y1 = sum_{mu != alpha_s} z_mu n_{mu,gamma} E_{mu+gamma}, over all roots (Levi part kept for Q).
    std::map<RootId, Poly> y1;
    NVec y1_chart;
    for (RootId mu : chart_) {
        if (mu == as) continue;
        auto s = rs_->sum(mu, gamma);
        if (!s) continue;
        Poly t = zvar(mu) * rs_->n(mu, gamma);
        if (t.is_zero()) continue;
        y1[*s] += t;
        if (var_of(*s) >= 0) y1_chart[*s] += t;
    }

    // q_{gamma,delta} = delta(H_gamma) z_{alpha_s} z_delta + sum_mu z_mu n_{mu,delta-mu} [Y1]_{delta-mu}
    NVec q;
    const auto& h = rs_->coroot(gamma);
    for (RootId delta : chart_) {
        Rational dh = 0;
        for (int k = 0; k < rs_->cartan_dim(); ++k) dh += h[k] * rs_->pairing(delta, k);
        Poly t = zs * zvar(delta) * dh;
        for (RootId mu : chart_) {
            auto rest = rs_->find(rs_->root(delta) + (-rs_->root(mu)));
            if (!rest) continue;
            auto it = y1.find(*rest);
            if (it == y1.end()) continue;
            t += zvar(mu) * it->second * rs_->n(mu, *rest);
        }
        if (!t.is_zero()) q[delta] = t;
    }

    NVec v = q;
    for (std::size_t k = 0; k < d_.size() && !v.empty(); ++k) {
        out += from_nvec(v) * d_[k];
        v = ad(v);
    }
    v = y1_chart;
    for (std::size_t k = 0; k < c_.size() && !v.empty(); ++k) {
        out += from_nvec(v) * (k % 2 ? Rational(-c_[k]) : c_[k]);
        v = ad(v);
    }
    return out;
}

std::vector<DiffOp> Synthesizer::lowering_all_decompositions(RootId gamma) const {
    std::vector<DiffOp> out;
    if (gamma >= 0) return out;
    for (int s = 0; s < rs_->rank(); ++s) {
        RootId g1 = -rs_->simple(s);
        auto g2 = rs_->sum(gamma, -g1);
        if (!g2) continue;
        Rational n = rs_->n(g1, *g2);
        if (sgn(n) == 0) continue;
        out.push_back(commutator(op(Generator::root(g1)), op(Generator::root(*g2))) * Rational(1 / n));
    }
    return out;
}

DiffOp Synthesizer::lowering_general(RootId gamma) const {
    auto all = lowering_all_decompositions(gamma);
    if (all.empty())
        throw Error(ErrorKind::NoDecomposition, rs_->label(Generator::root(gamma)) + " has no decomposition");
    for (std::size_t k = 1; k < all.size(); ++k)
        if (!(all[k] == all[0]))
            throw std::logic_error("lowering operator depends on the decomposition of " +
                                   rs_->label(Generator::root(gamma)));
    return all.front();
}

DiffOp Synthesizer::op(const Generator& g) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    DiffOp d;
    if (g.is_cartan()) {
        d = cartan(g.index);
    } else if (in_levi(g.index)) {
        d = orthogonal(g.index);
    } else if (g.index > 0) {
        d = raising(g.index);
    } else if (rs_->simple_index(-g.index)) {
        d = lowering_simple(g.index);
    } else {
        d = lowering_general(g.index);
    }
    cache_.emplace(g, d);
    return d;
}

DiffOp Synthesizer::direct(const Generator& g) const {
    FVec term{{g, Poly(1)}}, acc = term;
    for (int k = 1; !term.empty(); ++k) {
        term = ad_full(term);
        for (auto& [h, p] : term) p *= Rational(1, k);
        for (const auto& [h, p] : term) {
            auto& slot = acc[h];
            slot += p;
            if (slot.is_zero()) acc.erase(h);
        }
    }
    Poly scalar;
    NVec nil;
    for (const auto& [h, p] : acc) {
        if (h.is_cartan()) scalar += p * weight_.at(h.index);
        else if (var_of(h.index) >= 0) nil[h.index] = p;
    }
    DiffOp out(scalar);
    for (std::size_t k = 0; k < c_.size() && !nil.empty(); ++k) {
        out += from_nvec(nil) * (k % 2 ? Rational(-c_[k]) : c_[k]);
        nil = ad(nil);
    }
    return out;
}

DiffOp Synthesizer::to_matrix_chart(const DiffOp& d) const {
    if (rs_->gl_n() == 0) throw Error(ErrorKind::Config, "matrix-entry chart needs an A-series algebra");
    std::lock_guard<std::recursive_mutex> lock(mu_);
    int n = rs_->gl_n();
    int m = static_cast<int>(chart_.size());
    if (!matrix_maps_) {
        using Mat = std::vector<std::vector<Poly>>;
        auto mul = [n](const Mat& a, const Mat& b) {
            Mat c(n, std::vector<Poly>(n));
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    if (a[i][k].is_zero()) continue;
                    for (int j = 0; j < n; ++j)
                        if (!b[k][j].is_zero()) c[i][j] += a[i][k] * b[k][j];
                }
            return c;
        };
        Mat N(n, std::vector<Poly>(n));
        for (int k = 0; k < m; ++k) {
            auto [i, j] = *rs_->ambient(chart_[k]);
            N[i - 1][j - 1] = Poly::var(Var::z(k));
        }
        // F = entries of exp(N), G = entries of log(I + N); both series terminate.
        Mat power = N, expo = N, loga = N;
        for (int k = 2; k < n; ++k) {
            power = mul(power, N);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (power[i][j].is_zero()) continue;
                    expo[i][j] += power[i][j] * Rational(1 / factorial(k));
                    loga[i][j] += power[i][j] * Rational(k % 2 ? 1 : -1, k);
                }
        }
        std::map<Var, Poly> g;
        std::vector<Poly> f(m);
        for (int k = 0; k < m; ++k) {
            auto [i, j] = *rs_->ambient(chart_[k]);
            f[k] = expo[i - 1][j - 1];
            g[Var::z(k)] = loga[i - 1][j - 1];
        }
        matrix_maps_.emplace(std::move(g), std::move(f));
    }
    const auto& [g, f] = *matrix_maps_;
    DiffOp out(d.scalar().substitute(g));
    for (int k = 0; k < m; ++k) {
        Poly q;
        for (const auto& [b, qb] : d.partials()) q += qb * f[k].derivative(Var::z(b));
        out.add_partial(k, q.substitute(g));
    }
    return out;
}

Representation Synthesizer::representation(Chart chart, const VarNames* names) const {
    Representation rep;
    rep.system = rs_;
    rep.weight = weight_;
    rep.chart_roots = chart_;
    rep.chart = chart;
    rep.action = Action::Function;
    if (names) rep.names = *names;
    if (rep.names.z.empty())
        for (RootId r : chart_) rep.names.z.push_back(rs_->z_name(r));
    if (rep.names.w.empty())
        for (int i = 0; i < rs_->cartan_dim(); ++i) rep.names.w.push_back("w" + std::to_string(i + 1));
    for (const auto& g : rs_->generators()) {
        DiffOp d = op(g);
        if (chart == Chart::Matrix) d = to_matrix_chart(d);
        std::string label = rs_->label(g);
        rep.generators.push_back({label, single(g), d});
    }
    if (rep.names.eps.empty())
        for (const auto& g : rep.generators)
            rep.names.eps.push_back("eps" + (rs_->gl_n() > 0 ? g.label.substr(1) : g.label));
    return rep;
}

// ---------------------------------------------------------------- Representation

const RepGenerator* Representation::find(const std::string& label) const {
    for (const auto& g : generators)
        if (g.label == label) return &g;
    return nullptr;
}

const RepGenerator& Representation::at(const std::string& label) const {
    if (auto* g = find(label)) return *g;
    throw Error(ErrorKind::UnknownGenerator, "no generator labelled '" + label + "'");
}

int Representation::var_of(RootId r) const {
    for (std::size_t k = 0; k < chart_roots.size(); ++k)
        if (chart_roots[k] == r) return static_cast<int>(k);
    return -1;
}

DiffOp Representation::op_of(const Element& e) const {
    if (e.empty()) return {};
    // Fast path: every generator is a single basis vector.
    bool simple = true;
    for (const auto& g : generators) simple = simple && g.element.size() == 1;
    if (simple) {
        DiffOp out;
        for (const auto& [b, c] : e) {
            bool found = false;
            for (const auto& g : generators) {
                const auto& [gb, gc] = *g.element.begin();
                if (gb == b) {
                    out += g.op * Rational(c / gc);
                    found = true;
                    break;
                }
            }
            if (!found) throw Error(ErrorKind::NotInSpan, "element outside the generator span");
        }
        return out;
    }
    // Exact Gaussian elimination on the basis coordinates.
    std::vector<Generator> basis;
    auto index_of = [&](const Generator& b) {
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (basis[i] == b) return static_cast<int>(i);
        basis.push_back(b);
        return static_cast<int>(basis.size() - 1);
    };
    for (const auto& g : generators)
        for (const auto& [b, c] : g.element) index_of(b);
    for (const auto& [b, c] : e) index_of(b);
    int rows = static_cast<int>(basis.size()), cols = static_cast<int>(generators.size());
    std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1, Rational(0)));
    for (int j = 0; j < cols; ++j)
        for (const auto& [b, c] : generators[j].element) a[index_of(b)][j] = c;
    for (const auto& [b, c] : e) a[index_of(b)][cols] = c;
    std::vector<int> pivot_col;
    int r = 0;
    for (int j = 0; j < cols && r < rows; ++j) {
        int p = r;
        while (p < rows && sgn(a[p][j]) == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || sgn(a[i][j]) == 0) continue;
            Rational f = a[i][j] / a[r][j];
            for (int k = j; k <= cols; ++k) a[i][k] -= f * a[r][k];
        }
        pivot_col.push_back(j);
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (sgn(a[i][cols]) != 0) throw Error(ErrorKind::NotInSpan, "element outside the generator span");
    DiffOp out;
    for (int i = 0; i < r; ++i) {
        int j = pivot_col[i];
        out += generators[j].op * Rational(a[i][cols] / a[i][j]);
    }
    return out;
}

std::string Representation::to_text() const {
    std::string s;
    for (const auto& g : generators) s += g.label + " = " + g.op.to_string(names) + "\n";
    return s;
}

std::string Representation::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& g : generators) {
        nlohmann::ordered_json o;
        o["generator"] = g.label;
        o["scalar_poly"] = g.op.scalar().to_string(names);
        nlohmann::ordered_json parts = nlohmann::ordered_json::array();
        for (const auto& [v, q] : g.op.partials()) {
            nlohmann::ordered_json p;
            p["root"] = system->root(chart_roots[v]).coeffs;
            p["var"] = names(Var::z(v));
            p["poly"] = q.to_string(names);
            parts.push_back(p);
        }
        o["partials"] = parts;
        arr.push_back(o);
    }
    nlohmann::ordered_json doc;
    doc["algebra"] = series_name(system->series()) + std::to_string(system->rank());
    doc["chart"] = chart == Chart::Matrix ? "matrix" : "exponential";
    doc["action"] = action == Action::Function ? "function" : "vector";
    doc["operators"] = arr;
    return doc.dump(2) + "\n";
}

std::vector<HomFailure> verify_homomorphism(const Representation& rep) {
    std::vector<HomFailure> out;
    Rational s = rep.action == Action::Function ? 1 : -1;
    for (const auto& x : rep.generators)
        for (const auto& y : rep.generators) {
            DiffOp lhs = commutator(x.op, y.op);
            Element b = rep.system->bracket(x.element, y.element);
            DiffOp rhs;
            try {
                rhs = rep.op_of(b) * s;
            } catch (const Error&) {
                out.push_back({x.label, y.label});
                continue;
            }
            if (!(lhs == rhs)) out.push_back({x.label, y.label});
        }
    return out;
}

Representation to_vector_action(const Representation& fn, const std::vector<std::pair<std::string, Element>>& labels) {
    Representation v;
    v.system = fn.system;
    v.weight = fn.weight;
    v.chart_roots = fn.chart_roots;
    v.chart = fn.chart;
    v.action = Action::Vector;
    v.names = fn.names;
    v.names.eps.clear();
    for (const auto& [label, e] : labels) {
        v.generators.push_back({label, e, fn.op_of(dagger(e))});
        v.names.eps.push_back("eps" + label);
    }
    return v;
}

// ---------------------------------------------------------------- golden tables

namespace {

Poly Z(int k) { return Poly::var(Var::z(k)); }
Poly W(int k) { return Poly::var(Var::w(k)); }

DiffOp mk(Poly scalar, std::initializer_list<std::pair<int, Poly>> parts) {
    DiffOp d(std::move(scalar));
    for (const auto& [v, q] : parts) d.add_partial(v, q);
    return d;
}

std::vector<std::pair<std::string, Element>> su2_labels() {
    Element j0;
    add_to(j0, Generator::cartan(0), Rational(-1, 2));
    add_to(j0, Generator::cartan(1), Rational(1, 2));
    return {{"J0", j0}, {"J+", single(Generator::root(-1))}, {"J-", single(Generator::root(1))}};
}

} // namespace

GoldenTables golden_tables() {
    GoldenTables t;
    {
        auto rs = std::make_shared<const RootSystem>(build_a_series(1));
        Representation& r = t.su2;
        r.system = rs;
        r.weight = {W(0), -W(0)};
        r.chart_roots = {1};
        r.chart = Chart::Matrix;
        r.action = Action::Vector;
        r.names.z = {"z"};
        r.names.w = {"j"};
        Poly z = Z(0), j = W(0);
        auto labels = su2_labels();
        r.generators = {
            {"J0", labels[0].second, mk(-j, {{0, z}})},
            {"J+", labels[1].second, mk(Poly{}, {{0, Poly(1)}})},
            {"J-", labels[2].second, mk(j * Rational(2) * z, {{0, -z * z}})},
        };
        r.names.eps = {"eps0", "eps+", "eps-"};
    }
    {
        auto rs = std::make_shared<const RootSystem>(build_a_series(2));
        Representation& r = t.su3;
        r.system = rs;
        r.weight = weight_symbols(3);
        r.chart_roots = {1, 2, 3};
        r.chart = Chart::Matrix;
        r.action = Action::Function;
        r.names.z = {"z12", "z23", "z13"};
        r.names.w = {"w1", "w2", "w3"};
        const int i12 = 0, i23 = 1, i13 = 2;
        Poly z12 = Z(i12), z23 = Z(i23), z13 = Z(i13);
        Poly w1 = W(0), w2 = W(1), w3 = W(2);
        auto C = [&](int i, int j) {
            return i == j ? single(Generator::cartan(i - 1)) : single(Generator::root(*rs->from_ambient(i, j)));
        };
        Poly u = z12 * z23 - z13;
        r.generators = {
            {"C11", C(1, 1), mk(w1, {{i12, -z12}, {i13, -z13}})},
            {"C12", C(1, 2), mk(Poly{}, {{i12, Poly(1)}})},
            {"C13", C(1, 3), mk(Poly{}, {{i13, Poly(1)}})},
            {"C21", C(2, 1), mk((w1 - w2) * z12, {{i12, -z12 * z12}, {i13, -z12 * z13}, {i23, u}})},
            {"C22", C(2, 2), mk(w2, {{i12, z12}, {i23, -z23}})},
            {"C23", C(2, 3), mk(Poly{}, {{i13, z12}, {i23, Poly(1)}})},
            {"C31", C(3, 1),
             mk((w1 - w3) * z13 - (w2 - w3) * z12 * z23, {{i12, -z12 * z13}, {i13, -z13 * z13}, {i23, u * z23}})},
            {"C32", C(3, 2), mk((w2 - w3) * z23, {{i12, z13}, {i23, -z23 * z23}})},
            {"C33", C(3, 3), mk(w3, {{i13, z13}, {i23, z23}})},
        };
        for (const auto& g : r.generators) r.names.eps.push_back("eps" + g.label.substr(1));
    }
    return t;
}

Representation synth_a_series(int l, Chart chart, std::vector<Poly> weight, std::vector<int> degenerate) {
    auto rs = std::make_shared<const RootSystem>(build_a_series(l));
    if (weight.empty()) weight = weight_symbols(l + 1);
    Synthesizer s(rs, std::move(weight), std::move(degenerate));
    return s.representation(chart);
}

Representation synth_su2() {
    auto rs = std::make_shared<const RootSystem>(build_a_series(1));
    Poly j = Poly::var(Var::w(0));
    Synthesizer s(rs, {j, -j});
    VarNames names;
    names.z = {"z"};
    names.w = {"j"};
    Representation fn = s.representation(Chart::Matrix, &names);
    Representation v = to_vector_action(fn, su2_labels());
    v.names.eps = {"eps0", "eps+", "eps-"};
    return v;
}

Representation synth_su3(Chart chart) { return synth_a_series(2, chart); }

} // namespace csflow
