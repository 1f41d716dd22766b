#include "csflow/root_system.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "csflow/error.hpp"

namespace csflow {

Series parse_series(const std::string& s) {
    if (s.size() == 1) {
        switch (std::toupper(static_cast<unsigned char>(s[0]))) {
        case 'A': return Series::A;
        case 'B': return Series::B;
        case 'C': return Series::C;
        case 'D': return Series::D;
        case 'E': return Series::E;
        case 'F': return Series::F;
        case 'G': return Series::G;
        default: break;
        }
    }
    if (s == "custom") return Series::Custom;
    throw Error(ErrorKind::Config, "unknown series '" + s + "'");
}

std::string series_name(Series s) {
    switch (s) {
    case Series::A: return "A";
    case Series::B: return "B";
    case Series::C: return "C";
    case Series::D: return "D";
    case Series::E: return "E";
    case Series::F: return "F";
    case Series::G: return "G";
    case Series::Custom: return "custom";
    }
    return "custom";
}

int nu_for(Series s, int l) {
    switch (s) {
    case Series::A: return l - 1;
    case Series::B: return 2 * l - 2;
    case Series::C: return 2 * l - 2;
    case Series::D: return 2 * l - 4;
    case Series::E: return l == 6 ? 10 : l == 7 ? 16 : l == 8 ? 28 : -1;
    case Series::F: return l == 4 ? 10 : -1;
    case Series::G: return l == 2 ? 4 : -1;
    case Series::Custom: return -1;
    }
    return -1;
}

int Root::height() const {
    int h = 0;
    for (int c : coeffs) h += c;
    return h;
}

bool Root::positive() const {
    bool any = false;
    for (int c : coeffs) {
        if (c < 0) return false;
        any = any || c > 0;
    }
    return any;
}

Root Root::operator-() const {
    Root r = *this;
    for (int& c : r.coeffs) c = -c;
    return r;
}

Root Root::operator+(const Root& o) const {
    Root r = *this;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += o.coeffs[i];
    return r;
}

void add_to(Element& e, const Generator& g, const Rational& c) {
    if (sgn(c) == 0) return;
    auto& slot = e[g];
    slot += c;
    if (sgn(slot) == 0) e.erase(g);
}

Element scaled(const Element& e, const Rational& c) {
    Element r;
    for (const auto& [g, v] : e) add_to(r, g, v * c);
    return r;
}

namespace {

int slot_of(RootId r) { return (r > 0 ? r : -r) - 1; }

// Height ascending, then coefficient vector lexicographically descending.
bool root_order(const Root& a, const Root& b) {
    if (a.height() != b.height()) return a.height() < b.height();
    return a.coeffs > b.coeffs;
}

std::string join_coeffs(const Root& r, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(r.coeffs[i]);
    }
    return s;
}

} // namespace

void RootSystem::index_roots() {
    lookup_.clear();
    simple_.assign(rank_, 0);
    for (int k = 0; k < num_positive(); ++k) {
        lookup_[pos_[k].coeffs] = k + 1;
        lookup_[(-pos_[k]).coeffs] = -(k + 1);
        if (pos_[k].height() == 1) {
            for (int i = 0; i < rank_; ++i)
                if (pos_[k].coeffs[i] == 1) simple_[i] = k + 1;
        }
    }
}

Root RootSystem::root(RootId r) const {
    const Root& p = pos_.at(slot_of(r));
    return r > 0 ? p : -p;
}

std::optional<RootId> RootSystem::find(const Root& r) const {
    auto it = lookup_.find(r.coeffs);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<RootId> RootSystem::sum(RootId a, RootId b) const { return find(root(a) + root(b)); }

std::optional<int> RootSystem::simple_index(RootId r) const {
    for (int i = 0; i < rank_; ++i)
        if (simple_[i] == r) return i;
    return std::nullopt;
}

Rational RootSystem::pairing(RootId a, int k) const {
    const Rational& v = pair_.at(slot_of(a)).at(k);
    return a > 0 ? v : Rational(-v);
}

Rational RootSystem::form(RootId a, RootId b) const {
    Root ra = root(a), rb = root(b);
    Rational s = 0;
    for (int i = 0; i < rank_; ++i)
        for (int j = 0; j < rank_; ++j) s += ra.coeffs[i] * rb.coeffs[j] * form_simple_[i][j];
    return s;
}

const std::vector<Rational>& RootSystem::coroot(RootId a) const {
    return a > 0 ? coroot_pos_.at(slot_of(a)) : coroot_neg_.at(slot_of(a));
}

Poly RootSystem::weight_pairing(RootId a, const std::vector<Poly>& weight) const {
    Poly p;
    const auto& h = coroot(a);
    for (int k = 0; k < cartan_dim_; ++k) p += weight.at(k) * h[k];
    return p;
}

Rational RootSystem::n(RootId a, RootId b) const {
    auto it = n_.find({a, b});
    return it == n_.end() ? Rational(0) : it->second;
}

std::optional<std::pair<int, int>> RootSystem::ambient(RootId r) const {
    if (ambient_.empty()) return std::nullopt;
    auto [i, j] = ambient_.at(slot_of(r));
    return r > 0 ? std::make_pair(i, j) : std::make_pair(j, i);
}

std::optional<RootId> RootSystem::from_ambient(int i, int j) const {
    if (ambient_.empty() || i == j) return std::nullopt;
    for (int k = 0; k < num_positive(); ++k) {
        if (ambient_[k] == std::make_pair(i, j)) return k + 1;
        if (ambient_[k] == std::make_pair(j, i)) return -(k + 1);
    }
    return std::nullopt;
}

std::string RootSystem::label(const Generator& g) const {
    if (!ambient_.empty()) {
        int i, j;
        if (g.is_cartan()) {
            i = j = g.index + 1;
        } else {
            std::tie(i, j) = *ambient(g.index);
        }
        std::string sep = gl_n() >= 10 ? "_" : "";
        return "C" + std::to_string(i) + sep + std::to_string(j);
    }
    if (g.is_cartan()) return "H" + std::to_string(g.index + 1);
    return "E[" + join_coeffs(root(g.index), ",") + "]";
}

std::string RootSystem::z_name(RootId r) const {
    if (!ambient_.empty()) {
        auto [i, j] = *ambient(r);
        std::string sep = gl_n() >= 10 ? "_" : "";
        return "z" + std::to_string(i) + sep + std::to_string(j);
    }
    bool wide = false;
    for (int c : root(r).coeffs) wide = wide || c > 9;
    return "z_" + join_coeffs(root(r), wide ? "_" : "");
}

std::optional<Generator> RootSystem::parse_label(const std::string& s) const {
    for (const auto& g : generators())
        if (label(g) == s) return g;
    return std::nullopt;
}

std::vector<Generator> RootSystem::generators() const {
    std::vector<Generator> out;
    if (!ambient_.empty()) {
        for (int i = 1; i <= gl_n(); ++i)
            for (int j = 1; j <= gl_n(); ++j)
                out.push_back(i == j ? Generator::cartan(i - 1) : Generator::root(*from_ambient(i, j)));
        return out;
    }
    for (int k = 0; k < cartan_dim_; ++k) out.push_back(Generator::cartan(k));
    for (int k = 1; k <= num_positive(); ++k) out.push_back(Generator::root(k));
    for (int k = 1; k <= num_positive(); ++k) out.push_back(Generator::root(-k));
    return out;
}

Element RootSystem::bracket(const Generator& x, const Generator& y) const {
    Element e;
    if (x.is_cartan() && y.is_cartan()) return e;
    if (x.is_cartan()) {
        add_to(e, y, pairing(y.index, x.index));
        return e;
    }
    if (y.is_cartan()) {
        add_to(e, x, -pairing(x.index, y.index));
        return e;
    }
    if (x.index == -y.index) {
        const auto& h = coroot(x.index);
        for (int k = 0; k < cartan_dim_; ++k) add_to(e, Generator::cartan(k), h[k]);
        return e;
    }
    if (auto s = sum(x.index, y.index)) add_to(e, Generator::root(*s), n(x.index, y.index));
    return e;
}

Element RootSystem::bracket(const Element& x, const Element& y) const {
    Element e;
    for (const auto& [gx, cx] : x)
        for (const auto& [gy, cy] : y)
            for (const auto& [g, c] : bracket(gx, gy)) add_to(e, g, c * cx * cy);
    return e;
}

RootSystem build_a_series(int l) {
    if (l < 1) throw Error(ErrorKind::Config, "A-series rank must be >= 1");
    RootSystem rs;
    rs.series_ = Series::A;
    rs.rank_ = l;
    rs.cartan_dim_ = l + 1;
    rs.nu_ = nu_for(Series::A, l);

    struct Entry {
        Root r;
        int i, j;
    };
    std::vector<Entry> entries;
    for (int i = 1; i <= l + 1; ++i)
        for (int j = i + 1; j <= l + 1; ++j) {
            Root r{std::vector<int>(l, 0)};
            for (int k = i; k < j; ++k) r.coeffs[k - 1] = 1;
            entries.push_back({r, i, j});
        }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return root_order(a.r, b.r); });
    for (const auto& e : entries) {
        rs.pos_.push_back(e.r);
        rs.ambient_.push_back({e.i, e.j});
        std::vector<Rational> h(l + 1, Rational(0));
        h[e.i - 1] = 1;
        h[e.j - 1] = -1;
        rs.pair_.push_back(h);
        rs.coroot_pos_.push_back(h);
        for (auto& v : h) v = -v;
        rs.coroot_neg_.push_back(h);
    }
    rs.index_roots();

    rs.form_simple_.assign(l, std::vector<Rational>(l, Rational(0)));
    for (int i = 0; i < l; ++i) {
        rs.form_simple_[i][i] = 2;
        if (i + 1 < l) rs.form_simple_[i][i + 1] = rs.form_simple_[i + 1][i] = -1;
    }

    // [C_ij, C_kl] = d_jk C_il - d_il C_kj
    int N = rs.num_positive();
    for (int a = -N; a <= N; ++a) {
        if (a == 0) continue;
        for (int b = -N; b <= N; ++b) {
            if (b == 0 || b == -a) continue;
            auto [i, j] = *rs.ambient(a);
            auto [k, m] = *rs.ambient(b);
            if (j == k && i != m) rs.n_[{a, b}] = 1;
            else if (i == m && k != j) rs.n_[{a, b}] = -1;
        }
    }
    return rs;
}

Rational structure_chain(const RootSystem& rs, const std::vector<RootId>& chain, RootId alpha) {
    Rational prod = 1;
    Root cur = rs.root(alpha);
    RootId cur_id = alpha;
    for (RootId a : chain) {
        auto next = rs.find(cur + rs.root(a));
        if (!next) return 0;
        prod *= rs.n(a, cur_id);
        if (sgn(prod) == 0) return 0;
        cur = cur + rs.root(a);
        cur_id = *next;
    }
    return prod;
}

std::vector<JacobiFailure> jacobi_violations(const RootSystem& rs) {
    std::vector<JacobiFailure> out;
    auto gens = rs.generators();
    auto single = [](const Generator& g) { return Element{{g, Rational(1)}}; };
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b) {
            Element xy = rs.bracket(gens[a], gens[b]);
            for (std::size_t c = b + 1; c < gens.size(); ++c) {
                Element s = rs.bracket(xy, single(gens[c]));
                for (const auto& [g, v] : rs.bracket(rs.bracket(gens[b], gens[c]), single(gens[a])))
                    add_to(s, g, v);
                for (const auto& [g, v] : rs.bracket(rs.bracket(gens[c], gens[a]), single(gens[b])))
                    add_to(s, g, v);
                if (!s.empty()) out.push_back({gens[a], gens[b], gens[c]});
            }
        }
    return out;
}

namespace {

// Symmetrized Cartan matrix from root strings; long roots get length^2 = 2.
std::vector<std::vector<Rational>> form_from_strings(const RootSystem& rs) {
    int r = rs.rank();
    std::vector<std::vector<int>> a(r, std::vector<int>(r, 2));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i == j) continue;
            int q = 0;
            Root cur = rs.root(rs.simple(j));
            while (rs.find(cur + rs.root(rs.simple(i)))) {
                cur = cur + rs.root(rs.simple(i));
                ++q;
            }
            a[i][j] = -q;
        }
    std::vector<Rational> len(r, Rational(0));
    for (int start = 0; start < r; ++start) {
        if (sgn(len[start]) != 0) continue;
        len[start] = 1;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < r; ++j)
                if (j != i && a[i][j] != 0 && sgn(len[j]) == 0) {
                    Rational ratio(a[j][i], a[i][j]);
                    ratio.canonicalize();
                    len[j] = len[i] * ratio;
                    stack.push_back(j);
                }
        }
    }
    Rational mx = *std::max_element(len.begin(), len.end());
    std::vector<std::vector<Rational>> f(r, std::vector<Rational>(r));
    for (int i = 0; i < r; ++i) {
        Rational li = len[i] * 2 / mx;
        for (int j = 0; j < r; ++j) f[i][j] = a[i][j] * li / 2;
    }
    return f;
}

} // namespace

RootSystem load_custom(const RootSystem::Table& t, bool validate) {
    if (t.rank < 1) throw Error(ErrorKind::Config, "rank must be >= 1");
    RootSystem rs;
    rs.series_ = t.series;
    rs.rank_ = t.rank;
    rs.cartan_dim_ = t.rank;

    std::vector<int> order(t.positive.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Root& r = t.positive[k];
        if (static_cast<int>(r.coeffs.size()) != t.rank || !r.positive())
            throw Error(ErrorKind::Config, "root " + std::to_string(k + 1) + " is not a positive root of rank " +
                                               std::to_string(t.rank));
        order[k] = static_cast<int>(k);
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return root_order(t.positive[a], t.positive[b]); });
    std::vector<RootId> id_of(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        rs.pos_.push_back(t.positive[order[k]]);
        id_of[order[k]] = static_cast<RootId>(k + 1);
    }
    for (std::size_t k = 1; k < rs.pos_.size(); ++k)
        if (rs.pos_[k] == rs.pos_[k - 1]) throw Error(ErrorKind::Config, "duplicate root in table");
    rs.index_roots();
    for (int i = 0; i < rs.rank_; ++i)
        if (rs.simple_[i] == 0)
            throw Error(ErrorKind::ClosureViolation, "simple root " + std::to_string(i + 1) + " missing");

    int maxh = 0;
    for (const auto& r : rs.pos_) maxh = std::max(maxh, r.height());
    rs.nu_ = t.series == Series::Custom ? maxh - 1 : nu_for(t.series, t.rank);

    rs.form_simple_ = t.form ? *t.form : form_from_strings(rs);
    if (static_cast<int>(rs.form_simple_.size()) != rs.rank_)
        throw Error(ErrorKind::Config, "form must be rank x rank");
    for (int k = 0; k < rs.num_positive(); ++k) {
        std::vector<Rational> h(rs.rank_);
        for (int i = 0; i < rs.rank_; ++i) h[i] = rs.form(k + 1, rs.simple_[i]);
        rs.pair_.push_back(h);
        std::vector<Rational> c(rs.rank_), cn(rs.rank_);
        for (int i = 0; i < rs.rank_; ++i) {
            c[i] = rs.pos_[k].coeffs[i];
            cn[i] = -c[i];
        }
        rs.coroot_pos_.push_back(c);
        rs.coroot_neg_.push_back(cn);
    }

    int N = rs.num_positive();
    auto map_id = [&](int user) -> RootId {
        int u = user > 0 ? user : -user;
        if (u < 1 || u > N) throw Error(ErrorKind::Config, "root index " + std::to_string(user) + " out of range");
        return user > 0 ? id_of[u - 1] : -id_of[u - 1];
    };
    for (const auto& [ua, ub, v] : t.n) {
        RootId a = map_id(ua), b = map_id(ub);
        if (sgn(v) != 0) rs.n_[{a, b}] = v;
    }
    if (!validate) return rs;

    auto name = [&](RootId a) { return rs.label(Generator::root(a)); };
    for (const auto& [key, v] : rs.n_) {
        auto [a, b] = key;
        if (a == -b || !rs.sum(a, b))
            throw Error(ErrorKind::ClosureViolation,
                        "entry for (" + name(a) + ", " + name(b) + ") but their sum is not a root");
    }
    for (int a = -N; a <= N; ++a)
        for (int b = -N; b <= N; ++b) {
            if (a == 0 || b == 0 || a == -b) continue;
            if (rs.sum(a, b) && sgn(rs.n(a, b)) == 0)
                throw Error(ErrorKind::ClosureViolation,
                            "missing entry for (" + name(a) + ", " + name(b) + ") whose sum is a root");
        }
    for (const auto& [key, v] : rs.n_) {
        auto [a, b] = key;
        if (sgn(v + rs.n(b, a)) != 0)
            throw Error(ErrorKind::AntisymmetryViolation,
                        "n(" + name(a) + ", " + name(b) + ") != -n(" + name(b) + ", " + name(a) + ")");
    }
    if (rs.rank_ <= 3) {
        auto bad = jacobi_violations(rs);
        if (!bad.empty()) {
            const auto& f = bad.front();
            throw Error(ErrorKind::JacobiViolation, "Jacobi identity fails on (" + rs.label(f.x) + ", " +
                                                        rs.label(f.y) + ", " + rs.label(f.z) + ")");
        }
    }
    return rs;
}

namespace {

Rational json_rational(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) {
        Rational r(j.get<std::string>());
        r.canonicalize();
        return r;
    }
    throw Error(ErrorKind::Config, "expected an integer or a \"p/q\" string, got " + j.dump());
}

} // namespace

RootSystem load_custom_json(const std::string& text, bool validate) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("custom table: ") + e.what());
    }
    try {
        RootSystem::Table t;
        t.series = parse_series(j.value("series", std::string("custom")));
        t.rank = j.at("rank").get<int>();
        for (const auto& r : j.at("roots")) t.positive.push_back(Root{r.get<std::vector<int>>()});
        for (const auto& e : j.at("n")) {
            if (e.size() != 3) throw Error(ErrorKind::Config, "n entries are [a, b, value]");
            t.n.emplace_back(e[0].get<int>(), e[1].get<int>(), json_rational(e[2]));
        }
        if (j.contains("form")) {
            std::vector<std::vector<Rational>> f;
            for (const auto& row : j["form"]) {
                std::vector<Rational> fr;
                for (const auto& v : row) fr.push_back(json_rational(v));
                f.push_back(fr);
            }
            t.form = f;
        }
        return load_custom(t, validate);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("custom table: ") + e.what());
    }
}

} // namespace csflow
