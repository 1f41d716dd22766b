#include "csflow/job.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "csflow/quantum.hpp"

namespace csflow {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using json = nlohmann::json;

namespace fs = std::filesystem;

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::SingularY:
    case ErrorKind::QuadratureResolutionTooCoarse:
    case ErrorKind::OutOfChart:
    case ErrorKind::SingularMetric:
        return ExitNumerical;
    default:
        return ExitConfig;
    }
}

namespace {

const cplx I(0.0, 1.0);

// Config reader: every error names the file and the JSON pointer it came from.
struct Reader {
    std::string source;

    [[noreturn]] void fail(const std::string& where, const std::string& msg) const {
        throw Error(ErrorKind::Config, fmt::format("{}: {}: {}", source, where.empty() ? "/" : where, msg));
    }

    double number(const json& j, const std::string& where) const {
        if (!j.is_number()) fail(where, "expected a number");
        return j.get<double>();
    }

    int integer(const json& j, const std::string& where) const {
        if (!j.is_number_integer()) fail(where, "expected an integer");
        return j.get<int>();
    }

    cplx complex(const json& j, const std::string& where) const {
        if (j.is_number()) return {j.get<double>(), 0.0};
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
            return {j[0].get<double>(), j[1].get<double>()};
        fail(where, "expected a number or [re, im]");
    }

    Rational rational(const json& j, const std::string& where) const {
        if (j.is_number_integer()) return Rational(j.get<long>());
        if (j.is_number_float()) return Rational(j.get<double>());
        if (j.is_string()) {
            try {
                Rational r(j.get<std::string>());
                r.canonicalize();
                if (r.get_den() == 0) fail(where, "zero denominator");
                return r;
            } catch (const std::invalid_argument&) {
                fail(where, "expected a rational like \"3/2\"");
            }
        }
        fail(where, "expected a number or a \"p/q\" string");
    }

    CVec cvec(const json& j, const std::string& where) const {
        if (!j.is_array()) fail(where, "expected an array");
        CVec v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(complex(j[i], where + "/" + std::to_string(i)));
        return v;
    }

    MatrixXcd matrix(const json& j, const std::string& where) const {
        if (!j.is_array() || j.empty() || !j[0].is_array()) fail(where, "expected an array of rows");
        MatrixXcd m(j.size(), j[0].size());
        for (std::size_t r = 0; r < j.size(); ++r) {
            std::string wr = where + "/" + std::to_string(r);
            if (!j[r].is_array() || j[r].size() != j[0].size()) fail(wr, "rows must have equal length");
            for (std::size_t c = 0; c < j[r].size(); ++c)
                m(r, c) = complex(j[r][c], wr + "/" + std::to_string(c));
        }
        return m;
    }

    // Rethrows library errors with this file's context, keeping the kind.
    template <class F>
    auto guard(const std::string& where, F&& f) const {
        try {
            return f();
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("{}: {}: {}", source, where, e.what()));
        }
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const std::vector<std::string> known_keys{"preset", "algebra",    "chart",      "weight",     "degenerate",
                                          "variant", "hamiltonian", "z0",         "t_end",      "integrator",
                                          "outputs", "seed",        "verify",     "m",          "n"};

void read_preset(const Reader& rd, const json& doc, JobConfig& cfg, const std::string& base_dir) {
    if (doc.contains("preset") == doc.contains("algebra")) rd.fail("/", "give exactly one of preset or algebra");
    if (doc.contains("preset")) {
        const json& p = doc["preset"];
        std::string name = p.is_string() ? p.get<std::string>() : (p.is_object() ? p.value("name", "") : "");
        const json& dims = p.is_object() ? p : doc;
        if (name == "su2") {
            cfg.preset = Preset::Su2;
        } else if (name == "su3") {
            cfg.preset = Preset::Su3;
        } else if (name == "grassmann") {
            cfg.preset = Preset::Grassmann;
            cfg.m = dims.contains("m") ? rd.integer(dims["m"], "/preset/m") : 1;
            cfg.n = dims.contains("n") ? rd.integer(dims["n"], "/preset/n") : 1;
            if (cfg.m < 1 || cfg.n < 1) rd.fail("/preset", "grassmann needs m, n >= 1");
        } else if (name == "oscillator") {
            cfg.preset = Preset::Oscillator;
            cfg.n = dims.contains("n") ? rd.integer(dims["n"], "/preset/n") : 1;
            if (cfg.n < 1) rd.fail("/preset", "oscillator needs n >= 1");
        } else {
            rd.fail("/preset", "unknown preset '" + name + "' (su2, su3, grassmann, oscillator)");
        }
        return;
    }
    const json& a = doc["algebra"];
    if (!a.is_object()) rd.fail("/algebra", "expected {series, rank} or {custom}");
    cfg.preset = Preset::Algebra;
    if (a.contains("custom")) {
        const json& c = a["custom"];
        if (c.is_string()) {
            fs::path p(c.get<std::string>());
            if (p.is_relative()) p = fs::path(base_dir) / p;
            try {
                cfg.custom_table = read_file(p.string());
            } catch (const Error&) {
                rd.fail("/algebra/custom", "cannot read " + p.string());
            }
        } else if (c.is_object()) {
            cfg.custom_table = c.dump();
        } else {
            rd.fail("/algebra/custom", "expected a file name or an inline table");
        }
        return;
    }
    std::string series = a.contains("series") && a["series"].is_string() ? a["series"].get<std::string>() : "";
    if (series != "A") rd.fail("/algebra/series", "built-in series is A; use {custom} for other tables");
    if (!a.contains("rank")) rd.fail("/algebra", "missing rank");
    cfg.rank = rd.integer(a["rank"], "/algebra/rank");
    if (cfg.rank < 1) rd.fail("/algebra/rank", "rank must be at least 1");
}

bool has_table(Preset p) { return p == Preset::Su2 || p == Preset::Su3 || p == Preset::Algebra; }

void read_hamiltonian(const Reader& rd, const json& doc, JobConfig& cfg) {
    if (!doc.contains("hamiltonian")) return;
    const json& h = doc["hamiltonian"];
    if (cfg.preset == Preset::Grassmann) {
        if (!h.is_object()) rd.fail("/hamiltonian", "expected {eps01, eps02, eps_plus[, eps_minus]}");
        RiccatiBlocks b;
        for (const char* k : {"eps01", "eps02", "eps_plus"})
            if (!h.contains(k)) rd.fail("/hamiltonian", std::string("missing ") + k);
        b.eps01 = rd.matrix(h["eps01"], "/hamiltonian/eps01");
        b.eps02 = rd.matrix(h["eps02"], "/hamiltonian/eps02");
        b.epsp = rd.matrix(h["eps_plus"], "/hamiltonian/eps_plus");
        b.epsm = h.contains("eps_minus") ? rd.matrix(h["eps_minus"], "/hamiltonian/eps_minus") : MatrixXcd(b.epsp.adjoint());
        b.variant = cfg.variant;
        if (b.m() != cfg.m || b.n() != cfg.n) rd.fail("/hamiltonian", fmt::format("blocks must match m={} n={}", cfg.m, cfg.n));
        rd.guard("/hamiltonian", [&] { check_blocks(b); });
        cfg.blocks = b;
        return;
    }
    if (cfg.preset == Preset::Oscillator) {
        if (!h.is_object() || !h.contains("omega")) rd.fail("/hamiltonian", "expected {omega[, f]}");
        cfg.omega = rd.matrix(h["omega"], "/hamiltonian/omega");
        CVec f = h.contains("f") ? rd.cvec(h["f"], "/hamiltonian/f") : CVec(cfg.n, 0.0);
        cfg.force = Eigen::Map<VectorXcd>(f.data(), static_cast<long>(f.size()));
        if (cfg.omega.rows() != cfg.n || cfg.omega.cols() != cfg.n || cfg.force.size() != cfg.n)
            rd.fail("/hamiltonian", fmt::format("omega must be {0} x {0} and f of length {0}", cfg.n));
        rd.guard("/hamiltonian", [&] { oscillator_field(cfg.omega, cfg.force); });
        return;
    }
    if (!h.is_array()) rd.fail("/hamiltonian", "expected a list of {generator, eps}");
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::string w = "/hamiltonian/" + std::to_string(i);
        if (!h[i].is_object() || !h[i].contains("generator") || !h[i]["generator"].is_string() || !h[i].contains("eps"))
            rd.fail(w, "expected {generator, eps}");
        std::string label = h[i]["generator"].get<std::string>();
        if (cfg.hamiltonian.eps.count(label)) rd.fail(w, "generator '" + label + "' given twice");
        cfg.hamiltonian.eps[label] = rd.complex(h[i]["eps"], w + "/eps");
    }
}

void read_integrator(const Reader& rd, const json& doc, JobConfig& cfg) {
    IntegratorOptions& o = cfg.integrator;
    if (doc.contains("t_end")) cfg.t_end = rd.number(doc["t_end"], "/t_end");
    if (cfg.t_end < 0) rd.fail("/t_end", "must be non-negative");
    if (!doc.contains("integrator")) return;
    const json& j = doc["integrator"];
    if (!j.is_object()) rd.fail("/integrator", "expected an object");
    for (const auto& [k, v] : j.items()) {
        std::string w = "/integrator/" + k;
        if (k == "method") {
            std::string m = v.is_string() ? v.get<std::string>() : "";
            if (m == "rk4") o.method = Method::RK4;
            else if (m == "rk45") o.method = Method::RK45;
            else rd.fail(w, "expected \"rk4\" or \"rk45\"");
            continue;
        }
        double x = rd.number(v, w);
        if (!(x > 0)) rd.fail(w, "must be positive");
        if (k == "dt") o.dt = x;
        else if (k == "rtol") o.rtol = x;
        else if (k == "atol") o.atol = x;
        else if (k == "max_step") o.max_step = x;
        else if (k == "sample_dt") o.sample_dt = x;
        else if (k == "blowup") o.blowup = x;
        else if (k == "min_step") o.min_step = x;
        else rd.fail(w, "unknown integrator setting");
    }
}

void read_outputs(const Reader& rd, const json& doc, JobConfig& cfg) {
    if (!doc.contains("outputs")) return;
    const json& j = doc["outputs"];
    if (!j.is_array()) rd.fail("/outputs", "expected a list");
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string s = j[i].is_string() ? j[i].get<std::string>() : "";
        if (s == "operators") cfg.outputs.operators = true;
        else if (s == "field") cfg.outputs.field = true;
        else if (s == "trajectory") cfg.outputs.trajectory = true;
        else if (s == "phase") cfg.outputs.phase = true;
        else if (s == "validation") cfg.outputs.validation = true;
        else rd.fail("/outputs/" + std::to_string(i), "expected operators, field, trajectory, phase or validation");
    }
}

void read_verify(const Reader& rd, const json& doc, JobConfig& cfg) {
    if (!doc.contains("verify")) return;
    const json& j = doc["verify"];
    if (!j.is_object()) rd.fail("/verify", "expected an object");
    VerifyOptions& v = cfg.verify;
    if (j.contains("checks")) {
        if (!j["checks"].is_array()) rd.fail("/verify/checks", "expected a list");
        for (std::size_t i = 0; i < j["checks"].size(); ++i) {
            const json& c = j["checks"][i];
            std::string s = c.is_string() ? c.get<std::string>() : "";
            const auto& names = check_names();
            if (std::find(names.begin(), names.end(), s) == names.end())
                rd.fail("/verify/checks/" + std::to_string(i), "unknown check '" + s + "'");
            v.checks.push_back(s);
        }
    }
    if (j.contains("draws")) v.draws = rd.integer(j["draws"], "/verify/draws");
    if (j.contains("points")) v.points = rd.integer(j["points"], "/verify/points");
    if (v.draws < 1 || v.points < 1) rd.fail("/verify", "draws and points must be positive");
    if (j.contains("riccati")) {
        const json& r = j["riccati"];
        if (r.contains("m")) v.riccati_m = rd.integer(r["m"], "/verify/riccati/m");
        if (r.contains("n")) v.riccati_n = rd.integer(r["n"], "/verify/riccati/n");
        if (v.riccati_m < 1 || v.riccati_n < 1) rd.fail("/verify/riccati", "m and n must be positive");
    }
}

int flow_dim(const JobConfig& cfg) {
    switch (cfg.preset) {
    case Preset::Grassmann: return cfg.m * cfg.n;
    case Preset::Oscillator: return cfg.n;
    default: return build_representation(cfg).num_vars();
    }
}

std::map<Var, Poly> weight_sub(const std::vector<Rational>& w) {
    std::map<Var, Poly> s;
    for (std::size_t i = 0; i < w.size(); ++i) s[Var::w(static_cast<int>(i))] = Poly(w[i]);
    return s;
}

std::vector<Poly> weight_polys(const std::vector<Rational>& w) {
    std::vector<Poly> p;
    for (const auto& x : w) p.emplace_back(x);
    return p;
}

Representation substitute_weight(Representation rep, const std::vector<Rational>& w) {
    auto s = weight_sub(w);
    for (auto& g : rep.generators) g.op = g.op.substitute(s);
    for (auto& p : rep.weight) p = p.substitute(s);
    return rep;
}

bool integral(const Rational& r) { return r.get_den() == 1; }

// su3 kernel exponents for weight w = (w1, w2, w3): j1 = w1 - w2, j2 = w2 - w3, both non-negative integers.
std::optional<std::pair<int, int>> su3_exponents(const JobConfig& cfg) {
    if (!cfg.weight || cfg.weight->size() != 3) return std::nullopt;
    const auto& w = *cfg.weight;
    Rational a = w[0] - w[1], b = w[1] - w[2];
    if (!integral(a) || !integral(b) || a < 0 || b < 0) return std::nullopt;
    return std::pair<int, int>{static_cast<int>(a.get_num().get_si()), static_cast<int>(b.get_num().get_si())};
}

bool is_su3(const JobConfig& cfg) {
    return cfg.preset == Preset::Su3 || (cfg.preset == Preset::Algebra && !cfg.custom_table && cfg.rank == 2);
}

// Kernel for the chart of this job, when one is known.
std::optional<KernelSpec> kernel_spec(const JobConfig& cfg) {
    if (cfg.preset == Preset::Su2 && cfg.weight) {
        double j = (*cfg.weight)[0].get_d();
        if (j <= 0 || !integral(2 * (*cfg.weight)[0])) return std::nullopt;
        return KernelSpec::su2(j);
    }
    if (is_su3(cfg) && cfg.chart == Chart::Matrix) {
        auto e = su3_exponents(cfg);
        if (!e) return std::nullopt;
        if (cfg.degenerate.empty()) return KernelSpec::su3(e->first, e->second);
        if (cfg.degenerate == std::vector<int>{1}) return KernelSpec::su3(e->first, 0, {0, 2});
        if (cfg.degenerate == std::vector<int>{0}) return KernelSpec::su3(0, e->second, {1, 2});
    }
    return std::nullopt;
}

std::vector<Rational> kernel_weight(const JobConfig& cfg) {
    if (cfg.preset == Preset::Su2) return {(*cfg.weight)[0]};
    return *cfg.weight;
}

} // namespace

JobConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
    Reader rd{source};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorKind::Config, fmt::format("{}:{}:{}: invalid JSON: {}", source, line, col, e.what()));
    }
    if (!doc.is_object()) rd.fail("/", "expected a JSON object");
    for (const auto& [k, v] : doc.items())
        if (std::find(known_keys.begin(), known_keys.end(), k) == known_keys.end()) rd.fail("/" + k, "unknown key");

    JobConfig cfg;
    cfg.source = source;
    read_preset(rd, doc, cfg, base_dir);

    if (doc.contains("chart")) {
        std::string c = doc["chart"].is_string() ? doc["chart"].get<std::string>() : "";
        if (c == "matrix") cfg.chart = Chart::Matrix;
        else if (c == "exponential") cfg.chart = Chart::Exponential;
        else rd.fail("/chart", "expected \"matrix\" or \"exponential\"");
    } else if (cfg.custom_table) {
        cfg.chart = Chart::Exponential;
    }
    if (cfg.custom_table && cfg.chart == Chart::Matrix) rd.fail("/chart", "custom tables have no matrix chart");

    if (doc.contains("weight")) {
        const json& w = doc["weight"];
        if (!w.is_array()) rd.fail("/weight", "expected a list");
        std::vector<Rational> v;
        for (std::size_t i = 0; i < w.size(); ++i) v.push_back(rd.rational(w[i], "/weight/" + std::to_string(i)));
        cfg.weight = v;
    }
    if (doc.contains("degenerate")) {
        const json& d = doc["degenerate"];
        if (!d.is_array()) rd.fail("/degenerate", "expected a list of simple-root indices");
        for (std::size_t i = 0; i < d.size(); ++i) cfg.degenerate.push_back(rd.integer(d[i], "/degenerate/" + std::to_string(i)));
        if (!cfg.degenerate.empty() && !cfg.weight) rd.fail("/degenerate", "needs numeric weight");
    }
    if (doc.contains("variant")) {
        std::string v = doc["variant"].is_string() ? doc["variant"].get<std::string>() : "";
        if (v == "compact") cfg.variant = RiccatiVariant::Compact;
        else if (v == "noncompact") cfg.variant = RiccatiVariant::Noncompact;
        else rd.fail("/variant", "expected \"compact\" or \"noncompact\"");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) rd.fail("/seed", "expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (cfg.custom_table && !doc.contains("hamiltonian")) {
        // table faults are reported by verify; synth and evolve reject them when building
        rd.guard("/algebra/custom", [&] { load_custom_json(*cfg.custom_table, false); });
    } else if (has_table(cfg.preset)) {
        Representation rep = rd.guard("/algebra", [&] { return build_representation(cfg); });
        if (cfg.weight && cfg.preset == Preset::Su2 && cfg.weight->size() != 1)
            rd.fail("/weight", "su2 takes the spin j");
        read_hamiltonian(rd, doc, cfg);
        for (const auto& [label, e] : cfg.hamiltonian.eps)
            if (!rep.find(label)) rd.fail("/hamiltonian", "unknown generator '" + label + "'");
        rd.guard("/hamiltonian", [&] { check_hermitian(rep, cfg.hamiltonian); });
    } else {
        read_hamiltonian(rd, doc, cfg);
        if (cfg.preset == Preset::Grassmann && !cfg.blocks) rd.fail("/hamiltonian", "grassmann needs blocks");
        if (cfg.preset == Preset::Oscillator && cfg.omega.size() == 0) rd.fail("/hamiltonian", "oscillator needs omega");
    }

    read_integrator(rd, doc, cfg);
    read_outputs(rd, doc, cfg);
    read_verify(rd, doc, cfg);

    if (doc.contains("z0") || !cfg.custom_table) {
        int dim = rd.guard("/z0", [&] { return flow_dim(cfg); });
        cfg.z0 = doc.contains("z0") ? rd.cvec(doc["z0"], "/z0") : CVec(dim, 0.0);
        if (static_cast<int>(cfg.z0.size()) != dim) rd.fail("/z0", fmt::format("expected {} coordinates", dim));
    }
    if (cfg.outputs.phase && !build_phase_model(cfg))
        rd.fail("/outputs", "phase needs su2 with spin weight, su3 with integral dominant weight in the matrix chart, "
                            "or the oscillator");
    return cfg;
}

JobConfig load_config(const std::string& path) {
    std::string text = read_file(path);
    fs::path p(path);
    return parse_config(text, path, p.has_parent_path() ? p.parent_path().string() : ".");
}

Representation build_representation(const JobConfig& cfg) {
    Representation rep;
    switch (cfg.preset) {
    case Preset::Su2:
        rep = synth_su2();
        break;
    case Preset::Su3:
    case Preset::Algebra: {
        if (cfg.custom_table) {
            auto rs = std::make_shared<const RootSystem>(load_custom_json(*cfg.custom_table));
            std::vector<Poly> w = cfg.weight ? weight_polys(*cfg.weight) : weight_symbols(rs->cartan_dim());
            if (static_cast<int>(w.size()) != rs->cartan_dim())
                throw Error(ErrorKind::Config, fmt::format("weight needs {} components", rs->cartan_dim()));
            return Synthesizer(rs, w, cfg.degenerate).representation(Chart::Exponential);
        }
        int l = cfg.preset == Preset::Su3 ? 2 : cfg.rank;
        if (cfg.weight && static_cast<int>(cfg.weight->size()) != l + 1)
            throw Error(ErrorKind::Config, fmt::format("weight needs {} components", l + 1));
        if (!cfg.degenerate.empty()) return synth_a_series(l, cfg.chart, weight_polys(*cfg.weight), cfg.degenerate);
        rep = synth_a_series(l, cfg.chart);
        break;
    }
    default:
        throw Error(ErrorKind::Config, "grassmann and oscillator presets have no operator table");
    }
    return cfg.weight ? substitute_weight(rep, *cfg.weight) : rep;
}

FlowField build_field(const JobConfig& cfg) {
    switch (cfg.preset) {
    case Preset::Grassmann: {
        if (!cfg.blocks) throw Error(ErrorKind::Config, "grassmann needs blocks");
        return matrix_riccati_field(*cfg.blocks);
    }
    case Preset::Oscillator:
        return oscillator_field(cfg.omega, cfg.force);
    default:
        return assemble_rhs(build_representation(cfg), cfg.hamiltonian);
    }
}

std::optional<PhaseModel> build_phase_model(const JobConfig& cfg) {
    if (cfg.preset == Preset::Oscillator) {
        // flat kernel exp(w-bar . z): E = z^+ omega z + 2 Re f^+ z, A = z-bar
        PhaseModel pm;
        pm.energy = [om = cfg.omega, f = cfg.force](const CVec& z) {
            Eigen::Map<const VectorXcd> v(z.data(), static_cast<long>(z.size()));
            return v.dot(om * v).real() + 2 * f.dot(v).real();
        };
        pm.connection = [](const CVec& z) {
            CVec a(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::conj(z[i]);
            return a;
        };
        return pm;
    }
    auto spec = kernel_spec(cfg);
    if (!spec) return std::nullopt;
    Representation rep = build_representation(cfg);
    auto energy = std::make_shared<KernelEnergy>(rep, cfg.hamiltonian, *spec, kernel_weight(cfg));
    PhaseModel pm;
    pm.energy = [energy](const CVec& z) { return (*energy)(z); };
    pm.connection = [s = *spec](const CVec& z) { return kernel_connection(s, z); };
    return pm;
}

JobResult run_synth(const JobConfig& cfg) {
    JobResult r;
    Representation rep = build_representation(cfg);
    r.files.push_back({"operators.json", rep.to_json()});
    r.files.push_back({"operators.txt", rep.to_text()});
    r.message = fmt::format("{} operators on {} chart variables", rep.generators.size(), rep.num_vars());
    return r;
}

namespace {

CVec flat(const MatrixXcd& m) {
    CVec v;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
    return v;
}

// Quantum oracle for a finished trajectory, where a matrix model exists.
std::optional<CheckResult> evolve_validation(const JobConfig& cfg, const Trajectory& tr) {
    CheckResult c;
    auto worst = [&](double d) { c.value = std::max(c.value, d); };
    if (cfg.preset == Preset::Oscillator) {
        c.name = "oscillator closed form";
        c.tolerance = 1e-9;
        int n = cfg.n;
        MatrixXcd g = MatrixXcd::Zero(n + 1, n + 1);
        g.topLeftCorner(n, n) = -I * cfg.omega;
        g.topRightCorner(n, 1) = -I * cfg.force;
        VectorXcd x0(n + 1);
        for (int a = 0; a < n; ++a) x0(a) = cfg.z0[a];
        x0(n) = 1;
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            VectorXcd x = MatrixXcd(g * tr.times[k]).exp() * x0;
            for (int a = 0; a < n; ++a) worst(std::abs(x(a) - tr.states[k][a]));
        }
    } else if (cfg.preset == Preset::Grassmann) {
        c.name = "riccati linearization";
        c.tolerance = 1e-6;
        int m = cfg.m, n = cfg.n, steps = static_cast<int>(tr.times.size()) - 1;
        MatrixXcd z0(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) z0(i, j) = cfg.z0[i * n + j];
        if (steps < 1) return std::nullopt;
        double t_end = tr.times.back();
        auto lin = riccati_linearize(*cfg.blocks, z0, MatrixXcd::Identity(n, n), t_end, steps, 1e4);
        int skipped = 0;
        for (std::size_t k = 0; k < tr.states.size() && k < lin.Z.size(); ++k) {
            if (lin.singular[k]) {
                ++skipped;
                continue;
            }
            CVec z = flat(lin.Z[k]);
            for (std::size_t a = 0; a < z.size(); ++a) worst(std::abs(z[a] - tr.states[k][a]));
        }
        c.detail = fmt::format("{} near-singular samples skipped", skipped);
    } else {
        std::optional<MatrixRep> mr;
        std::vector<int> vars;
        if (cfg.preset == Preset::Su2 && cfg.weight) {
            try {
                mr = su2_rep((*cfg.weight)[0].get_d());
            } catch (const Error&) {
                return std::nullopt;
            }
            vars = {0};
        } else if (is_su3(cfg) && cfg.weight) {
            auto e = su3_exponents(cfg);
            if (e && *e == std::pair<int, int>{1, 0}) mr = su3_rep(Su3Kind::Fundamental);
            if (e && *e == std::pair<int, int>{0, 1}) mr = su3_rep(Su3Kind::Wedge);
            if (cfg.degenerate.empty()) vars = {0, 1, 2};
            else if (cfg.degenerate == std::vector<int>{1}) vars = {0, 2};
            else if (cfg.degenerate == std::vector<int>{0}) vars = {1, 2};
            else mr.reset();
        }
        if (!mr) return std::nullopt;
        c.name = "coherence fidelity";
        c.tolerance = 1e-8;
        auto vec = [&](const CVec& z) {
            if (mr->family == RepFamily::Su2) return coherent_vector(*mr, z);
            CVec full(3, 0.0);
            for (std::size_t a = 0; a < vars.size(); ++a) full[vars[a]] = z[a];
            return cfg.chart == Chart::Exponential ? coherent_vector_exponential(*mr, full) : coherent_vector(*mr, full);
        };
        Propagator prop(hamiltonian_matrix(*mr, cfg.hamiltonian));
        VectorXcd psi0 = vec(cfg.z0);
        for (std::size_t k = 0; k < tr.states.size(); ++k)
            worst(1 - fidelity(vec(tr.states[k]), prop(psi0, tr.times[k])));
    }
    c.passed = c.value <= c.tolerance;
    if (!c.passed) c.failures.push_back(fmt::format("max deviation {:.3g}", c.value));
    return c;
}

} // namespace

JobResult run_evolve(const JobConfig& cfg) {
    JobResult r;
    if (!(cfg.t_end > 0)) throw Error(ErrorKind::Config, cfg.source + ": /t_end: evolve needs t_end > 0");
    FlowField field = build_field(cfg);
    if (cfg.outputs.operators && has_table(cfg.preset)) {
        Representation rep = build_representation(cfg);
        r.files.push_back({"operators.json", rep.to_json()});
        r.files.push_back({"operators.txt", rep.to_text()});
    }
    if (cfg.outputs.field) r.files.push_back({"field.txt", field.to_text()});

    Trajectory tr;
    std::optional<Phase> phase;
    if (cfg.outputs.phase) {
        auto pm = build_phase_model(cfg);
        if (!pm) throw Error(ErrorKind::Config, cfg.source + ": /outputs: no phase model for this configuration");
        auto pt = integrate_with_phase(field, cfg.z0, cfg.t_end, cfg.integrator, *pm);
        tr = std::move(pt.traj);
        phase = std::move(pt.phase);
    } else {
        tr = integrate(field, cfg.z0, cfg.t_end, cfg.integrator);
    }
    const Phase* ph = phase ? &*phase : nullptr;
    r.files.push_back({"trajectory.csv", trajectory_csv(field.names(), tr, ph)});
    r.files.push_back({"trajectory.json", trajectory_json(field.names(), tr, ph)});
    r.message = fmt::format("{} samples, status {}", tr.times.size(), status_name(tr.status));
    if (tr.status != TrajStatus::Completed) {
        r.exit_code = ExitNumerical;
        r.message += fmt::format(" at t = {:.17g}", tr.t_star);
        return r;
    }
    if (cfg.outputs.validation) {
        auto v = evolve_validation(cfg, tr);
        if (!v) throw Error(ErrorKind::Config, cfg.source + ": /outputs: no validation oracle for this configuration");
        r.files.push_back({"validation.json", report_json({*v}, cfg.seed)});
        r.message += fmt::format("; {} {:.3g} (tol {:g})", v->name, v->value, v->tolerance);
        if (!v->passed) r.exit_code = ExitValidation;
    }
    return r;
}

JobResult run_verify(const JobConfig& cfg) {
    JobResult r;
    std::vector<std::string> names = cfg.verify.checks.empty() ? check_names() : cfg.verify.checks;
    // a custom table narrows the default suite to what it can be checked for
    if (cfg.custom_table && cfg.verify.checks.empty()) names = {"homomorphism"};
    Rng rng(cfg.seed);
    std::vector<CheckResult> results;
    for (const auto& n : names) results.push_back(run_check(n, cfg.verify, rng, cfg.custom_table));
    r.files.push_back({"verify.json", report_json(results, cfg.seed)});
    r.files.push_back({"verify.txt", report_text(results)});
    int failed = static_cast<int>(std::count_if(results.begin(), results.end(), [](const CheckResult& c) { return !c.passed; }));
    r.message = report_text(results);
    r.message += fmt::format("{} of {} checks passed", results.size() - failed, results.size());
    if (failed) r.exit_code = ExitValidation;
    return r;
}

void write_outputs(const JobResult& r, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Config, "cannot create " + dir + ": " + ec.message());
    for (const auto& f : r.files) {
        fs::path p = fs::path(dir) / f.name;
        std::ofstream out(p, std::ios::binary);
        out << f.content;
        if (!out) throw Error(ErrorKind::Config, "cannot write " + p.string());
    }
}

} // namespace csflow
