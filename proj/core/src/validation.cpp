#include "csflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "csflow/coeffs.hpp"
#include "csflow/error.hpp"
#include "csflow/quantum.hpp"
#include "csflow/synth.hpp"

namespace csflow {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

const cplx I(0.0, 1.0);

void note(CheckResult& r, double dev, const std::string& what) {
    r.value = std::max(r.value, dev);
    if (!(dev <= r.tolerance)) {
        r.passed = false;
        r.failures.push_back(fmt::format("{}: {:.3g}", what, dev));
    }
}

void exact(CheckResult& r, bool ok, const std::string& what) {
    if (!ok) {
        r.passed = false;
        r.failures.push_back(what);
    }
}

IntegratorOptions tight() {
    IntegratorOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    o.max_step = 0.01;
    o.sample_dt = 0.01;
    return o;
}

CheckResult coefficients() {
    CheckResult r;
    r.name = "coefficients";
    const int K = 30;
    auto c = c_coeffs(K);
    auto d = d_coeffs(K);
    for (int n = 0; n <= K; ++n) {
        Rational sc = 0, sd = 0;
        for (int k = 0; k <= n; ++k) {
            sc += c[k] / factorial(n - k + 1);
            sd += d[k] / factorial(n - k + 1);
        }
        exact(r, sc == 1 / factorial(n), fmt::format("c recurrence n={}", n));
        exact(r, sd == 1 / factorial(n + 2), fmt::format("d recurrence n={}", n));
    }
    exact(r, c[0] == 1 && c[1] == Rational(1, 2), "c0, c1");
    exact(r, c[3] == 0 && c[5] == 0, "c3, c5");
    exact(r, bernoulli_from_c(1) == Rational(1, 6) && bernoulli_from_c(2) == Rational(1, 30) &&
                 bernoulli_from_c(3) == Rational(1, 42),
          "B1..B3");
    r.detail = fmt::format("n <= {}", K);
    return r;
}

CheckResult golden() {
    CheckResult r;
    r.name = "golden";
    auto g = golden_tables();
    auto su2 = synth_su2();
    auto su3 = synth_su3(Chart::Matrix);
    for (const auto& x : g.su2.generators) exact(r, su2.at(x.label).op == x.op, "su2 " + x.label);
    for (const auto& x : g.su3.generators) exact(r, su3.at(x.label).op == x.op, "su3 " + x.label);
    r.detail = fmt::format("{} + {} operators", g.su2.generators.size(), g.su3.generators.size());
    return r;
}

void homomorphism_of(CheckResult& r, const Representation& rep, const std::string& tag) {
    for (const auto& f : verify_homomorphism(rep)) exact(r, false, tag + " [" + f.x + ", " + f.y + "]");
}

CheckResult homomorphism(const std::optional<std::string>& custom) {
    CheckResult r;
    r.name = "homomorphism";
    if (custom) {
        try {
            load_custom_json(*custom, true);
        } catch (const Error& e) {
            exact(r, false, std::string("table: ") + e.what());
        }
        try {
            auto rs = std::make_shared<const RootSystem>(load_custom_json(*custom, false));
            Synthesizer s(rs, weight_symbols(rs->cartan_dim()));
            auto rep = s.representation(Chart::Exponential);
            homomorphism_of(r, rep, "custom");
            r.detail = fmt::format("custom table, {} generators", rep.generators.size());
        } catch (const Error& e) {
            exact(r, false, std::string("synthesis: ") + e.what());
        }
        return r;
    }
    std::size_t pairs = 0;
    for (int l = 1; l <= 3; ++l)
        for (Chart c : {Chart::Exponential, Chart::Matrix}) {
            auto rep = synth_a_series(l, c);
            pairs += rep.generators.size() * rep.generators.size();
            homomorphism_of(r, rep, fmt::format("A{} {}", l, c == Chart::Matrix ? "matrix" : "exponential"));
        }
    r.detail = fmt::format("A1..A3 in both charts, {} ordered pairs", pairs);
    return r;
}

CheckResult decoupling() {
    CheckResult r;
    r.name = "decoupling";
    for (const auto& rep : {synth_su3(Chart::Matrix), golden_tables().su3}) {
        auto rhs = assemble_rhs_symbolic(rep);
        // z12 and z13 do not see z23
        for (int a : {0, 2}) exact(r, rhs[a].derivative(Var::z(1)).is_zero(), "d rhs_" + rep.names(Var::z(a)) + "/dz23");
        exact(r, !rhs[1].derivative(Var::z(1)).is_zero(), "rhs_z23 depends on z23");
    }
    r.detail = "exact in eps";
    return r;
}

CVec flatten(const MatrixXcd& m) {
    CVec v;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
    return v;
}

MatrixXcd unflatten(const CVec& v, int rows, int cols) {
    MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
    return m;
}

CheckResult riccati(const VerifyOptions& opt, Rng& rng) {
    CheckResult r;
    r.name = "riccati";
    r.tolerance = 1e-6;
    int m = opt.riccati_m, n = opt.riccati_n, flagged = 0, compared = 0;
    for (int d = 0; d < opt.draws; ++d)
        for (auto v : {RiccatiVariant::Compact, RiccatiVariant::Noncompact}) {
            auto b = random_blocks(m, n, v, rng, 0.5);
            MatrixXcd z0 = random_matrix(m, n, rng, 0.5);
            auto tr = integrate(matrix_riccati_field(b), flatten(z0), 5.0, tight());
            auto lin = riccati_linearize(b, z0, MatrixXcd::Identity(n, n), 5.0, 500, 1e4);
            std::size_t k_end = std::min(tr.states.size(), lin.Z.size());
            for (std::size_t k = 0; k < k_end; ++k) {
                if (lin.singular[k]) {
                    ++flagged;
                    continue;
                }
                ++compared;
                double dev = (unflatten(tr.states[k], m, n) - lin.Z[k]).norm();
                note(r, dev, fmt::format("draw {} {} t={:.2f}", d, v == RiccatiVariant::Compact ? "-" : "+",
                                         lin.times[k]));
            }
        }
    r.detail = fmt::format("m={} n={}, {} samples compared, {} near-singular excluded", m, n, compared, flagged);
    return r;
}

// Quantum side of a classical flow: matrix representation, kernel, and the chart embedding.
struct QCase {
    std::string name;
    Representation rep;
    MatrixRep mr;
    KernelSpec spec;
    std::vector<int> vars; // chart coordinate -> su3 coordinate
};

std::vector<QCase> quantum_cases() {
    std::vector<QCase> out;
    for (double j : {0.5, 1.0, 2.5, 5.0})
        out.push_back({fmt::format("su2 j={}", j), synth_su2(), su2_rep(j), KernelSpec::su2(j), {0}});
    out.push_back({"su3 fundamental", synth_a_series(2, Chart::Matrix, {Poly(1), Poly(0), Poly(0)}, {1}),
                   su3_rep(Su3Kind::Fundamental), KernelSpec::su3(1, 0, {0, 2}), {0, 2}});
    out.push_back({"su3 wedge", synth_a_series(2, Chart::Matrix, {Poly(1), Poly(1), Poly(0)}, {0}),
                   su3_rep(Su3Kind::Wedge), KernelSpec::su3(0, 1, {1, 2}), {1, 2}});
    return out;
}

CVec embed(const QCase& q, const CVec& z) {
    if (q.mr.family == RepFamily::Su2) return z;
    CVec full(3, 0.0);
    for (std::size_t a = 0; a < q.vars.size(); ++a) full[q.vars[a]] = z[a];
    return full;
}

VectorXcd state(const QCase& q, const CVec& z) { return coherent_vector(q.mr, embed(q, z)); }

PhaseModel model_of(const QCase& q, const MatrixXcd& h) {
    PhaseModel pm;
    pm.energy = [&q, h](const CVec& z) { return energy_function(q.mr, h, embed(q, z)); };
    pm.connection = [spec = q.spec](const CVec& z) { return kernel_connection(spec, z); };
    return pm;
}

double max_abs(const CVec& z) {
    double m = 0;
    for (auto c : z) m = std::max(m, std::abs(c));
    return m;
}

// Trajectories that leave |z| <= 20 are redrawn: the chart misses the points at infinity.
bool bounded(const Trajectory& tr) {
    if (tr.status != TrajStatus::Completed) return false;
    for (const auto& z : tr.states)
        if (max_abs(z) > 20) return false;
    return true;
}

CheckResult quantum(const VerifyOptions& opt, Rng& rng) {
    CheckResult r;
    r.name = "quantum";
    r.tolerance = 1e-8;
    double poisson_worst = 0;
    const double poisson_tol = 1e-5;
    int rejected = 0;
    for (const auto& q : quantum_cases()) {
        for (int d = 0; d < opt.draws; ++d) {
            for (int attempt = 0;; ++attempt) {
                auto h = random_hamiltonian(q.rep, rng);
                auto field = assemble_rhs(q.rep, h);
                CVec z0 = random_point(q.rep.num_vars(), rng, 1.0);
                auto tr = integrate(field, z0, 5.0, tight());
                if (!bounded(tr) && attempt < 50) {
                    ++rejected;
                    continue;
                }
                MatrixXcd hm = hamiltonian_matrix(q.mr, h);
                Propagator prop(hm);
                VectorXcd psi0 = state(q, z0);
                double worst = 0;
                for (std::size_t k = 0; k < tr.states.size(); ++k)
                    worst = std::max(worst, 1 - fidelity(state(q, tr.states[k]), prop(psi0, tr.times[k])));
                note(r, worst, fmt::format("{} draw {} fidelity", q.name, d));
                auto energy = [&](const CVec& z) { return energy_function(q.mr, hm, embed(q, z)); };
                for (int p = 0; p < opt.points; ++p) {
                    CVec z = random_point(q.rep.num_vars(), rng, 1.0);
                    CVec pf = poisson_flow(q.spec, energy, z), rhs = field.evaluate(z);
                    double dev = 0;
                    for (std::size_t a = 0; a < z.size(); ++a) dev = std::max(dev, std::abs(pf[a] - rhs[a]));
                    poisson_worst = std::max(poisson_worst, dev);
                    if (dev > poisson_tol) {
                        r.passed = false;
                        r.failures.push_back(fmt::format("{} draw {} poisson: {:.3g}", q.name, d, dev));
                    }
                }
                break;
            }
        }
    }
    r.detail = fmt::format("worst 1-fidelity {:.3g}, worst poisson deviation {:.3g} (tol {:g}), {} unbounded draws redrawn",
                           r.value, poisson_worst, poisson_tol, rejected);
    return r;
}

CheckResult phase(const VerifyOptions& opt, Rng& rng) {
    CheckResult r;
    r.name = "phase";
    r.tolerance = 1e-6;
    double berry_max = 0;
    int rejected = 0;
    for (const auto& q : quantum_cases()) {
        for (int d = 0; d < opt.draws; ++d) {
            for (int attempt = 0;; ++attempt) {
                auto h = random_hamiltonian(q.rep, rng);
                auto field = assemble_rhs(q.rep, h);
                CVec z0 = random_point(q.rep.num_vars(), rng, 1.0);
                if (!bounded(integrate(field, z0, 5.0, tight())) && attempt < 50) {
                    ++rejected;
                    continue;
                }
                MatrixXcd hm = hamiltonian_matrix(q.mr, h);
                PhasedTrajectory pt;
                try {
                    pt = integrate_with_phase(field, z0, 5.0, tight(), model_of(q, hm));
                } catch (const Error& e) {
                    exact(r, false, fmt::format("{} draw {}: {}", q.name, d, e.what()));
                    break;
                }
                Propagator prop(hm);
                VectorXcd psi0 = state(q, z0).normalized();
                double worst = 0;
                for (std::size_t k = 0; k < pt.traj.states.size(); ++k) {
                    VectorXcd u = state(q, pt.traj.states[k]).normalized();
                    worst = std::max(worst, (prop(psi0, pt.traj.times[k]) - std::exp(I * pt.phase.total[k]) * u).norm());
                }
                note(r, worst, fmt::format("{} draw {}", q.name, d));
                berry_max = std::max(berry_max, std::abs(pt.phase.berry.back()));
                break;
            }
        }
    }
    exact(r, berry_max > 1e-3, "berry part vanishes in every case");
    r.detail = fmt::format("largest |berry| {:.3g}, {} unbounded draws redrawn", berry_max, rejected);
    return r;
}

double delta1(const CVec& z) { return 1 + std::norm(z[0]) + std::norm(z[2]); }
double delta2(const CVec& z) {
    return delta1(z) * (1 + std::norm(z[1])) - std::norm(z[0] + z[2] * std::conj(z[1]));
}

CheckResult kernel(const VerifyOptions& opt, Rng& rng) {
    CheckResult r;
    r.name = "kernel";
    r.tolerance = 1e-12;
    auto f = su3_rep(Su3Kind::Fundamental), w = su3_rep(Su3Kind::Wedge);
    int n = std::max(50, opt.points);
    for (int k = 0; k < n; ++k) {
        CVec z = random_point(3, rng, 1.5);
        note(r, std::abs(coherent_vector(f, z).squaredNorm() / delta1(z) - 1), fmt::format("delta1 point {}", k));
        note(r, std::abs(coherent_vector(w, z).squaredNorm() / delta2(z) - 1), fmt::format("delta2 point {}", k));
        CVec zeta = random_point(3, rng, 1.5);
        CVec zm{zeta[0], zeta[1], zeta[2] + 0.5 * zeta[0] * zeta[1]};
        for (const auto* rep : {&f, &w}) {
            VectorXcd a = coherent_vector_exponential(*rep, zeta), b = coherent_vector(*rep, zm);
            note(r, (a - b).norm() / b.norm(), fmt::format("zeta/z point {}", k));
        }
    }
    r.detail = fmt::format("{} points", n);
    return r;
}

CheckResult oscillator(Rng& rng) {
    CheckResult r;
    r.name = "oscillator";
    r.tolerance = 1e-9;
    IntegratorOptions o = tight();
    o.rtol = 1e-13;
    o.atol = 1e-15;
    {
        double w = 0.5 + std::uniform_real_distribution<double>(0, 1)(rng);
        cplx f = random_complex(rng), z0 = random_complex(rng);
        MatrixXcd om(1, 1);
        om(0, 0) = w;
        VectorXcd fv(1);
        fv(0) = f;
        auto tr = integrate(oscillator_field(om, fv), {z0}, 5.0, o);
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            double t = tr.times[k];
            cplx e = std::exp(-I * w * t);
            cplx want = e * z0 + f * (e - 1.0) / w;
            note(r, std::abs(tr.states[k][0] - want), fmt::format("n=1 t={:.2f}", t));
        }
    }
    {
        MatrixXcd om = random_hermitian(2, rng);
        VectorXcd fv = VectorXcd::Zero(2);
        CVec z0 = random_point(2, rng, 1.0);
        auto tr = integrate(oscillator_field(om, fv), z0, 5.0, o);
        auto energy = [&](const CVec& z) {
            Eigen::Map<const VectorXcd> v(z.data(), 2);
            return v.dot(om * v).real();
        };
        double e0 = energy(z0);
        for (std::size_t k = 0; k < tr.states.size(); ++k)
            note(r, std::abs(energy(tr.states[k]) - e0), fmt::format("n=2 energy t={:.2f}", tr.times[k]));
    }
    r.detail = "n=1 closed form, n=2 conserved energy";
    return r;
}

} // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{"coefficients", "golden", "homomorphism", "decoupling", "riccati",
                                                "quantum",      "phase",  "kernel",       "oscillator"};
    return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& opt, Rng& rng,
                      const std::optional<std::string>& custom_table) {
    if (name == "coefficients") return coefficients();
    if (name == "golden") return golden();
    if (name == "homomorphism") return homomorphism(custom_table);
    if (name == "decoupling") return decoupling();
    if (name == "riccati") return riccati(opt, rng);
    if (name == "quantum") return quantum(opt, rng);
    if (name == "phase") return phase(opt, rng);
    if (name == "kernel") return kernel(opt, rng);
    if (name == "oscillator") return oscillator(rng);
    throw Error(ErrorKind::Config, "unknown check '" + name + "'");
}

std::string report_json(const std::vector<CheckResult>& results, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    bool all = std::all_of(results.begin(), results.end(), [](const CheckResult& c) { return c.passed; });
    doc["passed"] = all;
    doc["seed"] = seed;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : results) {
        nlohmann::ordered_json o;
        o["name"] = c.name;
        o["passed"] = c.passed;
        o["max_deviation"] = fmt::format("{:.17g}", c.value);
        o["tolerance"] = fmt::format("{:.17g}", c.tolerance);
        o["detail"] = c.detail;
        o["failures"] = c.failures;
        arr.push_back(o);
    }
    doc["checks"] = arr;
    return doc.dump(2) + "\n";
}

std::string report_text(const std::vector<CheckResult>& results) {
    std::string out;
    for (const auto& c : results) {
        out += fmt::format("{} {}: max deviation {:.3g}", c.passed ? "PASS" : "FAIL", c.name, c.value);
        if (c.tolerance > 0) out += fmt::format(" (tol {:g})", c.tolerance);
        out += "; " + c.detail + "\n";
        for (std::size_t i = 0; i < c.failures.size() && i < 20; ++i) out += "  " + c.failures[i] + "\n";
        if (c.failures.size() > 20) out += fmt::format("  ... {} more\n", c.failures.size() - 20);
    }
    return out;
}

} // namespace csflow
