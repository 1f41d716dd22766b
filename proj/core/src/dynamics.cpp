#include "csflow/dynamics.hpp"

#include <cmath>
#include <cstdio>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "csflow/error.hpp"

namespace csflow {

namespace odeint = boost::numeric::odeint;

namespace {

const cplx I(0.0, 1.0);

cplx to_cplx(const Rational& r) { return {r.get_d(), 0.0}; }

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double max_abs(const CVec& z) {
    double m = 0;
    for (const auto& v : z) {
        double a = std::abs(v);
        if (!std::isfinite(a)) return INFINITY;
        m = std::max(m, a);
    }
    return m;
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

} // namespace

// ---------------------------------------------------------------- hamiltonians

std::map<Generator, cplx> hamiltonian_element(const Representation& rep, const LinearHamiltonian& h) {
    std::map<Generator, cplx> out;
    for (const auto& [label, e] : h.eps) {
        const auto& g = rep.at(label);
        for (const auto& [b, c] : g.element) out[b] += e * to_cplx(c);
    }
    return out;
}

void check_hermitian(const Representation& rep, const LinearHamiltonian& h, double tol) {
    auto el = hamiltonian_element(rep, h);
    std::map<Generator, cplx> dag;
    for (const auto& [g, c] : el)
        for (const auto& [b, s] : dagger(single(g))) dag[b] += std::conj(c) * to_cplx(s);
    double scale = 1;
    for (const auto& [g, c] : el) scale = std::max(scale, std::abs(c));
    auto diff = dag;
    for (const auto& [g, c] : el) diff[g] -= c;
    for (const auto& [g, c] : diff)
        if (std::abs(c) > tol * scale)
            throw Error(ErrorKind::NonHermitianHamiltonian,
                        "coefficient of " + rep.system->label(g) + " differs from the conjugate of its adjoint by " +
                            fmt17(std::abs(c)));
}

DiffOp vector_op(const Representation& rep, const RepGenerator& g) {
    return rep.action == Action::Vector ? g.op : rep.op_of(dagger(g.element));
}

// ---------------------------------------------------------------- flow fields

FlowField::FlowField(std::vector<std::string> names, std::vector<ComplexPoly> rhs)
    : names_(std::move(names)), rhs_(std::move(rhs)) {
    if (names_.size() != rhs_.size()) throw Error(ErrorKind::DimensionMismatch, "one name per component required");
    for (const auto& p : rhs_) {
        for (const auto& [m, c] : p.terms())
            for (const auto& [v, e] : m.factors())
                if (v.kind != VarKind::z || v.index >= rhs_.size())
                    throw Error(ErrorKind::Config, "flow field may depend on chart variables only");
        compiled_.emplace_back(p);
    }
}

void FlowField::velocity(const cplx* z, cplx* dz) const {
    for (std::size_t a = 0; a < compiled_.size(); ++a) dz[a] = -I * compiled_[a](z);
}

CVec FlowField::velocity(const CVec& z) const {
    CVec dz(z.size());
    velocity(z.data(), dz.data());
    return dz;
}

CVec FlowField::evaluate(const CVec& z) const {
    CVec r(z.size());
    for (std::size_t a = 0; a < compiled_.size(); ++a) r[a] = compiled_[a](z.data());
    return r;
}

std::string FlowField::to_text() const {
    VarNames vn;
    vn.z = names_;
    std::string out;
    for (std::size_t a = 0; a < rhs_.size(); ++a) out += "i d/dt " + names_[a] + " = " + rhs_[a].to_string(vn) + "\n";
    return out;
}

std::vector<Poly> assemble_rhs_symbolic(const Representation& rep) {
    std::vector<Poly> rhs(rep.num_vars());
    for (std::size_t k = 0; k < rep.generators.size(); ++k) {
        DiffOp q = vector_op(rep, rep.generators[k]);
        Poly e = Poly::var(Var::eps(static_cast<int>(k)));
        for (const auto& [a, p] : q.partials()) rhs[a] += e * p;
    }
    return rhs;
}

FlowField assemble_rhs(const Representation& rep, const LinearHamiltonian& h) {
    check_hermitian(rep, h);
    std::vector<ComplexPoly> rhs(rep.num_vars());
    for (const auto& [label, e] : h.eps) {
        if (e == cplx(0.0, 0.0)) continue;
        DiffOp q = vector_op(rep, rep.at(label));
        for (const auto& [a, p] : q.partials()) rhs[a] += to_complex(p) * e;
    }
    std::vector<std::string> names;
    for (int a = 0; a < rep.num_vars(); ++a) names.push_back(rep.names(Var::z(a)));
    return FlowField(std::move(names), std::move(rhs));
}

FlowField oscillator_field(const Eigen::MatrixXcd& omega, const Eigen::VectorXcd& f) {
    if (omega.rows() != omega.cols() || omega.rows() != f.size())
        throw Error(ErrorKind::DimensionMismatch, "omega must be n x n and f of length n");
    if (!is_hermitian(omega, 1e-12)) throw Error(ErrorKind::NonHermitianOmega, "omega is not hermitian");
    int n = static_cast<int>(omega.rows());
    std::vector<ComplexPoly> rhs(n);
    std::vector<std::string> names;
    for (int a = 0; a < n; ++a) {
        rhs[a] = ComplexPoly(f(a));
        for (int m = 0; m < n; ++m) rhs[a] += ComplexPoly::var(Var::z(m)) * omega(a, m);
        names.push_back("z" + std::to_string(a + 1));
    }
    return FlowField(std::move(names), std::move(rhs));
}

void check_blocks(const RiccatiBlocks& b, double tol) {
    int m = b.m(), n = b.n();
    if (b.eps01.cols() != m || b.eps02.cols() != n || b.epsp.rows() != m || b.epsp.cols() != n ||
        b.epsm.rows() != n || b.epsm.cols() != m || m == 0 || n == 0)
        throw Error(ErrorKind::DimensionMismatch, "blocks must be m x m, n x n, m x n and n x m");
    if (!is_hermitian(b.eps01, tol) || !is_hermitian(b.eps02, tol))
        throw Error(ErrorKind::NonHermitianBlocks, "diagonal blocks must be hermitian");
    if ((b.epsm - b.epsp.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, b.epsp.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::NonHermitianBlocks, "eps- must be the adjoint of eps+");
}

FlowField matrix_riccati_field(const RiccatiBlocks& b) {
    check_blocks(b);
    int m = b.m(), n = b.n();
    auto Z = [n](int i, int p) { return ComplexPoly::var(Var::z(i * n + p)); };
    std::vector<ComplexPoly> rhs(m * n);
    std::vector<std::string> names;
    double sigma = b.sigma();
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < n; ++p) {
            ComplexPoly r(b.epsp(i, p));
            for (int k = 0; k < m; ++k) r += Z(k, p) * b.eps01(i, k);
            for (int q = 0; q < n; ++q) r -= Z(i, q) * b.eps02(q, p);
            for (int q = 0; q < n; ++q)
                for (int k = 0; k < m; ++k) r += Z(i, q) * Z(k, p) * (sigma * b.epsm(q, k));
            rhs[i * n + p] = r;
            names.push_back("Z" + std::to_string(i + 1) + "_" + std::to_string(p + 1));
        }
    return FlowField(std::move(names), std::move(rhs));
}

// ---------------------------------------------------------------- integration

std::string status_name(TrajStatus s) {
    switch (s) {
    case TrajStatus::Completed: return "completed";
    case TrajStatus::BlowUp: return "blow_up";
    case TrajStatus::StepFailure: return "step_failure";
    }
    return "?";
}

Trajectory integrate(const FlowField& field, const CVec& z0, double t_end, const IntegratorOptions& opt) {
    if (static_cast<int>(z0.size()) != field.dim())
        throw Error(ErrorKind::DimensionMismatch, "initial state has the wrong length");
    if (!std::isfinite(max_abs(z0))) throw Error(ErrorKind::Config, "initial state is not finite");
    if (!(t_end >= 0)) throw Error(ErrorKind::Config, "t_end must be nonnegative");

    auto sys = [&field](const CVec& x, CVec& dx, double) { field.velocity(x.data(), dx.data()); };
    Trajectory tr;
    tr.times.push_back(0);
    tr.states.push_back(z0);
    if (t_end == 0) return tr;

    // uniform output grid
    int nsamp = opt.sample_dt > 0 ? std::max(1, static_cast<int>(std::ceil(t_end / opt.sample_dt - 1e-9))) : 0;
    double h_out = nsamp ? t_end / nsamp : 0;

    if (opt.method == Method::RK4) {
        int stride = nsamp ? std::max(1, static_cast<int>(std::ceil(h_out / opt.dt - 1e-9))) : 1;
        long nsteps = nsamp ? static_cast<long>(nsamp) * stride
                            : std::max(1L, static_cast<long>(std::ceil(t_end / opt.dt - 1e-9)));
        double h = t_end / static_cast<double>(nsteps);
        odeint::runge_kutta4<CVec> rk;
        CVec x = z0;
        for (long k = 1; k <= nsteps; ++k) {
            rk.do_step(sys, x, (k - 1) * h, h);
            ++tr.steps;
            double t = k * h;
            if (max_abs(x) > opt.blowup) {
                tr.status = TrajStatus::BlowUp;
                tr.t_star = t;
                return tr;
            }
            if (k % stride == 0 || k == nsteps) {
                tr.times.push_back(t);
                tr.states.push_back(x);
            }
        }
        return tr;
    }

    auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, opt.max_step, odeint::runge_kutta_dopri5<CVec>());
    double dt0 = std::min(opt.max_step, std::max(1e-6, t_end * 1e-4));
    stepper.initialize(z0, 0.0, dt0);
    int next = 1;
    CVec x(z0.size());
    try {
        while (stepper.current_time() < t_end * (1 - 1e-15)) {
            stepper.do_step(sys);
            ++tr.steps;
            double t = stepper.current_time();
            if (max_abs(stepper.current_state()) > opt.blowup) {
                tr.status = TrajStatus::BlowUp;
                tr.t_star = t;
                return tr;
            }
            if (nsamp) {
                while (next <= nsamp && next * h_out <= t * (1 + 1e-14)) {
                    double ts = next == nsamp ? t_end : next * h_out;
                    stepper.calc_state(std::min(ts, t), x);
                    tr.times.push_back(ts);
                    tr.states.push_back(x);
                    ++next;
                }
            } else if (t <= t_end) {
                tr.times.push_back(t);
                tr.states.push_back(stepper.current_state());
            } else {
                stepper.calc_state(t_end, x);
                tr.times.push_back(t_end);
                tr.states.push_back(x);
            }
            if (stepper.current_time_step() < opt.min_step) {
                tr.status = TrajStatus::StepFailure;
                tr.t_star = t;
                return tr;
            }
        }
    } catch (const odeint::odeint_error&) {
        tr.status = TrajStatus::StepFailure;
        tr.t_star = stepper.current_time();
    }
    return tr;
}

// ---------------------------------------------------------------- linearization

Linearized riccati_linearize(const RiccatiBlocks& b, const Eigen::MatrixXcd& x0, const Eigen::MatrixXcd& y0,
                             double t_end, int samples, double cond_limit, bool strict) {
    check_blocks(b);
    int m = b.m(), n = b.n();
    if (x0.rows() != m || x0.cols() != n || y0.rows() != n || y0.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "X0 must be m x n and Y0 n x n");
    Eigen::MatrixXcd h(m + n, m + n);
    h.topLeftCorner(m, m) = -I * b.eps01;
    h.topRightCorner(m, n) = -I * b.epsp;
    h.bottomLeftCorner(n, m) = (I * static_cast<double>(b.sigma())) * b.epsm;
    h.bottomRightCorner(n, n) = -I * b.eps02;
    Eigen::MatrixXcd s0(m + n, n);
    s0 << x0, y0;

    // ||[X; Y]|| / sigma_min(Y): large when Y is singular or Z = X Y^-1 is huge
    auto cond = [](const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& y) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> sy(y), ss(s);
        double lo = sy.singularValues()(sy.singularValues().size() - 1);
        return lo > 0 ? ss.singularValues()(0) / lo : INFINITY;
    };
    if (!(cond(s0, y0) <= cond_limit)) throw Error(ErrorKind::SingularY, "Y0 is not invertible (t=0)");

    Linearized out;
    samples = std::max(samples, 1);
    for (int k = 0; k <= samples; ++k) {
        double t = t_end * k / samples;
        Eigen::MatrixXcd s = k == 0 ? s0 : Eigen::MatrixXcd((h * t).exp() * s0);
        Eigen::MatrixXcd x = s.topRows(m), y = s.bottomRows(n);
        double c = cond(s, y);
        bool sing = !(c <= cond_limit);
        if (sing && strict) throw Error(ErrorKind::SingularY, "Y(t) is near singular at t=" + fmt17(t));
        if (sing && !out.first_singular) out.first_singular = t;
        Eigen::MatrixXcd z = k == 0 ? Eigen::MatrixXcd(x0 * y0.inverse())
                                    : Eigen::MatrixXcd(y.transpose().partialPivLu().solve(x.transpose()).transpose());
        out.times.push_back(t);
        out.X.push_back(x);
        out.Y.push_back(y);
        out.Z.push_back(z);
        out.cond_y.push_back(c);
        out.singular.push_back(sing);
    }
    return out;
}

// ---------------------------------------------------------------- phase

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    std::vector<double> F(n, 0.0);
    if (n < 2) return F;
    if (n == 2) {
        F[1] = 0.5 * h * (f[0] + f[1]);
        return F;
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (k % 2 == 0) {
            F[k] = F[k - 2] + h / 3 * (f[k - 2] + 4 * f[k - 1] + f[k]);
        } else if (k + 2 < n) {
            F[k] = F[k - 1] + h / 24 * (9 * f[k - 1] + 19 * f[k] - 5 * f[k + 1] + f[k + 2]);
        } else if (k >= 3) {
            F[k] = F[k - 1] + h / 24 * (f[k - 3] - 5 * f[k - 2] + 19 * f[k - 1] + 9 * f[k]);
        } else {
            F[k] = F[k - 1] + h / 12 * (5 * f[k - 1] + 8 * f[k] - f[k + 1]);
        }
    }
    return F;
}

Phase phase_along(const FlowField& field, const Trajectory& traj, const PhaseModel& model, double tol) {
    std::size_t n = traj.times.size();
    Phase ph;
    if (n == 0) return ph;
    double h = n > 1 ? traj.times[1] - traj.times[0] : 0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(traj.times[k] - traj.times[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw Error(ErrorKind::Config, "phase quadrature needs a uniformly sampled trajectory");

    std::vector<double> fe(n), fb(n);
    for (std::size_t k = 0; k < n; ++k) {
        const CVec& z = traj.states[k];
        fe[k] = -model.energy(z);
        CVec a = model.connection(z);
        CVec dz = field.velocity(z);
        cplx s(0.0, 0.0);
        for (std::size_t i = 0; i < z.size(); ++i) s += a[i] * dz[i];
        fb[k] = -s.imag();
    }
    ph.dynamical = cumulative_simpson(fe, h);
    ph.berry = cumulative_simpson(fb, h);
    ph.total.resize(n);
    for (std::size_t k = 0; k < n; ++k) ph.total[k] = ph.dynamical[k] + ph.berry[k];

    // step-halving check: the same integrals on every other sample
    std::size_t last = (n - 1) / 2 * 2;
    if (last >= 4) {
        std::vector<double> ce, cb;
        for (std::size_t k = 0; k <= last; k += 2) {
            ce.push_back(fe[k]);
            cb.push_back(fb[k]);
        }
        auto pe = cumulative_simpson(ce, 2 * h), pb = cumulative_simpson(cb, 2 * h);
        double diff = 0;
        for (std::size_t k = 0; k < pe.size(); ++k) diff = std::max(diff, std::abs(pe[k] + pb[k] - ph.total[2 * k]));
        if (diff > tol)
            throw Error(ErrorKind::QuadratureResolutionTooCoarse,
                        "halving the sample density changes the phase by " + fmt17(diff));
    }
    return ph;
}

PhasedTrajectory integrate_with_phase(const FlowField& field, const CVec& z0, double t_end, IntegratorOptions opt,
                                      const PhaseModel& model, double tol, int max_refinements) {
    for (int r = 0;; ++r) {
        PhasedTrajectory out;
        out.traj = integrate(field, z0, t_end, opt);
        out.sample_dt = opt.sample_dt;
        if (out.traj.status != TrajStatus::Completed) return out;
        try {
            out.phase = phase_along(field, out.traj, model, tol);
            return out;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::QuadratureResolutionTooCoarse || r >= max_refinements) throw;
        }
        opt.sample_dt /= 2;
        opt.max_step = std::min(opt.max_step, opt.sample_dt);
    }
}

// ---------------------------------------------------------------- export

std::string trajectory_csv(const std::vector<std::string>& names, const Trajectory& traj, const Phase* phase) {
    std::string out = "t";
    for (const auto& v : names) out += ",re_" + v + ",im_" + v;
    if (phase) out += ",phi_dynamical,phi_berry,phi_total";
    out += "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += fmt17(traj.times[k]);
        for (const auto& v : traj.states[k]) out += "," + fmt17(v.real()) + "," + fmt17(v.imag());
        if (phase) out += "," + fmt17(phase->dynamical[k]) + "," + fmt17(phase->berry[k]) + "," + fmt17(phase->total[k]);
        out += "\n";
    }
    return out;
}

std::string trajectory_json(const std::vector<std::string>& names, const Trajectory& traj, const Phase* phase) {
    nlohmann::ordered_json j;
    j["variables"] = names;
    j["status"] = status_name(traj.status);
    if (traj.status != TrajStatus::Completed) j["t_star"] = traj.t_star;
    j["t"] = traj.times;
    auto& st = j["states"] = nlohmann::ordered_json::array();
    for (const auto& z : traj.states) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (const auto& v : z) row.push_back({v.real(), v.imag()});
        st.push_back(row);
    }
    if (phase) {
        j["phi_dynamical"] = phase->dynamical;
        j["phi_berry"] = phase->berry;
        j["phi_total"] = phase->total;
    }
    return j.dump(1) + "\n";
}

} // namespace csflow
