#include "csflow/quantum.hpp"

#include <array>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "csflow/error.hpp"

namespace csflow {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

const cplx I(0.0, 1.0);

MatrixXcd elementary(int n, int i, int j) {
    MatrixXcd m = MatrixXcd::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

double opnorm(const MatrixXcd& m) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

std::string su3_label(int i, int j) { return "C" + std::to_string(i + 1) + std::to_string(j + 1); }

// (z12, z23, z13) from chart coordinates.
std::array<cplx, 3> su3_full(const KernelSpec& s, const CVec& z) {
    std::array<cplx, 3> f{};
    for (std::size_t a = 0; a < s.su3_vars.size(); ++a) f[s.su3_vars[a]] = z[a];
    return f;
}

void check_dim(const KernelSpec& s, const CVec& z) {
    if (static_cast<int>(z.size()) != s.dim()) throw Error(ErrorKind::DimensionMismatch, "point has the wrong length");
}

MatrixXcd as_matrix(const CVec& z, int m, int n) {
    MatrixXcd r(m, n);
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < n; ++p) r(i, p) = z[i * n + p];
    return r;
}

void check_chart(const KernelSpec& s, const CVec& z) {
    if (!s.noncompact && s.family != KernelFamily::Su11) return;
    if (s.family == KernelFamily::Su11) {
        if (!(std::abs(z[0]) < 1)) throw Error(ErrorKind::OutOfChart, "su(1,1) chart is the unit disc");
        return;
    }
    MatrixXcd zm = as_matrix(z, s.m, s.n);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd::Identity(s.n, s.n) - zm.adjoint() * zm);
    if (!(es.eigenvalues().minCoeff() > 0)) throw Error(ErrorKind::OutOfChart, "non-compact Grassmann chart needs I - Z^+ Z > 0");
}

// Value and holomorphic z-gradient of log K(z, v) with v = conj(w), both arguments in the chart.
struct LogK {
    cplx value;
    CVec grad;
};

// One factor (sum_i s_i u_i(v) u_i(z))^p given u(z), its Jacobian and u(v).
void add_factor(LogK& out, double p, const std::vector<cplx>& uz, const std::vector<std::vector<cplx>>& du,
                const std::vector<cplx>& uv, const std::vector<double>& sign) {
    if (p == 0) return;
    cplx f(0.0, 0.0);
    for (std::size_t i = 0; i < uz.size(); ++i) f += sign[i] * uv[i] * uz[i];
    out.value += p * std::log(f);
    for (std::size_t a = 0; a < out.grad.size(); ++a) {
        cplx g(0.0, 0.0);
        for (std::size_t i = 0; i < uz.size(); ++i) g += sign[i] * uv[i] * du[a][i];
        out.grad[a] += p * g / f;
    }
}

LogK log_k(const KernelSpec& s, const CVec& z, const CVec& v) {
    LogK out{cplx(0.0, 0.0), CVec(z.size(), cplx(0.0, 0.0))};
    switch (s.family) {
    case KernelFamily::Su2:
        add_factor(out, 2 * s.j, {1.0, z[0]}, {{0.0, 1.0}}, {1.0, v[0]}, {1, 1});
        break;
    case KernelFamily::Su11:
        add_factor(out, -2 * s.k, {1.0, z[0]}, {{0.0, 1.0}}, {1.0, v[0]}, {1, -1});
        break;
    case KernelFamily::Su3: {
        auto zf = su3_full(s, z), vf = su3_full(s, v);
        // gradients with respect to (z12, z23, z13), then restricted to the chart
        std::vector<std::vector<cplx>> dfull_f{{0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
        std::vector<std::vector<cplx>> dfull_w{{0.0, 0.0, zf[1]}, {0.0, 1.0, zf[0]}, {0.0, 0.0, -1.0}};
        std::vector<std::vector<cplx>> df, dw;
        for (int a : s.su3_vars) {
            df.push_back(dfull_f[a]);
            dw.push_back(dfull_w[a]);
        }
        add_factor(out, s.j1, {1.0, zf[0], zf[2]}, df, {1.0, vf[0], vf[2]}, {1, 1, 1});
        add_factor(out, s.j2, {1.0, zf[1], zf[0] * zf[1] - zf[2]}, dw, {1.0, vf[1], vf[0] * vf[1] - vf[2]}, {1, 1, 1});
        break;
    }
    case KernelFamily::Grassmann: {
        MatrixXcd zm = as_matrix(z, s.m, s.n), vm = as_matrix(v, s.m, s.n);
        double sg = s.noncompact ? -1 : 1;
        MatrixXcd mm = MatrixXcd::Identity(s.n, s.n) + sg * vm.transpose() * zm;
        Eigen::PartialPivLU<MatrixXcd> lu(mm);
        out.value = sg * s.power * std::log(lu.determinant());
        MatrixXcd g = lu.solve(MatrixXcd(vm.transpose())); // n x m
        for (int i = 0; i < s.m; ++i)
            for (int p = 0; p < s.n; ++p) out.grad[i * s.n + p] = s.power * g(p, i);
        break;
    }
    }
    return out;
}

CVec conj_of(const CVec& z) {
    CVec r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) r[i] = std::conj(z[i]);
    return r;
}

} // namespace

// ---------------------------------------------------------------- matrix representations

const MatrixXcd& MatrixRep::at(const std::string& label) const {
    auto it = gens.find(label);
    if (it == gens.end()) throw Error(ErrorKind::UnknownGenerator, "no generator " + label);
    return it->second;
}

MatrixRep su2_rep(double j) {
    double twoj = 2 * j;
    if (!(j >= 0) || std::abs(twoj - std::round(twoj)) > 1e-12 || twoj > 1e4)
        throw Error(ErrorKind::InvalidSpin, "2j must be a nonnegative integer");
    int d = static_cast<int>(std::round(twoj)) + 1;
    MatrixRep r;
    r.family = RepFamily::Su2;
    r.dim = d;
    r.spin = j;
    MatrixXcd j0 = MatrixXcd::Zero(d, d), jp = MatrixXcd::Zero(d, d), jm = MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        double mval = -j + k;
        j0(k, k) = mval;
        if (k + 1 < d) jp(k + 1, k) = std::sqrt((j - mval) * (j + mval + 1));
        if (k > 0) jm(k - 1, k) = std::sqrt((j + mval) * (j - mval + 1));
    }
    r.labels = {"J0", "J+", "J-"};
    r.gens = {{"J0", j0}, {"J+", jp}, {"J-", jm}};
    r.e0 = VectorXcd::Unit(d, 0);
    return r;
}

MatrixRep su3_rep(Su3Kind kind) {
    MatrixRep r;
    r.dim = 3;
    r.family = kind == Su3Kind::Fundamental ? RepFamily::Su3Fundamental : RepFamily::Su3Wedge;
    // exterior square basis e1^e2, e1^e3, e2^e3
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    auto wedge = [&](const VectorXcd& x, const VectorXcd& y) {
        VectorXcd w(3);
        for (int k = 0; k < 3; ++k) w(k) = x(pairs[k][0]) * y(pairs[k][1]) - x(pairs[k][1]) * y(pairs[k][0]);
        return w;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            MatrixXcd e = elementary(3, i, j);
            MatrixXcd m(3, 3);
            if (kind == Su3Kind::Fundamental) {
                m = e;
            } else {
                for (int k = 0; k < 3; ++k) {
                    VectorXcd a = VectorXcd::Unit(3, pairs[k][0]), b = VectorXcd::Unit(3, pairs[k][1]);
                    m.col(k) = wedge(e * a, b) + wedge(a, e * b);
                }
            }
            r.labels.push_back(su3_label(i, j));
            r.gens[su3_label(i, j)] = m;
        }
    r.e0 = VectorXcd::Unit(3, 0);
    return r;
}

double commutation_residual(const MatrixRep& rep) {
    auto comm = [](const MatrixXcd& a, const MatrixXcd& b) { return MatrixXcd(a * b - b * a); };
    double res = 0;
    if (rep.family == RepFamily::Su2) {
        const auto &j0 = rep.at("J0"), &jp = rep.at("J+"), &jm = rep.at("J-");
        res = std::max(res, opnorm(comm(j0, jp) - jp));
        res = std::max(res, opnorm(comm(j0, jm) + jm));
        res = std::max(res, opnorm(comm(jm, jp) + 2 * j0));
        return res;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    MatrixXcd expect = MatrixXcd::Zero(rep.dim, rep.dim);
                    if (j == k) expect += rep.at(su3_label(i, l));
                    if (i == l) expect -= rep.at(su3_label(k, j));
                    res = std::max(res, opnorm(comm(rep.at(su3_label(i, j)), rep.at(su3_label(k, l))) - expect));
                }
    return res;
}

VectorXcd coherent_vector(const MatrixRep& rep, const CVec& z) {
    if (rep.family == RepFamily::Su2) {
        if (z.size() != 1) throw Error(ErrorKind::DimensionMismatch, "su2 chart has one coordinate");
        return MatrixXcd(z[0] * rep.at("J+")).exp() * rep.e0;
    }
    if (z.size() != 3) throw Error(ErrorKind::DimensionMismatch, "su3 chart has three coordinates");
    MatrixXcd a = z[0] * rep.at("C21") + z[2] * rep.at("C31");
    MatrixXcd b = z[1] * rep.at("C32");
    return a.exp() * (b.exp() * rep.e0);
}

VectorXcd coherent_vector_exponential(const MatrixRep& rep, const CVec& zeta) {
    if (rep.family == RepFamily::Su2 || zeta.size() != 3)
        throw Error(ErrorKind::DimensionMismatch, "exponential chart vector is defined for su3");
    MatrixXcd a = zeta[0] * rep.at("C21") + zeta[1] * rep.at("C32") + zeta[2] * rep.at("C31");
    return a.exp() * rep.e0;
}

MatrixXcd hamiltonian_matrix(const MatrixRep& rep, const LinearHamiltonian& h, double tol) {
    MatrixXcd m = MatrixXcd::Zero(rep.dim, rep.dim);
    for (const auto& [label, e] : h.eps) m += e * rep.at(label);
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw Error(ErrorKind::NonHermitianHamiltonian, "Hamiltonian matrix is not hermitian");
    return m;
}

double energy_function(const MatrixRep& rep, const MatrixXcd& h, const CVec& z) {
    VectorXcd u = coherent_vector(rep, z);
    cplx e = u.dot(h * u) / u.squaredNorm();
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (std::abs(e.imag()) > 1e-12 * scale)
        throw Error(ErrorKind::NonHermitianHamiltonian, "energy function is not real");
    return e.real();
}

// ---------------------------------------------------------------- kernels

int KernelSpec::dim() const {
    switch (family) {
    case KernelFamily::Su2:
    case KernelFamily::Su11: return 1;
    case KernelFamily::Grassmann: return m * n;
    case KernelFamily::Su3: return static_cast<int>(su3_vars.size());
    }
    return 0;
}

KernelSpec KernelSpec::su2(double j) {
    KernelSpec s;
    s.family = KernelFamily::Su2;
    s.j = j;
    return s;
}

KernelSpec KernelSpec::su11(double k) {
    KernelSpec s;
    s.family = KernelFamily::Su11;
    s.k = k;
    return s;
}

KernelSpec KernelSpec::grassmann(int m, int n, double power, bool noncompact) {
    KernelSpec s;
    s.family = KernelFamily::Grassmann;
    s.m = m;
    s.n = n;
    s.power = power;
    s.noncompact = noncompact;
    return s;
}

KernelSpec KernelSpec::su3(double j1, double j2, std::vector<int> vars) {
    KernelSpec s;
    s.family = KernelFamily::Su3;
    s.j1 = j1;
    s.j2 = j2;
    s.su3_vars = std::move(vars);
    return s;
}

cplx kernel_eval(const KernelSpec& spec, const CVec& z, const CVec& w) {
    check_dim(spec, z);
    check_dim(spec, w);
    check_chart(spec, z);
    check_chart(spec, w);
    return std::exp(log_k(spec, z, conj_of(w)).value);
}

double log_kernel(const KernelSpec& spec, const CVec& z) {
    check_dim(spec, z);
    check_chart(spec, z);
    return log_k(spec, z, conj_of(z)).value.real();
}

CVec kernel_connection(const KernelSpec& spec, const CVec& z) {
    check_dim(spec, z);
    check_chart(spec, z);
    return log_k(spec, z, conj_of(z)).grad;
}

MatrixXcd kahler_metric(const KernelSpec& spec, const CVec& z, double h, bool check) {
    check_dim(spec, z);
    check_chart(spec, z);
    int d = spec.dim();
    CVec v = conj_of(z);
    MatrixXcd g(d, d);
    for (int b = 0; b < d; ++b) {
        auto diff = [&](double step) {
            CVec vp = v, vm = v;
            vp[b] += step;
            vm[b] -= step;
            CVec ap = log_k(spec, z, vp).grad, am = log_k(spec, z, vm).grad;
            VectorXcd col(d);
            for (int a = 0; a < d; ++a) col(a) = (ap[a] - am[a]) / (2 * step);
            return col;
        };
        g.col(b) = (4.0 * diff(h) - diff(2 * h)) / 3.0;
    }
    if (check) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(0.5 * (g + g.adjoint())));
        double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (!(lo > 1e-9 * std::max(1.0, hi)))
            throw Error(ErrorKind::SingularMetric, "metric has a non-positive eigenvalue " + std::to_string(lo));
    }
    return g;
}

double su2_metric_closed(double j, cplx z) {
    double r = 1 + std::norm(z);
    return 2 * j / (r * r);
}

KernelEnergy::KernelEnergy(const Representation& rep, const LinearHamiltonian& h, const KernelSpec& spec,
                           const std::vector<Rational>& weight)
    : spec_(spec) {
    check_hermitian(rep, h);
    if (rep.num_vars() != spec.dim()) throw Error(ErrorKind::DimensionMismatch, "table and kernel charts differ");
    std::map<Var, Poly> wsub;
    for (std::size_t i = 0; i < weight.size(); ++i) wsub[Var::w(static_cast<int>(i))] = Poly(weight[i]);
    ComplexPoly scalar;
    std::vector<ComplexPoly> q(rep.num_vars());
    for (const auto& [label, e] : h.eps) {
        DiffOp op = vector_op(rep, rep.at(label)).substitute(wsub);
        if (op.scalar().degree_in(VarKind::w) > 0) throw Error(ErrorKind::Config, "weight values missing");
        scalar += to_complex(op.scalar()) * e;
        for (const auto& [a, p] : op.partials()) q[a] += to_complex(p) * e;
    }
    scalar_ = CompiledPoly(scalar);
    for (const auto& p : q) q_.emplace_back(p);
}

double KernelEnergy::operator()(const CVec& z) const {
    CVec a = kernel_connection(spec_, z);
    cplx e = scalar_(z.data());
    for (std::size_t i = 0; i < q_.size(); ++i) e += q_[i](z.data()) * a[i];
    return e.real();
}

CVec dbar_gradient(const std::function<double(const CVec&)>& f, const CVec& z, double h) {
    CVec g(z.size());
    for (std::size_t b = 0; b < z.size(); ++b) {
        auto d = [&](cplx dir, double step) {
            CVec p = z, m = z;
            p[b] += dir * step;
            m[b] -= dir * step;
            return (f(p) - f(m)) / (2 * step);
        };
        auto rich = [&](cplx dir) { return (4 * d(dir, h) - d(dir, 2 * h)) / 3; };
        g[b] = 0.5 * (rich(1.0) + I * rich(I));
    }
    return g;
}

CVec poisson_flow(const KernelSpec& spec, const std::function<double(const CVec&)>& energy, const CVec& z) {
    MatrixXcd g = kahler_metric(spec, z);
    CVec grad = dbar_gradient(energy, z);
    VectorXcd rhs = Eigen::Map<const VectorXcd>(grad.data(), static_cast<Eigen::Index>(grad.size()));
    VectorXcd x = g.transpose().partialPivLu().solve(rhs);
    return CVec(x.data(), x.data() + x.size());
}

// ---------------------------------------------------------------- propagation

Propagator::Propagator(const MatrixXcd& h, double tol) {
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (h.rows() != h.cols() || (h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw Error(ErrorKind::NonHermitianHamiltonian, "Hamiltonian matrix is not hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(0.5 * (h + h.adjoint())));
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

VectorXcd Propagator::operator()(const VectorXcd& psi0, double t) const {
    VectorXcd c = evecs_.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-I * (evals_(k) * t));
    return evecs_ * c;
}

VectorXcd schrodinger_propagate(const MatrixXcd& h, const VectorXcd& psi0, double t) { return Propagator(h)(psi0, t); }

double fidelity(const VectorXcd& a, const VectorXcd& b) { return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm()); }

PhaseModel phase_model(const MatrixRep& rep, const MatrixXcd& h, const KernelSpec& spec) {
    PhaseModel m;
    m.energy = [rep, h](const CVec& z) { return energy_function(rep, h, z); };
    m.connection = [spec](const CVec& z) { return kernel_connection(spec, z); };
    return m;
}

} // namespace csflow
