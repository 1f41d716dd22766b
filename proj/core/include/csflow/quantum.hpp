#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csflow/dynamics.hpp"

namespace csflow {

enum class RepFamily { Su2, Su3Fundamental, Su3Wedge };

// Finite-dimensional matrix representation with an extreme vector.
struct MatrixRep {
    RepFamily family = RepFamily::Su2;
    int dim = 0;
    double spin = 0; // su2 only
    std::vector<std::string> labels;
    std::map<std::string, Eigen::MatrixXcd> gens;
    Eigen::VectorXcd e0;

    const Eigen::MatrixXcd& at(const std::string& label) const;
};

// Spin matrices J0, J+, J- on |j,m>, m = -j..j; e0 = |j,-j> is the lowest-weight vector.
MatrixRep su2_rep(double j);

enum class Su3Kind { Fundamental, Wedge };
// C_ij as elementary matrices (fundamental) or their action on the exterior square (wedge).
// e0 is the highest-weight vector: w = (1,0,0) resp. (1,1,0).
MatrixRep su3_rep(Su3Kind kind);

// Largest operator-norm residual of the defining commutation relations.
double commutation_residual(const MatrixRep& rep);

// su2: exp(z J+) e0. su3, matrix chart z = (z12, z23, z13): exp(z12 C21 + z13 C31) exp(z23 C32) e0.
Eigen::VectorXcd coherent_vector(const MatrixRep& rep, const CVec& z);
// su3 only, exponential chart zeta = (zeta12, zeta23, zeta13): exp(sum zeta_a C_a^T) e0.
Eigen::VectorXcd coherent_vector_exponential(const MatrixRep& rep, const CVec& zeta);

Eigen::MatrixXcd hamiltonian_matrix(const MatrixRep& rep, const LinearHamiltonian& h, double tol = 1e-12);

// Rayleigh quotient <u, H u>/<u, u> at the coherent vector; throws if its imaginary part exceeds 1e-12 relative.
double energy_function(const MatrixRep& rep, const Eigen::MatrixXcd& h, const CVec& z);

enum class KernelFamily { Su2, Su11, Grassmann, Su3 };

struct KernelSpec {
    KernelFamily family = KernelFamily::Su2;
    double j = 0.5;       // su2 spin
    double k = 0.5;       // su11 Bargmann index
    int m = 1, n = 1;     // grassmann: Z is m x n
    double power = 1;     // grassmann exponent
    bool noncompact = false;
    double j1 = 1, j2 = 0; // su3
    // su3: which of (z12, z23, z13) the chart coordinates are, in order; the others are zero.
    std::vector<int> su3_vars{0, 1, 2};

    int dim() const;

    static KernelSpec su2(double j);
    static KernelSpec su11(double k);
    static KernelSpec grassmann(int m, int n, double power = 1, bool noncompact = false);
    static KernelSpec su3(double j1, double j2, std::vector<int> vars = {0, 1, 2});
};

// K(z, w-bar) = (e_w, e_z): holomorphic in z, antiholomorphic in w.
cplx kernel_eval(const KernelSpec& spec, const CVec& z, const CVec& w);
// log K(z, z-bar)
double log_kernel(const KernelSpec& spec, const CVec& z);
// A_a = d/dz_a log K(z, w-bar) at w = z.
CVec kernel_connection(const KernelSpec& spec, const CVec& z);

// G_ab = d^2/dz_a dz-bar_b log K: central differences (step h) of the analytic gradient, one Richardson pass.
// Throws SingularMetric when the smallest eigenvalue is not positive (relative 1e-9) and check is set.
Eigen::MatrixXcd kahler_metric(const KernelSpec& spec, const CVec& z, double h = 1e-4, bool check = true);
double su2_metric_closed(double j, cplx z);

// Energy from a kernel and a synthesized table: sum eps (P^v + sum_a Q^v_a A_a).
class KernelEnergy {
public:
    KernelEnergy(const Representation& rep, const LinearHamiltonian& h, const KernelSpec& spec,
                 const std::vector<Rational>& weight);
    double operator()(const CVec& z) const;

private:
    KernelSpec spec_;
    CompiledPoly scalar_;
    std::vector<CompiledPoly> q_;
};

// Gradient d/dz-bar by central differences on real and imaginary parts with one Richardson pass.
CVec dbar_gradient(const std::function<double(const CVec&)>& f, const CVec& z, double h = 1e-4);

// i dz/dt = (G^T)^-1 dE/dz-bar.
CVec poisson_flow(const KernelSpec& spec, const std::function<double(const CVec&)>& energy, const CVec& z);

class Propagator {
public:
    // Throws NonHermitianHamiltonian.
    explicit Propagator(const Eigen::MatrixXcd& h, double tol = 1e-12);
    Eigen::VectorXcd operator()(const Eigen::VectorXcd& psi0, double t) const;
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

private:
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

Eigen::VectorXcd schrodinger_propagate(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t);

// |<a, b>|^2 / (|a|^2 |b|^2)
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Phase ingredients from a matrix representation (energy) and a kernel (connection).
PhaseModel phase_model(const MatrixRep& rep, const Eigen::MatrixXcd& h, const KernelSpec& spec);

} // namespace csflow
