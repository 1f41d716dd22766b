#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csflow/synth.hpp"

namespace csflow {

using CVec = std::vector<cplx>;

// H = sum eps_X X over generator labels of a representation.
struct LinearHamiltonian {
    std::map<std::string, cplx> eps;
};

// The algebra element sum eps_X X, complex coefficients.
std::map<Generator, cplx> hamiltonian_element(const Representation& rep, const LinearHamiltonian& h);

// Throws NonHermitianHamiltonian unless eps(X^dagger) = conj eps(X) up to tol.
void check_hermitian(const Representation& rep, const LinearHamiltonian& h, double tol = 1e-12);

// Operator by which generator X acts on coherent vectors: D(X^dagger) for a function-action table.
DiffOp vector_op(const Representation& rep, const RepGenerator& g);

// i dz_a/dt = rhs_a(z).
class FlowField {
public:
    FlowField() = default;
    FlowField(std::vector<std::string> names, std::vector<ComplexPoly> rhs);

    int dim() const { return static_cast<int>(rhs_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<ComplexPoly>& rhs() const { return rhs_; }

    // dz/dt = -i rhs(z)
    void velocity(const cplx* z, cplx* dz) const;
    CVec velocity(const CVec& z) const;
    // rhs(z) itself
    CVec evaluate(const CVec& z) const;

    // One line per component: "i d/dt z12 = ...".
    std::string to_text() const;

private:
    std::vector<std::string> names_;
    std::vector<ComplexPoly> rhs_;
    std::vector<CompiledPoly> compiled_;
};

// rhs_a = sum_X eps_X Q^v_{X,a}, eps kept symbolic: Var::eps(k) stands for the k-th generator of rep.
std::vector<Poly> assemble_rhs_symbolic(const Representation& rep);
FlowField assemble_rhs(const Representation& rep, const LinearHamiltonian& h);

FlowField oscillator_field(const Eigen::MatrixXcd& omega, const Eigen::VectorXcd& f);

enum class RiccatiVariant { Compact, Noncompact };

struct RiccatiBlocks {
    Eigen::MatrixXcd eps01; // m x m
    Eigen::MatrixXcd eps02; // n x n
    Eigen::MatrixXcd epsp;  // m x n
    Eigen::MatrixXcd epsm;  // n x m
    RiccatiVariant variant = RiccatiVariant::Compact;

    int m() const { return static_cast<int>(eps01.rows()); }
    int n() const { return static_cast<int>(eps02.rows()); }
    // -1 compact, +1 non-compact: coefficient of Z eps- Z
    int sigma() const { return variant == RiccatiVariant::Compact ? -1 : 1; }
};

// Throws DimensionMismatch or NonHermitianBlocks.
void check_blocks(const RiccatiBlocks& b, double tol = 1e-12);

// i dZ/dt = eps01 Z - Z eps02 + eps+ + sigma Z eps- Z over Z flattened row-major.
FlowField matrix_riccati_field(const RiccatiBlocks& b);

enum class Method { RK4, RK45 };

struct IntegratorOptions {
    Method method = Method::RK45;
    double dt = 1e-3;          // RK4 step
    double rtol = 1e-9;        // RK45
    double atol = 1e-12;       // RK45
    double max_step = 0.05;    // RK45
    double sample_dt = 0.01;   // output grid spacing; 0 records every accepted step
    double blowup = 1e8;
    double min_step = 1e-13;
};

enum class TrajStatus { Completed, BlowUp, StepFailure };

struct Trajectory {
    std::vector<double> times;
    std::vector<CVec> states;
    TrajStatus status = TrajStatus::Completed;
    double t_star = 0; // set for BlowUp / StepFailure
    long steps = 0;
};

std::string status_name(TrajStatus s);

Trajectory integrate(const FlowField& field, const CVec& z0, double t_end, const IntegratorOptions& opt = {});

struct Linearized {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> X, Y, Z;
    std::vector<double> cond_y;
    std::vector<bool> singular;
    std::optional<double> first_singular;
};

// Z = X Y^-1 with d/dt [X; Y] = h [X; Y], h = [[-i eps01, -i eps+], [i sigma eps-, -i eps02]].
// Propagated by the exact exponential of h on the grid t_k = k t_end / samples.
// Y is flagged singular where ||[X; Y]|| / sigma_min(Y) exceeds cond_limit; strict mode throws SingularY.
Linearized riccati_linearize(const RiccatiBlocks& b, const Eigen::MatrixXcd& x0, const Eigen::MatrixXcd& y0,
                             double t_end, int samples = 500, double cond_limit = 1e8, bool strict = false);

// Quantum data needed for the phase: energy E(z) and the connection A_a = d/dz_a log K(z, w-bar) at w = z.
struct PhaseModel {
    std::function<double(const CVec&)> energy;
    std::function<CVec(const CVec&)> connection;
};

struct Phase {
    std::vector<double> dynamical; // -int E dt
    std::vector<double> berry;     // -Im int sum A_a dz_a
    std::vector<double> total;
};

// Composite Simpson on the trajectory samples (uniform grid required).
// Throws QuadratureResolutionTooCoarse when dropping every other sample moves any value by more than tol.
Phase phase_along(const FlowField& field, const Trajectory& traj, const PhaseModel& model, double tol = 1e-6);

struct PhasedTrajectory {
    Trajectory traj;
    Phase phase;
    double sample_dt = 0;
};

// Integrates and halves the output spacing until phase_along accepts the resolution.
PhasedTrajectory integrate_with_phase(const FlowField& field, const CVec& z0, double t_end, IntegratorOptions opt,
                                      const PhaseModel& model, double tol = 1e-7, int max_refinements = 6);

// Cumulative composite Simpson on a uniform grid; odd points add one interval with a four-point cubic rule.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h);

// CSV: t, Re/Im per variable, then phi_dynamical, phi_berry, phi_total when a phase is given.
std::string trajectory_csv(const std::vector<std::string>& names, const Trajectory& traj, const Phase* phase = nullptr);
std::string trajectory_json(const std::vector<std::string>& names, const Trajectory& traj, const Phase* phase = nullptr);

} // namespace csflow
