#pragma once

#include <array>
#include <vector>

#include "conic.hpp"
#include "model.hpp"

namespace fdtwrc {

/// Fixed data of the relay-transmit subproblem: scalar gains of the frozen
/// variables plus the relay-side channel directions seen by v.
struct VSubproblemData {
    double g_1r = 0.0, g_2r = 0.0;   // |w^H H_iR f_i|^2
    double g_11 = 0.0, g_22 = 0.0;   // |u_i^H H_ii f_i|^2
    VectorXcd g_r1, g_r2;            // H_Ri^H u_i
    VectorXcd g_rr;                  // H_RR^H w
    double w_norm2 = 0.0;
    double sigma2 = 0.0;
    std::array<double, 2> theta{0.0, 0.0};

    double g_ir(int i) const { return i == 1 ? g_1r : g_2r; }
    double g_ii(int i) const { return i == 1 ? g_11 : g_22; }
    const VectorXcd& g_ri(int i) const { return i == 1 ? g_r1 : g_r2; }
    double theta_of(int i) const { return theta[i - 1]; }
};

/// Fixed data of the relay-receive subproblem.
struct WSubproblemData {
    VectorXcd q_1r, q_2r;            // H_iR f_i
    double q_11 = 0.0, q_22 = 0.0;   // |u_i^H H_ii f_i|^2
    double q_r1 = 0.0, q_r2 = 0.0;   // |u_i^H H_Ri v|^2
    VectorXcd q_rr;                  // H_RR v
    double v_norm2 = 0.0;
    double sigma2 = 0.0;
    std::array<double, 2> theta{0.0, 0.0};

    const VectorXcd& q_ir(int i) const { return i == 1 ? q_1r : q_2r; }
    double q_ii(int i) const { return i == 1 ? q_11 : q_22; }
    double q_ri(int i) const { return i == 1 ? q_r1 : q_r2; }
    double theta_of(int i) const { return theta[i - 1]; }
};

VSubproblemData make_v_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta);
WSubproblemData make_w_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta);

/// Relay power as a function of v alone (everything else frozen).
double v_objective(const VSubproblemData& d, const VectorXcd& v);
/// Relay power as a function of w alone.
double w_objective(const WSubproblemData& d, const VectorXcd& w);

/// Normalized slack of user i's original (nonconvex) constraint; >= 0 means
/// satisfied. Normalization is by the constraint's own magnitude so the
/// value is comparable across instances.
double v_constraint_slack(const VSubproblemData& d, const VectorXcd& v, int i);
double w_constraint_slack(const WSubproblemData& d, const VectorXcd& w, int i);

/// Phi_i of the linearized constraint: rank <= 2 Hermitian PSD.
MatrixXcd build_phi(const VSubproblemData& d, int i);

/// 2 Re(v_ref^H Phi v) - v_ref^H Phi v_ref
double minorant_upsilon(const MatrixXcd& phi, const VectorXcd& v_ref, const VectorXcd& v);

/// 2/rho_ref - rho/rho_ref^2; minorizes 1/rho on rho > 0.
double minorant_delta(double rho_ref, double rho);

struct Property1Report {
    bool minorization_ok = false;
    bool tangency_ok = false;
    bool gradient_ok = false;
    int minorization_failures = 0;
    double worst_minorization_gap = 0.0;  // most negative (true - minorant)
    double tangency_err = 0.0;
    double gradient_rel_err = 0.0;
    bool all_ok() const { return minorization_ok && tangency_ok && gradient_ok; }
};

/// Checks minorization on random samples, tangency at the reference and a
/// central-finite-difference gradient match for both surrogate functions.
Property1Report property1_diagnostics(const MatrixXcd& phi, const VectorXcd& v_ref,
                                      double rho_ref, int sample_count, double fd_step);

enum class ScaStatus { Converged, MaxIters, Stalled };

/// One SCA run: iterate, slack references, and the audited objective path.
struct ScaState {
    VectorXcd iterate;
    std::array<double, 2> rho{0.0, 0.0};
    std::vector<double> objective;  // re-evaluated true objective per accepted step
    int iterations = 0;
    ScaStatus status = ScaStatus::Converged;
    double last_xi = 0.0;             // conic epigraph value of the last accepted step
    double min_constraint_slack = 0.0;
    int rejected_steps = 0;
};

struct VStepResult {
    SolveStatus status = SolveStatus::NumericFailure;
    VectorXcd v;
    std::array<double, 2> rho{0.0, 0.0};
    double xi = 0.0;  // epigraph of ||v||^2 / (1 - |g_rr^H v|^2)
};

/// Builds and solves one conic subproblem around (v_ref, rho_ref).
/// Retries once with a 10x looser tolerance on numeric failure.
VStepResult solve_v_step(const VSubproblemData& d, const VectorXcd& v_ref,
                         const std::array<double, 2>& rho_ref, double solver_tol = 1e-8);
VStepResult solve_w_step(const WSubproblemData& d, const VectorXcd& w_ref,
                         const std::array<double, 2>& rho_ref, double solver_tol = 1e-8);

/// Successive convex approximation loops. The incoming iterate must satisfy
/// the original constraints (warm start from the alternating optimization);
/// steps are accepted only if the re-evaluated objective does not increase
/// and the original constraints stay satisfied.
ScaState sca_v(const VSubproblemData& d, const VectorXcd& v_init, int max_iters, double tol_rel,
               double solver_tol = 1e-8);
ScaState sca_w(const WSubproblemData& d, const VectorXcd& w_init, int max_iters, double tol_rel,
               double solver_tol = 1e-8);

}  // namespace fdtwrc
