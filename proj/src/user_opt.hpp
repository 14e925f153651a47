#pragma once

#include <array>

#include "conic.hpp"
#include "model.hpp"

namespace fdtwrc {

/// Fixed data of the user-transmitter subproblem. Built from a point where
/// the relay receive filter has unit norm, which makes the noise terms below
/// exact.
struct FSubproblemData {
    VectorXcd a_1r, a_2r;            // H_iR^H w
    VectorXcd a_11, a_22;            // H_ii^H u_i
    double a_r1 = 0.0, a_r2 = 0.0;   // |u_i^H H_Ri v|^2
    double a_rr = 0.0;               // |w^H H_RR v|^2, < 1
    double v_norm2 = 0.0;
    double sigma2 = 0.0;
    std::array<double, 2> theta{0.0, 0.0};

    const VectorXcd& a_ir(int i) const { return i == 1 ? a_1r : a_2r; }
    const VectorXcd& a_ii(int i) const { return i == 1 ? a_11 : a_22; }
    double a_ri(int i) const { return i == 1 ? a_r1 : a_r2; }
    double theta_of(int i) const { return theta[i - 1]; }
};

FSubproblemData make_f_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta);

struct FStepResult {
    SolveStatus status = SolveStatus::NumericFailure;
    VectorXcd f_1, f_2;
    double objective = 0.0;  // includes the forwarded-noise constant
};

/// Objective of the user-transmit subproblem at a given pair.
double f_objective(const FSubproblemData& d, const VectorXcd& f_1, const VectorXcd& f_2);

/// Normalized slack of the original quadratic SINR constraint of user i.
double f_constraint_slack(const FSubproblemData& d, const VectorXcd& f_1, const VectorXcd& f_2,
                          int i);

/// Solves the user-transmitter subproblem exactly as a second-order cone
/// program (phase-rotated SINR constraints). Global optimum of the convex
/// subproblem.
FStepResult solve_f(const FSubproblemData& d, double solver_tol = 1e-8);

/// Closed-form unit-norm receive filter maximizing user i's SINR:
/// (sigma^2 I + b b^H)^{-1} a, applied through the rank-1 inverse identity
/// and normalized. a = H_Ri v, b = H_ii f_i.
VectorXcd mmse_u(const VectorXcd& h_ri_v, const VectorXcd& h_ii_f, double sigma2);

}  // namespace fdtwrc
