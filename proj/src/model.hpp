#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>

#include "errors.hpp"
#include "rng.hpp"

namespace fdtwrc {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Antenna configuration of the three-node network: transmit counts
/// (relay, user 1, user 2) and receive counts in the same order.
struct SystemDims {
    int m_r = 0, m_1 = 0, m_2 = 0;  // transmit antennas
    int n_r = 0, n_1 = 0, n_2 = 0;  // receive antennas

    void validate() const;
    int m_of(int user) const { return user == 1 ? m_1 : m_2; }
    int n_of(int user) const { return user == 1 ? n_1 : n_2; }
};

/// Noise power, SINR targets, large-scale fading and residual
/// self-interference amplitude coefficient. All powers in linear watts,
/// all ratios linear.
struct LinkBudget {
    double sigma2 = 0.0;
    std::array<double, 2> theta{0.0, 0.0};
    double rho = 0.0;
    double kappa = 0.0;

    void validate() const;
    double theta_of(int user) const { return theta[user - 1]; }
};

/// The seven channel matrices. h_1r/h_2r are the uplinks into the relay,
/// h_r1/h_r2 the downlinks, h_rr the relay's residual loop channel and
/// h_11/h_22 the users' residual self-interference channels.
struct ChannelSet {
    MatrixXcd h_1r, h_2r;        // N_R x M_i
    MatrixXcd h_rr;              // N_R x M_R
    MatrixXcd h_r1, h_r2;        // N_i x M_R
    MatrixXcd h_11, h_22;        // N_i x M_i

    void validate(const SystemDims& dims) const;
    const MatrixXcd& h_ir(int user) const { return user == 1 ? h_1r : h_2r; }
    const MatrixXcd& h_ri(int user) const { return user == 1 ? h_r1 : h_r2; }
    const MatrixXcd& h_ii(int user) const { return user == 1 ? h_11 : h_22; }
};

/// The six design variables. u_1/u_2 are unit norm whenever the set is
/// used as a feasible point.
struct BeamformerSet {
    VectorXcd v;        // relay transmit, M_R
    VectorXcd w;        // relay receive, N_R
    VectorXcd f_1, f_2; // user transmitters, M_i
    VectorXcd u_1, u_2; // user receivers, N_i

    const VectorXcd& f(int user) const { return user == 1 ? f_1 : f_2; }
    const VectorXcd& u(int user) const { return user == 1 ? u_1 : u_2; }
    VectorXcd& f(int user) { return user == 1 ? f_1 : f_2; }
    VectorXcd& u(int user) { return user == 1 ? u_1 : u_2; }
};

/// Per-constraint slacks from a feasibility audit of a beamformer set.
struct FeasibilityReport {
    bool feasible = false;
    std::array<double, 2> sinr{0.0, 0.0};
    std::array<double, 2> sinr_margin{0.0, 0.0};  // sinr - theta*(1 - tol_rel)
    double loop = 0.0;                            // |w^H H_RR v|
    std::array<double, 2> u_norm_err{0.0, 0.0};   // | ||u_i|| - 1 |
};

/// Draws all seven channels i.i.d. CN(0, rho) per entry; the three residual
/// SI channels are additionally multiplied by kappa. Deterministic in the
/// stream state.
ChannelSet generate_channels(RandomStream& rng, const SystemDims& dims, const LinkBudget& budget);

/// |w^H H_RR v|
double loop_gain(const VectorXcd& w, const VectorXcd& v, const MatrixXcd& h_rr);
double loop_gain(const BeamformerSet& bf, const ChannelSet& ch);

/// Steady-state relay output power of the amplify-and-forward loop.
/// Throws LoopUnstableError when the loop gain reaches 1.
double relay_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2);

/// Closed-form SINR of user i (1 or 2) after the receive filter u_i.
double sinr(int i, const BeamformerSet& bf, const ChannelSet& ch, double sigma2);

/// Relay power plus both user transmit powers.
double total_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2);

/// Audits SINR targets (with relative tolerance), loop stability and
/// receive-filter normalization. Never throws; failures are encoded in
/// the report.
FeasibilityReport check_feasible(const BeamformerSet& bf, const ChannelSet& ch,
                                 const std::array<double, 2>& targets, double sigma2,
                                 double tol_rel);

/// Time-domain estimate of the relay output power: runs the sample-level
/// relay recursion with i.i.d. unit-power QPSK inputs and fresh Gaussian
/// noise, discards burn_in samples and averages ||x_R[n]||^2.
double simulate_relay_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            std::int64_t n_steps, std::int64_t burn_in, RandomStream& rng);

/// Time-domain estimate of user i's SINR. The one-hop relayed symbol of the
/// other user is the desired part; delayed loop echoes, forwarded noise,
/// own-transmitter leakage and receiver noise accumulate as interference.
/// The one-hop echo of the user's own symbol is removed (known symbol).
double simulate_sinr(int i, const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                     std::int64_t n_steps, std::int64_t burn_in, RandomStream& rng);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);  // throws DomainError on nonpositive input
double db_to_linear(double db);
double linear_to_db(double lin);    // throws DomainError on nonpositive input

}  // namespace fdtwrc
