#pragma once

#include "model.hpp"
#include "rng.hpp"

namespace fdtwrc::test {

inline SystemDims paper_dims() { return {4, 2, 2, 2, 2, 2}; }

inline LinkBudget paper_budget(double theta_db = 10.0) {
    LinkBudget b;
    b.sigma2 = dbm_to_watts(-30.0);
    b.theta = {db_to_linear(theta_db), db_to_linear(theta_db)};
    b.rho = 1e-4;
    b.kappa = 0.1;
    return b;
}

inline VectorXcd random_cvec(RandomStream& rng, int n) {
    VectorXcd v(n);
    for (int k = 0; k < n; ++k) v(k) = rng.complex_gaussian();
    return v;
}

/// Random beamformer set with the relay transmit vector rescaled to hit a
/// prescribed loop gain. Receive filters come out unit norm.
inline BeamformerSet random_beamformers(RandomStream& rng, const SystemDims& d,
                                        const ChannelSet& ch, double target_loop) {
    BeamformerSet bf;
    bf.w = random_cvec(rng, d.n_r);
    bf.v = random_cvec(rng, d.m_r);
    bf.f_1 = random_cvec(rng, d.m_1);
    bf.f_2 = random_cvec(rng, d.m_2);
    bf.u_1 = random_cvec(rng, d.n_1).normalized();
    bf.u_2 = random_cvec(rng, d.n_2).normalized();
    const double lg = loop_gain(bf, ch);
    if (lg > 0.0 && target_loop >= 0.0) {
        bf.v *= target_loop / lg;
    }
    return bf;
}

}  // namespace fdtwrc::test
