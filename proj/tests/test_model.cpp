#include <doctest.h>

#include <cmath>

#include "model.hpp"
#include "test_util.hpp"

using namespace fdtwrc;
using test::paper_budget;
using test::paper_dims;

namespace {

// Tiny deterministic channel set for hand-computable cases: effectively
// scalar links embedded in the smallest shapes.
ChannelSet scalar_channels(const SystemDims& d) {
    ChannelSet ch;
    ch.h_1r = MatrixXcd::Zero(d.n_r, d.m_1);
    ch.h_2r = MatrixXcd::Zero(d.n_r, d.m_2);
    ch.h_rr = MatrixXcd::Zero(d.n_r, d.m_r);
    ch.h_r1 = MatrixXcd::Zero(d.n_1, d.m_r);
    ch.h_r2 = MatrixXcd::Zero(d.n_2, d.m_r);
    ch.h_11 = MatrixXcd::Zero(d.n_1, d.m_1);
    ch.h_22 = MatrixXcd::Zero(d.n_2, d.m_2);
    return ch;
}

BeamformerSet unit_selectors(const SystemDims& d) {
    BeamformerSet bf;
    bf.v = VectorXcd::Zero(d.m_r);
    bf.v(0) = 1.0;
    bf.w = VectorXcd::Zero(d.n_r);
    bf.w(0) = 1.0;
    bf.f_1 = VectorXcd::Zero(d.m_1);
    bf.f_1(0) = 1.0;
    bf.f_2 = VectorXcd::Zero(d.m_2);
    bf.f_2(0) = 1.0;
    bf.u_1 = VectorXcd::Zero(d.n_1);
    bf.u_1(0) = 1.0;
    bf.u_2 = VectorXcd::Zero(d.n_2);
    bf.u_2(0) = 1.0;
    return bf;
}

}  // namespace

TEST_CASE("generate_channels: shapes, SI scaling, determinism") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();

    RandomStream rng(42);
    const ChannelSet ch = generate_channels(rng, d, b);
    CHECK(ch.h_1r.rows() == 2);
    CHECK(ch.h_1r.cols() == 2);
    CHECK(ch.h_rr.rows() == 2);
    CHECK(ch.h_rr.cols() == 4);
    ch.validate(d);

    RandomStream rng2(42);
    const ChannelSet ch2 = generate_channels(rng2, d, b);
    CHECK(ch.h_1r == ch2.h_1r);  // bit-reproducible
    CHECK(ch.h_rr == ch2.h_rr);
    CHECK(ch.h_22 == ch2.h_22);

    LinkBudget b0 = b;
    b0.kappa = 0.0;
    RandomStream rng3(7);
    const ChannelSet ch0 = generate_channels(rng3, d, b0);
    CHECK(ch0.h_rr.cwiseAbs().maxCoeff() == 0.0);
    CHECK(ch0.h_11.cwiseAbs().maxCoeff() == 0.0);
    CHECK(ch0.h_22.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generate_channels: empirical entry variances") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();
    RandomStream rng(123);

    double acc_sig = 0.0, acc_si = 0.0;
    std::int64_t n_sig = 0, n_si = 0;
    const int draws = 100000 / (d.n_r * d.m_1);
    for (int k = 0; k < draws; ++k) {
        const ChannelSet ch = generate_channels(rng, d, b);
        acc_sig += ch.h_1r.cwiseAbs2().sum();
        n_sig += ch.h_1r.size();
        acc_si += ch.h_rr.cwiseAbs2().sum();
        n_si += ch.h_rr.size();
    }
    const double var_sig = acc_sig / static_cast<double>(n_sig);
    const double var_si = acc_si / static_cast<double>(n_si);
    CHECK(var_sig == doctest::Approx(1e-4).epsilon(0.03));
    CHECK(var_si == doctest::Approx(1e-6).epsilon(0.03));  // kappa^2 * rho
}

TEST_CASE("loop_gain: trivial and oracle cases") {
    const SystemDims d{4, 2, 2, 2, 2, 2};
    ChannelSet ch = scalar_channels(d);
    BeamformerSet bf = unit_selectors(d);

    CHECK(loop_gain(bf, ch) == 0.0);

    ch.h_rr(0, 0) = cplx(0.3, 0.0);
    CHECK(loop_gain(bf, ch) == doctest::Approx(0.3));

    // naive triple-loop oracle on random data
    RandomStream rng(5);
    MatrixXcd h(3, 4);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) h(r, c) = rng.complex_gaussian();
    VectorXcd w = test::random_cvec(rng, 3).normalized();
    VectorXcd v = test::random_cvec(rng, 4).normalized();
    cplx acc = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) acc += std::conj(w(r)) * h(r, c) * v(c);
    CHECK(loop_gain(w, v, h) == doctest::Approx(std::abs(acc)).epsilon(1e-12));
}

TEST_CASE("relay_power: closed-form arithmetic") {
    const SystemDims d{4, 2, 2, 2, 2, 2};
    ChannelSet ch = scalar_channels(d);
    BeamformerSet bf = unit_selectors(d);

    // |w^H H_1R f_1|^2 = 1, |w^H H_2R f_2|^2 = 0, sigma^2 = 1, ||w||^2 = 1, ||v||^2 = 2
    ch.h_1r(0, 0) = 1.0;
    bf.v = VectorXcd::Zero(d.m_r);
    bf.v(0) = std::sqrt(2.0);
    CHECK(relay_power(bf, ch, 1.0) == doctest::Approx(4.0));

    // loop gain 0.5 scales the same numerator by 1/(1-0.25)
    ch.h_rr(0, 0) = cplx(0.5 / std::sqrt(2.0), 0.0);  // w^H H_RR v = 0.5
    CHECK(loop_gain(bf, ch) == doctest::Approx(0.5));
    CHECK(relay_power(bf, ch, 1.0) == doctest::Approx(16.0 / 3.0));

    ch.h_rr(0, 0) = cplx(1.0 / std::sqrt(2.0), 0.0);  // loop gain 1
    CHECK(loop_gain(bf, ch) == doctest::Approx(1.0));
    CHECK_THROWS_AS(relay_power(bf, ch, 1.0), LoopUnstableError);
}

TEST_CASE("sinr: SI-free closed form and degenerate inputs") {
    const SystemDims d{4, 2, 2, 2, 2, 2};
    ChannelSet ch = scalar_channels(d);
    BeamformerSet bf = unit_selectors(d);

    // |u^H H_R1 v|^2 = 4, |w^H H_2R f_2|^2 = 1, sigma^2 = 1, ||w||^2 = 1
    ch.h_r1(0, 0) = 2.0;
    ch.h_2r(0, 0) = 1.0;
    CHECK(sinr(1, bf, ch, 1.0) == doctest::Approx(0.8));

    BeamformerSet bf0 = bf;
    bf0.f_2 = VectorXcd::Zero(d.m_2);
    CHECK(sinr(1, bf0, ch, 1.0) == 0.0);
}

TEST_CASE("total_power: additivity and dominance") {
    const SystemDims d{4, 2, 2, 2, 2, 2};
    ChannelSet ch = scalar_channels(d);
    BeamformerSet bf = unit_selectors(d);
    ch.h_1r(0, 0) = 1.0;
    bf.v = VectorXcd::Zero(d.m_r);
    bf.v(0) = std::sqrt(2.0);
    bf.f_2 *= std::sqrt(2.0);
    // relay power 4.0 (as above with ||f_1||^2 = 1 -> g1 = 1), f powers 1 + 2
    CHECK(total_power(bf, ch, 1.0) == doctest::Approx(7.0));
    CHECK(total_power(bf, ch, 1.0) >= relay_power(bf, ch, 1.0));
}

TEST_CASE("check_feasible: verdict logic") {
    const SystemDims d{4, 2, 2, 2, 2, 2};
    ChannelSet ch = scalar_channels(d);
    BeamformerSet bf = unit_selectors(d);
    ch.h_r1(0, 0) = 2.0;
    ch.h_r2(0, 0) = 2.0;
    ch.h_1r(0, 0) = 1.0;
    ch.h_2r(0, 0) = 1.0;

    // zero targets are always met by a stable point
    CHECK(check_feasible(bf, ch, {0.0, 0.0}, 1.0, 1e-4).feasible);

    // zero desired signal fails a positive target, margin reported
    BeamformerSet bf0 = bf;
    bf0.f_2 = VectorXcd::Zero(d.m_2);
    const auto rep = check_feasible(bf0, ch, {0.5, 0.5}, 1.0, 1e-4);
    CHECK(!rep.feasible);
    CHECK(rep.sinr[0] == 0.0);
    CHECK(rep.sinr_margin[0] < 0.0);

    // non-unit receive filter is rejected
    BeamformerSet bfu = bf;
    bfu.u_1 *= 1.5;
    CHECK(!check_feasible(bfu, ch, {0.0, 0.0}, 1.0, 1e-4).feasible);
}

TEST_CASE("simulate_relay_power: no-loop case and exact zero") {
    const SystemDims d = paper_dims();
    LinkBudget b = paper_budget();
    b.kappa = 0.0;
    RandomStream rng(11);
    const ChannelSet ch = generate_channels(rng, d, b);
    BeamformerSet bf = test::random_beamformers(rng, d, ch, 0.0);

    const double exact = relay_power(bf, ch, b.sigma2);
    RandomStream sim_rng(99);
    const double est = simulate_relay_power(bf, ch, b.sigma2, 200000, 2000, sim_rng);
    CHECK(est == doctest::Approx(exact).epsilon(0.01));

    BeamformerSet bf0 = bf;
    bf0.f_1.setZero();
    bf0.f_2.setZero();
    RandomStream sim_rng2(100);
    CHECK(simulate_relay_power(bf0, ch, 0.0, 1000, 10, sim_rng2) == 0.0);
}

TEST_CASE("simulate_relay_power: rejects unstable loops and bad horizons") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();
    RandomStream rng(13);
    const ChannelSet ch = generate_channels(rng, d, b);
    BeamformerSet bf = test::random_beamformers(rng, d, ch, 0.9999);
    RandomStream sim_rng(1);
    CHECK_THROWS_AS(simulate_relay_power(bf, ch, b.sigma2, 200000, 2000, sim_rng),
                    LoopUnstableError);
    BeamformerSet ok = test::random_beamformers(rng, d, ch, 0.5);
    CHECK_THROWS_AS(simulate_relay_power(ok, ch, b.sigma2, 100, 2000, sim_rng), DomainError);
}

TEST_CASE("oracle equivalence on random stable tuples (scaled-down)") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();
    RandomStream rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const ChannelSet ch = generate_channels(rng, d, b);
        const double target = 0.9 * (trial + 1) / 10.0;
        BeamformerSet bf = test::random_beamformers(rng, d, ch, target);
        const double exact = relay_power(bf, ch, b.sigma2);
        RandomStream sim_rng = rng.fork(trial);
        const double est = simulate_relay_power(bf, ch, b.sigma2, 200000, 5000, sim_rng);
        CHECK(est == doctest::Approx(exact).epsilon(0.01));

        for (int i = 1; i <= 2; ++i) {
            const double s_exact = sinr(i, bf, ch, b.sigma2);
            RandomStream s_rng = rng.fork(100 + 2 * trial + i);
            const double s_est = simulate_sinr(i, bf, ch, b.sigma2, 200000, 5000, s_rng);
            CHECK(s_est == doctest::Approx(s_exact).epsilon(0.02));
        }
    }
}

TEST_CASE("simulate_sinr: SI-free case matches the closed form") {
    const SystemDims d = paper_dims();
    LinkBudget b = paper_budget();
    b.kappa = 0.0;  // no loop, no user self-interference
    RandomStream rng(37);
    const ChannelSet ch = generate_channels(rng, d, b);
    const BeamformerSet bf = test::random_beamformers(rng, d, ch, 0.0);
    for (int i = 1; i <= 2; ++i) {
        const double exact = sinr(i, bf, ch, b.sigma2);
        RandomStream sim_rng = rng.fork(40 + i);
        const double est = simulate_sinr(i, bf, ch, b.sigma2, 200000, 2000, sim_rng);
        CHECK(est == doctest::Approx(exact).epsilon(0.02));
    }
}

TEST_CASE("simulate_sinr: orthogonal receive filter kills the desired power") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();
    RandomStream rng(31);
    const ChannelSet ch = generate_channels(rng, d, b);
    BeamformerSet bf = test::random_beamformers(rng, d, ch, 0.3);
    // u_1 orthogonal to H_R1 v
    const VectorXcd dir = (ch.h_r1 * bf.v).normalized();
    VectorXcd u = test::random_cvec(rng, d.n_1);
    u -= dir * (dir.adjoint() * u).value();
    bf.u_1 = u.normalized();
    RandomStream sim_rng(77);
    const double est = simulate_sinr(1, bf, ch, b.sigma2, 50000, 1000, sim_rng);
    CHECK(est <= 1e-18);
}

TEST_CASE("relay_power is nondecreasing in the loop-gain scale") {
    const SystemDims d = paper_dims();
    const LinkBudget b = paper_budget();
    RandomStream rng(57);
    for (int trial = 0; trial < 20; ++trial) {
        ChannelSet ch = generate_channels(rng, d, b);
        BeamformerSet bf = test::random_beamformers(rng, d, ch, 0.95);
        const MatrixXcd h_rr = ch.h_rr;
        double prev = -1.0;
        for (double s = 0.0; s < 1.0; s += 0.1) {
            ch.h_rr = s * h_rr;
            const double pr = relay_power(bf, ch, b.sigma2);
            CHECK(pr >= prev);
            prev = pr;
        }
    }
}

TEST_CASE("db conversions") {
    CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6));
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0));
    CHECK(linear_to_db(10.0) == doctest::Approx(10.0));
    CHECK_THROWS_AS(watts_to_dbm(0.0), DomainError);
    CHECK_THROWS_AS(linear_to_db(-1.0), DomainError);
}
