#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "test_util.hpp"

using namespace fdtwrc;
using test::paper_budget;
using test::paper_dims;

namespace {

ChannelSet draw(std::uint64_t seed, const LinkBudget& budget) {
    RandomStream rng(seed);
    return generate_channels(rng, paper_dims(), budget);
}

}  // namespace

TEST_CASE("init_beamformers: nulling identities and margins") {
    const LinkBudget budget = paper_budget();
    for (std::uint64_t seed : {501ULL, 502ULL, 503ULL, 504ULL, 505ULL}) {
        const ChannelSet ch = draw(seed, budget);
        const BeamformerSet bf = init_beamformers(ch, budget);

        // self-interference is nulled exactly
        CHECK(std::abs((bf.u_1.adjoint() * ch.h_11 * bf.f_1).value()) <= 1e-10);
        CHECK(std::abs((bf.u_2.adjoint() * ch.h_22 * bf.f_2).value()) <= 1e-10);
        CHECK(loop_gain(bf, ch) <= 1e-10);

        // forwarded power sits 3 dB above the feasibility threshold
        const double w2 = bf.w.squaredNorm();
        for (int i = 1; i <= 2; ++i) {
            const double fwd =
                std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
            CHECK(fwd == doctest::Approx(2.0 * budget.theta_of(i) * budget.sigma2 * w2)
                             .epsilon(1e-10));
        }

        // end-to-end feasibility of the initial point
        CHECK(check_feasible(bf, ch, budget.theta, budget.sigma2, 1e-4).feasible);
    }
}

TEST_CASE("zf_f_step: tight target for the served user") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ch = draw(511, budget);
    BeamformerSet bf = init_beamformers(ch, budget);
    zf_f_step(ch, bf, budget);

    CHECK(std::abs((bf.u_1.adjoint() * ch.h_11 * bf.f_1).value()) <= 1e-10);
    CHECK(std::abs((bf.u_2.adjoint() * ch.h_22 * bf.f_2).value()) <= 1e-10);

    for (int i = 1; i <= 2; ++i) {
        // f_i is scaled so user 3-i meets its target exactly
        CHECK(sinr(3 - i, bf, ch, budget.sigma2) ==
              doctest::Approx(budget.theta_of(3 - i)).epsilon(1e-8));
    }

    // the printed scaling formula reproduces the returned norms
    for (int i = 1; i <= 2; ++i) {
        const int o = 3 - i;
        const double a_ro = std::norm((bf.u(o).adjoint() * ch.h_ri(o) * bf.v).value());
        const double th = budget.theta_of(o);
        // direction gain: f_i already lies along Z_i c_i, so |w^H H_iR f_i|^2
        // equals alpha_i * gain^2
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(i) * bf.f(i)).value());
        const double expect_fwd =
            th * (budget.sigma2 * a_ro * bf.w.squaredNorm() + budget.sigma2) / a_ro;
        CHECK(fwd == doctest::Approx(expect_fwd).epsilon(1e-9));
    }
}

TEST_CASE("zf_u_step: nulling and constrained optimality") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ch = draw(513, budget);
    BeamformerSet bf = init_beamformers(ch, budget);
    zf_u_step(ch, bf);

    RandomStream rng(29);
    for (int i = 1; i <= 2; ++i) {
        CHECK(std::abs((bf.u(i).adjoint() * ch.h_ii(i) * bf.f(i)).value()) <= 1e-10);
        CHECK(std::abs(bf.u(i).norm() - 1.0) <= 1e-12);
        const VectorXcd target = ch.h_ri(i) * bf.v;
        const VectorXcd si = ch.h_ii(i) * bf.f(i);
        const double gain = std::norm((bf.u(i).adjoint() * target).value());
        // no unit vector in the nulling subspace does better
        for (int t = 0; t < 2000; ++t) {
            VectorXcd u = test::random_cvec(rng, static_cast<int>(target.size()));
            if (si.norm() > 0.0) {
                u -= si * ((si.adjoint() * u).value() / si.squaredNorm());
            }
            if (u.norm() < 1e-9) continue;
            u.normalize();
            CHECK(std::norm((u.adjoint() * target).value()) <= gain * (1.0 + 1e-9));
        }
    }

    SUBCASE("zero interference reduces to the matched filter") {
        BeamformerSet mf = bf;
        mf.f_1.setZero();
        zf_u_step(ch, mf);
        const VectorXcd expect = (ch.h_r1 * mf.v).normalized();
        CHECK((mf.u_1 - expect).norm() <= 1e-12);
    }
}

TEST_CASE("zf_v_step: nulling, binding constraint, recomputed scaling") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ch = draw(517, budget);
    BeamformerSet bf = init_beamformers(ch, budget);
    zf_f_step(ch, bf, budget);
    zf_u_step(ch, bf);
    zf_v_step(ch, bf, budget);

    CHECK(loop_gain(bf, ch) <= 1e-10);

    // both zero-forcing SINR constraints hold; the binding one is tight
    double worst = 1e300;
    for (int i = 1; i <= 2; ++i) {
        const double a_ri = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * bf.v).value());
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        const double th = budget.theta_of(i);
        const double lhs = a_ri * fwd;
        const double rhs = th * (budget.sigma2 * a_ri * bf.w.squaredNorm() + budget.sigma2);
        CHECK(lhs >= rhs * (1.0 - 1e-8));
        worst = std::min(worst, lhs / rhs);
    }
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-8));

    // alpha recomputed from the formula matches ||v||^2
    const MatrixXcd z_dir = bf.v.normalized();
    double alpha = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const double gain2 = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * z_dir).value());
        const double th = budget.theta_of(i);
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        alpha = std::max(alpha, th * budget.sigma2 / gain2 /
                                    (fwd - th * budget.sigma2 * bf.w.squaredNorm()));
    }
    CHECK(bf.v.squaredNorm() == doctest::Approx(alpha).epsilon(1e-8));
}

TEST_CASE("zf_w_step: nulling and binding constraint") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ch = draw(519, budget);
    BeamformerSet bf = init_beamformers(ch, budget);
    zf_f_step(ch, bf, budget);
    zf_u_step(ch, bf);
    zf_v_step(ch, bf, budget);
    zf_w_step(ch, bf, budget);

    CHECK(loop_gain(bf, ch) <= 1e-10);
    double worst = 1e300;
    for (int i = 1; i <= 2; ++i) {
        const double a_ri = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * bf.v).value());
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        const double th = budget.theta_of(i);
        const double lhs = a_ri * fwd;
        const double rhs = th * (budget.sigma2 * a_ri * bf.w.squaredNorm() + budget.sigma2);
        CHECK(lhs >= rhs * (1.0 - 1e-8));
        worst = std::min(worst, lhs / rhs);
    }
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-8));

    SUBCASE("rank-1 case reproduces the matched filter direction") {
        // both uplinks carry the same vector and there is no loop channel
        ChannelSet flat = make_ideal(ch);
        BeamformerSet probe = bf;
        probe.f_1 = VectorXcd::Zero(2);
        probe.f_1(0) = 1.0;
        probe.f_2 = VectorXcd::Zero(2);
        probe.f_2(0) = 1.0;
        flat.h_1r.setZero();
        flat.h_2r.setZero();
        flat.h_1r(0, 0) = cplx(0.6, 0.2);
        flat.h_1r(1, 0) = cplx(-0.1, 0.9);
        flat.h_2r.col(0) = flat.h_1r.col(0);
        zf_w_step(flat, probe, budget);
        const VectorXcd expect = (flat.h_1r.col(0)).normalized();
        const double align =
            std::abs((probe.w.normalized().adjoint() * expect).value());
        CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("zf_ao: monotone trajectory and feasible final point") {
    const LinkBudget budget = paper_budget();
    AoConfig cfg;
    for (std::uint64_t seed : {521ULL, 522ULL, 523ULL, 524ULL, 525ULL}) {
        const ChannelSet ch = draw(seed, budget);
        const SolveReport rep = zf_ao(ch, budget, cfg);
        REQUIRE(rep.outer_power.size() >= 2);
        for (size_t k = 1; k < rep.outer_power.size(); ++k) {
            CHECK(rep.outer_power[k] <= rep.outer_power[k - 1] * (1.0 + 1e-6));
        }
        CHECK(rep.status != AoStatus::Failed);
        CHECK(rep.audit.feasible);
        // ZF identities hold at the final point
        CHECK(loop_gain(rep.final_bf, ch) <= 1e-10);
        CHECK(std::abs((rep.final_bf.u_1.adjoint() * ch.h_11 * rep.final_bf.f_1).value()) <=
              1e-10);
    }
}

TEST_CASE("zf_ao: degenerate ZF on zero-SI channels starts at the shared point") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ideal = make_ideal(draw(527, budget));
    AoConfig cfg;
    const SolveReport rep = zf_ao(ideal, budget, cfg);
    const BeamformerSet init = init_beamformers(ideal, budget);
    CHECK(rep.outer_power.front() ==
          doctest::Approx(total_power(init, ideal, budget.sigma2)).epsilon(1e-12));
}

TEST_CASE("make_ideal and hd_target") {
    const LinkBudget budget = paper_budget();
    const ChannelSet ch = draw(529, budget);
    const ChannelSet ideal = make_ideal(ch);
    CHECK(ideal.h_rr.norm() == 0.0);
    CHECK(ideal.h_11.norm() == 0.0);
    CHECK(ideal.h_22.norm() == 0.0);
    CHECK(ideal.h_1r == ch.h_1r);

    RandomStream rng(31);
    const BeamformerSet bf = test::random_beamformers(rng, paper_dims(), ideal, 0.0);
    CHECK(loop_gain(bf, ideal) == 0.0);

    CHECK(hd_target(10.0) == doctest::Approx(120.0));
    CHECK(hd_target(1.0) == doctest::Approx(3.0));
    CHECK(hd_target(1e-9) == doctest::Approx(2e-9).epsilon(1e-6));
    CHECK_THROWS_AS(hd_target(0.0), DomainError);
}
