#include "relay_sca.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "rng.hpp"

namespace fdtwrc {

namespace {

constexpr double kMuFloor = 1e-8;        // keeps |loop|^2 <= 1 - kMuFloor
constexpr double kAcceptSlack = 1e-9;    // relative objective increase tolerated
constexpr double kAuditSlack = -1e-6;    // normalized original-constraint slack floor
constexpr double kDegenerate = 1e-12;

double safe_rel(double num, double scale) { return num / std::max(1e-300, scale); }

}  // namespace

VSubproblemData make_v_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta) {
    VSubproblemData d;
    d.g_1r = std::norm((bf.w.adjoint() * ch.h_1r * bf.f_1).value());
    d.g_2r = std::norm((bf.w.adjoint() * ch.h_2r * bf.f_2).value());
    d.g_11 = std::norm((bf.u_1.adjoint() * ch.h_11 * bf.f_1).value());
    d.g_22 = std::norm((bf.u_2.adjoint() * ch.h_22 * bf.f_2).value());
    d.g_r1 = ch.h_r1.adjoint() * bf.u_1;
    d.g_r2 = ch.h_r2.adjoint() * bf.u_2;
    d.g_rr = ch.h_rr.adjoint() * bf.w;
    d.w_norm2 = bf.w.squaredNorm();
    d.sigma2 = sigma2;
    d.theta = theta;
    return d;
}

WSubproblemData make_w_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta) {
    WSubproblemData d;
    d.q_1r = ch.h_1r * bf.f_1;
    d.q_2r = ch.h_2r * bf.f_2;
    d.q_11 = std::norm((bf.u_1.adjoint() * ch.h_11 * bf.f_1).value());
    d.q_22 = std::norm((bf.u_2.adjoint() * ch.h_22 * bf.f_2).value());
    d.q_r1 = std::norm((bf.u_1.adjoint() * ch.h_r1 * bf.v).value());
    d.q_r2 = std::norm((bf.u_2.adjoint() * ch.h_r2 * bf.v).value());
    d.q_rr = ch.h_rr * bf.v;
    d.v_norm2 = bf.v.squaredNorm();
    d.sigma2 = sigma2;
    d.theta = theta;
    return d;
}

double v_objective(const VSubproblemData& d, const VectorXcd& v) {
    const double a = std::norm((d.g_rr.adjoint() * v).value());
    if (a >= 1.0) throw LoopUnstableError("v_objective: loop gain >= 1");
    return (d.g_1r + d.g_2r + d.sigma2 * d.w_norm2) * v.squaredNorm() / (1.0 - a);
}

double w_objective(const WSubproblemData& d, const VectorXcd& w) {
    const double a = std::norm((w.adjoint() * d.q_rr).value());
    if (a >= 1.0) throw LoopUnstableError("w_objective: loop gain >= 1");
    const double num = std::norm((w.adjoint() * d.q_1r).value()) +
                       std::norm((w.adjoint() * d.q_2r).value()) +
                       d.sigma2 * w.squaredNorm();
    return d.v_norm2 * num / (1.0 - a);
}

double v_constraint_slack(const VSubproblemData& d, const VectorXcd& v, int i) {
    const double th = d.theta_of(i);
    const double q_ri = std::norm((d.g_ri(i).adjoint() * v).value());
    const double a = std::norm((d.g_rr.adjoint() * v).value());
    const double lhs = d.g_ir(3 - i) * q_ri + th * (d.g_ii(i) + d.sigma2) * a;
    const double rhs = (th * (d.g_1r + d.g_2r) + d.g_ir(3 - i)) * a * q_ri +
                       th * d.sigma2 * d.w_norm2 * q_ri + th * (d.g_ii(i) + d.sigma2);
    return safe_rel(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs)));
}

double w_constraint_slack(const WSubproblemData& d, const VectorXcd& w, int i) {
    const double th = d.theta_of(i);
    const double a = std::norm((w.adjoint() * d.q_rr).value());
    const double g1 = std::norm((w.adjoint() * d.q_1r).value());
    const double g2 = std::norm((w.adjoint() * d.q_2r).value());
    const double g_other = (i == 1) ? g2 : g1;
    const double lhs = d.q_ri(i) * g_other;
    const double rhs = d.q_ri(i) * a * (g_other + th * (g1 + g2)) +
                       th * d.sigma2 * d.q_ri(i) * w.squaredNorm() +
                       th * (d.q_ii(i) + d.sigma2) * (1.0 - a);
    return safe_rel(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs)));
}

MatrixXcd build_phi(const VSubproblemData& d, int i) {
    const VectorXcd& g_ri = d.g_ri(i);
    return d.g_ir(3 - i) * (g_ri * g_ri.adjoint()) +
           d.theta_of(i) * (d.g_ii(i) + d.sigma2) * (d.g_rr * d.g_rr.adjoint());
}

double minorant_upsilon(const MatrixXcd& phi, const VectorXcd& v_ref, const VectorXcd& v) {
    if (phi.rows() != v_ref.size() || phi.rows() != v.size()) {
        throw DimensionMismatchError("minorant_upsilon: inconsistent shapes");
    }
    const double cross = 2.0 * (v_ref.adjoint() * phi * v).value().real();
    const double at_ref = (v_ref.adjoint() * phi * v_ref).value().real();
    return cross - at_ref;
}

double minorant_delta(double rho_ref, double rho) {
    if (!(rho_ref > 0.0) || !(rho > 0.0)) {
        throw DomainError("minorant_delta: arguments must be positive");
    }
    return 2.0 / rho_ref - rho / (rho_ref * rho_ref);
}

Property1Report property1_diagnostics(const MatrixXcd& phi, const VectorXcd& v_ref,
                                      double rho_ref, int sample_count, double fd_step) {
    Property1Report rep;
    const int m = static_cast<int>(v_ref.size());
    RandomStream rng(0x9d1aULL);

    auto upsilon = [&](const VectorXcd& v) { return (v.adjoint() * phi * v).value().real(); };

    // (i) minorization on random samples
    const double vscale = v_ref.norm() + 1.0;
    double worst = 0.0;
    int fails = 0;
    for (int t = 0; t < sample_count; ++t) {
        VectorXcd v(m);
        for (int k = 0; k < m; ++k) v(k) = vscale * rng.complex_gaussian();
        const double truth = upsilon(v);
        const double gap = truth - minorant_upsilon(phi, v_ref, v);
        const double tol = 1e-10 * std::max(1.0, std::abs(truth));
        if (gap < -tol) ++fails;
        worst = std::min(worst, gap);

        const double rho = rho_ref * std::exp(3.0 * (rng.uniform() - 0.5));
        const double dgap = 1.0 / rho - minorant_delta(rho_ref, rho);
        if (dgap < -1e-10 * std::max(1.0, 1.0 / rho)) ++fails;
        worst = std::min(worst, dgap);
    }
    rep.minorization_failures = fails;
    rep.worst_minorization_gap = worst;
    rep.minorization_ok = (fails == 0);

    // (ii) tangency at the reference
    const double at_ref = upsilon(v_ref);
    const double ups_err = std::abs(minorant_upsilon(phi, v_ref, v_ref) - at_ref) /
                           std::max(1.0, std::abs(at_ref));
    const double del_err =
        std::abs(minorant_delta(rho_ref, rho_ref) - 1.0 / rho_ref) * std::min(rho_ref, 1.0);
    rep.tangency_err = std::max(ups_err, del_err);
    rep.tangency_ok = rep.tangency_err <= 1e-10;

    // (iii) finite-difference gradient match at the reference
    VectorXd x = lift::to_real(v_ref);
    const int n = 2 * m;
    VectorXd g_true(n), g_min(n);
    for (int k = 0; k < n; ++k) {
        const double h = fd_step * std::max(1.0, std::abs(x(k)));
        VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        const VectorXcd vp = lift::to_complex(xp);
        const VectorXcd vm = lift::to_complex(xm);
        g_true(k) = (upsilon(vp) - upsilon(vm)) / (2.0 * h);
        g_min(k) = (minorant_upsilon(phi, v_ref, vp) - minorant_upsilon(phi, v_ref, vm)) / (2.0 * h);
    }
    const double g_err = (g_true - g_min).norm() / std::max(1.0, g_true.norm());

    const double hr = fd_step * rho_ref;  // relative step keeps rho - h positive
    const double d_true = (1.0 / (rho_ref + hr) - 1.0 / (rho_ref - hr)) / (2.0 * hr);
    const double d_min =
        (minorant_delta(rho_ref, rho_ref + hr) - minorant_delta(rho_ref, rho_ref - hr)) /
        (2.0 * hr);
    const double d_err = std::abs(d_true - d_min) / std::max(1.0, std::abs(d_true));

    rep.gradient_rel_err = std::max(g_err, d_err);
    rep.gradient_ok = rep.gradient_rel_err <= 1e-5;
    return rep;
}

// ---------------------------------------------------------------------------
// Conic subproblem builders
// ---------------------------------------------------------------------------

namespace {

struct SolveOutcome {
    SolveStatus status = SolveStatus::NumericFailure;
    VectorXd x;
};

SolveOutcome solve_with_retry(const ConeProgram& prog, double tol) {
    SolverOptions opts;
    opts.tol = tol;
    opts.feastol = tol;
    auto sol = solve(prog, opts);
    if (sol.status == SolveStatus::NumericFailure) {
        opts.tol = 10.0 * tol;
        opts.feastol = 10.0 * tol;
        sol = solve(prog, opts);
    }
    return {sol.status, sol.x};
}

}  // namespace

VStepResult solve_v_step(const VSubproblemData& d, const VectorXcd& v_ref,
                         const std::array<double, 2>& rho_ref, double solver_tol) {
    const int m = static_cast<int>(v_ref.size());
    const int n = 2 * m + 6;
    const int XI = 2 * m, MU = 2 * m + 1;
    auto RHO = [&](int i) { return 2 * m + 1 + i; };  // i in {1,2}
    auto LAM = [&](int i) { return 2 * m + 3 + i; };

    // Everything is optimized in reference units: the transmit vector in
    // units of ||v_ref||, rho_i relative to rho_ref_i and lambda_i relative
    // to its natural magnitude a_scale / rho_ref_i. This keeps all cone
    // variables O(1) regardless of the physical power levels.
    const double s_v = v_ref.norm();
    if (!(s_v > 0.0)) throw DegenerateDirectionError("solve_v_step: zero reference");
    const VectorXcd vt_ref = v_ref / s_v;
    const std::array<VectorXcd, 2> a_ri = {s_v * d.g_r1, s_v * d.g_r2};
    const VectorXcd a_rr = s_v * d.g_rr;
    const double a_ref = std::norm((a_rr.adjoint() * vt_ref).value());
    const double a_scale = std::max({a_ref, 1e-6 * a_rr.squaredNorm(), 1e-300});

    ConeProgram prog(n);
    VectorXd c = VectorXd::Zero(n);
    c(XI) = 1.0;
    prog.set_objective(c);

    for (int i = 1; i <= 2; ++i) {
        if (!(rho_ref[i - 1] > 0.0)) throw DomainError("solve_v_step: rho_ref must be positive");
        const double lam_scale = a_scale / rho_ref[i - 1];
        const double th = d.theta_of(i);
        const MatrixXcd phi = d.g_ir(3 - i) * (a_ri[i - 1] * a_ri[i - 1].adjoint()) +
                              th * (d.g_ii(i) + d.sigma2) * (a_rr * a_rr.adjoint());
        const VectorXcd phi_ref = phi * vt_ref;
        const double ref_quad = (vt_ref.adjoint() * phi * vt_ref).value().real();

        // theta_i sigma^2 ||w||^2 |g_ri^H v|^2 <= minorant - coupling - constants,
        // normalized by the constraint's own magnitude
        const double p0 = -ref_quad - th * (d.g_ii(i) + d.sigma2);
        const double s_c = std::max(std::abs(p0), 1e-300);
        MatrixXd a1 = std::sqrt(th * d.sigma2 * d.w_norm2 / s_c) *
                      lift::place_block(lift::quad_norm_rows(a_ri[i - 1]), 0, n);
        VectorXd p = lift::place_row((2.0 / s_c) * lift::real_part_row(phi_ref), 0, n);
        p(LAM(i)) = -(th * (d.g_1r + d.g_2r) + d.g_ir(3 - i)) * lam_scale / s_c;
        prog.add_rsoc(a1, VectorXd::Zero(a1.rows()), p, p0 / s_c, VectorXd::Zero(n), 1.0);

        // |g_ri^H v|^2 <= 2/rho_ref - rho/rho_ref^2, in units of 1/rho_ref
        MatrixXd a2 = std::sqrt(rho_ref[i - 1]) *
                      lift::place_block(lift::quad_norm_rows(a_ri[i - 1]), 0, n);
        VectorXd p2 = VectorXd::Zero(n);
        p2(RHO(i)) = -1.0;
        prog.add_rsoc(a2, VectorXd::Zero(2), p2, 2.0, VectorXd::Zero(n), 1.0);

        // |g_rr^H v|^2 <= lambda_i rho_i, in units of a_scale
        MatrixXd a3 = (1.0 / std::sqrt(a_scale)) *
                      lift::place_block(lift::quad_norm_rows(a_rr), 0, n);
        VectorXd pl = VectorXd::Zero(n), ql = VectorXd::Zero(n);
        pl(LAM(i)) = 1.0;
        ql(RHO(i)) = 1.0;
        prog.add_rsoc(a3, VectorXd::Zero(2), pl, 0.0, ql, 0.0);
    }

    // ||v||^2 <= mu * xi, with xi normalized so the reference objective is 1
    const double s_obj = 1.0 / std::max(1.0 - a_ref, kMuFloor);
    MatrixXd eye = (1.0 / std::sqrt(s_obj)) *
                   lift::place_block(MatrixXd::Identity(2 * m, 2 * m), 0, n);
    VectorXd pm = VectorXd::Zero(n), qm = VectorXd::Zero(n);
    pm(MU) = 1.0;
    qm(XI) = 1.0;
    prog.add_rsoc(eye, VectorXd::Zero(2 * m), pm, 0.0, qm, 0.0);

    // mu + |g_rr^H v|^2 <= 1
    MatrixXd arr = lift::place_block(lift::quad_norm_rows(a_rr), 0, n);
    VectorXd pmu = VectorXd::Zero(n);
    pmu(MU) = -1.0;
    prog.add_rsoc(arr, VectorXd::Zero(2), pmu, 1.0, VectorXd::Zero(n), 1.0);

    // strict loop margin
    VectorXd mu_row = VectorXd::Zero(n);
    mu_row(MU) = -1.0;
    prog.add_linear(mu_row, -kMuFloor);

    const SolveOutcome out = solve_with_retry(prog, solver_tol);
    VStepResult res;
    res.status = out.status;
    if (out.status == SolveStatus::Optimal) {
        res.v = s_v * lift::to_complex(out.x.head(2 * m));
        res.rho = {out.x(RHO(1)) * rho_ref[0], out.x(RHO(2)) * rho_ref[1]};
        res.xi = out.x(XI) * s_obj * s_v * s_v;
    }
    return res;
}

VStepResult solve_w_step(const WSubproblemData& d, const VectorXcd& w_ref,
                         const std::array<double, 2>& rho_ref, double solver_tol) {
    const int nr = static_cast<int>(w_ref.size());
    const int n = 2 * nr + 6;
    const int XI = 2 * nr, MU = 2 * nr + 1;
    auto RHO = [&](int j) { return 2 * nr + 1 + j; };
    auto LAM = [&](int j) { return 2 * nr + 3 + j; };

    // Same reference-unit parametrization as the transmit step.
    const double s_w = w_ref.norm();
    if (!(s_w > 0.0)) throw DegenerateDirectionError("solve_w_step: zero reference");
    const VectorXcd wt_ref = w_ref / s_w;
    const std::array<VectorXcd, 2> a_j = {s_w * d.q_1r, s_w * d.q_2r};
    const VectorXcd a_rr = s_w * d.q_rr;
    const double a_ref = std::norm((a_rr.adjoint() * wt_ref).value());
    const double a_scale = std::max({a_ref, 1e-6 * a_rr.squaredNorm(), 1e-300});

    ConeProgram prog(n);
    VectorXd c = VectorXd::Zero(n);
    c(XI) = 1.0;
    prog.set_objective(c);

    for (int i = 1; i <= 2; ++i) {
        if (!(rho_ref[i - 1] > 0.0)) throw DomainError("solve_w_step: rho_ref must be positive");
        const double th = d.theta_of(i);
        const MatrixXcd phi = d.q_ri(i) * (a_j[2 - i] * a_j[2 - i].adjoint()) +
                              th * (d.q_ii(i) + d.sigma2) * (a_rr * a_rr.adjoint());
        const VectorXcd phi_ref = phi * wt_ref;
        const double ref_quad = (wt_ref.adjoint() * phi * wt_ref).value().real();

        // Convex noise term stays a cone; the quartic couplings go through
        // the shared lambda_j slacks with coefficient q_ri (theta + [j=3-i]).
        // The whole constraint is normalized by its own magnitude.
        const double p0 = -ref_quad - th * (d.q_ii(i) + d.sigma2);
        const double s_c = std::max(std::abs(p0), 1e-300);
        MatrixXd a1 = std::sqrt(th * d.sigma2 * d.q_ri(i) / s_c) * s_w *
                      lift::place_block(MatrixXd::Identity(2 * nr, 2 * nr), 0, n);
        VectorXd p = lift::place_row((2.0 / s_c) * lift::real_part_row(phi_ref), 0, n);
        for (int j = 1; j <= 2; ++j) {
            const double lam_scale = a_scale / rho_ref[j - 1];
            p(LAM(j)) = -d.q_ri(i) * (th + ((j == 3 - i) ? 1.0 : 0.0)) * lam_scale / s_c;
        }
        prog.add_rsoc(a1, VectorXd::Zero(a1.rows()), p, p0 / s_c, VectorXd::Zero(n), 1.0);
    }

    for (int j = 1; j <= 2; ++j) {
        // |w^H q_jR|^2 <= 2/rho_ref - rho/rho_ref^2, in units of 1/rho_ref
        MatrixXd a2 = std::sqrt(rho_ref[j - 1]) *
                      lift::place_block(lift::quad_norm_rows(a_j[j - 1]), 0, n);
        VectorXd p2 = VectorXd::Zero(n);
        p2(RHO(j)) = -1.0;
        prog.add_rsoc(a2, VectorXd::Zero(2), p2, 2.0, VectorXd::Zero(n), 1.0);

        // |w^H q_RR|^2 <= lambda_j rho_j, in units of a_scale
        MatrixXd a3 = (1.0 / std::sqrt(a_scale)) *
                      lift::place_block(lift::quad_norm_rows(a_rr), 0, n);
        VectorXd pl = VectorXd::Zero(n), ql = VectorXd::Zero(n);
        pl(LAM(j)) = 1.0;
        ql(RHO(j)) = 1.0;
        prog.add_rsoc(a3, VectorXd::Zero(2), pl, 0.0, ql, 0.0);
    }

    // ||S w||^2 <= xi_w mu_w with S^H S = q1 q1^H + q2 q2^H + sigma^2 I;
    // xi_w is normalized so the reference objective is 1.
    MatrixXd s_rows(4 + 2 * nr, n);
    s_rows.topRows(2) = lift::place_block(lift::quad_norm_rows(a_j[0]), 0, n);
    s_rows.middleRows(2, 2) = lift::place_block(lift::quad_norm_rows(a_j[1]), 0, n);
    s_rows.bottomRows(2 * nr) = std::sqrt(d.sigma2) * s_w *
                                lift::place_block(MatrixXd::Identity(2 * nr, 2 * nr), 0, n);
    const double num_ref = (s_rows.leftCols(2 * nr) * lift::to_real(wt_ref)).squaredNorm();
    const double s_obj = std::max(num_ref / std::max(1.0 - a_ref, kMuFloor), 1e-300);
    s_rows /= std::sqrt(s_obj);
    VectorXd pm = VectorXd::Zero(n), qm = VectorXd::Zero(n);
    pm(XI) = 1.0;
    qm(MU) = 1.0;
    prog.add_rsoc(s_rows, VectorXd::Zero(s_rows.rows()), pm, 0.0, qm, 0.0);

    // mu_w + |w^H q_RR|^2 <= 1
    MatrixXd arr = lift::place_block(lift::quad_norm_rows(a_rr), 0, n);
    VectorXd pmu = VectorXd::Zero(n);
    pmu(MU) = -1.0;
    prog.add_rsoc(arr, VectorXd::Zero(2), pmu, 1.0, VectorXd::Zero(n), 1.0);

    VectorXd mu_row = VectorXd::Zero(n);
    mu_row(MU) = -1.0;
    prog.add_linear(mu_row, -kMuFloor);

    const SolveOutcome out = solve_with_retry(prog, solver_tol);
    VStepResult res;
    res.status = out.status;
    if (out.status == SolveStatus::Optimal) {
        res.v = s_w * lift::to_complex(out.x.head(2 * nr));
        res.rho = {out.x(RHO(1)) * rho_ref[0], out.x(RHO(2)) * rho_ref[1]};
        res.xi = out.x(XI) * s_obj;
    }
    return res;
}

// ---------------------------------------------------------------------------
// SCA loops
// ---------------------------------------------------------------------------

namespace {

struct ScaHooks {
    std::function<double(const VectorXcd&)> objective;
    std::function<double(const VectorXcd&)> min_slack;
    std::function<double(const VectorXcd&, int)> gain2;
    std::function<VStepResult(const VectorXcd&, const std::array<double, 2>&)> step;
};

ScaState run_sca(const ScaHooks& hooks, VectorXcd init, int max_iters, double tol_rel) {
    // Guard the 1/|gain|^2 slack references against degenerate directions.
    for (int i = 1; i <= 2; ++i) {
        if (std::sqrt(hooks.gain2(init, i)) < kDegenerate) {
            RandomStream rng(0x5eedULL);
            VectorXcd dir(init.size());
            for (Eigen::Index k = 0; k < init.size(); ++k) dir(k) = rng.complex_gaussian();
            init += 1e-6 * init.norm() * dir.normalized();
            if (std::sqrt(hooks.gain2(init, i)) < kDegenerate) {
                throw DegenerateDirectionError("sca: channel direction orthogonal to iterate");
            }
        }
    }

    ScaState st;
    st.iterate = init;
    st.rho = {1.0 / hooks.gain2(init, 1), 1.0 / hooks.gain2(init, 2)};
    st.objective.push_back(hooks.objective(init));
    st.min_constraint_slack = hooks.min_slack(init);

    for (int it = 1; it <= max_iters; ++it) {
        VStepResult res = hooks.step(st.iterate, st.rho);
        if (res.status != SolveStatus::Optimal) {
            st.status = ScaStatus::Stalled;
            return st;
        }
        const double cur = st.objective.back();
        double next = 0.0;
        bool ok = true;
        try {
            next = hooks.objective(res.v);
        } catch (const LoopUnstableError&) {
            ok = false;
        }
        const double slack = ok ? hooks.min_slack(res.v) : 0.0;
        if (!ok || next > cur * (1.0 + kAcceptSlack) || slack < kAuditSlack) {
            // No acceptable progress; keep the reference point.
            ++st.rejected_steps;
            st.status = ScaStatus::Converged;
            return st;
        }
        st.iterate = res.v;
        st.rho = res.rho;
        st.last_xi = res.xi;
        st.objective.push_back(next);
        st.iterations = it;
        st.min_constraint_slack = std::min(st.min_constraint_slack, slack);
        if (cur - next < tol_rel * std::max(cur, 1e-300)) {
            st.status = ScaStatus::Converged;
            return st;
        }
    }
    st.status = ScaStatus::MaxIters;
    return st;
}

}  // namespace

ScaState sca_v(const VSubproblemData& d, const VectorXcd& v_init, int max_iters, double tol_rel,
               double solver_tol) {
    ScaHooks hooks;
    hooks.objective = [&](const VectorXcd& v) { return v_objective(d, v); };
    hooks.min_slack = [&](const VectorXcd& v) {
        return std::min(v_constraint_slack(d, v, 1), v_constraint_slack(d, v, 2));
    };
    hooks.gain2 = [&](const VectorXcd& v, int i) {
        return std::norm((d.g_ri(i).adjoint() * v).value());
    };
    hooks.step = [&](const VectorXcd& v, const std::array<double, 2>& rho) {
        return solve_v_step(d, v, rho, solver_tol);
    };
    return run_sca(hooks, v_init, max_iters, tol_rel);
}

ScaState sca_w(const WSubproblemData& d, const VectorXcd& w_init, int max_iters, double tol_rel,
               double solver_tol) {
    ScaHooks hooks;
    hooks.objective = [&](const VectorXcd& w) { return w_objective(d, w); };
    hooks.min_slack = [&](const VectorXcd& w) {
        return std::min(w_constraint_slack(d, w, 1), w_constraint_slack(d, w, 2));
    };
    hooks.gain2 = [&](const VectorXcd& w, int j) {
        return std::norm((w.adjoint() * d.q_ir(j)).value());
    };
    hooks.step = [&](const VectorXcd& w, const std::array<double, 2>& rho) {
        return solve_w_step(d, w, rho, solver_tol);
    };
    return run_sca(hooks, w_init, max_iters, tol_rel);
}

}  // namespace fdtwrc
