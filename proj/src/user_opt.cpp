#include "user_opt.hpp"

#include <cmath>

namespace fdtwrc {

FSubproblemData make_f_data(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            const std::array<double, 2>& theta) {
    FSubproblemData d;
    d.a_1r = ch.h_1r.adjoint() * bf.w;
    d.a_2r = ch.h_2r.adjoint() * bf.w;
    d.a_11 = ch.h_11.adjoint() * bf.u_1;
    d.a_22 = ch.h_22.adjoint() * bf.u_2;
    d.a_r1 = std::norm((bf.u_1.adjoint() * ch.h_r1 * bf.v).value());
    d.a_r2 = std::norm((bf.u_2.adjoint() * ch.h_r2 * bf.v).value());
    d.a_rr = std::norm((bf.w.adjoint() * ch.h_rr * bf.v).value());
    d.v_norm2 = bf.v.squaredNorm();
    d.sigma2 = sigma2;
    d.theta = theta;
    return d;
}

double f_objective(const FSubproblemData& d, const VectorXcd& f_1, const VectorXcd& f_2) {
    const double g1 = std::norm((d.a_1r.adjoint() * f_1).value());
    const double g2 = std::norm((d.a_2r.adjoint() * f_2).value());
    return d.v_norm2 / (1.0 - d.a_rr) * (g1 + g2 + d.sigma2) + f_1.squaredNorm() +
           f_2.squaredNorm();
}

double f_constraint_slack(const FSubproblemData& d, const VectorXcd& f_1, const VectorXcd& f_2,
                          int i) {
    const double th = d.theta_of(i);
    const VectorXcd& f_i = (i == 1) ? f_1 : f_2;
    const VectorXcd& f_o = (i == 1) ? f_2 : f_1;
    const double g1 = std::norm((d.a_1r.adjoint() * f_1).value());
    const double g2 = std::norm((d.a_2r.adjoint() * f_2).value());
    const double g_other = std::norm((d.a_ir(3 - i).adjoint() * f_o).value());
    const double g_si = std::norm((d.a_ii(i).adjoint() * f_i).value());
    const double lhs = (1.0 - d.a_rr) * d.a_ri(i) * g_other;
    const double rhs = th * d.a_ri(i) * d.a_rr * (g1 + g2) +
                       th * (1.0 - d.a_rr) * (g_si + d.sigma2) + th * d.sigma2 * d.a_ri(i);
    return (lhs - rhs) / std::max({1e-300, std::abs(lhs), std::abs(rhs)});
}

FStepResult solve_f(const FSubproblemData& d, double solver_tol) {
    if (!(d.a_rr < 1.0)) throw LoopUnstableError("solve_f: a_rr must be < 1");
    const int m1 = static_cast<int>(d.a_1r.size());
    const int m2 = static_cast<int>(d.a_2r.size());
    const int off1 = 0, off2 = 2 * m1;
    const int T = 2 * m1 + 2 * m2;
    const int n = T + 1;

    ConeProgram prog(n);
    VectorXd c = VectorXd::Zero(n);
    c(T) = 1.0;
    prog.set_objective(c);

    // Epigraph of the quadratic objective (minus its constant part).
    const double k = std::sqrt(d.v_norm2 / (1.0 - d.a_rr));
    MatrixXd obj_rows = MatrixXd::Zero(4 + 2 * m1 + 2 * m2, n);
    obj_rows.topRows(2) = k * lift::place_block(lift::quad_norm_rows(d.a_1r), off1, n);
    obj_rows.middleRows(2, 2) = k * lift::place_block(lift::quad_norm_rows(d.a_2r), off2, n);
    obj_rows.middleRows(4, 2 * m1) =
        lift::place_block(MatrixXd::Identity(2 * m1, 2 * m1), off1, n);
    obj_rows.bottomRows(2 * m2) =
        lift::place_block(MatrixXd::Identity(2 * m2, 2 * m2), off2, n);
    VectorXd pt = VectorXd::Zero(n);
    pt(T) = 1.0;
    prog.add_rsoc(obj_rows, VectorXd::Zero(obj_rows.rows()), pt, 0.0, VectorXd::Zero(n), 1.0);

    // Phase-rotated SINR cone per user.
    for (int i = 1; i <= 2; ++i) {
        const double th = d.theta_of(i);
        const int off_other = (i == 1) ? off2 : off1;
        const int off_self = (i == 1) ? off1 : off2;
        const double loop_coef = std::sqrt(th * d.a_ri(i) * d.a_rr);
        const double si_coef = std::sqrt(th * (1.0 - d.a_rr));
        const double noise = std::sqrt(th * (1.0 - d.a_rr) * d.sigma2 + th * d.a_ri(i) * d.sigma2);

        MatrixXd a = MatrixXd::Zero(7, n);
        a.topRows(2) = loop_coef * lift::place_block(lift::quad_norm_rows(d.a_1r), off1, n);
        a.middleRows(2, 2) = loop_coef * lift::place_block(lift::quad_norm_rows(d.a_2r), off2, n);
        a.middleRows(4, 2) =
            si_coef * lift::place_block(lift::quad_norm_rows(d.a_ii(i)), off_self, n);
        VectorXd dvec = VectorXd::Zero(7);
        dvec(6) = noise;

        const VectorXd g = std::sqrt((1.0 - d.a_rr) * d.a_ri(i)) *
                           lift::place_row(lift::real_part_row(d.a_ir(3 - i)), off_other, n);
        prog.add_soc(a, dvec, g, 0.0);
    }

    // Feasibility a decade tighter than the duality gap: the returned pair
    // must re-satisfy the original quadratic constraints with margin.
    SolverOptions opts;
    opts.tol = solver_tol;
    opts.feastol = 0.05 * solver_tol;
    auto sol = solve(prog, opts);
    if (sol.status == SolveStatus::NumericFailure) {
        opts.tol = 10.0 * solver_tol;
        opts.feastol = 0.5 * solver_tol;
        sol = solve(prog, opts);
    }

    FStepResult res;
    res.status = sol.status;
    if (sol.status == SolveStatus::Optimal) {
        res.f_1 = lift::to_complex(sol.x.segment(off1, 2 * m1));
        res.f_2 = lift::to_complex(sol.x.segment(off2, 2 * m2));
        res.objective = sol.x(T) + d.v_norm2 / (1.0 - d.a_rr) * d.sigma2;
    }
    return res;
}

VectorXcd mmse_u(const VectorXcd& h_ri_v, const VectorXcd& h_ii_f, double sigma2) {
    if (h_ri_v.norm() < 1e-14) {
        throw DegenerateDirectionError("mmse_u: relayed signal direction is zero");
    }
    if (!(sigma2 > 0.0)) throw DomainError("mmse_u: sigma2 must be positive");
    // (sigma^2 I + b b^H)^{-1} a  via the rank-1 inverse identity
    const cplx b_dot_a = (h_ii_f.adjoint() * h_ri_v).value();
    VectorXcd u = h_ri_v - h_ii_f * (b_dot_a / (sigma2 + h_ii_f.squaredNorm()));
    return u / u.norm();
}

}  // namespace fdtwrc
