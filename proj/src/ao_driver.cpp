#include "ao_driver.hpp"

#include <chrono>
#include <cmath>

#include "relay_sca.hpp"
#include "user_opt.hpp"

namespace fdtwrc {

const char* scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::ProposedFD: return "ProposedFD";
        case SchemeKind::ZfFD: return "ZfFD";
        case SchemeKind::FdBaseline: return "FdBaseline";
        case SchemeKind::IdealFD: return "IdealFD";
        case SchemeKind::HalfDuplexAO: return "HalfDuplexAO";
        case SchemeKind::HalfDuplexBaseline: return "HalfDuplexBaseline";
    }
    return "?";
}

bool scheme_from_name(const std::string& name, SchemeKind& out) {
    for (SchemeKind k :
         {SchemeKind::ProposedFD, SchemeKind::ZfFD, SchemeKind::FdBaseline, SchemeKind::IdealFD,
          SchemeKind::HalfDuplexAO, SchemeKind::HalfDuplexBaseline}) {
        if (name == scheme_name(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

void AoConfig::validate() const {
    if (max_outer < 1 || sca_max < 1) throw ConfigError("AoConfig: iteration caps must be >= 1");
    if (!(tol_outer_rel > 0.0) || !(tol_sca_rel > 0.0) || !(solver_tol > 0.0) ||
        !(monotonicity_slack > 0.0)) {
        throw ConfigError("AoConfig: tolerances must be positive");
    }
    if (tol_outer_rel < solver_tol) {
        throw ConfigError("AoConfig: tol_outer_rel must be >= solver_tol");
    }
}

namespace {

/// Rescales (w, v) -> (w/t, v t) with t = ||w||. Every power and SINR in the
/// model is invariant under this map, and a unit-norm receive filter makes
/// the user-transmit subproblem's noise terms exact as written.
void normalize_relay_pair(BeamformerSet& bf) {
    const double t = bf.w.norm();
    if (t > 0.0 && std::abs(t - 1.0) > 1e-15) {
        bf.w /= t;
        bf.v *= t;
    }
}

}  // namespace

SolveReport run_ao(const ChannelSet& ch, const LinkBudget& budget, const AoConfig& cfg,
                   const BeamformerSet& init) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    SolveReport rep;
    rep.scheme = SchemeKind::ProposedFD;
    rep.targets = budget.theta;

    BeamformerSet bf = init;
    normalize_relay_pair(bf);

    double power = total_power(bf, ch, budget.sigma2);
    rep.outer_power.push_back(power);
    double last_recorded = power;
    bool breach = false;

    auto record_stage = [&](double p) {
        if (p > last_recorded * (1.0 + cfg.monotonicity_slack)) breach = true;
        last_recorded = p;
        return p;
    };

    rep.status = AoStatus::MaxIters;
    for (int it = 1; it <= cfg.max_outer && !breach; ++it) {
        std::array<double, 4> stages{};

        // relay transmit
        {
            const VSubproblemData vd = make_v_data(bf, ch, budget.sigma2, budget.theta);
            const ScaState st = sca_v(vd, bf.v, cfg.sca_max, cfg.tol_sca_rel, cfg.solver_tol);
            if (st.status == ScaStatus::Stalled) ++rep.sca_stalls;
            rep.stage_rejections += st.rejected_steps;
            rep.total_sca_iters += st.iterations;
            bf.v = st.iterate;
            stages[0] = record_stage(total_power(bf, ch, budget.sigma2));
        }

        // relay receive
        {
            const WSubproblemData wd = make_w_data(bf, ch, budget.sigma2, budget.theta);
            const ScaState st = sca_w(wd, bf.w, cfg.sca_max, cfg.tol_sca_rel, cfg.solver_tol);
            if (st.status == ScaStatus::Stalled) ++rep.sca_stalls;
            rep.stage_rejections += st.rejected_steps;
            rep.total_sca_iters += st.iterations;
            bf.w = st.iterate;
            normalize_relay_pair(bf);
            stages[1] = record_stage(total_power(bf, ch, budget.sigma2));
        }

        // user transmitters (exact convex solve)
        {
            const FSubproblemData fd = make_f_data(bf, ch, budget.sigma2, budget.theta);
            const FStepResult res = solve_f(fd, cfg.solver_tol);
            bool accepted = false;
            if (res.status == SolveStatus::Optimal) {
                const double slack = std::min(f_constraint_slack(fd, res.f_1, res.f_2, 1),
                                              f_constraint_slack(fd, res.f_1, res.f_2, 2));
                BeamformerSet cand = bf;
                cand.f_1 = res.f_1;
                cand.f_2 = res.f_2;
                const double cand_power = total_power(cand, ch, budget.sigma2);
                if (slack >= -1e-6 && cand_power <= last_recorded * (1.0 + 1e-9)) {
                    bf = cand;
                    accepted = true;
                }
            }
            if (!accepted) ++rep.stage_rejections;
            stages[2] = record_stage(total_power(bf, ch, budget.sigma2));
        }

        // user receivers (closed form; leaves the power unchanged)
        {
            for (int i = 1; i <= 2; ++i) {
                bf.u(i) = mmse_u(ch.h_ri(i) * bf.v, ch.h_ii(i) * bf.f(i), budget.sigma2);
            }
            stages[3] = record_stage(total_power(bf, ch, budget.sigma2));
        }

        rep.stage_power.push_back(stages);
        rep.outer_power.push_back(stages[3]);
        rep.iterations = it;

        const double next = stages[3];
        const double improve = (power - next) / std::max(power, 1e-300);
        power = next;
        if (breach) break;
        if (improve < cfg.tol_outer_rel) {
            rep.status = AoStatus::Converged;
            break;
        }
    }

    if (breach) {
        rep.status = AoStatus::Failed;
        rep.failure_reason = "MonotonicityBreach";
    }

    rep.final_bf = bf;
    rep.audit = check_feasible(bf, ch, budget.theta, budget.sigma2, 1e-4);
    if (rep.status != AoStatus::Failed && !rep.audit.feasible) {
        rep.status = AoStatus::Failed;
        rep.failure_reason = "final point failed the feasibility audit";
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

namespace {

SolveReport baseline_report(SchemeKind kind, const ChannelSet& ch, const LinkBudget& budget) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.scheme = kind;
    rep.targets = budget.theta;
    rep.final_bf = init_beamformers(ch, budget);
    rep.outer_power.push_back(total_power(rep.final_bf, ch, budget.sigma2));
    rep.iterations = 0;
    rep.audit = check_feasible(rep.final_bf, ch, budget.theta, budget.sigma2, 1e-4);
    rep.status = rep.audit.feasible ? AoStatus::Converged : AoStatus::Failed;
    if (!rep.audit.feasible) rep.failure_reason = "initial point failed the feasibility audit";
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace

SolveReport run_scheme(SchemeKind kind, const ChannelSet& ch, const LinkBudget& budget,
                       const AoConfig& cfg) {
    switch (kind) {
        case SchemeKind::ProposedFD: {
            SolveReport rep = run_ao(ch, budget, cfg, init_beamformers(ch, budget));
            rep.scheme = kind;
            return rep;
        }
        case SchemeKind::ZfFD:
            return zf_ao(ch, budget, cfg);
        case SchemeKind::FdBaseline:
            return baseline_report(kind, ch, budget);
        case SchemeKind::IdealFD: {
            const ChannelSet ideal = make_ideal(ch);
            SolveReport rep = run_ao(ideal, budget, cfg, init_beamformers(ideal, budget));
            rep.scheme = kind;
            return rep;
        }
        case SchemeKind::HalfDuplexAO: {
            const ChannelSet ideal = make_ideal(ch);
            LinkBudget hd = budget;
            hd.theta = {hd_target(budget.theta[0]), hd_target(budget.theta[1])};
            SolveReport rep = run_ao(ideal, hd, cfg, init_beamformers(ideal, hd));
            rep.scheme = kind;
            return rep;
        }
        case SchemeKind::HalfDuplexBaseline: {
            const ChannelSet ideal = make_ideal(ch);
            LinkBudget hd = budget;
            hd.theta = {hd_target(budget.theta[0]), hd_target(budget.theta[1])};
            return baseline_report(kind, ideal, hd);
        }
    }
    throw ConfigError("run_scheme: unknown scheme");
}

}  // namespace fdtwrc
