#include "baselines.hpp"

#include <Eigen/QR>
#include <chrono>
#include <cmath>

namespace fdtwrc {

namespace {

constexpr double kGainFloor = 1e-20;  // squared-gain floor for scaling denominators

/// Orthonormal basis of the orthogonal complement of a single vector r,
/// i.e. the null space of the row r^H. A zero vector has the full space as
/// its complement.
MatrixXcd null_space_of_row(const VectorXcd& r) {
    const int m = static_cast<int>(r.size());
    if (r.norm() == 0.0) {
        return MatrixXcd::Identity(m, m);
    }
    if (m < 2) {
        throw RankDeficientError("null_space_of_row: empty null space");
    }
    Eigen::HouseholderQR<MatrixXcd> qr(r);
    const MatrixXcd q = qr.householderQ();
    return q.rightCols(m - 1);
}

/// Principal right singular direction of the single row t^H: t normalized.
VectorXcd principal_direction(const Eigen::RowVectorXcd& row) {
    const double nrm = row.norm();
    if (nrm * nrm < kGainFloor) {
        throw RankDeficientError("principal_direction: vanishing row");
    }
    return row.adjoint() / nrm;
}

/// Normalized projection of a onto the orthogonal complement of b.
VectorXcd project_away(const VectorXcd& a, const VectorXcd& b) {
    VectorXcd out = a;
    const double bn2 = b.squaredNorm();
    if (bn2 > 0.0) {
        out -= b * ((b.adjoint() * a).value() / bn2);
    }
    const double n = out.norm();
    if (n * n < kGainFloor) {
        throw DegenerateDirectionError("project_away: projection numerically zero");
    }
    return out / n;
}

}  // namespace

BeamformerSet init_beamformers(const ChannelSet& ch, const LinkBudget& budget) {
    const int n_r = static_cast<int>(ch.h_rr.rows());
    budget.validate();

    BeamformerSet bf;
    bf.w = VectorXcd::Constant(n_r, std::sqrt(1.0 / n_r));
    bf.u_1 = VectorXcd::Constant(ch.h_r1.rows(), std::sqrt(1.0 / ch.h_r1.rows()));
    bf.u_2 = VectorXcd::Constant(ch.h_r2.rows(), std::sqrt(1.0 / ch.h_r2.rows()));
    const double w_norm2 = bf.w.squaredNorm();

    for (int i = 1; i <= 2; ++i) {
        const MatrixXcd z_i = null_space_of_row(ch.h_ii(i).adjoint() * bf.u(i));
        const Eigen::RowVectorXcd row = bf.w.adjoint() * ch.h_ir(i) * z_i;
        const VectorXcd c_i = principal_direction(row);
        const double gain2 = std::norm((row * c_i).value());
        if (gain2 < kGainFloor) {
            throw RankDeficientError("init_beamformers: user transmit gain vanishes");
        }
        const double theta_other = budget.theta_of(3 - i);
        bf.f(i) = std::sqrt(2.0 * theta_other * budget.sigma2 * w_norm2 / gain2) * (z_i * c_i);
    }

    const MatrixXcd z_r = null_space_of_row(ch.h_rr.adjoint() * bf.w);
    const Eigen::RowVectorXcd combined =
        (bf.u_1.adjoint() * ch.h_r1 + bf.u_2.adjoint() * ch.h_r2) * z_r;
    const VectorXcd c_r = principal_direction(combined);

    double alpha = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const double gain2 = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * (z_r * c_r)).value());
        if (gain2 < kGainFloor) {
            throw RankDeficientError("init_beamformers: relay direction gain vanishes");
        }
        const double th = budget.theta_of(i);
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        const double denom = fwd - th * budget.sigma2 * w_norm2;
        if (denom <= 0.0) {
            throw InfeasibleDirectionError("init_beamformers: feasibility margin vanished");
        }
        alpha = std::max(alpha, th * budget.sigma2 / gain2 / denom);
    }
    bf.v = std::sqrt(alpha) * (z_r * c_r);
    return bf;
}

void zf_f_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget) {
    for (int i = 1; i <= 2; ++i) {
        const MatrixXcd z_i = null_space_of_row(ch.h_ii(i).adjoint() * bf.u(i));
        const Eigen::RowVectorXcd row = bf.w.adjoint() * ch.h_ir(i) * z_i;
        const VectorXcd c_i = principal_direction(row);
        const double gain2 = std::norm((row * c_i).value());
        const int other = 3 - i;
        const double a_ro = std::norm((bf.u(other).adjoint() * ch.h_ri(other) * bf.v).value());
        if (gain2 < kGainFloor || a_ro < kGainFloor) {
            throw InfeasibleDirectionError("zf_f_step: scaling denominator vanishes");
        }
        const double th = budget.theta_of(other);
        const double alpha =
            th * (budget.sigma2 * a_ro * bf.w.squaredNorm() + budget.sigma2) / (a_ro * gain2);
        bf.f(i) = std::sqrt(alpha) * (z_i * c_i);
    }
}

void zf_u_step(const ChannelSet& ch, BeamformerSet& bf) {
    for (int i = 1; i <= 2; ++i) {
        bf.u(i) = project_away(ch.h_ri(i) * bf.v, ch.h_ii(i) * bf.f(i));
    }
}

void zf_v_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget) {
    const MatrixXcd z_r = null_space_of_row(ch.h_rr.adjoint() * bf.w);
    const Eigen::RowVectorXcd combined =
        (bf.u_1.adjoint() * ch.h_r1 + bf.u_2.adjoint() * ch.h_r2) * z_r;
    const VectorXcd c_r = principal_direction(combined);
    const VectorXcd dir = z_r * c_r;

    double alpha = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const double gain2 = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * dir).value());
        const double th = budget.theta_of(i);
        const double fwd = std::norm((bf.w.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        const double denom = fwd - th * budget.sigma2 * bf.w.squaredNorm();
        if (denom <= 0.0 || gain2 < kGainFloor) {
            throw InfeasibleDirectionError("zf_v_step: direction cannot meet the targets");
        }
        alpha = std::max(alpha, th * budget.sigma2 / gain2 / denom);
    }
    bf.v = std::sqrt(alpha) * dir;
}

void zf_w_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget) {
    const VectorXcd combined = ch.h_1r * bf.f_1 + ch.h_2r * bf.f_2;
    const VectorXcd dir = project_away(combined, ch.h_rr * bf.v);

    double alpha2 = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const double q_ri = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * bf.v).value());
        const double th = budget.theta_of(i);
        const double a_i =
            q_ri * std::norm((dir.adjoint() * ch.h_ir(3 - i) * bf.f(3 - i)).value());
        const double b_i = th * budget.sigma2 * q_ri;  // ||dir|| = 1
        const double c_i = th * budget.sigma2;
        if (a_i <= b_i) {
            throw InfeasibleDirectionError("zf_w_step: direction cannot meet the targets");
        }
        alpha2 = std::max(alpha2, c_i / (a_i - b_i));
    }
    bf.w = std::sqrt(alpha2) * dir;
}

SolveReport zf_ao(const ChannelSet& ch, const LinkBudget& budget, const AoConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.scheme = SchemeKind::ZfFD;
    rep.targets = budget.theta;

    BeamformerSet bf = init_beamformers(ch, budget);
    double power = total_power(bf, ch, budget.sigma2);
    rep.outer_power.push_back(power);

    rep.status = AoStatus::MaxIters;
    for (int it = 1; it <= cfg.max_outer; ++it) {
        BeamformerSet trial = bf;
        std::array<double, 4> stages{};
        try {
            zf_v_step(ch, trial, budget);
            stages[0] = total_power(trial, ch, budget.sigma2);
            zf_w_step(ch, trial, budget);
            stages[1] = total_power(trial, ch, budget.sigma2);
            zf_f_step(ch, trial, budget);
            stages[2] = total_power(trial, ch, budget.sigma2);
            zf_u_step(ch, trial);
            stages[3] = total_power(trial, ch, budget.sigma2);
        } catch (const InfeasibleDirectionError&) {
            if (it == 1) throw;  // could not even start; let the caller drop the draw
            break;               // keep the last improving iterate
        }
        const double next = stages[3];
        if (next > power * (1.0 + 1e-9)) {
            ++rep.stage_rejections;  // cycle no longer improves
            rep.status = AoStatus::Converged;
            break;
        }
        bf = trial;
        rep.stage_power.push_back(stages);
        rep.outer_power.push_back(next);
        rep.iterations = it;
        const double improve = (power - next) / std::max(power, 1e-300);
        power = next;
        if (improve < cfg.tol_outer_rel) {
            rep.status = AoStatus::Converged;
            break;
        }
    }
    if (rep.status == AoStatus::MaxIters && rep.iterations < cfg.max_outer) {
        rep.status = AoStatus::Converged;
    }

    rep.final_bf = bf;
    rep.audit = check_feasible(bf, ch, budget.theta, budget.sigma2, 1e-4);
    if (!rep.audit.feasible) {
        rep.status = AoStatus::Failed;
        rep.failure_reason = "final point failed the feasibility audit";
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ChannelSet make_ideal(const ChannelSet& ch) {
    ChannelSet out = ch;
    out.h_rr.setZero();
    out.h_11.setZero();
    out.h_22.setZero();
    return out;
}

double hd_target(double theta_linear) {
    if (!(theta_linear > 0.0)) throw DomainError("hd_target: theta must be positive");
    return (1.0 + theta_linear) * (1.0 + theta_linear) - 1.0;
}

}  // namespace fdtwrc
