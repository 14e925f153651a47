#include "model.hpp"

#include <cmath>

namespace fdtwrc {

namespace {

constexpr double kSimLoopLimit = 1.0 - 1e-3;

MatrixXcd draw_matrix(RandomStream& rng, int rows, int cols, double scale) {
    MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = scale * rng.complex_gaussian();
        }
    }
    return m;
}

void require_finite(const MatrixXcd& m, const char* name) {
    if (!m.allFinite()) {
        throw DomainError(std::string("channel matrix has non-finite entries: ") + name);
    }
}

}  // namespace

void SystemDims::validate() const {
    if (m_r < 1 || m_1 < 1 || m_2 < 1 || n_r < 1 || n_1 < 1 || n_2 < 1) {
        throw DimensionMismatchError("all antenna counts must be >= 1");
    }
}

void LinkBudget::validate() const {
    if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
    if (!(theta[0] > 0.0) || !(theta[1] > 0.0)) throw DomainError("SINR targets must be positive");
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in [0, 1]");
}

void ChannelSet::validate(const SystemDims& dims) const {
    auto check = [](const MatrixXcd& m, int rows, int cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw DimensionMismatchError(std::string("bad channel shape: ") + name);
        }
        require_finite(m, name);
    };
    check(h_1r, dims.n_r, dims.m_1, "h_1r");
    check(h_2r, dims.n_r, dims.m_2, "h_2r");
    check(h_rr, dims.n_r, dims.m_r, "h_rr");
    check(h_r1, dims.n_1, dims.m_r, "h_r1");
    check(h_r2, dims.n_2, dims.m_r, "h_r2");
    check(h_11, dims.n_1, dims.m_1, "h_11");
    check(h_22, dims.n_2, dims.m_2, "h_22");
}

ChannelSet generate_channels(RandomStream& rng, const SystemDims& dims, const LinkBudget& budget) {
    dims.validate();
    budget.validate();
    const double s = std::sqrt(budget.rho);
    ChannelSet ch;
    ch.h_1r = draw_matrix(rng, dims.n_r, dims.m_1, s);
    ch.h_2r = draw_matrix(rng, dims.n_r, dims.m_2, s);
    ch.h_rr = budget.kappa * draw_matrix(rng, dims.n_r, dims.m_r, s);
    ch.h_r1 = draw_matrix(rng, dims.n_1, dims.m_r, s);
    ch.h_r2 = draw_matrix(rng, dims.n_2, dims.m_r, s);
    ch.h_11 = budget.kappa * draw_matrix(rng, dims.n_1, dims.m_1, s);
    ch.h_22 = budget.kappa * draw_matrix(rng, dims.n_2, dims.m_2, s);
    return ch;
}

double loop_gain(const VectorXcd& w, const VectorXcd& v, const MatrixXcd& h_rr) {
    if (w.size() != h_rr.rows() || v.size() != h_rr.cols()) {
        throw DimensionMismatchError("loop_gain: inconsistent shapes");
    }
    return std::abs((w.adjoint() * h_rr * v).value());
}

double loop_gain(const BeamformerSet& bf, const ChannelSet& ch) {
    return loop_gain(bf.w, bf.v, ch.h_rr);
}

double relay_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2) {
    const double loop = loop_gain(bf, ch);
    if (loop >= 1.0) {
        throw LoopUnstableError("relay_power: loop gain >= 1");
    }
    const double g1 = std::norm((bf.w.adjoint() * ch.h_1r * bf.f_1).value());
    const double g2 = std::norm((bf.w.adjoint() * ch.h_2r * bf.f_2).value());
    const double num = bf.v.squaredNorm() * (g1 + g2 + sigma2 * bf.w.squaredNorm());
    return num / (1.0 - loop * loop);
}

double sinr(int i, const BeamformerSet& bf, const ChannelSet& ch, double sigma2) {
    const double loop = loop_gain(bf, ch);
    if (loop >= 1.0) {
        throw LoopUnstableError("sinr: loop gain >= 1");
    }
    const int j = 3 - i;
    const double a_rr = loop * loop;
    const double q_ri = std::norm((bf.u(i).adjoint() * ch.h_ri(i) * bf.v).value());
    const double g1 = std::norm((bf.w.adjoint() * ch.h_1r * bf.f_1).value());
    const double g2 = std::norm((bf.w.adjoint() * ch.h_2r * bf.f_2).value());
    const double g_j = (j == 1) ? g1 : g2;
    const double g_ii = std::norm((bf.u(i).adjoint() * ch.h_ii(i) * bf.f(i)).value());
    const double denom = q_ri * a_rr / (1.0 - a_rr) * (g1 + g2) +
                         sigma2 * q_ri * bf.w.squaredNorm() / (1.0 - a_rr) + g_ii + sigma2;
    return q_ri * g_j / denom;
}

double total_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2) {
    return relay_power(bf, ch, sigma2) + bf.f_1.squaredNorm() + bf.f_2.squaredNorm();
}

FeasibilityReport check_feasible(const BeamformerSet& bf, const ChannelSet& ch,
                                 const std::array<double, 2>& targets, double sigma2,
                                 double tol_rel) {
    FeasibilityReport rep;
    rep.loop = loop_gain(bf, ch);
    rep.u_norm_err[0] = std::abs(bf.u_1.norm() - 1.0);
    rep.u_norm_err[1] = std::abs(bf.u_2.norm() - 1.0);
    bool ok = rep.loop < 1.0 && rep.u_norm_err[0] <= 1e-9 && rep.u_norm_err[1] <= 1e-9;
    for (int i = 1; i <= 2; ++i) {
        const double s = (rep.loop < 1.0) ? sinr(i, bf, ch, sigma2) : 0.0;
        rep.sinr[i - 1] = s;
        rep.sinr_margin[i - 1] = s - targets[i - 1] * (1.0 - tol_rel);
        ok = ok && (rep.sinr_margin[i - 1] >= 0.0);
    }
    rep.feasible = ok;
    return rep;
}

double simulate_relay_power(const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                            std::int64_t n_steps, std::int64_t burn_in, RandomStream& rng) {
    const double loop = loop_gain(bf, ch);
    if (loop > kSimLoopLimit) {
        throw LoopUnstableError("simulate_relay_power: loop gain too close to 1");
    }
    if (n_steps < 10 * burn_in) {
        throw DomainError("simulate_relay_power: n_steps must be >= 10*burn_in");
    }
    const VectorXcd b1 = ch.h_1r * bf.f_1;
    const VectorXcd b2 = ch.h_2r * bf.f_2;
    const VectorXcd hv = ch.h_rr * bf.v;
    const double sig = std::sqrt(sigma2);
    const double v2 = bf.v.squaredNorm();
    const Eigen::Index nr = b1.size();

    cplx t_prev = 0.0;  // w^H r[n-1]
    VectorXcd r(nr), noise(nr);
    double acc = 0.0;
    std::int64_t count = 0;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (n >= burn_in) {
            acc += v2 * std::norm(t_prev);  // ||x_R[n]||^2 = ||v||^2 |w^H r[n-1]|^2
            ++count;
        }
        const cplx x1 = rng.qpsk();
        const cplx x2 = rng.qpsk();
        for (Eigen::Index k = 0; k < nr; ++k) noise(k) = sig * rng.complex_gaussian();
        r = b1 * x1 + b2 * x2 + hv * t_prev + noise;
        t_prev = (bf.w.adjoint() * r).value();
    }
    return acc / static_cast<double>(count);
}

double simulate_sinr(int i, const BeamformerSet& bf, const ChannelSet& ch, double sigma2,
                     std::int64_t n_steps, std::int64_t burn_in, RandomStream& rng) {
    const double loop = loop_gain(bf, ch);
    if (loop > kSimLoopLimit) {
        throw LoopUnstableError("simulate_sinr: loop gain too close to 1");
    }
    if (n_steps < 10 * burn_in) {
        throw DomainError("simulate_sinr: n_steps must be >= 10*burn_in");
    }
    const cplx a1 = (bf.w.adjoint() * ch.h_1r * bf.f_1).value();
    const cplx a2 = (bf.w.adjoint() * ch.h_2r * bf.f_2).value();
    const cplx a_des = (i == 1) ? a2 : a1;  // one-hop gain of the other user's stream
    const cplx c = (bf.w.adjoint() * ch.h_rr * bf.v).value();
    const cplx d = (bf.u(i).adjoint() * ch.h_ri(i) * bf.v).value();
    const cplx si = (bf.u(i).adjoint() * ch.h_ii(i) * bf.f(i)).value();
    const double sig = std::sqrt(sigma2);
    const double w_norm = bf.w.norm();
    const Eigen::Index ni = bf.u(i).size();

    // Relay-side recursion state: t[n] = a1 x1[n] + a2 x2[n] + c t[n-1] + nu[n]
    cplx t_nm1 = 0.0, t_nm2 = 0.0, nu_nm1 = 0.0;
    cplx x1_nm1 = 0.0, x2_nm1 = 0.0;
    VectorXcd z(ni);

    double p_sig = 0.0, p_int = 0.0;
    std::int64_t count = 0;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        const cplx x1 = rng.qpsk();
        const cplx x2 = rng.qpsk();
        const cplx nu = sig * w_norm * rng.complex_gaussian();
        for (Eigen::Index k = 0; k < ni; ++k) z(k) = sig * rng.complex_gaussian();

        if (n >= burn_in) {
            const cplx x_des_prev = (i == 1) ? x2_nm1 : x1_nm1;
            const cplx desired = d * a_des * x_des_prev;
            // Everything reaching the receiver except the one-hop desired
            // symbol and the (known, cancelled) one-hop echo of x_i.
            const cplx tail = c * t_nm2 + nu_nm1;
            const cplx x_own = (i == 1) ? x1 : x2;
            const cplx interf = d * tail + si * x_own + (bf.u(i).adjoint() * z).value();
            p_sig += std::norm(desired);
            p_int += std::norm(interf);
            ++count;
        }

        t_nm2 = t_nm1;
        t_nm1 = a1 * x1 + a2 * x2 + c * t_nm1 + nu;
        nu_nm1 = nu;
        x1_nm1 = x1;
        x2_nm1 = x2;
    }
    return (p_sig / static_cast<double>(count)) / (p_int / static_cast<double>(count));
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) throw DomainError("watts_to_dbm: nonpositive input");
    return 10.0 * std::log10(watts) + 30.0;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) {
    if (!(lin > 0.0)) throw DomainError("linear_to_db: nonpositive input");
    return 10.0 * std::log10(lin);
}

}  // namespace fdtwrc
