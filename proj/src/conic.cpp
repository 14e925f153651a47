#include "conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fdtwrc {

// ---------------------------------------------------------------------------
// Program container
// ---------------------------------------------------------------------------

ConeProgram::ConeProgram(int n_vars) : n_(n_vars), c_(VectorXd::Zero(n_vars)) {
    if (n_vars < 0) throw DimensionMismatchError("ConeProgram: negative variable count");
}

void ConeProgram::set_objective(const VectorXd& c) {
    if (c.size() != n_) throw DimensionMismatchError("set_objective: bad size");
    c_ = c;
}

int ConeProgram::add_linear(const VectorXd& row, double rhs, LinearSense sense) {
    if (row.size() != n_) throw DimensionMismatchError("add_linear: bad row size");
    linear_.push_back({row, rhs, sense});
    return static_cast<int>(linear_.size()) - 1;
}

int ConeProgram::add_soc(const MatrixXd& a, const VectorXd& d, const VectorXd& g, double h) {
    if (a.cols() != n_ || g.size() != n_ || d.size() != a.rows()) {
        throw DimensionMismatchError("add_soc: inconsistent dimensions");
    }
    soc_.push_back({a, d, g, h});
    return static_cast<int>(soc_.size()) - 1;
}

int ConeProgram::add_rsoc(const MatrixXd& a, const VectorXd& d, const VectorXd& p, double p0,
                          const VectorXd& q, double q0) {
    if (a.cols() != n_ || p.size() != n_ || q.size() != n_ || d.size() != a.rows()) {
        throw DimensionMismatchError("add_rsoc: inconsistent dimensions");
    }
    rsoc_.push_back({a, d, p, p0, q, q0});
    return static_cast<int>(rsoc_.size()) - 1;
}

double ConeProgram::max_violation(const VectorXd& x) const {
    double worst = 0.0;
    auto rel = [](double num, double scale) { return num / std::max(1.0, scale); };
    for (const auto& lc : linear_) {
        const double lhs = lc.row.dot(x);
        const double raw = (lc.sense == LinearSense::Equal) ? std::abs(lhs - lc.rhs)
                                                            : std::max(0.0, lhs - lc.rhs);
        worst = std::max(worst, rel(raw, std::max(std::abs(lhs), std::abs(lc.rhs))));
    }
    for (const auto& sc : soc_) {
        const double lhs = (sc.a * x + sc.d).norm();
        const double rhs = sc.g.dot(x) + sc.h;
        worst = std::max(worst, rel(std::max(0.0, lhs - rhs), std::max(lhs, std::abs(rhs))));
    }
    for (const auto& rc : rsoc_) {
        const double lhs = (rc.a * x + rc.d).squaredNorm();
        const double pt = rc.p.dot(x) + rc.p0;
        const double qt = rc.q.dot(x) + rc.q0;
        const double scale = std::max({lhs, std::abs(pt * qt), std::abs(pt), std::abs(qt)});
        worst = std::max(worst, rel(std::max(0.0, -pt), scale));
        worst = std::max(worst, rel(std::max(0.0, -qt), scale));
        worst = std::max(worst, rel(std::max(0.0, lhs - pt * qt), scale));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Complex lifting helpers
// ---------------------------------------------------------------------------

namespace lift {

VectorXd real_part_row(const Eigen::VectorXcd& a) {
    const int m = static_cast<int>(a.size());
    VectorXd r(2 * m);
    r.head(m) = a.real();
    r.tail(m) = a.imag();
    return r;
}

VectorXd imag_part_row(const Eigen::VectorXcd& a) {
    const int m = static_cast<int>(a.size());
    VectorXd r(2 * m);
    r.head(m) = -a.imag();
    r.tail(m) = a.real();
    return r;
}

MatrixXd quad_norm_rows(const Eigen::VectorXcd& a) {
    MatrixXd q(2, 2 * a.size());
    q.row(0) = real_part_row(a).transpose();
    q.row(1) = imag_part_row(a).transpose();
    return q;
}

MatrixXd place_block(const MatrixXd& rows, int offset, int n) {
    if (offset < 0 || offset + rows.cols() > n) {
        throw DimensionMismatchError("place_block: block out of range");
    }
    MatrixXd out = MatrixXd::Zero(rows.rows(), n);
    out.middleCols(offset, rows.cols()) = rows;
    return out;
}

VectorXd place_row(const VectorXd& row, int offset, int n) {
    if (offset < 0 || offset + row.size() > n) {
        throw DimensionMismatchError("place_row: row out of range");
    }
    VectorXd out = VectorXd::Zero(n);
    out.segment(offset, row.size()) = row;
    return out;
}

VectorXd to_real(const Eigen::VectorXcd& z) {
    const int m = static_cast<int>(z.size());
    VectorXd x(2 * m);
    x.head(m) = z.real();
    x.tail(m) = z.imag();
    return x;
}

Eigen::VectorXcd to_complex(const VectorXd& x) {
    const int m = static_cast<int>(x.size() / 2);
    Eigen::VectorXcd z(m);
    z.real() = x.head(m);
    z.imag() = x.tail(m);
    return z;
}

}  // namespace lift

// ---------------------------------------------------------------------------
// Standard-form assembly:  min c^T x  s.t.  A x = b,  G x + s = h,
// s in R_+^{n_lp} x SOC(q_1) x ... x SOC(q_N).
// Rotated cones enter through the usual 2-rotation
//   ||u||^2 <= p q,  p,q >= 0   <=>   ||(2u, p - q)|| <= p + q.
// ---------------------------------------------------------------------------

namespace {

struct StandardForm {
    int n = 0;
    MatrixXd g_mat, a_mat;
    VectorXd h, b, c;
    int n_lp = 0;
    std::vector<int> soc_dims;
    VectorXd col_scale;  // x = col_scale .* x_tilde
};

StandardForm to_standard_form(const ConeProgram& prog) {
    const int n = prog.n_vars();
    int m = 0;
    int n_lp = 0;
    for (const auto& lc : prog.linear_constraints()) {
        if (lc.sense == LinearSense::LessEqual) {
            ++n_lp;
        }
    }
    // Keep the cone nonempty so the embedding always has a barrier.
    const bool need_dummy = (n_lp == 0 && prog.soc_constraints().empty() &&
                             prog.rsoc_constraints().empty());
    if (need_dummy) ++n_lp;
    m += n_lp;

    std::vector<int> soc_dims;
    for (const auto& sc : prog.soc_constraints()) {
        soc_dims.push_back(static_cast<int>(sc.a.rows()) + 1);
        m += soc_dims.back();
    }
    for (const auto& rc : prog.rsoc_constraints()) {
        soc_dims.push_back(static_cast<int>(rc.a.rows()) + 2);
        m += soc_dims.back();
    }

    int p = 0;
    for (const auto& lc : prog.linear_constraints()) {
        if (lc.sense == LinearSense::Equal) ++p;
    }

    StandardForm sf;
    sf.n = n;
    sf.n_lp = n_lp;
    sf.soc_dims = std::move(soc_dims);
    sf.g_mat = MatrixXd::Zero(m, n);
    sf.h = VectorXd::Zero(m);
    sf.a_mat = MatrixXd::Zero(p, n);
    sf.b = VectorXd::Zero(p);
    sf.c = prog.objective();

    int row = 0;
    for (const auto& lc : prog.linear_constraints()) {
        if (lc.sense == LinearSense::LessEqual) {
            sf.g_mat.row(row) = lc.row.transpose();
            sf.h(row) = lc.rhs;
            ++row;
        }
    }
    if (need_dummy) {
        sf.h(row) = 1.0;
        ++row;
    }
    for (const auto& sc : prog.soc_constraints()) {
        sf.g_mat.row(row) = -sc.g.transpose();
        sf.h(row) = sc.h;
        ++row;
        sf.g_mat.middleRows(row, sc.a.rows()) = -sc.a;
        sf.h.segment(row, sc.a.rows()) = sc.d;
        row += static_cast<int>(sc.a.rows());
    }
    for (const auto& rc : prog.rsoc_constraints()) {
        sf.g_mat.row(row) = -(rc.p + rc.q).transpose();
        sf.h(row) = rc.p0 + rc.q0;
        ++row;
        sf.g_mat.middleRows(row, rc.a.rows()) = -2.0 * rc.a;
        sf.h.segment(row, rc.a.rows()) = 2.0 * rc.d;
        row += static_cast<int>(rc.a.rows());
        sf.g_mat.row(row) = -(rc.p - rc.q).transpose();
        sf.h(row) = rc.p0 - rc.q0;
        ++row;
    }

    int eq = 0;
    for (const auto& lc : prog.linear_constraints()) {
        if (lc.sense == LinearSense::Equal) {
            sf.a_mat.row(eq) = lc.row.transpose();
            sf.b(eq) = lc.rhs;
            ++eq;
        }
    }
    return sf;
}

// Ruiz-style equilibration. Row scaling is uniform inside each cone block so
// cone membership is preserved.
void equilibrate(StandardForm& sf) {
    const int m = static_cast<int>(sf.g_mat.rows());
    const int p = static_cast<int>(sf.a_mat.rows());
    const int n = sf.n;
    sf.col_scale = VectorXd::Ones(n);

    auto block_ranges = [&]() {
        std::vector<std::pair<int, int>> r;
        for (int i = 0; i < sf.n_lp; ++i) r.emplace_back(i, 1);
        int at = sf.n_lp;
        for (int dim : sf.soc_dims) {
            r.emplace_back(at, dim);
            at += dim;
        }
        return r;
    }();

    for (int round = 0; round < 3; ++round) {
        for (const auto& [start, len] : block_ranges) {
            double mx = sf.g_mat.middleRows(start, len).cwiseAbs().maxCoeff();
            mx = std::max(mx, sf.h.segment(start, len).cwiseAbs().maxCoeff());
            if (mx > 0.0) {
                const double s = 1.0 / std::sqrt(mx);
                sf.g_mat.middleRows(start, len) *= s;
                sf.h.segment(start, len) *= s;
            }
        }
        for (int i = 0; i < p; ++i) {
            double mx = sf.a_mat.row(i).cwiseAbs().maxCoeff();
            mx = std::max(mx, std::abs(sf.b(i)));
            if (mx > 0.0) {
                const double s = 1.0 / std::sqrt(mx);
                sf.a_mat.row(i) *= s;
                sf.b(i) *= s;
            }
        }
        for (int j = 0; j < n; ++j) {
            double mx = (m > 0) ? sf.g_mat.col(j).cwiseAbs().maxCoeff() : 0.0;
            if (p > 0) mx = std::max(mx, sf.a_mat.col(j).cwiseAbs().maxCoeff());
            if (mx > 0.0) {
                const double s = 1.0 / std::sqrt(mx);
                sf.g_mat.col(j) *= s;
                if (p > 0) sf.a_mat.col(j) *= s;
                sf.col_scale(j) *= s;
            }
        }
    }
    sf.c = sf.c.cwiseProduct(sf.col_scale);
}

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point solver with Nesterov-Todd scaling
// and a Mehrotra predictor-corrector step.
// ---------------------------------------------------------------------------

struct ConeLayout {
    int n_lp = 0;
    std::vector<int> soc_dims;
    int m = 0;
    int degree = 0;  // barrier degree: one per LP row, one per SOC block

    VectorXd identity() const {
        VectorXd e = VectorXd::Zero(m);
        e.head(n_lp).setOnes();
        int at = n_lp;
        for (int dim : soc_dims) {
            e(at) = 1.0;
            at += dim;
        }
        return e;
    }
};

class HsdSolver {
   public:
    HsdSolver(const StandardForm& sf, const SolverOptions& opts) : sf_(sf), opts_(opts) {
        lay_.n_lp = sf.n_lp;
        lay_.soc_dims = sf.soc_dims;
        lay_.m = static_cast<int>(sf.g_mat.rows());
        lay_.degree = sf.n_lp + static_cast<int>(sf.soc_dims.size());
        n_ = sf.n;
        p_ = static_cast<int>(sf.a_mat.rows());
        m_ = lay_.m;
        e_ = lay_.identity();
        w_blocks_.resize(sf.soc_dims.size());
    }

    enum class Exit { Optimal, PrimalInfeasible, DualInfeasible, Numerics, MaxIters };

    Exit run();

    VectorXd primal() const { return x_ / tau_; }
    int iterations() const { return iter_; }

   private:
    // scaled-space state
    const StandardForm& sf_;
    SolverOptions opts_;
    ConeLayout lay_;
    int n_ = 0, p_ = 0, m_ = 0;
    VectorXd e_;

    VectorXd x_, y_, z_, s_, lambda_;
    double tau_ = 1.0, kap_ = 1.0;

    // NT scaling: per LP entry sqrt(s/z); per SOC block a dense symmetric W.
    VectorXd lp_w_;
    std::vector<MatrixXd> w_blocks_;

    Eigen::PartialPivLU<MatrixXd> lu_;
    MatrixXd kkt_;

    // residuals and statistics
    VectorXd rx_, ry_, rz_;
    double rt_ = 0.0, hresx_ = 0.0, hresy_ = 0.0, hresz_ = 0.0;
    double cx_ = 0.0, by_ = 0.0, hz_ = 0.0;
    double gap_ = 0.0, mu_ = 0.0, pcost_ = 0.0, dcost_ = 0.0;
    double pres_ = 0.0, dres_ = 0.0;
    double relgap_ = std::numeric_limits<double>::quiet_NaN();
    double pinfres_ = std::numeric_limits<double>::quiet_NaN();
    double dinfres_ = std::numeric_limits<double>::quiet_NaN();
    double resx0_ = 1.0, resy0_ = 1.0, resz0_ = 1.0;
    int iter_ = 0;

    static constexpr double kDelta = 1e-11;       // static KKT regularization
    static constexpr double kStepMax = 0.999;
    static constexpr double kStepMin = 1e-7;
    static constexpr double kGamma = 0.99;
    static constexpr double kSigmaMin = 1e-4;
    static constexpr double kSigmaMax = 1.0;

    bool update_scalings();
    void build_kkt();
    void solve_kkt(const VectorXd& rhs, VectorXd& dx, VectorXd& dy, VectorXd& dz) const;
    void compute_residuals();
    void update_statistics();
    VectorXd apply_w(const VectorXd& v) const;
    VectorXd cone_product(const VectorXd& u, const VectorXd& v) const;
    VectorXd cone_divide(const VectorXd& u, const VectorXd& w) const;
    void bring_to_cone(VectorXd& v) const;
    double line_search(const VectorXd& ds_by_w, const VectorXd& w_dz, double dtau,
                       double dkap) const;
    Exit classify(double feastol, double abstol, double reltol) const;
};

bool HsdSolver::update_scalings() {
    lp_w_ = VectorXd::Zero(lay_.n_lp);
    for (int i = 0; i < lay_.n_lp; ++i) {
        if (s_(i) <= 0.0 || z_(i) <= 0.0) return false;
        lp_w_(i) = std::sqrt(s_(i) / z_(i));
    }
    int at = lay_.n_lp;
    for (size_t k = 0; k < lay_.soc_dims.size(); ++k) {
        const int dim = lay_.soc_dims[k];
        const auto sb = s_.segment(at, dim);
        const auto zb = z_.segment(at, dim);
        const double sres = sb(0) * sb(0) - sb.tail(dim - 1).squaredNorm();
        const double zres = zb(0) * zb(0) - zb.tail(dim - 1).squaredNorm();
        if (sres <= 0.0 || zres <= 0.0) return false;
        const double snorm = std::sqrt(sres);
        const double znorm = std::sqrt(zres);
        const VectorXd sbar = sb / snorm;
        const VectorXd zbar = zb / znorm;
        const double eta = std::sqrt(snorm / znorm);
        double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        // w_bar = (sbar + J zbar) / (2 gamma), J = diag(1, -I); J-norm is 1.
        const double a = (sbar(0) + zbar(0)) / (2.0 * gamma);
        const VectorXd q = (sbar.tail(dim - 1) - zbar.tail(dim - 1)) / (2.0 * gamma);
        MatrixXd wm(dim, dim);
        wm(0, 0) = a;
        wm.block(0, 1, 1, dim - 1) = q.transpose();
        wm.block(1, 0, dim - 1, 1) = q;
        wm.block(1, 1, dim - 1, dim - 1) =
            MatrixXd::Identity(dim - 1, dim - 1) + q * q.transpose() / (1.0 + a);
        w_blocks_[k] = eta * wm;
        at += dim;
    }
    lambda_ = apply_w(z_);
    return true;
}

VectorXd HsdSolver::apply_w(const VectorXd& v) const {
    VectorXd out(m_);
    out.head(lay_.n_lp) = lp_w_.cwiseProduct(v.head(lay_.n_lp));
    int at = lay_.n_lp;
    for (size_t k = 0; k < lay_.soc_dims.size(); ++k) {
        const int dim = lay_.soc_dims[k];
        out.segment(at, dim) = w_blocks_[k] * v.segment(at, dim);
        at += dim;
    }
    return out;
}

VectorXd HsdSolver::cone_product(const VectorXd& u, const VectorXd& v) const {
    VectorXd w(m_);
    w.head(lay_.n_lp) = u.head(lay_.n_lp).cwiseProduct(v.head(lay_.n_lp));
    int at = lay_.n_lp;
    for (int dim : lay_.soc_dims) {
        w(at) = u.segment(at, dim).dot(v.segment(at, dim));
        w.segment(at + 1, dim - 1) =
            u(at) * v.segment(at + 1, dim - 1) + v(at) * u.segment(at + 1, dim - 1);
        at += dim;
    }
    return w;
}

VectorXd HsdSolver::cone_divide(const VectorXd& u, const VectorXd& w) const {
    VectorXd v(m_);
    v.head(lay_.n_lp) = w.head(lay_.n_lp).cwiseQuotient(u.head(lay_.n_lp));
    int at = lay_.n_lp;
    for (int dim : lay_.soc_dims) {
        const double u0 = u(at);
        const double w0 = w(at);
        const auto u1 = u.segment(at + 1, dim - 1);
        const auto w1 = w.segment(at + 1, dim - 1);
        const double rho = u0 * u0 - u1.squaredNorm();
        const double zeta = u1.dot(w1);
        v(at) = (u0 * w0 - zeta) / rho;
        v.segment(at + 1, dim - 1) = ((zeta / u0 - w0) / rho) * u1 + w1 / u0;
        at += dim;
    }
    return v;
}

void HsdSolver::bring_to_cone(VectorXd& v) const {
    double alpha = -1.0;
    for (int i = 0; i < lay_.n_lp; ++i) alpha = std::max(alpha, -v(i));
    int at = lay_.n_lp;
    for (int dim : lay_.soc_dims) {
        alpha = std::max(alpha, v.segment(at + 1, dim - 1).norm() - v(at));
        at += dim;
    }
    if (alpha >= 0.0) v += (1.0 + alpha) * e_;
}

void HsdSolver::build_kkt() {
    const int dim = n_ + p_ + m_;
    kkt_ = MatrixXd::Zero(dim, dim);
    kkt_.topLeftCorner(n_, n_).diagonal().setConstant(kDelta);
    if (p_ > 0) {
        kkt_.block(0, n_, n_, p_) = sf_.a_mat.transpose();
        kkt_.block(n_, 0, p_, n_) = sf_.a_mat;
        kkt_.block(n_, n_, p_, p_).diagonal().setConstant(-kDelta);
    }
    kkt_.block(0, n_ + p_, n_, m_) = sf_.g_mat.transpose();
    kkt_.block(n_ + p_, 0, m_, n_) = sf_.g_mat;
    auto wsq = kkt_.block(n_ + p_, n_ + p_, m_, m_);
    for (int i = 0; i < lay_.n_lp; ++i) wsq(i, i) = -lp_w_(i) * lp_w_(i) - kDelta;
    int at = lay_.n_lp;
    for (size_t k = 0; k < lay_.soc_dims.size(); ++k) {
        const int d = lay_.soc_dims[k];
        wsq.block(at, at, d, d) = -(w_blocks_[k] * w_blocks_[k]);
        wsq.block(at, at, d, d).diagonal().array() -= kDelta;
        at += d;
    }
    lu_.compute(kkt_);
}

void HsdSolver::solve_kkt(const VectorXd& rhs, VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
    VectorXd sol = lu_.solve(rhs);
    // Iterative refinement against the unregularized system.
    for (int ref = 0; ref < 2; ++ref) {
        VectorXd err = rhs;
        const auto ux = sol.head(n_);
        const auto uy = sol.segment(n_, p_);
        const auto uz = sol.tail(m_);
        err.head(n_) -= sf_.g_mat.transpose() * uz;
        if (p_ > 0) {
            err.head(n_) -= sf_.a_mat.transpose() * uy;
            err.segment(n_, p_) -= sf_.a_mat * ux;
        }
        err.tail(m_) -= sf_.g_mat * ux;
        VectorXd wsq_uz(m_);
        wsq_uz.head(lay_.n_lp) =
            lp_w_.cwiseProduct(lp_w_).cwiseProduct(uz.head(lay_.n_lp));
        int at = lay_.n_lp;
        for (size_t k = 0; k < lay_.soc_dims.size(); ++k) {
            const int d = lay_.soc_dims[k];
            wsq_uz.segment(at, d) = w_blocks_[k] * (w_blocks_[k] * uz.segment(at, d));
            at += d;
        }
        err.tail(m_) += wsq_uz;
        if (err.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
        sol += lu_.solve(err);
    }
    dx = sol.head(n_);
    dy = sol.segment(n_, p_);
    dz = sol.tail(m_);
}

void HsdSolver::compute_residuals() {
    rx_ = -sf_.g_mat.transpose() * z_;
    if (p_ > 0) rx_ -= sf_.a_mat.transpose() * y_;
    hresx_ = rx_.norm();
    rx_ -= tau_ * sf_.c;

    if (p_ > 0) {
        ry_ = sf_.a_mat * x_;
        hresy_ = ry_.norm();
        ry_ -= tau_ * sf_.b;
    } else {
        ry_.resize(0);
        hresy_ = 0.0;
    }

    rz_ = s_ + sf_.g_mat * x_;
    hresz_ = rz_.norm();
    rz_ -= tau_ * sf_.h;

    cx_ = sf_.c.dot(x_);
    by_ = (p_ > 0) ? sf_.b.dot(y_) : 0.0;
    hz_ = sf_.h.dot(z_);
    rt_ = kap_ + cx_ + by_ + hz_;
}

void HsdSolver::update_statistics() {
    gap_ = s_.dot(z_);
    mu_ = (gap_ + kap_ * tau_) / (lay_.degree + 1);
    pcost_ = cx_ / tau_;
    dcost_ = -(hz_ + by_) / tau_;

    if (pcost_ < 0.0) {
        relgap_ = gap_ / (-pcost_);
    } else if (dcost_ > 0.0) {
        relgap_ = gap_ / dcost_;
    } else {
        relgap_ = std::numeric_limits<double>::quiet_NaN();
    }

    const double nx = x_.norm(), ny = (p_ > 0) ? y_.norm() : 0.0;
    const double nz = z_.norm(), ns = s_.norm();
    const double nry = (p_ > 0) ? ry_.norm() / std::max(resy0_ + nx, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(resz0_ + nx + ns, 1.0);
    pres_ = std::max(nry, nrz) / tau_;
    dres_ = rx_.norm() / std::max(resx0_ + ny + nz, 1.0) / tau_;

    pinfres_ = std::numeric_limits<double>::quiet_NaN();
    dinfres_ = std::numeric_limits<double>::quiet_NaN();
    if ((hz_ + by_) / std::max(ny + nz, 1.0) < -opts_.tol) {
        pinfres_ = hresx_ / std::max(ny + nz, 1.0);
    }
    if (cx_ / std::max(nx, 1.0) < -opts_.tol) {
        dinfres_ = std::max(hresy_ / std::max(nx, 1.0), hresz_ / std::max(nx + ns, 1.0));
    }
}

HsdSolver::Exit HsdSolver::classify(double feastol, double abstol, double reltol) const {
    if ((-cx_ > 0.0 || -by_ - hz_ >= -abstol) && pres_ < feastol && dres_ < feastol &&
        (gap_ < abstol || (std::isfinite(relgap_) && relgap_ < reltol))) {
        return Exit::Optimal;
    }
    if (std::isfinite(dinfres_) && dinfres_ < feastol && tau_ < kap_) {
        return Exit::DualInfeasible;
    }
    if ((std::isfinite(pinfres_) && pinfres_ < feastol && tau_ < kap_) ||
        (tau_ < feastol && kap_ < feastol && std::isfinite(pinfres_) && pinfres_ < feastol)) {
        return Exit::PrimalInfeasible;
    }
    return Exit::MaxIters;  // caller interprets as "not converged yet"
}

HsdSolver::Exit HsdSolver::run() {
    resx0_ = std::max(1.0, sf_.c.norm());
    resy0_ = std::max(1.0, sf_.b.norm());
    resz0_ = std::max(1.0, sf_.h.norm());

    // Initialization: with identity scaling solve for a primal/dual guess and
    // push the cone variables strictly inside.
    lp_w_ = VectorXd::Ones(lay_.n_lp);
    for (size_t k = 0; k < lay_.soc_dims.size(); ++k) {
        w_blocks_[k] = MatrixXd::Identity(lay_.soc_dims[k], lay_.soc_dims[k]);
    }
    build_kkt();

    VectorXd rhs1 = VectorXd::Zero(n_ + p_ + m_);
    rhs1.segment(n_, p_) = sf_.b;
    rhs1.tail(m_) = sf_.h;
    VectorXd dx1(n_), dy1(p_), dz1(m_);
    solve_kkt(rhs1, dx1, dy1, dz1);
    x_ = dx1;
    s_ = -dz1;
    bring_to_cone(s_);

    VectorXd rhs2 = VectorXd::Zero(n_ + p_ + m_);
    rhs2.head(n_) = -sf_.c;
    VectorXd dx2(n_), dy2(p_), dz2(m_);
    solve_kkt(rhs2, dx2, dy2, dz2);
    y_ = dy2;
    z_ = dz2;
    bring_to_cone(z_);

    tau_ = 1.0;
    kap_ = 1.0;
    rhs1.head(n_) = -sf_.c;

    double pres_prev = std::numeric_limits<double>::max();

    Exit code = Exit::MaxIters;
    for (iter_ = 0; iter_ <= opts_.max_iters; ++iter_) {
        compute_residuals();
        update_statistics();
        if (opts_.verbose) {
            std::fprintf(stderr,
                         "it %3d  pcost % .6e dcost % .6e gap %.3e pres %.3e dres %.3e "
                         "tau %.3e kap %.3e\n",
                         iter_, pcost_, dcost_, gap_, pres_, dres_, tau_, kap_);
        }

        if (iter_ > 0 &&
            ((pres_ > opts_.feastol && pres_ > 500.0 * pres_prev) || gap_ < 0.0)) {
            if (opts_.verbose) std::fprintf(stderr, "exit: safeguard pres %g prev %g gap %g\n", pres_, pres_prev, gap_);
            code = Exit::Numerics;
            break;
        }
        pres_prev = pres_;

        code = classify(opts_.feastol, opts_.tol, opts_.tol);
        if (code != Exit::MaxIters) break;
        if (iter_ == opts_.max_iters) {
            break;
        }
        if (!std::isfinite(pcost_)) {
            code = Exit::Numerics;
            break;
        }

        if (!update_scalings()) {
            if (opts_.verbose) std::fprintf(stderr, "exit: update_scalings failed\n");
            code = Exit::Numerics;
            break;
        }
        build_kkt();

        solve_kkt(rhs1, dx1, dy1, dz1);
        const double dtau_denom =
            kap_ / tau_ - sf_.c.dot(dx1) - ((p_ > 0) ? sf_.b.dot(dy1) : 0.0) - sf_.h.dot(dz1);
        if (!std::isfinite(dtau_denom) || std::abs(dtau_denom) < 1e-300) {
            if (opts_.verbose) std::fprintf(stderr, "exit: dtau_denom %g\n", dtau_denom);
            code = Exit::Numerics;
            break;
        }

        // Affine (predictor) direction.
        rhs2.head(n_) = rx_;
        if (p_ > 0) rhs2.segment(n_, p_) = -ry_;
        rhs2.tail(m_) = s_ - rz_;
        solve_kkt(rhs2, dx2, dy2, dz2);

        const double dtau_aff =
            (rt_ - kap_ + sf_.c.dot(dx2) + ((p_ > 0) ? sf_.b.dot(dy2) : 0.0) + sf_.h.dot(dz2)) /
            dtau_denom;
        VectorXd dz_aff = dz2 + dtau_aff * dz1;
        VectorXd w_dz_aff = apply_w(dz_aff);
        VectorXd ds_aff_by_w = -w_dz_aff - lambda_;
        const double dkap_aff = -kap_ - kap_ / tau_ * dtau_aff;

        const double alpha_aff = line_search(ds_aff_by_w, w_dz_aff, dtau_aff, dkap_aff);
        const double sigma =
            std::clamp(std::pow(1.0 - alpha_aff, 3.0), kSigmaMin, kSigmaMax);

        // Combined (corrector) direction.
        VectorXd ds_tilde = cone_product(lambda_, lambda_) +
                            cone_product(ds_aff_by_w, w_dz_aff) - sigma * mu_ * e_;
        VectorXd lam_div_ds = cone_divide(lambda_, ds_tilde);

        rhs2.head(n_) = (1.0 - sigma) * rx_;
        if (p_ > 0) rhs2.segment(n_, p_) = -(1.0 - sigma) * ry_;
        rhs2.tail(m_) = -(1.0 - sigma) * rz_ + apply_w(lam_div_ds);
        solve_kkt(rhs2, dx2, dy2, dz2);

        const double bkap = kap_ * tau_ + dkap_aff * dtau_aff - sigma * mu_;
        const double dtau = ((1.0 - sigma) * rt_ - bkap / tau_ + sf_.c.dot(dx2) +
                             ((p_ > 0) ? sf_.b.dot(dy2) : 0.0) + sf_.h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        if (p_ > 0) dy2 += dtau * dy1;
        dz2 += dtau * dz1;
        VectorXd w_dz = apply_w(dz2);
        VectorXd ds_by_w = -(lam_div_ds + w_dz);
        const double dkap = -(bkap + kap_ * dtau) / tau_;

        const double alpha = kGamma * line_search(ds_by_w, w_dz, dtau, dkap);
        if (opts_.verbose) std::fprintf(stderr, "  alpha %g sigma %g alpha_aff %g\n", alpha, sigma, alpha_aff);
        if (alpha <= kStepMin) {
            if (opts_.verbose) std::fprintf(stderr, "exit: tiny step %g\n", alpha);
            code = Exit::Numerics;
            break;
        }

        x_ += alpha * dx2;
        if (p_ > 0) y_ += alpha * dy2;
        z_ += alpha * dz2;
        s_ += alpha * apply_w(ds_by_w);
        kap_ += alpha * dkap;
        tau_ += alpha * dtau;
    }
    return code;
}

double HsdSolver::line_search(const VectorXd& ds_by_w, const VectorXd& w_dz, double dtau,
                              double dkap) const {
    double alpha = 1.0 / kStepMin;
    if (lay_.n_lp > 0) {
        const double rho_min =
            (ds_by_w.head(lay_.n_lp).cwiseQuotient(lambda_.head(lay_.n_lp))).minCoeff();
        const double sig_min =
            (w_dz.head(lay_.n_lp).cwiseQuotient(lambda_.head(lay_.n_lp))).minCoeff();
        const double worst = std::min(rho_min, sig_min);
        if (worst < 0.0) alpha = std::min(alpha, 1.0 / (-worst));
    }
    if (dtau < 0.0) alpha = std::min(alpha, -tau_ / dtau);
    if (dkap < 0.0) alpha = std::min(alpha, -kap_ / dkap);

    int at = lay_.n_lp;
    for (int dim : lay_.soc_dims) {
        const auto lb = lambda_.segment(at, dim);
        const double lres = lb(0) * lb(0) - lb.tail(dim - 1).squaredNorm();
        if (lres <= 0.0) {
            at += dim;
            continue;
        }
        const double lnorm = std::sqrt(lres);
        const VectorXd lbar = lb / lnorm;
        auto block_limit = [&](const VectorXd& d) {
            const double lbar_d =
                lbar(0) * d(at) - lbar.tail(dim - 1).dot(d.segment(at + 1, dim - 1));
            const double f = (lbar_d + d(at)) / (lbar(0) + 1.0);
            VectorXd r(dim);
            r(0) = lbar_d / lnorm;
            r.tail(dim - 1) =
                (d.segment(at + 1, dim - 1) - f * lbar.tail(dim - 1)) / lnorm;
            return r.tail(dim - 1).norm() - r(0);
        };
        const double lim = std::max({0.0, block_limit(ds_by_w), block_limit(w_dz)});
        if (lim > 0.0) alpha = std::min(alpha, 1.0 / lim);
        at += dim;
    }
    return std::clamp(alpha, kStepMin, kStepMax);
}

}  // namespace

ConeSolution solve(const ConeProgram& program, const SolverOptions& opts) {
    for (const auto& lc : program.linear_constraints()) {
        if (!lc.row.allFinite() || !std::isfinite(lc.rhs)) {
            throw DomainError("solve: non-finite linear constraint");
        }
    }
    StandardForm sf = to_standard_form(program);
    if (!sf.g_mat.allFinite() || !sf.a_mat.allFinite() || !sf.c.allFinite()) {
        throw DomainError("solve: non-finite program data");
    }
    equilibrate(sf);

    const double c_scale = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());
    sf.c /= c_scale;

    HsdSolver ipm(sf, opts);
    const HsdSolver::Exit code = ipm.run();

    ConeSolution sol;
    sol.iterations = ipm.iterations();
    switch (code) {
        case HsdSolver::Exit::Optimal: {
            sol.x = sf.col_scale.cwiseProduct(ipm.primal());
            sol.obj = program.objective().dot(sol.x);
            // Never report an infeasible point as Optimal.
            const double viol = sol.x.allFinite() ? program.max_violation(sol.x) : 1.0;
            sol.status = (viol <= 10.0 * opts.feastol) ? SolveStatus::Optimal
                                                       : SolveStatus::NumericFailure;
            if (sol.status == SolveStatus::NumericFailure) {
                if (opts.verbose) {
                    std::fprintf(stderr, "post-check violation %.3e exceeds %.3e\n", viol,
                                 10.0 * opts.feastol);
                }
                sol.obj = 0.0;
            }
            break;
        }
        case HsdSolver::Exit::PrimalInfeasible:
            sol.status = SolveStatus::Infeasible;
            break;
        case HsdSolver::Exit::DualInfeasible:
        case HsdSolver::Exit::Numerics:
        case HsdSolver::Exit::MaxIters:
            sol.status = SolveStatus::NumericFailure;
            break;
    }
    return sol;
}

}  // namespace fdtwrc
