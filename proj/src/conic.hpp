#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace fdtwrc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SolveStatus { Optimal, Infeasible, NumericFailure };

enum class LinearSense { LessEqual, Equal };

/// a^T x <= b  (or == b)
struct LinearConstraint {
    VectorXd row;
    double rhs = 0.0;
    LinearSense sense = LinearSense::LessEqual;
};

/// ||A x + d|| <= g^T x + h
struct SocConstraint {
    MatrixXd a;
    VectorXd d;
    VectorXd g;
    double h = 0.0;
};

/// ||A x + d||^2 <= (p^T x + p0)(q^T x + q0),  both factors >= 0.
/// Constant factors are expressed with a zero row and a nonzero offset.
struct RsocConstraint {
    MatrixXd a;
    VectorXd d;
    VectorXd p;
    double p0 = 0.0;
    VectorXd q;
    double q0 = 0.0;
};

/// Real-valued conic program: minimize c^T x over the intersection of the
/// listed linear, second-order-cone and rotated-cone constraints.
class ConeProgram {
   public:
    explicit ConeProgram(int n_vars);

    int n_vars() const { return n_; }

    void set_objective(const VectorXd& c);

    int add_linear(const VectorXd& row, double rhs, LinearSense sense = LinearSense::LessEqual);
    int add_soc(const MatrixXd& a, const VectorXd& d, const VectorXd& g, double h);
    int add_rsoc(const MatrixXd& a, const VectorXd& d, const VectorXd& p, double p0,
                 const VectorXd& q, double q0);

    const VectorXd& objective() const { return c_; }
    const std::vector<LinearConstraint>& linear_constraints() const { return linear_; }
    const std::vector<SocConstraint>& soc_constraints() const { return soc_; }
    const std::vector<RsocConstraint>& rsoc_constraints() const { return rsoc_; }

    /// Worst violation of every constraint at x. Cone violations are
    /// normalized by the constraint's own scale.
    double max_violation(const VectorXd& x) const;

   private:
    int n_;
    VectorXd c_;
    std::vector<LinearConstraint> linear_;
    std::vector<SocConstraint> soc_;
    std::vector<RsocConstraint> rsoc_;
};

struct ConeSolution {
    SolveStatus status = SolveStatus::NumericFailure;
    VectorXd x;
    double obj = 0.0;
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-8;        // duality gap (absolute and relative)
    double feastol = 1e-8;
    int max_iters = 100;
    bool verbose = false;     // per-iteration trace on stderr
};

/// Solves the program with an embedded primal-dual interior-point method on
/// the homogeneous self-dual embedding. Optimal solutions are re-checked
/// against the original constraints before being reported; an infeasible
/// point is never labelled Optimal.
ConeSolution solve(const ConeProgram& program, const SolverOptions& opts = {});

/// Helpers for lifting complex m-vectors z into real 2m-blocks
/// x = [Re z; Im z] and building real rows for the usual complex forms.
namespace lift {

/// Real row r with r^T x = Re(a^H z).
VectorXd real_part_row(const Eigen::VectorXcd& a);

/// Real row r with r^T x = Im(a^H z).
VectorXd imag_part_row(const Eigen::VectorXcd& a);

/// 2-row map Q with ||Q x|| = |a^H z|.
MatrixXd quad_norm_rows(const Eigen::VectorXcd& a);

/// Embeds rows acting on a lifted block at column offset into a program
/// with n columns total.
MatrixXd place_block(const MatrixXd& rows, int offset, int n);
VectorXd place_row(const VectorXd& row, int offset, int n);

VectorXd to_real(const Eigen::VectorXcd& z);
Eigen::VectorXcd to_complex(const VectorXd& x);

}  // namespace lift

}  // namespace fdtwrc
