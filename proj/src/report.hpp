#pragma once

#include <array>
#include <string>
#include <vector>

#include "model.hpp"

namespace fdtwrc {

enum class SchemeKind {
    ProposedFD,
    ZfFD,
    FdBaseline,
    IdealFD,
    HalfDuplexAO,
    HalfDuplexBaseline,
};

const char* scheme_name(SchemeKind kind);
bool scheme_from_name(const std::string& name, SchemeKind& out);

struct AoConfig {
    int max_outer = 30;
    int sca_max = 20;
    double tol_outer_rel = 1e-4;
    double tol_sca_rel = 1e-4;
    double solver_tol = 1e-8;
    double monotonicity_slack = 1e-7;

    void validate() const;
};

enum class AoStatus { Converged, MaxIters, Failed };

/// Auditable record of one scheme on one channel draw.
struct SolveReport {
    SchemeKind scheme = SchemeKind::ProposedFD;
    std::array<double, 2> targets{0.0, 0.0};       // linear SINR targets in force
    std::vector<double> outer_power;               // [0] = initial point
    std::vector<std::array<double, 4>> stage_power;  // after v, w, f, u updates
    BeamformerSet final_bf;
    FeasibilityReport audit;
    AoStatus status = AoStatus::Failed;
    std::string failure_reason;
    int iterations = 0;
    double wall_seconds = 0.0;

    // diagnostics
    int stage_rejections = 0;  // stages kept at their reference point
    int sca_stalls = 0;        // conic subproblems that failed after retry
    int total_sca_iters = 0;

    double final_power() const { return outer_power.empty() ? 0.0 : outer_power.back(); }
};

}  // namespace fdtwrc
