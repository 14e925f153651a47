#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ao_driver.hpp"
#include "model.hpp"
#include "report.hpp"

namespace fdtwrc {

/// Monte-Carlo experiment description; loaded from a flat key-value JSON
/// document. Unknown keys are rejected.
struct ExperimentSpec {
    SystemDims dims{4, 2, 2, 2, 2, 2};
    double rho = 1e-4;
    double kappa = 0.1;
    double sigma2_dbm = -30.0;
    std::vector<double> theta_db_list;
    int n_runs = 100;
    std::uint64_t seed = 1;
    std::vector<SchemeKind> schemes;
    AoConfig ao;
    bool oracle_audit = false;

    void validate() const;
    LinkBudget budget_for(double theta_db) const;

    static ExperimentSpec from_json(const std::string& text);
    static ExperimentSpec from_json_file(const std::string& path);
};

struct SweepRow {
    double theta_db = 0.0;
    SchemeKind scheme = SchemeKind::ProposedFD;
    int run_index = 0;
    double total_power_dbm = 0.0;  // NaN on dropped rows
    int outer_iters = 0;
    std::string status;
    bool drop_flag = false;
};

struct TraceRow {
    SchemeKind scheme = SchemeKind::ProposedFD;
    int outer_iter = 0;
    double mean_power_dbm = 0.0;
};

struct SummaryRow {
    double theta_db = 0.0;
    SchemeKind scheme = SchemeKind::ProposedFD;
    double mean_power_dbm = 0.0;  // NaN when every run was dropped
    double drop_rate = 0.0;
    double mean_iters = 0.0;
};

/// One channel draw per (theta, run) cell, shared bit-identically by all
/// schemes; rows are merged in (theta, scheme, run) order regardless of how
/// the cells were scheduled across threads.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

/// Per-iteration mean power at a single target; iteration 0 is the shared
/// initialization point and converged runs carry their final value forward.
std::vector<TraceRow> run_convergence_trace(const ExperimentSpec& spec);

/// Averages power across successful runs in the linear domain, then
/// converts to dBm. Throws DomainError on empty input.
std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);

/// Fraction of rows with a hard (solver/monotonicity) failure, per scheme;
/// returns the worst scheme's rate.
double max_hard_failure_rate(const std::vector<SweepRow>& rows);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);
void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& os);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os);
std::vector<SweepRow> parse_sweep_csv(std::istream& is);

/// Deterministic per-cell channel stream.
RandomStream cell_stream(std::uint64_t seed, int theta_index, int run_index);

}  // namespace fdtwrc
