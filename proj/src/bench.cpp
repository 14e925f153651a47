#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace fdtwrc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt9(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

void parallel_cells(int n_cells, const std::function<void(int)>& work) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = std::min<unsigned>(hw, static_cast<unsigned>(n_cells));
    if (n_threads <= 1) {
        for (int i = 0; i < n_cells; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string status_string(const SolveReport& rep) {
    switch (rep.status) {
        case AoStatus::Converged: return "Converged";
        case AoStatus::MaxIters: return "MaxIters";
        case AoStatus::Failed: return "Failed(" + sanitize(rep.failure_reason) + ")";
    }
    return "Failed(unknown)";
}

// "Dropped(...)" marks draws a scheme legitimately cannot serve (empty null
// space, infeasible scaling direction); "Failed(...)" marks solver or audit
// breakdowns and counts toward the hard-failure exit code.
bool is_hard_failure(const std::string& status) { return status.rfind("Failed(", 0) == 0; }

/// Audits one finished point against the time-domain estimators.
bool passes_oracle_audit(const SolveReport& rep, const ChannelSet& ch, double sigma2,
                         std::uint64_t salt) {
    RandomStream rng(RandomStream::mix(0x0a0d17ULL, salt));
    const double exact = relay_power(rep.final_bf, ch, sigma2);
    const double est = simulate_relay_power(rep.final_bf, ch, sigma2, 200000, 5000, rng);
    if (std::abs(est - exact) > 0.01 * exact) return false;
    for (int i = 1; i <= 2; ++i) {
        const double s_exact = sinr(i, rep.final_bf, ch, sigma2);
        const double s_est = simulate_sinr(i, rep.final_bf, ch, sigma2, 200000, 5000, rng);
        if (std::abs(s_est - s_exact) > 0.02 * s_exact) return false;
    }
    return true;
}

}  // namespace

RandomStream cell_stream(std::uint64_t seed, int theta_index, int run_index) {
    const std::uint64_t a = RandomStream::mix(seed, 0x7e7a + static_cast<std::uint64_t>(theta_index));
    return RandomStream(RandomStream::mix(a, static_cast<std::uint64_t>(run_index)));
}

void ExperimentSpec::validate() const {
    dims.validate();
    if (theta_db_list.empty()) throw ConfigError("spec: theta_db_list must be nonempty");
    if (schemes.empty()) throw ConfigError("spec: schemes must be nonempty");
    if (n_runs < 1) throw ConfigError("spec: n_runs must be >= 1");
    if (!(rho > 0.0)) throw ConfigError("spec: rho must be positive");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ConfigError("spec: kappa must lie in [0, 1]");
    ao.validate();
}

LinkBudget ExperimentSpec::budget_for(double theta_db) const {
    LinkBudget b;
    b.sigma2 = dbm_to_watts(sigma2_dbm);
    b.theta = {db_to_linear(theta_db), db_to_linear(theta_db)};
    b.rho = rho;
    b.kappa = kappa;
    return b;
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("spec: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("spec: top level must be an object");

    ExperimentSpec spec;
    spec.schemes = {SchemeKind::ProposedFD,   SchemeKind::ZfFD,
                    SchemeKind::FdBaseline,   SchemeKind::IdealFD,
                    SchemeKind::HalfDuplexAO, SchemeKind::HalfDuplexBaseline};
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "m_r") spec.dims.m_r = val.get<int>();
            else if (key == "m_1") spec.dims.m_1 = val.get<int>();
            else if (key == "m_2") spec.dims.m_2 = val.get<int>();
            else if (key == "n_r") spec.dims.n_r = val.get<int>();
            else if (key == "n_1") spec.dims.n_1 = val.get<int>();
            else if (key == "n_2") spec.dims.n_2 = val.get<int>();
            else if (key == "rho") spec.rho = val.get<double>();
            else if (key == "kappa") spec.kappa = val.get<double>();
            else if (key == "sigma2_dbm") spec.sigma2_dbm = val.get<double>();
            else if (key == "theta_db_list") spec.theta_db_list = val.get<std::vector<double>>();
            else if (key == "n_runs") spec.n_runs = val.get<int>();
            else if (key == "seed") spec.seed = val.get<std::uint64_t>();
            else if (key == "oracle_audit") spec.oracle_audit = val.get<bool>();
            else if (key == "max_outer") spec.ao.max_outer = val.get<int>();
            else if (key == "sca_max") spec.ao.sca_max = val.get<int>();
            else if (key == "tol_outer_rel") spec.ao.tol_outer_rel = val.get<double>();
            else if (key == "tol_sca_rel") spec.ao.tol_sca_rel = val.get<double>();
            else if (key == "solver_tol") spec.ao.solver_tol = val.get<double>();
            else if (key == "monotonicity_slack") spec.ao.monotonicity_slack = val.get<double>();
            else if (key == "schemes") {
                spec.schemes.clear();
                for (const auto& name : val.get<std::vector<std::string>>()) {
                    SchemeKind kind;
                    if (!scheme_from_name(name, kind)) {
                        throw ConfigError("spec: unknown scheme '" + name + "'");
                    }
                    spec.schemes.push_back(kind);
                }
            } else {
                throw ConfigError("spec: unknown key '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("spec: bad value for key '" + key + "': " + e.what());
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("spec: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

namespace {

struct CellResult {
    std::vector<SweepRow> rows;
    std::vector<SolveReport> reports;  // aligned with spec.schemes; empty on throw
};

CellResult run_cell(const ExperimentSpec& spec, int theta_index, int run_index,
                    bool keep_reports) {
    const double theta_db = spec.theta_db_list[theta_index];
    const LinkBudget budget = spec.budget_for(theta_db);
    RandomStream rng = cell_stream(spec.seed, theta_index, run_index);
    const ChannelSet ch = generate_channels(rng, spec.dims, budget);

    CellResult out;
    for (SchemeKind kind : spec.schemes) {
        SweepRow row;
        row.theta_db = theta_db;
        row.scheme = kind;
        row.run_index = run_index;
        SolveReport rep;
        try {
            rep = run_scheme(kind, ch, budget, spec.ao);
            row.outer_iters = rep.iterations;
            row.status = status_string(rep);
            row.drop_flag = (rep.status == AoStatus::Failed);
            if (!row.drop_flag && spec.oracle_audit) {
                const ChannelSet& audited =
                    (kind == SchemeKind::IdealFD || kind == SchemeKind::HalfDuplexAO ||
                     kind == SchemeKind::HalfDuplexBaseline)
                        ? make_ideal(ch)
                        : ch;
                if (!passes_oracle_audit(rep, audited, budget.sigma2,
                                         RandomStream::mix(theta_index, run_index))) {
                    row.status = "Failed(OracleAuditMismatch)";
                    row.drop_flag = true;
                }
            }
            row.total_power_dbm = row.drop_flag ? kNan : watts_to_dbm(rep.final_power());
        } catch (const InfeasibleDirectionError& e) {
            row.status = "Dropped(" + sanitize(e.what()) + ")";
            row.drop_flag = true;
            row.total_power_dbm = kNan;
        } catch (const RankDeficientError& e) {
            row.status = "Dropped(" + sanitize(e.what()) + ")";
            row.drop_flag = true;
            row.total_power_dbm = kNan;
        } catch (const DegenerateDirectionError& e) {
            row.status = "Dropped(" + sanitize(e.what()) + ")";
            row.drop_flag = true;
            row.total_power_dbm = kNan;
        } catch (const std::exception& e) {
            row.status = "Failed(" + sanitize(e.what()) + ")";
            row.drop_flag = true;
            row.total_power_dbm = kNan;
        }
        out.rows.push_back(std::move(row));
        if (keep_reports) out.reports.push_back(std::move(rep));
    }
    return out;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const int n_theta = static_cast<int>(spec.theta_db_list.size());
    const int n_cells = n_theta * spec.n_runs;
    std::vector<CellResult> cells(n_cells);
    parallel_cells(n_cells, [&](int c) {
        cells[c] = run_cell(spec, c / spec.n_runs, c % spec.n_runs, false);
    });

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<size_t>(n_cells) * spec.schemes.size());
    for (auto& cell : cells) {
        for (auto& r : cell.rows) rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.theta_db != b.theta_db) return a.theta_db < b.theta_db;
        const std::string an = scheme_name(a.scheme), bn = scheme_name(b.scheme);
        if (an != bn) return an < bn;
        return a.run_index < b.run_index;
    });
    return rows;
}

std::vector<TraceRow> run_convergence_trace(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.theta_db_list.size() != 1) {
        throw ConfigError("trace: exactly one theta required");
    }
    std::vector<CellResult> cells(spec.n_runs);
    parallel_cells(spec.n_runs, [&](int r) { cells[r] = run_cell(spec, 0, r, true); });

    std::vector<TraceRow> table;
    // Longest power path over all runs and schemes defines the x-axis.
    size_t max_len = 1;
    for (const auto& cell : cells) {
        for (const auto& rep : cell.reports) {
            max_len = std::max(max_len, rep.outer_power.size());
        }
    }
    for (size_t si = 0; si < spec.schemes.size(); ++si) {
        for (size_t it = 0; it < max_len; ++it) {
            double acc = 0.0;
            int count = 0;
            for (int r = 0; r < spec.n_runs; ++r) {
                const auto& cell = cells[r];
                if (cell.rows[si].drop_flag || cell.reports[si].outer_power.empty()) continue;
                const auto& path = cell.reports[si].outer_power;
                const double p = (it < path.size()) ? path[it] : path.back();
                acc += p;
                ++count;
            }
            TraceRow row;
            row.scheme = spec.schemes[si];
            row.outer_iter = static_cast<int>(it);
            row.mean_power_dbm = (count > 0) ? watts_to_dbm(acc / count) : kNan;
            table.push_back(row);
        }
    }
    return table;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw DomainError("summarize: empty input");
    std::map<std::pair<double, std::string>, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        groups[{r.theta_db, scheme_name(r.scheme)}].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        s.theta_db = key.first;
        scheme_from_name(key.second, s.scheme);
        double acc = 0.0, iters = 0.0;
        int kept = 0, dropped = 0;
        for (const SweepRow* r : members) {
            if (r->drop_flag) {
                ++dropped;
                continue;
            }
            acc += dbm_to_watts(r->total_power_dbm);
            iters += r->outer_iters;
            ++kept;
        }
        s.drop_rate = static_cast<double>(dropped) / members.size();
        s.mean_power_dbm = (kept > 0) ? watts_to_dbm(acc / kept) : kNan;
        s.mean_iters = (kept > 0) ? iters / kept : 0.0;
        out.push_back(s);
    }
    return out;
}

double max_hard_failure_rate(const std::vector<SweepRow>& rows) {
    std::map<std::string, std::pair<int, int>> counts;  // scheme -> (hard, total)
    for (const auto& r : rows) {
        auto& c = counts[scheme_name(r.scheme)];
        ++c.second;
        if (is_hard_failure(r.status)) ++c.first;
    }
    double worst = 0.0;
    for (const auto& [name, c] : counts) {
        worst = std::max(worst, static_cast<double>(c.first) / std::max(1, c.second));
    }
    return worst;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "theta_db,scheme,run_index,total_power_dbm,outer_iters,status,drop_flag\n";
    for (const auto& r : rows) {
        os << fmt9(r.theta_db) << ',' << scheme_name(r.scheme) << ',' << r.run_index << ','
           << fmt9(r.total_power_dbm) << ',' << r.outer_iters << ',' << r.status << ','
           << (r.drop_flag ? 1 : 0) << '\n';
    }
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& os) {
    os << "scheme,outer_iter,mean_power_dbm\n";
    for (const auto& r : rows) {
        os << scheme_name(r.scheme) << ',' << r.outer_iter << ',' << fmt9(r.mean_power_dbm)
           << '\n';
    }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os) {
    os << "theta_db,scheme,mean_power_dbm,drop_rate,mean_iters\n";
    for (const auto& r : rows) {
        os << fmt9(r.theta_db) << ',' << scheme_name(r.scheme) << ',' << fmt9(r.mean_power_dbm)
           << ',' << fmt9(r.drop_rate) << ',' << fmt9(r.mean_iters) << '\n';
    }
}

std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
    std::vector<SweepRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw DomainError("parse_sweep_csv: empty stream");
    if (line != "theta_db,scheme,run_index,total_power_dbm,outer_iters,status,drop_flag") {
        throw DomainError("parse_sweep_csv: unexpected header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() != 7) throw DomainError("parse_sweep_csv: bad row: " + line);
        SweepRow r;
        r.theta_db = std::stod(cols[0]);
        if (!scheme_from_name(cols[1], r.scheme)) {
            throw DomainError("parse_sweep_csv: unknown scheme " + cols[1]);
        }
        r.run_index = std::stoi(cols[2]);
        r.total_power_dbm = (cols[3] == "nan") ? kNan : std::stod(cols[3]);
        r.outer_iters = std::stoi(cols[4]);
        r.status = cols[5];
        r.drop_flag = (cols[6] == "1");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace fdtwrc
