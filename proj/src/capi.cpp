#include "fdtwrc/fdtwrc.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "bench.hpp"

using namespace fdtwrc;

struct fdtwrc_spec {
    ExperimentSpec spec;
};

struct fdtwrc_table {
    enum class Kind { Sweep, Trace, Summary } kind;
    std::vector<SweepRow> sweep;
    std::vector<TraceRow> trace;
    std::vector<SummaryRow> summary;
    mutable std::string csv_cache;

    const std::string& csv() const {
        if (csv_cache.empty()) {
            std::ostringstream os;
            switch (kind) {
                case Kind::Sweep: write_sweep_csv(sweep, os); break;
                case Kind::Trace: write_trace_csv(trace, os); break;
                case Kind::Summary: write_summary_csv(summary, os); break;
            }
            csv_cache = os.str();
        }
        return csv_cache;
    }

    int rows() const {
        switch (kind) {
            case Kind::Sweep: return static_cast<int>(sweep.size());
            case Kind::Trace: return static_cast<int>(trace.size());
            case Kind::Summary: return static_cast<int>(summary.size());
        }
        return 0;
    }
};

namespace {

void put_error(char* err, size_t err_len, const char* what) {
    if (err != nullptr && err_len > 0) {
        std::strncpy(err, what, err_len - 1);
        err[err_len - 1] = '\0';
    }
}

template <typename Fn>
int guarded(char* err, size_t err_len, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        put_error(err, err_len, e.what());
        return FDTWRC_CONFIG_ERROR;
    } catch (const std::exception& e) {
        put_error(err, err_len, e.what());
        return FDTWRC_ERROR;
    }
}

}  // namespace

extern "C" {

const char* fdtwrc_version(void) { return "fdtwrc 1.0.0"; }

int fdtwrc_spec_parse(const char* json_text, fdtwrc_spec** out, char* err, size_t err_len) {
    if (json_text == nullptr || out == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    return guarded(err, err_len, [&]() {
        auto* handle = new fdtwrc_spec{ExperimentSpec::from_json(json_text)};
        *out = handle;
        return FDTWRC_OK;
    });
}

int fdtwrc_spec_load(const char* path, fdtwrc_spec** out, char* err, size_t err_len) {
    if (path == nullptr || out == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    return guarded(err, err_len, [&]() {
        auto* handle = new fdtwrc_spec{ExperimentSpec::from_json_file(path)};
        *out = handle;
        return FDTWRC_OK;
    });
}

void fdtwrc_spec_free(fdtwrc_spec* spec) { delete spec; }

void fdtwrc_spec_set_seed(fdtwrc_spec* spec, uint64_t seed) {
    if (spec != nullptr) spec->spec.seed = seed;
}

int fdtwrc_spec_set_runs(fdtwrc_spec* spec, int n_runs, char* err, size_t err_len) {
    if (spec == nullptr || n_runs < 1) {
        put_error(err, err_len, "n_runs must be >= 1");
        return FDTWRC_CONFIG_ERROR;
    }
    spec->spec.n_runs = n_runs;
    return FDTWRC_OK;
}

int fdtwrc_spec_set_schemes(fdtwrc_spec* spec, const char* comma_list, char* err,
                            size_t err_len) {
    if (spec == nullptr || comma_list == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    std::vector<SchemeKind> parsed;
    std::stringstream ss(comma_list);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        SchemeKind kind;
        if (!scheme_from_name(name, kind)) {
            put_error(err, err_len, ("unknown scheme: " + name).c_str());
            return FDTWRC_CONFIG_ERROR;
        }
        parsed.push_back(kind);
    }
    if (parsed.empty()) {
        put_error(err, err_len, "scheme list is empty");
        return FDTWRC_CONFIG_ERROR;
    }
    spec->spec.schemes = std::move(parsed);
    return FDTWRC_OK;
}

void fdtwrc_spec_set_oracle_audit(fdtwrc_spec* spec, int enabled) {
    if (spec != nullptr) spec->spec.oracle_audit = (enabled != 0);
}

int fdtwrc_run_sweep(const fdtwrc_spec* spec, fdtwrc_table** out, char* err, size_t err_len) {
    if (spec == nullptr || out == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    return guarded(err, err_len, [&]() {
        auto* table = new fdtwrc_table{};
        table->kind = fdtwrc_table::Kind::Sweep;
        table->sweep = run_sweep(spec->spec);
        *out = table;
        return FDTWRC_OK;
    });
}

int fdtwrc_run_trace(const fdtwrc_spec* spec, fdtwrc_table** out, char* err, size_t err_len) {
    if (spec == nullptr || out == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    return guarded(err, err_len, [&]() {
        auto* table = new fdtwrc_table{};
        table->kind = fdtwrc_table::Kind::Trace;
        table->trace = run_convergence_trace(spec->spec);
        *out = table;
        return FDTWRC_OK;
    });
}

int fdtwrc_table_summarize(const fdtwrc_table* table, fdtwrc_table** out, char* err,
                           size_t err_len) {
    if (table == nullptr || out == nullptr || table->kind != fdtwrc_table::Kind::Sweep) {
        put_error(err, err_len, "summarize requires a sweep table");
        return FDTWRC_CONFIG_ERROR;
    }
    return guarded(err, err_len, [&]() {
        auto* result = new fdtwrc_table{};
        result->kind = fdtwrc_table::Kind::Summary;
        result->summary = summarize(table->sweep);
        *out = result;
        return FDTWRC_OK;
    });
}

const char* fdtwrc_table_csv(const fdtwrc_table* table) {
    return table == nullptr ? "" : table->csv().c_str();
}

int fdtwrc_table_write_csv(const fdtwrc_table* table, const char* path, char* err,
                           size_t err_len) {
    if (table == nullptr || path == nullptr) {
        put_error(err, err_len, "null argument");
        return FDTWRC_CONFIG_ERROR;
    }
    std::ofstream outf(path, std::ios::binary);
    if (!outf) {
        put_error(err, err_len, "cannot open output file");
        return FDTWRC_ERROR;
    }
    outf << table->csv();
    return outf.good() ? FDTWRC_OK : FDTWRC_ERROR;
}

double fdtwrc_table_hard_failure_rate(const fdtwrc_table* table) {
    if (table == nullptr || table->kind != fdtwrc_table::Kind::Sweep) return 0.0;
    return max_hard_failure_rate(table->sweep);
}

int fdtwrc_table_rows(const fdtwrc_table* table) {
    return table == nullptr ? 0 : table->rows();
}

void fdtwrc_table_free(fdtwrc_table* table) { delete table; }

}  // extern "C"
