#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bench.hpp"
#include "test_util.hpp"

using namespace fdtwrc;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.theta_db_list = {10.0};
    spec.n_runs = 2;
    spec.seed = 77;
    spec.schemes = {SchemeKind::ProposedFD, SchemeKind::ZfFD, SchemeKind::FdBaseline};
    return spec;
}

}  // namespace

TEST_CASE("spec JSON parsing: values, defaults, unknown keys") {
    const std::string text = R"({
        "m_r": 4, "m_1": 2, "m_2": 2, "n_r": 2, "n_1": 2, "n_2": 2,
        "rho": 1e-4, "kappa": 0.1, "sigma2_dbm": -30.0,
        "theta_db_list": [2.0, 10.0],
        "n_runs": 3, "seed": 42,
        "schemes": ["ProposedFD", "IdealFD"],
        "oracle_audit": false, "max_outer": 12
    })";
    const ExperimentSpec spec = ExperimentSpec::from_json(text);
    CHECK(spec.dims.m_r == 4);
    CHECK(spec.theta_db_list.size() == 2);
    CHECK(spec.n_runs == 3);
    CHECK(spec.seed == 42);
    CHECK(spec.schemes.size() == 2);
    CHECK(spec.ao.max_outer == 12);
    CHECK(spec.ao.sca_max == 20);  // untouched default

    CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"bogus_key": 1})"), ConfigError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"n_runs": "many"})"), ConfigError);
    CHECK_THROWS_AS(ExperimentSpec::from_json("not json"), ConfigError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"schemes": ["NoSuch"]})"), ConfigError);
    CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"theta_db_list": []})"), ConfigError);
    CHECK_THROWS_AS(
        ExperimentSpec::from_json(R"({"theta_db_list": [10.0], "kappa": 1.5})"), ConfigError);
    CHECK_THROWS_AS(
        ExperimentSpec::from_json(R"({"theta_db_list": [10.0], "n_runs": 0})"), ConfigError);
}

TEST_CASE("run_sweep: paired draws, determinism, schema round trip") {
    const ExperimentSpec spec = small_spec();
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 6);  // 1 theta x 2 runs x 3 schemes

    // identical CSV bytes on a second run
    std::ostringstream c1, c2;
    write_sweep_csv(rows, c1);
    write_sweep_csv(run_sweep(spec), c2);
    CHECK(c1.str() == c2.str());

    // paired draws: every scheme of a cell sees bit-identical channels
    RandomStream s1 = cell_stream(spec.seed, 0, 0);
    RandomStream s2 = cell_stream(spec.seed, 0, 0);
    const ChannelSet a = generate_channels(s1, spec.dims, spec.budget_for(10.0));
    const ChannelSet b = generate_channels(s2, spec.dims, spec.budget_for(10.0));
    CHECK(a.h_1r == b.h_1r);
    CHECK(a.h_rr == b.h_rr);

    // CSV round-trips through the summarizer
    std::istringstream back(c1.str());
    const auto parsed = parse_sweep_csv(back);
    REQUIRE(parsed.size() == rows.size());
    const auto direct = summarize(rows);
    const auto via_csv = summarize(parsed);
    REQUIRE(direct.size() == via_csv.size());
    for (size_t k = 0; k < direct.size(); ++k) {
        CHECK(direct[k].mean_power_dbm ==
              doctest::Approx(via_csv[k].mean_power_dbm).epsilon(1e-8));
        CHECK(direct[k].drop_rate == via_csv[k].drop_rate);
    }
}

TEST_CASE("run_sweep: a scheme's rows do not depend on which other schemes run") {
    ExperimentSpec solo = small_spec();
    solo.schemes = {SchemeKind::FdBaseline};
    ExperimentSpec paired = small_spec();

    const auto rows_solo = run_sweep(solo);
    const auto rows_paired = run_sweep(paired);
    for (const auto& a : rows_solo) {
        bool found = false;
        for (const auto& b : rows_paired) {
            if (b.scheme == a.scheme && b.run_index == a.run_index) {
                CHECK(b.total_power_dbm == a.total_power_dbm);  // bit-identical draw
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("summarize: linear-domain averaging and drop handling") {
    std::vector<SweepRow> rows;
    SweepRow r;
    r.theta_db = 10.0;
    r.scheme = SchemeKind::ProposedFD;
    r.run_index = 0;
    r.total_power_dbm = 0.0;
    r.status = "Converged";
    rows.push_back(r);
    r.run_index = 1;
    r.total_power_dbm = 10.0;
    rows.push_back(r);

    auto s = summarize(rows);
    REQUIRE(s.size() == 1);
    // mean of 1 mW and 10 mW is 5.5 mW = 7.4036 dBm
    CHECK(s[0].mean_power_dbm == doctest::Approx(10.0 * std::log10(5.5)).epsilon(1e-9));
    CHECK(s[0].drop_rate == 0.0);

    SUBCASE("single run") {
        auto one = summarize({rows[0]});
        CHECK(one[0].mean_power_dbm == doctest::Approx(0.0));
    }

    SUBCASE("all-dropped cell") {
        for (auto& row : rows) {
            row.drop_flag = true;
            row.total_power_dbm = std::numeric_limits<double>::quiet_NaN();
        }
        auto dropped = summarize(rows);
        CHECK(std::isnan(dropped[0].mean_power_dbm));
        CHECK(dropped[0].drop_rate == 1.0);
    }

    CHECK_THROWS_AS(summarize({}), DomainError);
}

TEST_CASE("run_convergence_trace: shared start and monotone mean curves") {
    ExperimentSpec spec = small_spec();
    spec.n_runs = 3;
    const auto table = run_convergence_trace(spec);
    REQUIRE(!table.empty());

    auto curve = [&](SchemeKind kind) {
        std::vector<double> c;
        for (const auto& row : table) {
            if (row.scheme == kind) c.push_back(row.mean_power_dbm);
        }
        return c;
    };
    const auto prop = curve(SchemeKind::ProposedFD);
    const auto zf = curve(SchemeKind::ZfFD);
    const auto base = curve(SchemeKind::FdBaseline);
    REQUIRE(prop.size() == zf.size());
    REQUIRE(prop.size() >= 2);

    // iteration 0 is the same initialization point for every FD scheme
    CHECK(prop[0] == doctest::Approx(zf[0]).epsilon(1e-12));
    CHECK(prop[0] == doctest::Approx(base[0]).epsilon(1e-12));
    for (size_t k = 1; k < prop.size(); ++k) {
        CHECK(prop[k] <= prop[k - 1] + 1e-9);
        CHECK(zf[k] <= zf[k - 1] + 1e-9);
        CHECK(base[k] == doctest::Approx(base[0]));  // flat carry-forward
    }

    // a multi-theta spec is rejected
    ExperimentSpec bad = spec;
    bad.theta_db_list = {2.0, 10.0};
    CHECK_THROWS_AS(run_convergence_trace(bad), ConfigError);
}

TEST_CASE("oracle audit mode passes on a small sweep") {
    ExperimentSpec spec = small_spec();
    spec.n_runs = 1;
    spec.oracle_audit = true;
    const auto rows = run_sweep(spec);
    for (const auto& r : rows) {
        CHECK(r.status.find("OracleAuditMismatch") == std::string::npos);
    }
    CHECK(max_hard_failure_rate(rows) == 0.0);
}
