#include <cmath>
#include <cstdint>
#include <vector>

#include "bellsim/coincidence.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/photon.hpp"
#include "doctest.h"

using namespace bellsim;

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

EventLog make_log(int station, std::vector<EventRecord> records) {
    return EventLog{station, std::move(records)};
}

// Reference tally: direct loop over matching emission indices.
TableMap brute_force(const EventLog& log1, const EventLog& log2, double tau, double W,
                     bool windowed) {
    TableMap tables;
    for (const auto& r1 : log1.records) {
        for (const auto& r2 : log2.records) {
            if (r1.emission != r2.emission) continue;
            if (windowed) {
                const double k1 = std::ceil(r1.t / tau);
                const double k2 = std::ceil(r2.t / tau);
                if (!(std::fabs(k1 - k2) < std::ceil(W / tau))) continue;
            }
            auto& tb = tables[SettingKey{r1.phi, r2.phi}];
            tb.phi1 = r1.phi;
            tb.phi2 = r2.phi;
            tb.add(r1.x, r2.x);
        }
    }
    return tables;
}

bool same_tables(const TableMap& a, const TableMap& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [key, tb] : a) {
        auto it = b.find(key);
        if (it == b.end()) return false;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (tb.counts[i][j] != it->second.counts[i][j]) return false;
    }
    return true;
}

EventLog random_log(int station, RngStream& s, int n, double keep_prob) {
    EventLog log{station, {}};
    for (int i = 0; i < n; ++i) {
        if (s.uniform_open() > keep_prob) continue;
        EventRecord r;
        r.emission = static_cast<std::uint64_t>(i);
        r.x = s.random_bit() ? 1 : -1;
        r.t = 5.0 * s.uniform_open();
        r.phi = s.random_bit() ? 0.25 : 0.75;
        r.A = s.random_bit();
        log.records.push_back(r);
    }
    return log;
}

} // namespace

TEST_CASE("time discretization rounds up") {
    CHECK(discretize(0.0, 1.0) == 0);
    CHECK(discretize(2.3, 1.0) == 3);
    CHECK(discretize(500.0, 250.0) == 2);
    CHECK(discretize(0.0001, 1.0) == 1);
    CHECK(discretize(1.0, 1.0) == 1);
}

TEST_CASE("window comparison is strict") {
    const EventLog log1 = make_log(1, {{0, 1, 0.5, 0.1, 0}});   // k = 1
    const EventLog log2 = make_log(2, {{0, 1, 1.5, 0.2, 0}});   // k = 2
    const TableMap wide = count_coincidences(log1, log2, AnalysisConfig{1.0, 2.0});
    REQUIRE(wide.size() == 1);
    CHECK(wide.begin()->second.count(+1, +1) == 1);
    const TableMap tight = count_coincidences(log1, log2, AnalysisConfig{1.0, 1.0});
    CHECK(tight.empty());
}

TEST_CASE("windowed counting matches the brute-force tally") {
    RngStream s(41);
    for (int rep = 0; rep < 20; ++rep) {
        const EventLog log1 = random_log(1, s, 60, 0.8);
        const EventLog log2 = random_log(2, s, 60, 0.8);
        for (double W : {1.0, 2.0, 3.5}) {
            const TableMap got = count_coincidences(log1, log2, AnalysisConfig{1.0, W});
            CHECK(same_tables(got, brute_force(log1, log2, 1.0, W, true)));
        }
        CHECK(same_tables(count_all_pairs(log1, log2),
                          brute_force(log1, log2, 1.0, 0.0, false)));
    }
}

TEST_CASE("all-pairs counting equals a very wide window") {
    RngStream s(42);
    const EventLog log1 = random_log(1, s, 500, 0.7);
    const EventLog log2 = random_log(2, s, 500, 0.7);
    // Time tags live in [0, 5], so W = 10 already swallows every pair.
    const TableMap wide = count_coincidences(log1, log2, AnalysisConfig{1.0, 10.0});
    CHECK(same_tables(wide, count_all_pairs(log1, log2)));
    std::uint64_t total = 0;
    for (const auto& [key, tb] : count_all_pairs(log1, log2)) total += tb.total();
    // Every complete pair is tallied exactly once.
    std::uint64_t complete = 0;
    std::size_t i = 0, j = 0;
    while (i < log1.records.size() && j < log2.records.size()) {
        if (log1.records[i].emission < log2.records[j].emission) ++i;
        else if (log2.records[j].emission < log1.records[i].emission) ++j;
        else { ++complete; ++i; ++j; }
    }
    CHECK(total == complete);
}

TEST_CASE("coincident totals never exceed either log") {
    RngStream s(43);
    const EventLog log1 = random_log(1, s, 300, 0.6);
    const EventLog log2 = random_log(2, s, 300, 0.9);
    std::uint64_t prev_total = 0;
    for (double W : {1.0, 1.5, 2.0, 3.0, 5.0, 10.0}) {
        std::uint64_t total = 0;
        for (const auto& [key, tb] : count_coincidences(log1, log2, AnalysisConfig{1.0, W})) {
            total += tb.total();
        }
        CHECK(total >= prev_total);  // monotone in the window width
        prev_total = total;
        CHECK(total <= log1.records.size());
        CHECK(total <= log2.records.size());
    }
}

TEST_CASE("correlation arithmetic") {
    CoincidenceTable tb;
    tb.counts[0][0] = 2;  // ++
    tb.counts[1][1] = 2;  // --
    tb.counts[0][1] = 3;  // +-
    tb.counts[1][0] = 1;  // -+
    const CorrelationResult r = correlations(tb);
    CHECK(r.n_c == 8);
    // Station 1 saw + five times and - three times; station 2 the reverse.
    CHECK(r.E1 == doctest::Approx(0.25));
    CHECK(r.E2 == doctest::Approx(-0.25));
    CHECK(r.E == doctest::Approx(0.0));

    CoincidenceTable perfect;
    perfect.counts[0][0] = 10;
    perfect.counts[1][1] = 10;
    CHECK(correlations(perfect).E == doctest::Approx(1.0));
    CHECK(correlations(perfect).E1 == doctest::Approx(0.0));

    CoincidenceTable anti;
    anti.counts[0][1] = 7;
    anti.counts[1][0] = 7;
    CHECK(correlations(anti).E == doctest::Approx(-1.0));
}

TEST_CASE("correlation bounds hold on random tables") {
    RngStream s(44);
    for (int rep = 0; rep < 100; ++rep) {
        CoincidenceTable tb;
        tb.counts[0][0] = static_cast<std::uint64_t>(1000 * s.uniform_open());
        tb.counts[0][1] = static_cast<std::uint64_t>(1000 * s.uniform_open());
        tb.counts[1][0] = static_cast<std::uint64_t>(1000 * s.uniform_open());
        tb.counts[1][1] = 1 + static_cast<std::uint64_t>(1000 * s.uniform_open());
        const CorrelationResult r = correlations(tb);
        CHECK(std::fabs(r.E) <= 1.0);
        CHECK(std::fabs(r.E1) <= 1.0);
        CHECK(std::fabs(r.E2) <= 1.0);
    }
}

TEST_CASE("empty tables raise a typed error") {
    CHECK_THROWS_AS(correlations(CoincidenceTable{}), EmptyTableError);
}

TEST_CASE("CHSH combination") {
    CHECK(chsh(0.5, -0.25, 0.25, 0.5) == doctest::Approx(1.5));
    const double e = -1.0 / std::sqrt(2.0);
    CHECK(chsh(e, -e, e, e) == doctest::Approx(-2.8284).epsilon(1e-4));
    CHECK(chsh(1.0, -1.0, 1.0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("fixed-angle correlations are stable across window widths") {
    RngStream s(45);
    auto [log1, log2] = run_experiment(ExperimentII{pi / 6}, StationSettings{0.0, 0.0, 1000.0},
                                       StationSettings{0.0, 0.0, 1000.0}, 200000, s);
    std::vector<double> Es;
    for (const auto& row : window_sweep(log1, log2, 1.0, {1.0, 8.0, 64.0, 2000.0})) {
        REQUIRE(row.result.has_value());
        Es.push_back(row.result->E);
    }
    REQUIRE(Es.size() == 4);
    // The time-tag draw is independent of the outcomes at fixed settings, so
    // the window only changes the sample, not the mean.
    for (double E : Es) CHECK(E == doctest::Approx(Es.back()).epsilon(0.05));
    // W = 2000 > T0 + tau captures everything.
    CHECK(Es.back() ==
          doctest::Approx(correlations(count_all_pairs(log1, log2).begin()->second).E));
}

TEST_CASE("window sweep reports empty windows without aborting") {
    const EventLog log1 = make_log(1, {{0, 1, 4.2, 0.0, 0}});   // k = 5
    const EventLog log2 = make_log(2, {{0, 1, 49.5, 0.0, 0}});  // k = 50
    const auto rows = window_sweep(log1, log2, 1.0, {1.0, 100.0});
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].result.has_value());
    REQUIRE(rows[1].result.has_value());
    CHECK(rows[1].result->n_c == 1);
}

TEST_CASE("streaming counter reproduces the offline analysis") {
    RngStream gen1(46);
    RngStream gen2(46);
    const StationSettings s1{0.0, pi / 4, 1000.0};
    const StationSettings s2{pi / 8, 3 * pi / 8, 1000.0};
    StreamingCounter counter(1.0, {1.0, 4.0});
    run_experiment_into(ExperimentI{}, s1, s2, 20000, gen1, counter);
    auto [log1, log2] = run_experiment(ExperimentI{}, s1, s2, 20000, gen2);
    CHECK(same_tables(counter.windowed(0),
                      count_coincidences(log1, log2, AnalysisConfig{1.0, 1.0})));
    CHECK(same_tables(counter.windowed(1),
                      count_coincidences(log1, log2, AnalysisConfig{1.0, 4.0})));
    CHECK(same_tables(counter.all_pairs(), count_all_pairs(log1, log2)));
    CHECK(counter.pairs_seen() == 20000);
    CHECK(counter.complete_pairs() == 20000);
}

TEST_CASE("streaming counter tracks incomplete pairs") {
    RngStream gen(47);
    StreamingCounter counter(1.0, {1.0});
    run_experiment_into(ExperimentIII{0.0, pi / 2}, StationSettings{0.0, 0.0, 1000.0},
                        StationSettings{0.0, 0.0, 1000.0}, 10000, gen, counter);
    CHECK(counter.pairs_seen() == 10000);
    CHECK(counter.complete_pairs() < 10000);
    std::uint64_t total = 0;
    for (const auto& [key, tb] : counter.all_pairs()) total += tb.total();
    CHECK(total == counter.complete_pairs());
}

TEST_CASE("analysis rejects bad parameters and unsorted logs") {
    const EventLog log1 = make_log(1, {{0, 1, 0.0, 0.0, 0}});
    const EventLog log2 = make_log(2, {{0, 1, 0.0, 0.0, 0}});
    CHECK_THROWS_AS(count_coincidences(log1, log2, AnalysisConfig{0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(count_coincidences(log1, log2, AnalysisConfig{1.0, 0.5}), ConfigError);
    const EventLog bad = make_log(1, {{5, 1, 0.0, 0.0, 0}, {3, 1, 0.0, 0.0, 0}});
    CHECK_THROWS_AS(count_coincidences(bad, log2, AnalysisConfig{1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(window_sweep(log1, log2, 1.0, {}), ConfigError);
}
