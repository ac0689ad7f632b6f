#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bellsim/photon.hpp"

namespace bellsim {

enum class Pairing { EmissionIndex, AllPairsNoWindow };

struct AnalysisConfig {
    double tau = 1.0;  // time-tag resolution, 0 < tau < T0
    double W = 1.0;    // coincidence window, W >= tau
    Pairing pairing = Pairing::EmissionIndex;
};

// Coincidence counts for one (phi1, phi2) setting combination.
struct CoincidenceTable {
    double phi1 = 0.0;
    double phi2 = 0.0;
    // counts[i][j]: i,j = 0 for outcome +1, 1 for outcome -1
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};

    void add(int x, int y) { ++counts[x < 0][y < 0]; }
    std::uint64_t count(int x, int y) const { return counts[x < 0][y < 0]; }
    std::uint64_t total() const;
};

struct CorrelationResult {
    double E1 = 0.0;
    double E2 = 0.0;
    double E = 0.0;
    std::uint64_t n_c = 0;
};

using SettingKey = std::pair<double, double>;  // (phi1, phi2), exact doubles
using TableMap = std::map<SettingKey, CoincidenceTable>;

// Discretized time bin: smallest integer k with k >= t/tau (so t=0 -> 0).
long long discretize(double t, double tau);

// Pair records with equal emission index; a pair lands in the table of its
// (phi1, phi2) combination iff |k1 - k2| < ceil(W/tau) (strict).
TableMap count_coincidences(const EventLog& log1, const EventLog& log2,
                            const AnalysisConfig& cfg);

// Every complete emission pair counts; the W -> infinity limit, identical to
// omitting the time-tag data.
TableMap count_all_pairs(const EventLog& log1, const EventLog& log2);

// Single- and two-particle averages over one table. Throws EmptyTableError
// when the table holds no coincidences.
CorrelationResult correlations(const CoincidenceTable& table);

// S = E_ab - E_ab' + E_a'b + E_a'b'.
double chsh(double E_ab, double E_abp, double E_apb, double E_apbp);

struct WindowSweepRow {
    double W = 0.0;
    CoincidenceTable table;
    // Absent when this window caught no pairs at this setting; the sweep
    // continues over the remaining windows.
    std::optional<CorrelationResult> result;
};

std::vector<WindowSweepRow> window_sweep(const EventLog& log1, const EventLog& log2,
                                         double tau, const std::vector<double>& W_list);

// Streaming accumulator: counts windowed and all-pairs tables directly from
// the generation loop so large runs never materialize their logs.
class StreamingCounter : public PairSink {
public:
    StreamingCounter(double tau, std::vector<double> W_list, bool all_pairs = true);

    void pair(std::uint64_t emission, const std::optional<EventRecord>& station1,
              const std::optional<EventRecord>& station2) override;

    const std::vector<double>& windows() const { return W_list_; }
    // Tables for the i-th window of the list.
    const TableMap& windowed(std::size_t i) const { return per_window_[i]; }
    const TableMap& all_pairs() const { return all_pairs_; }
    std::uint64_t pairs_seen() const { return pairs_seen_; }
    std::uint64_t complete_pairs() const { return complete_pairs_; }

private:
    double tau_;
    std::vector<double> W_list_;
    std::vector<long long> k_windows_;
    bool want_all_pairs_;
    std::vector<TableMap> per_window_;
    TableMap all_pairs_;
    std::uint64_t pairs_seen_ = 0;
    std::uint64_t complete_pairs_ = 0;
};

} // namespace bellsim
