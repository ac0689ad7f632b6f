#include "bellsim/coincidence.hpp"

#include <cmath>
#include <cstdlib>

#include "bellsim/errors.hpp"

namespace bellsim {
namespace {

void check_analysis(const AnalysisConfig& cfg) {
    if (!(cfg.tau > 0.0)) throw ConfigError("analysis: tau must be positive");
    if (!(cfg.W >= cfg.tau)) throw ConfigError("analysis: W must be at least tau");
}

void check_sorted(const EventLog& log) {
    const auto& r = log.records;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i - 1].emission >= r[i].emission) {
            throw ConfigError("event log: emission indices not strictly increasing");
        }
    }
}

CoincidenceTable& table_for(TableMap& tables, const EventRecord& r1, const EventRecord& r2) {
    CoincidenceTable& tb = tables[SettingKey{r1.phi, r2.phi}];
    tb.phi1 = r1.phi;
    tb.phi2 = r2.phi;
    return tb;
}

// Visits every complete emission pair of the two sorted logs.
template <typename F>
void for_each_pair(const EventLog& log1, const EventLog& log2, F&& f) {
    std::size_t i = 0, j = 0;
    while (i < log1.records.size() && j < log2.records.size()) {
        const EventRecord& r1 = log1.records[i];
        const EventRecord& r2 = log2.records[j];
        if (r1.emission < r2.emission) {
            ++i;
        } else if (r2.emission < r1.emission) {
            ++j;
        } else {
            f(r1, r2);
            ++i;
            ++j;
        }
    }
}

} // namespace

std::uint64_t CoincidenceTable::total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

long long discretize(double t, double tau) {
    return static_cast<long long>(std::ceil(t / tau));
}

TableMap count_coincidences(const EventLog& log1, const EventLog& log2,
                            const AnalysisConfig& cfg) {
    check_analysis(cfg);
    check_sorted(log1);
    check_sorted(log2);
    if (cfg.pairing == Pairing::AllPairsNoWindow) return count_all_pairs(log1, log2);
    const long long k_window = static_cast<long long>(std::ceil(cfg.W / cfg.tau));
    TableMap tables;
    for_each_pair(log1, log2, [&](const EventRecord& r1, const EventRecord& r2) {
        long long k1 = discretize(r1.t, cfg.tau);
        long long k2 = discretize(r2.t, cfg.tau);
        if (std::llabs(k1 - k2) < k_window) table_for(tables, r1, r2).add(r1.x, r2.x);
    });
    return tables;
}

TableMap count_all_pairs(const EventLog& log1, const EventLog& log2) {
    check_sorted(log1);
    check_sorted(log2);
    TableMap tables;
    for_each_pair(log1, log2, [&](const EventRecord& r1, const EventRecord& r2) {
        table_for(tables, r1, r2).add(r1.x, r2.x);
    });
    return tables;
}

CorrelationResult correlations(const CoincidenceTable& table) {
    const double cpp = static_cast<double>(table.count(+1, +1));
    const double cpm = static_cast<double>(table.count(+1, -1));
    const double cmp = static_cast<double>(table.count(-1, +1));
    const double cmm = static_cast<double>(table.count(-1, -1));
    const std::uint64_t n_c = table.total();
    if (n_c == 0) throw EmptyTableError("no coincidences in this table");
    const double nc = static_cast<double>(n_c);
    CorrelationResult res;
    res.E1 = (cpp - cmm + cpm - cmp) / nc;
    res.E2 = (cpp - cmm - cpm + cmp) / nc;
    res.E = (cpp + cmm - cpm - cmp) / nc;
    res.n_c = n_c;
    return res;
}

double chsh(double E_ab, double E_abp, double E_apb, double E_apbp) {
    return E_ab - E_abp + E_apb + E_apbp;
}

std::vector<WindowSweepRow> window_sweep(const EventLog& log1, const EventLog& log2,
                                         double tau, const std::vector<double>& W_list) {
    if (W_list.empty()) throw ConfigError("window sweep: W list is empty");
    // Every settings pair that occurs in the logs gets a row at every W, even
    // when no pair survives that window; the all-pairs tally enumerates them.
    const TableMap all_keys = count_all_pairs(log1, log2);
    std::vector<WindowSweepRow> rows;
    for (double W : W_list) {
        TableMap tables = count_coincidences(log1, log2, AnalysisConfig{tau, W});
        for (const auto& [key, reference] : all_keys) {
            WindowSweepRow row;
            row.W = W;
            const auto it = tables.find(key);
            if (it != tables.end()) {
                row.table = it->second;
            } else {
                row.table.phi1 = reference.phi1;
                row.table.phi2 = reference.phi2;
            }
            try {
                row.result = correlations(row.table);
            } catch (const EmptyTableError&) {
                row.result.reset();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

StreamingCounter::StreamingCounter(double tau, std::vector<double> W_list, bool all_pairs)
    : tau_(tau), W_list_(std::move(W_list)), want_all_pairs_(all_pairs) {
    if (!(tau_ > 0.0)) throw ConfigError("analysis: tau must be positive");
    k_windows_.reserve(W_list_.size());
    for (double W : W_list_) {
        if (!(W >= tau_)) throw ConfigError("analysis: W must be at least tau");
        k_windows_.push_back(static_cast<long long>(std::ceil(W / tau_)));
    }
    per_window_.resize(W_list_.size());
}

void StreamingCounter::pair(std::uint64_t, const std::optional<EventRecord>& station1,
                            const std::optional<EventRecord>& station2) {
    ++pairs_seen_;
    if (!station1 || !station2) return;
    ++complete_pairs_;
    const EventRecord& r1 = *station1;
    const EventRecord& r2 = *station2;
    if (want_all_pairs_) table_for(all_pairs_, r1, r2).add(r1.x, r2.x);
    const long long k1 = discretize(r1.t, tau_);
    const long long k2 = discretize(r2.t, tau_);
    const long long dk = std::llabs(k1 - k2);
    for (std::size_t i = 0; i < k_windows_.size(); ++i) {
        if (dk < k_windows_[i]) table_for(per_window_[i], r1, r2).add(r1.x, r2.x);
    }
}

} // namespace bellsim
