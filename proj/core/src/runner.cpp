#include "bellsim/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "bellsim/coincidence.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/neutron.hpp"
#include "bellsim/oracle.hpp"
#include "bellsim/photon.hpp"

namespace bellsim {
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string label(const char* base, int i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s#%d", base, i);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw SimError("cannot open output file " + p.string());
    return os;
}

std::string run_name(const RunConfig& cfg) {
    return cfg.run_name.empty() ? experiment_name(cfg.experiment) : cfg.run_name;
}

bool is_photon(ExperimentKind k) {
    return k == ExperimentKind::PhotonI || k == ExperimentKind::PhotonII ||
           k == ExperimentKind::PhotonIII;
}

SourceMode make_mode(const RunConfig& cfg) {
    switch (cfg.experiment) {
        case ExperimentKind::PhotonII: return ExperimentII{cfg.xi};
        case ExperimentKind::PhotonIII: return ExperimentIII{cfg.eta1, cfg.eta2};
        default: return ExperimentI{};
    }
}

Expectations photon_oracle(const RunConfig& cfg, double phi1, double phi2) {
    switch (cfg.experiment) {
        case ExperimentKind::PhotonII:
            return photon_product(cfg.xi, cfg.xi + kPi / 2, phi1, phi2);
        case ExperimentKind::PhotonIII:
            return photon_product(cfg.eta1, cfg.eta2, phi1, phi2);
        default: return photon_singlet(phi1, phi2);
    }
}

const char* kCorrelationHeader = "phi1,phi2,W,tau,Cpp,Cpm,Cmp,Cmm,Nc,E1,E2,E";
const char* kNeutronHeader = "alpha,chi,N_O_up,N_H,N_lost,E";

void correlation_row(std::ostream& os, double W, double tau, const CoincidenceTable& tb,
                     const std::optional<CorrelationResult>& res) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%llu,%llu,%llu,%llu,%llu,%.17g,%.17g,%.17g\n",
                  tb.phi1, tb.phi2, W, tau,
                  static_cast<unsigned long long>(tb.count(+1, +1)),
                  static_cast<unsigned long long>(tb.count(+1, -1)),
                  static_cast<unsigned long long>(tb.count(-1, +1)),
                  static_cast<unsigned long long>(tb.count(-1, -1)),
                  static_cast<unsigned long long>(tb.total()),
                  res ? res->E1 : nan, res ? res->E2 : nan, res ? res->E : nan);
    os << buf;
}

void table_rows(std::ostream& os, double W, double tau, const TableMap& tables) {
    for (const auto& [key, tb] : tables) {
        std::optional<CorrelationResult> res;
        try {
            res = correlations(tb);
        } catch (const EmptyTableError&) {
        }
        correlation_row(os, W, tau, tb, res);
    }
}

void comparison_row(std::ostream& os, double x1, double x2, double E_sim, double E_oracle) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x1, x2, E_sim,
                  E_oracle, std::fabs(E_sim - E_oracle));
    os << buf;
}

void neutron_row(std::ostream& os, double alpha, double chi, const RunCounts& counts,
                 double E) {
    char buf[240];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%llu,%llu,%llu,%.17g\n", alpha, chi,
                  static_cast<unsigned long long>(counts.n_o_up),
                  static_cast<unsigned long long>(counts.n_h),
                  static_cast<unsigned long long>(counts.n_lost + counts.n_o_rejected), E);
    os << buf;
}

double table_E(const TableMap& tables, double phi1, double phi2) {
    auto it = tables.find(SettingKey{phi1, phi2});
    if (it == tables.end()) {
        throw EmptyTableError("no events at settings (" + fmt(phi1) + ", " + fmt(phi2) + ")");
    }
    return correlations(it->second).E;
}

RunOutputs run_photon(const RunConfig& cfg, const fs::path& out) {
    const std::string name = run_name(cfg);
    RngStream root(cfg.seed);
    const SourceMode mode = make_mode(cfg);

    RunOutputs outputs;
    const fs::path corr_path = out / (name + "_correlation.csv");
    const fs::path comp_path = out / (name + "_comparison.csv");
    auto corr = open_out(corr_path);
    auto comp = open_out(comp_path);
    corr << kCorrelationHeader << "\n";
    comp << "phi1,phi2,E_sim,E_oracle,abs_dev\n";

    const double step = 2.0 * kPi / (cfg.phi_points - 1);
    for (int i = 0; i < cfg.phi_points; ++i) {
        const double phi = i * step;
        RngStream stream = root.substream(label("grid", i));
        StreamingCounter counter(cfg.tau, cfg.W, true);
        run_experiment_into(mode, StationSettings{phi, phi, cfg.T0},
                            StationSettings{0.0, 0.0, cfg.T0}, cfg.n_pairs, stream, counter);
        for (std::size_t wi = 0; wi < cfg.W.size(); ++wi) {
            table_rows(corr, cfg.W[wi], cfg.tau, counter.windowed(wi));
        }
        table_rows(corr, kInf, cfg.tau, counter.all_pairs());

        double E_sim = std::numeric_limits<double>::quiet_NaN();
        for (const auto& [key, tb] : counter.windowed(0)) {
            try {
                E_sim = correlations(tb).E;
            } catch (const EmptyTableError&) {
            }
        }
        comparison_row(comp, phi, 0.0, E_sim, photon_oracle(cfg, phi, 0.0).E);
    }
    outputs.files.push_back(corr_path);
    outputs.files.push_back(comp_path);

    // CHSH run with the four analyzer settings mixed by the per-event bits;
    // its event logs are kept for offline re-analysis.
    RngStream stream = root.substream("chsh");
    auto [log1, log2] = run_experiment(mode, StationSettings{cfg.a1, cfg.a1_prime, cfg.T0},
                                       StationSettings{cfg.a2, cfg.a2_prime, cfg.T0},
                                       cfg.n_pairs, stream);
    for (const EventLog* log : {&log1, &log2}) {
        const fs::path p =
            out / (name + "_station" + std::to_string(log->station) + ".csv");
        auto os = open_out(p);
        write_event_log_csv(os, *log);
        outputs.files.push_back(p);
    }
    const TableMap tables =
        count_coincidences(log1, log2, AnalysisConfig{cfg.tau, cfg.W.front()});
    const double S = chsh(table_E(tables, cfg.a1, cfg.a2), table_E(tables, cfg.a1, cfg.a2_prime),
                          table_E(tables, cfg.a1_prime, cfg.a2),
                          table_E(tables, cfg.a1_prime, cfg.a2_prime));
    const fs::path chsh_path = out / (name + "_chsh.csv");
    auto cs = open_out(chsh_path);
    cs << "a1,a2,a1p,a2p,S\n";
    cs << fmt(cfg.a1) << "," << fmt(cfg.a2) << "," << fmt(cfg.a1_prime) << ","
       << fmt(cfg.a2_prime) << "," << fmt(S) << "\n";
    outputs.files.push_back(chsh_path);
    return outputs;
}

InterferometerConfig neutron_base(const RunConfig& cfg) {
    InterferometerConfig base;
    base.gamma = cfg.gamma;
    base.R = cfg.R;
    base.n_per_setting = cfg.n_per_setting;
    base.warmup = cfg.warmup;
    base.flipper_on = cfg.flipper_on;
    return base;
}

void neutron_chsh_rows(std::ostream& os, const InterferometerConfig& base,
                       const RngStream& root) {
    os << "alpha,chi,alphap,chip,S,sign_convention\n";
    const ChshSettings best = chsh_bound_settings();
    const double S_best = chsh_neutron(best.alpha, best.chi, best.alpha_p, best.chi_p, base,
                                       root.substream("chsh max"));
    os << fmt(best.alpha) << "," << fmt(best.chi) << "," << fmt(best.alpha_p) << ","
       << fmt(best.chi_p) << "," << fmt(S_best) << ",neutron\n";
    // The historical setting list; its chi' differs from the maximizer's.
    const double S_hist = chsh_neutron(0.0, kPi / 4, kPi / 2, kPi / 4, base,
                                       root.substream("chsh historical"));
    os << fmt(0.0) << "," << fmt(kPi / 4) << "," << fmt(kPi / 2) << "," << fmt(kPi / 4) << ","
       << fmt(S_hist) << ",neutron\n";
}

RunOutputs run_neutron(const RunConfig& cfg, const fs::path& out) {
    const std::string name = run_name(cfg);
    RngStream root(cfg.seed);
    const InterferometerConfig base = neutron_base(cfg);

    RunOutputs outputs;
    const fs::path corr_path = out / (name + "_correlation.csv");
    const fs::path comp_path = out / (name + "_comparison.csv");
    auto corr = open_out(corr_path);
    auto comp = open_out(comp_path);
    corr << kNeutronHeader << "\n";
    comp << "alpha,chi,E_sim,E_oracle,abs_dev\n";

    const double step = 2.0 * kPi / cfg.grid_points;
    for (int i = 0; i < cfg.grid_points; ++i) {
        for (int j = 0; j < cfg.grid_points; ++j) {
            const double alpha = i * step;
            const double chi = j * step;
            const CorrelationRuns runs = measure_correlation_runs(alpha, chi, base, root);
            neutron_row(corr, alpha, chi, runs.counts[0], runs.E);
            comparison_row(comp, alpha, chi, runs.E, neutron_correlation(alpha, chi));
        }
    }
    outputs.files.push_back(corr_path);
    outputs.files.push_back(comp_path);

    const fs::path chsh_path = out / (name + "_chsh.csv");
    auto cs = open_out(chsh_path);
    neutron_chsh_rows(cs, base, root);
    outputs.files.push_back(chsh_path);
    return outputs;
}

RunOutputs run_random_chi(const RunConfig& cfg, const fs::path& out) {
    const std::string name = run_name(cfg);
    RngStream root(cfg.seed);
    const InterferometerConfig base = neutron_base(cfg);

    RunOutputs outputs;
    const fs::path corr_path = out / (name + "_correlation.csv");
    const fs::path comp_path = out / (name + "_comparison.csv");
    auto corr = open_out(corr_path);
    auto comp = open_out(comp_path);
    corr << kNeutronHeader << "\n";
    comp << "alpha,chi,E_sim,E_oracle,abs_dev\n";

    const double step = 2.0 * kPi / cfg.grid_points;
    std::vector<double> chi_set;
    for (int j = 0; j < cfg.grid_points; ++j) chi_set.push_back(j * step);

    for (int i = 0; i < cfg.grid_points; ++i) {
        const double alpha = i * step;
        const auto points = random_chi_run(alpha, chi_set, base, root.substream(label("random", i)));
        for (const RandomChiPoint& pt : points) {
            neutron_row(corr, pt.alpha, pt.chi, pt.pass_counts, pt.E);
            // With the phase setting drawn per neutron, the stale-register
            // path decoheres and the fringe amplitude drops to T = 1-R.
            comparison_row(comp, pt.alpha, pt.chi, pt.E,
                           (1.0 - cfg.R) * neutron_correlation(pt.alpha, pt.chi));
        }
    }
    outputs.files.push_back(corr_path);
    outputs.files.push_back(comp_path);
    return outputs;
}

} // namespace

fs::path resolve_out_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("BELLSIM_OUT"); env && *env) return fs::path(env);
    return fs::path(cfg.out_dir);
}

RunOutputs run(const RunConfig& cfg) {
    const fs::path out = resolve_out_dir(cfg);
    fs::create_directories(out);
    switch (cfg.experiment) {
        case ExperimentKind::Neutron: return run_neutron(cfg, out);
        case ExperimentKind::NeutronRandomChi: return run_random_chi(cfg, out);
        default: return run_photon(cfg, out);
    }
}

RunOutputs sweep(const RunConfig& cfg, const std::string& parameter,
                 const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep: no values given");
    const fs::path out = resolve_out_dir(cfg);
    fs::create_directories(out);
    const std::string name = run_name(cfg);
    const fs::path path = out / (name + "_sweep_" + parameter + ".csv");
    auto os = open_out(path);
    RngStream root(cfg.seed);

    const bool photon = is_photon(cfg.experiment);
    if (parameter == "phi" || parameter == "eta") {
        if (!photon) throw ConfigError("sweep: parameter '" + parameter +
                                       "' applies to photon experiments");
        os << "parameter,value," << kCorrelationHeader << "\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i];
            SourceMode mode = make_mode(cfg);
            StationSettings s1{cfg.a1, cfg.a1, cfg.T0};
            StationSettings s2{cfg.a2, cfg.a2, cfg.T0};
            if (parameter == "phi") {
                s1 = StationSettings{v, v, cfg.T0};
                s2 = StationSettings{0.0, 0.0, cfg.T0};
            } else if (cfg.experiment == ExperimentKind::PhotonII) {
                mode = ExperimentII{v};
            } else if (cfg.experiment == ExperimentKind::PhotonIII) {
                mode = ExperimentIII{v, v + kPi / 2};
            } else {
                throw ConfigError("sweep: parameter 'eta' applies to photon_II/photon_III");
            }
            RngStream stream = root.substream(label("sweep", static_cast<int>(i)));
            StreamingCounter counter(cfg.tau, cfg.W, false);
            run_experiment_into(mode, s1, s2, cfg.n_pairs, stream, counter);
            for (std::size_t wi = 0; wi < cfg.W.size(); ++wi) {
                std::ostringstream rows;
                table_rows(rows, cfg.W[wi], cfg.tau, counter.windowed(wi));
                std::istringstream lines(rows.str());
                std::string row;
                while (std::getline(lines, row)) {
                    os << parameter << "," << fmt(v) << "," << row << "\n";
                }
            }
        }
    } else if (parameter == "W") {
        if (!photon) throw ConfigError("sweep: parameter 'W' applies to photon experiments");
        os << "parameter,value," << kCorrelationHeader << "\n";
        RngStream stream = root.substream("sweep");
        StreamingCounter counter(cfg.tau, values, false);
        run_experiment_into(make_mode(cfg), StationSettings{cfg.a1, cfg.a1, cfg.T0},
                            StationSettings{cfg.a2, cfg.a2, cfg.T0}, cfg.n_pairs, stream,
                            counter);
        for (std::size_t wi = 0; wi < values.size(); ++wi) {
            std::ostringstream rows;
            table_rows(rows, values[wi], cfg.tau, counter.windowed(wi));
            std::istringstream lines(rows.str());
            std::string row;
            while (std::getline(lines, row)) {
                os << parameter << "," << fmt(values[wi]) << "," << row << "\n";
            }
        }
    } else if (parameter == "gamma") {
        if (photon) throw ConfigError("sweep: parameter 'gamma' applies to neutron experiments");
        os << "parameter,value,alpha,chi,alphap,chip,S,sign_convention\n";
        const ChshSettings best = chsh_bound_settings();
        for (std::size_t i = 0; i < values.size(); ++i) {
            InterferometerConfig base = neutron_base(cfg);
            base.gamma = values[i];
            const double S =
                chsh_neutron(best.alpha, best.chi, best.alpha_p, best.chi_p, base,
                             root.substream(label("sweep", static_cast<int>(i))));
            os << parameter << "," << fmt(values[i]) << "," << fmt(best.alpha) << ","
               << fmt(best.chi) << "," << fmt(best.alpha_p) << "," << fmt(best.chi_p) << ","
               << fmt(S) << ",neutron\n";
        }
    } else if (parameter == "alpha" || parameter == "chi") {
        if (photon) throw ConfigError("sweep: parameter '" + parameter +
                                      "' applies to neutron experiments");
        os << "parameter,value," << kNeutronHeader << "\n";
        const InterferometerConfig base = neutron_base(cfg);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double alpha = parameter == "alpha" ? values[i] : cfg.alpha;
            const double chi = parameter == "chi" ? values[i] : cfg.chi0 - cfg.chi1;
            const CorrelationRuns runs = measure_correlation_runs(
                alpha, chi, base, root.substream(label("sweep", static_cast<int>(i))));
            std::ostringstream row;
            neutron_row(row, alpha, chi, runs.counts[0], runs.E);
            os << parameter << "," << fmt(values[i]) << "," << row.str();
        }
    } else {
        throw ConfigError("sweep: unknown parameter '" + parameter + "'");
    }
    return RunOutputs{{path}};
}

RunOutputs oracle_report(const RunConfig& cfg) {
    const fs::path out = resolve_out_dir(cfg);
    fs::create_directories(out);
    const std::string name = run_name(cfg);
    RunOutputs outputs;

    if (is_photon(cfg.experiment)) {
        const fs::path corr_path = out / (name + "_oracle_correlation.csv");
        auto corr = open_out(corr_path);
        corr << kCorrelationHeader << "\n";
        const double step = 2.0 * kPi / (cfg.phi_points - 1);
        for (int i = 0; i < cfg.phi_points; ++i) {
            const double phi = i * step;
            const Expectations e = photon_oracle(cfg, phi, 0.0);
            CoincidenceTable tb;
            tb.phi1 = phi;
            tb.phi2 = 0.0;
            correlation_row(corr, cfg.W.front(), cfg.tau, tb,
                            CorrelationResult{e.E1, e.E2, e.E, 0});
        }
        outputs.files.push_back(corr_path);

        const fs::path chsh_path = out / (name + "_oracle_chsh.csv");
        auto cs = open_out(chsh_path);
        cs << "a1,a2,a1p,a2p,S\n";
        const double S = chsh(photon_oracle(cfg, cfg.a1, cfg.a2).E,
                              photon_oracle(cfg, cfg.a1, cfg.a2_prime).E,
                              photon_oracle(cfg, cfg.a1_prime, cfg.a2).E,
                              photon_oracle(cfg, cfg.a1_prime, cfg.a2_prime).E);
        cs << fmt(cfg.a1) << "," << fmt(cfg.a2) << "," << fmt(cfg.a1_prime) << ","
           << fmt(cfg.a2_prime) << "," << fmt(S) << "\n";
        outputs.files.push_back(chsh_path);
        return outputs;
    }

    const bool random = cfg.experiment == ExperimentKind::NeutronRandomChi;
    const double T = 1.0 - cfg.R;
    const fs::path corr_path = out / (name + "_oracle_correlation.csv");
    auto corr = open_out(corr_path);
    corr << kNeutronHeader << "\n";
    const double step = 2.0 * kPi / cfg.grid_points;
    const double n = static_cast<double>(cfg.n_per_setting) / (random ? cfg.grid_points : 1);
    for (int i = 0; i < cfg.grid_points; ++i) {
        for (int j = 0; j < cfg.grid_points; ++j) {
            const double alpha = i * step;
            const double chi = j * step;
            const double E =
                (random ? T : 1.0) * neutron_correlation(alpha, chi);
            // Expected fates: mirror losses T of the beam, H-beam R(T^2+R^2),
            // O-beam spin-up T R^2 (1 + E_fringe).
            RunCounts counts;
            const double p_up = T * cfg.R * cfg.R * (1.0 + E);
            counts.n_o_up = static_cast<std::uint64_t>(std::llround(n * p_up));
            counts.n_h =
                static_cast<std::uint64_t>(std::llround(n * cfg.R * (T * T + cfg.R * cfg.R)));
            counts.n_lost = static_cast<std::uint64_t>(
                std::llround(n * (T + T * cfg.R * cfg.R * (1.0 - E))));
            neutron_row(corr, alpha, chi, counts, E);
        }
    }
    outputs.files.push_back(corr_path);

    if (!random) {
        const fs::path chsh_path = out / (name + "_oracle_chsh.csv");
        auto cs = open_out(chsh_path);
        cs << "alpha,chi,alphap,chip,S,sign_convention\n";
        const ChshSettings best = chsh_bound_settings();
        cs << fmt(best.alpha) << "," << fmt(best.chi) << "," << fmt(best.alpha_p) << ","
           << fmt(best.chi_p) << "," << fmt(best.S) << ",neutron\n";
        const double S_hist = neutron_chsh_ideal(0.0, kPi / 4, kPi / 2, kPi / 4);
        cs << fmt(0.0) << "," << fmt(kPi / 4) << "," << fmt(kPi / 2) << "," << fmt(kPi / 4)
           << "," << fmt(S_hist) << ",neutron\n";
        outputs.files.push_back(chsh_path);
    }
    return outputs;
}

RunOutputs analyze_logs(const fs::path& station1_csv, const fs::path& station2_csv,
                        double tau, const std::vector<double>& W_list,
                        const fs::path& out_dir, const std::string& name) {
    std::ifstream in1(station1_csv);
    if (!in1) throw SimError("cannot open event log " + station1_csv.string());
    std::ifstream in2(station2_csv);
    if (!in2) throw SimError("cannot open event log " + station2_csv.string());
    const EventLog log1 = read_event_log_csv(in1, 1);
    const EventLog log2 = read_event_log_csv(in2, 2);

    fs::create_directories(out_dir);
    const fs::path path = out_dir / (name + "_analysis.csv");
    auto os = open_out(path);
    os << kCorrelationHeader << "\n";
    for (const WindowSweepRow& row : window_sweep(log1, log2, tau, W_list)) {
        correlation_row(os, row.W, tau, row.table, row.result);
    }
    return RunOutputs{{path}};
}

} // namespace bellsim
