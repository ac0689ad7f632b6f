#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bellsim {

enum class ExperimentKind { PhotonI, PhotonII, PhotonIII, Neutron, NeutronRandomChi };

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Flat key-value run description. Angle-valued keys accept a `deg` suffix in
// the text form and are stored in radians. Unknown and duplicate keys are
// rejected at parse time.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::PhotonI;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string run_name;  // empty: derived from the experiment kind

    // photon experiments
    std::uint64_t n_pairs = 100000;
    double T0 = 1000.0;
    double tau = 1.0;
    std::vector<double> W{1.0};
    int phi_points = 33;         // analyzer grid size over [0, 2*pi]
    double a1 = 0.0;             // station-1 analyzer angles for the CHSH run
    double a1_prime = kPi / 4;
    double a2 = kPi / 8;
    double a2_prime = 3 * kPi / 8;
    double xi = 0.0;             // fixed source angle (photon_II)
    double eta1 = 0.0;           // source polarizer angles (photon_III)
    double eta2 = kPi / 2;

    // neutron experiments
    double gamma = 0.99;
    double R = 0.2;
    std::uint64_t n_per_setting = 10000;
    std::uint64_t warmup = 5000; // uncounted settling neutrons per network
    int grid_points = 8;         // (alpha, chi) grid size over [0, 2*pi)
    double alpha = 0.0;          // base rotator/phase settings for sweeps
    double chi0 = 0.0;
    double chi1 = 0.0;
    bool flipper_on = false;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);

// Canonical text form; parse_config(render_config(cfg)) == cfg.
std::string render_config(const RunConfig& cfg);

const char* experiment_name(ExperimentKind kind);

} // namespace bellsim
