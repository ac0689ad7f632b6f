#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bellsim/rng.hpp"

namespace bellsim {

// Linear-polarization messenger. xi already contains the (station-1)*pi/2
// source offset, so both stations run the same station code.
struct PhotonState {
    double xi = 0.0;  // polarization angle, radians, reduced to [0, 2*pi)
    int station = 1;  // 1 or 2
};

struct StationSettings {
    double a = 0.0;        // analyzer rotation used when the setting bit is 0
    double a_prime = 0.0;  // analyzer rotation used when the setting bit is 1
    double T0 = 1000.0;    // time-tag scale
};

struct EventRecord {
    std::uint64_t emission = 0;  // pair identifier
    int x = 0;                   // detector outcome, +1 or -1
    double t = 0.0;              // time tag in [0, T0]
    double phi = 0.0;            // analyzer rotation actually applied
    int A = 0;                   // setting selector bit
};

struct EventLog {
    int station = 0;
    std::vector<EventRecord> records;  // emission indices strictly increasing
};

struct ExperimentI {};
struct ExperimentII {
    double xi_fixed = 0.0;
};
struct ExperimentIII {
    double eta1 = 0.0;
    double eta2 = 0.0;
};
using SourceMode = std::variant<ExperimentI, ExperimentII, ExperimentIII>;

// Reduce an angle into [0, 2*pi).
double reduce_angle(double angle);

// sin(2*xi') evaluated so the result is exactly 0 whenever xi' is an exact
// double multiple of pi/2. The time-tag scale must vanish exactly at those
// angles or a crossed analyzer lands in time bin 1 instead of bin 0.
double sin_two_xi(double xi_prime);

// Source emission: particle 1 carries xi, particle 2 carries xi + pi/2.
std::pair<PhotonState, PhotonState> emit_pair(const SourceMode& mode, RngStream& stream);

// Malus-rule polarizer at angle eta. On pass the polarization becomes
// definite (xi = eta); on fail the photon is discarded and never reaches
// the station.
std::optional<PhotonState> source_polarizer(const PhotonState& p, double eta,
                                            RngStream& stream);

// Electro-optic modulator: returns (xi - phi, phi) with phi selected from
// the settings by the bit A.
std::pair<double, double> eom_rotate(const PhotonState& p, const StationSettings& settings,
                                     int A);

// Polarizing beam splitter: +1 iff r <= cos^2(xi'), else -1.
int malus_split(double xi_prime, RngStream& stream);

// Detection delay, uniform on [0, T0 * sin^4(2*xi')].
double time_tag(double xi_prime, double T0, RngStream& stream);

// Receives the two arm records of each emission as they are produced.
// An absent optional is an Experiment III discard on that arm.
class PairSink {
public:
    virtual ~PairSink() = default;
    virtual void pair(std::uint64_t emission, const std::optional<EventRecord>& station1,
                      const std::optional<EventRecord>& station2) = 0;
};

// Event generation loop. Draw order per emission, fixed for reproducibility:
// source angle (experiments I and III), then per arm in station order:
// polarizer draw (experiment III), and for an arriving photon the setting
// bit, the beam-splitter draw and the time-tag draw. Discarded photons
// consume no station draws.
void run_experiment_into(const SourceMode& mode, const StationSettings& settings1,
                         const StationSettings& settings2, std::uint64_t n_pairs,
                         RngStream& stream, PairSink& sink);

// Same loop, materializing the two station logs.
std::pair<EventLog, EventLog> run_experiment(const SourceMode& mode,
                                             const StationSettings& settings1,
                                             const StationSettings& settings2,
                                             std::uint64_t n_pairs, RngStream& stream);

// CSV serialization, header `emission,x,t,phi,A`. Values print with full
// round-trip precision, so rereading reproduces the log bit-exactly.
void write_event_log_csv(std::ostream& os, const EventLog& log);
EventLog read_event_log_csv(std::istream& is, int station);

} // namespace bellsim
