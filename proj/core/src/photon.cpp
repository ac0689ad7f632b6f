#include "bellsim/photon.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;
constexpr double kHalfPi = 1.570796326794896619231321691639751442;

EventRecord make_record(std::uint64_t emission, const PhotonState& p,
                        const StationSettings& settings, RngStream& stream) {
    int A = stream.random_bit();
    auto [xi_prime, phi] = eom_rotate(p, settings, A);
    int x = malus_split(xi_prime, stream);
    double t = time_tag(xi_prime, settings.T0, stream);
    return EventRecord{emission, x, t, phi, A};
}

} // namespace

double reduce_angle(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double sin_two_xi(double xi_prime) {
    // Argument reduction by quarter turns: with u = xi'/(pi/2) and n the
    // nearest integer, sin(2*xi') = (-1)^n * sin(pi*(u-n)). When xi' is an
    // exact multiple of pi/2 the difference u-n is exactly 0 and so is the
    // result, which a direct std::sin(2*xi_prime) misses by ~1e-16.
    double u = xi_prime / kHalfPi;
    double n = std::nearbyint(u);
    double s = std::sin((kHalfPi + kHalfPi) * (u - n));
    return (static_cast<long long>(n) & 1LL) ? -s : s;
}

std::pair<PhotonState, PhotonState> emit_pair(const SourceMode& mode, RngStream& stream) {
    double xi;
    if (const auto* fixed = std::get_if<ExperimentII>(&mode)) {
        xi = reduce_angle(fixed->xi_fixed);
    } else {
        xi = stream.uniform_angle();
    }
    return {PhotonState{xi, 1}, PhotonState{reduce_angle(xi + kHalfPi), 2}};
}

std::optional<PhotonState> source_polarizer(const PhotonState& p, double eta,
                                            RngStream& stream) {
    if (malus_split(p.xi - eta, stream) < 0) return std::nullopt;
    return PhotonState{reduce_angle(eta), p.station};
}

std::pair<double, double> eom_rotate(const PhotonState& p, const StationSettings& settings,
                                     int A) {
    double phi = A ? settings.a_prime : settings.a;
    return {p.xi - phi, phi};
}

int malus_split(double xi_prime, RngStream& stream) {
    double c = std::cos(xi_prime);
    return stream.uniform_open() <= c * c ? +1 : -1;
}

double time_tag(double xi_prime, double T0, RngStream& stream) {
    double s = sin_two_xi(xi_prime);
    double s2 = s * s;
    return T0 * (s2 * s2) * stream.uniform_open();
}

void run_experiment_into(const SourceMode& mode, const StationSettings& settings1,
                         const StationSettings& settings2, std::uint64_t n_pairs,
                         RngStream& stream, PairSink& sink) {
    if (n_pairs == 0) throw ConfigError("n_pairs must be at least 1");
    const auto* third = std::get_if<ExperimentIII>(&mode);
    for (std::uint64_t n = 0; n < n_pairs; ++n) {
        auto [p1, p2] = emit_pair(mode, stream);
        std::optional<EventRecord> r1, r2;
        if (third) {
            if (auto q1 = source_polarizer(p1, third->eta1, stream)) {
                r1 = make_record(n, *q1, settings1, stream);
            }
            if (auto q2 = source_polarizer(p2, third->eta2, stream)) {
                r2 = make_record(n, *q2, settings2, stream);
            }
        } else {
            r1 = make_record(n, p1, settings1, stream);
            r2 = make_record(n, p2, settings2, stream);
        }
        sink.pair(n, r1, r2);
    }
}

std::pair<EventLog, EventLog> run_experiment(const SourceMode& mode,
                                             const StationSettings& settings1,
                                             const StationSettings& settings2,
                                             std::uint64_t n_pairs, RngStream& stream) {
    struct LogSink : PairSink {
        EventLog log1{1, {}};
        EventLog log2{2, {}};
        void pair(std::uint64_t, const std::optional<EventRecord>& r1,
                  const std::optional<EventRecord>& r2) override {
            if (r1) log1.records.push_back(*r1);
            if (r2) log2.records.push_back(*r2);
        }
    } sink;
    sink.log1.records.reserve(n_pairs);
    sink.log2.records.reserve(n_pairs);
    run_experiment_into(mode, settings1, settings2, n_pairs, stream, sink);
    return {std::move(sink.log1), std::move(sink.log2)};
}

void write_event_log_csv(std::ostream& os, const EventLog& log) {
    os << "emission,x,t,phi,A\n";
    char buf[128];
    for (const EventRecord& r : log.records) {
        std::snprintf(buf, sizeof buf, "%llu,%d,%.17g,%.17g,%d\n",
                      static_cast<unsigned long long>(r.emission), r.x, r.t, r.phi, r.A);
        os << buf;
    }
}

EventLog read_event_log_csv(std::istream& is, int station) {
    EventLog log{station, {}};
    std::string line;
    if (!std::getline(is, line) || line.rfind("emission,x,t,phi,A", 0) != 0) {
        throw ConfigError("event log: missing or malformed header");
    }
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        EventRecord r;
        unsigned long long emission = 0;
        if (std::sscanf(line.c_str(), "%llu,%d,%lf,%lf,%d", &emission, &r.x, &r.t, &r.phi,
                        &r.A) != 5) {
            throw ConfigError("event log: bad row at line " + std::to_string(lineno));
        }
        r.emission = emission;
        if (!log.records.empty() && log.records.back().emission >= r.emission) {
            throw ConfigError("event log: emission indices not increasing at line " +
                              std::to_string(lineno));
        }
        log.records.push_back(r);
    }
    return log;
}

} // namespace bellsim
