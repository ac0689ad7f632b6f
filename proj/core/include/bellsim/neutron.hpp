#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "bellsim/rng.hpp"

namespace bellsim {

// Two-component spinor message u = (e^{i psi1} cos(theta/2), e^{i psi2} sin(theta/2)).
struct NeutronMessage {
    std::complex<double> amp_up{1.0, 0.0};
    std::complex<double> amp_down{0.0, 0.0};

    double norm2() const { return std::norm(amp_up) + std::norm(amp_down); }
    // z-projection of the magnetic moment.
    double m_z() const { return std::norm(amp_up) - std::norm(amp_down); }
};

NeutronMessage spin_up_message();

// exp(i * (angle/2) * sigma.axis); axis must be normalized.
NeutronMessage rotate_about_axis(const NeutronMessage& u, const std::array<double, 3>& axis,
                                 double angle);

// Mu-metal spin turner: +pi/2 about y on the H designation, -pi/2 on O.
enum class MuMetalPath { H, O };
NeutronMessage mu_metal(const NeutronMessage& u, MuMetalPath path);

// Scalar phase e^{i chi}; also the free-flight phase update.
NeutronMessage phase_shift(const NeutronMessage& u, double chi);

// Rotation by alpha about x; alpha = pi is the spin flipper.
NeutronMessage spin_rotator(const NeutronMessage& u, double alpha);

// Adaptive beam splitter. Besides the fixed (R, gamma) it stores exactly ten
// adapting reals: two spinor registers and the two-component arrival vector v.
class DlmBeamSplitter {
public:
    DlmBeamSplitter(double R, double gamma);

    // Fresh pre-run state: v0 and both registers drawn from the stream.
    void initialize(RngStream& stream);

    // Copy the message into the arrival channel's register and pull v toward
    // that channel: v <- gamma*v + (1-gamma)*e_channel. Keeps v0+v1 == 1
    // exactly.
    void absorb(int channel, const NeutronMessage& u);

    // Combine the registers through the transmission/reflection matrix
    // (sqrt(T) diagonal, i*sqrt(R) off-diagonal per spin component, weighted
    // by sqrt(v)) and send the normalized message through one output channel:
    // channel 1 iff the channel-1 weight exceeds a fresh random number.
    std::pair<int, NeutronMessage> emit(RngStream& stream) const;

    // (channel-0 weight, channel-1 weight); sums to 1 when the registers are
    // unit messages and v is normalized.
    std::array<double, 2> emission_weights() const;

    double v0() const { return v_[0]; }
    double v1() const { return v_[1]; }
    const NeutronMessage& reg(int channel) const { return reg_[channel]; }
    double reflectivity() const { return R_; }
    double gamma() const { return gamma_; }

private:
    double R_;
    double gamma_;
    NeutronMessage reg_[2];
    double v_[2] = {0.5, 0.5};
};

struct InterferometerConfig {
    double chi0 = 0.0;  // phase on the path through BS1 (the control knob is chi = chi0 - chi1)
    double chi1 = 0.0;  // phase on the path through BS2
    double alpha = 0.0; // spin-rotator angle on the O-beam
    bool flipper_on = false;
    double gamma = 0.99;
    double R = 0.2;
    std::uint64_t n_per_setting = 10000;
    // Uncounted neutrons processed first so the splitters adapt before
    // counting starts. A freshly seeded network needs on the order of
    // 1/(1-gamma) arrivals per splitter to converge; without the settling
    // phase that start-up leakage swamps the dark fringes.
    std::uint64_t warmup = 5000;
};

struct RunCounts {
    std::uint64_t n_o_up = 0;       // O-beam detections passing the spin analyzer
    std::uint64_t n_o_rejected = 0; // O-beam arrivals absorbed by the analyzer
    std::uint64_t n_h = 0;          // H-beam detections
    std::uint64_t n_lost = 0;       // exited the interferometer at BS1/BS2

    std::uint64_t total() const { return n_o_up + n_o_rejected + n_h + n_lost; }
};

// One fixed-setting run of the four-splitter network: fresh splitter states,
// cfg.warmup uncounted neutrons, then n_per_setting counted ones.
RunCounts run_interferometer(const InterferometerConfig& cfg, RngStream& stream);

// E(alpha,chi) from the four runs (alpha,chi), (alpha+pi,chi+pi),
// (alpha+pi,chi), (alpha,chi+pi), each n_per_setting neutrons. One network
// and one derived substream serve all four runs back to back, with the
// warmup spent once at the first run's settings; a settings change only
// costs the few arrivals it takes to refresh the splitter registers.
// Throws EmptyTableError if all four counts are zero.
struct CorrelationRuns {
    RunCounts counts[4];  // run order as listed above
    double E = 0.0;
};

CorrelationRuns measure_correlation_runs(double alpha, double chi,
                                         const InterferometerConfig& base,
                                         const RngStream& stream);

double measure_correlation(double alpha, double chi, const InterferometerConfig& base,
                           const RngStream& stream);

enum class ChshSign {
    PhotonPattern,  // E(a,b) - E(a,b') + E(a',b) + E(a',b')
    NeutronPattern, // E(a,c) + E(a,c') - E(a',c) + E(a',c')
};

double chsh_neutron(double alpha, double chi, double alpha_p, double chi_p,
                    const InterferometerConfig& base, const RngStream& stream,
                    ChshSign sign = ChshSign::NeutronPattern);

struct RandomChiPoint {
    double alpha = 0.0;
    double chi = 0.0;
    double E = 0.0;
    std::uint64_t n_counted = 0;  // sum of the four bin counts behind E
    RunCounts pass_counts;        // fate bins of the (alpha, chi) pass at this chi
};

// Random-setting mode: four passes (alpha, chi_set), (alpha+pi, chi_set+pi),
// (alpha+pi, chi_set), (alpha, chi_set+pi) through one persistent network,
// warmed up once before the first pass; within a pass the per-neutron chi is
// drawn uniformly from that pass's list and every fate is binned by the
// drawn index. E(alpha, chi_k) combines the four bins at position k, so a
// single-element chi_set reduces to the measure_correlation run pattern.
std::vector<RandomChiPoint> random_chi_run(double alpha, const std::vector<double>& chi_set,
                                           const InterferometerConfig& base,
                                           const RngStream& stream);

} // namespace bellsim
