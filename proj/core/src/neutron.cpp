#include "bellsim/neutron.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "bellsim/errors.hpp"

namespace bellsim {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfPi = kPi / 2;

void check_network_params(double R, double gamma, std::uint64_t n) {
    if (!(R > 0.0 && R < 1.0)) throw ConfigError("interferometer: R must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ConfigError("interferometer: gamma must lie in (0,1)");
    }
    if (n == 0) throw ConfigError("interferometer: n_per_setting must be at least 1");
}

// The four-splitter network. BS0 splits the incoming beam; the transmitted
// path carries the -pi/2 spin turn and the phase chi0 into BS1, the
// reflected path the +pi/2 turn and chi1 into BS2; both mirror splitters
// forward their reflected output into BS3. Each reflection contributes a
// factor i, so the O-beam intensity follows 1 + cos(alpha + chi0 - chi1).
struct Network {
    DlmBeamSplitter bs0, bs1, bs2, bs3;

    Network(double R, double gamma)
        : bs0(R, gamma), bs1(R, gamma), bs2(R, gamma), bs3(R, gamma) {}

    void initialize(RngStream& stream) {
        bs0.initialize(stream);
        bs1.initialize(stream);
        bs2.initialize(stream);
        bs3.initialize(stream);
    }

    void trace(double chi0, double chi1, double alpha, bool flipper_on, RngStream& stream,
               RunCounts& counts) {
        NeutronMessage u = spin_up_message();
        bs0.absorb(0, u);
        auto [c, w] = bs0.emit(stream);
        u = w;
        int bs3_input;
        if (c == 1) {
            u = mu_metal(u, MuMetalPath::O);
            u = phase_shift(u, chi0);
            bs1.absorb(0, u);
            auto [c1, w1] = bs1.emit(stream);
            if (c1 == 1) {
                ++counts.n_lost;
                return;
            }
            u = w1;
            bs3_input = 0;
        } else {
            u = mu_metal(u, MuMetalPath::H);
            u = phase_shift(u, chi1);
            bs2.absorb(1, u);
            auto [c2, w2] = bs2.emit(stream);
            if (c2 == 0) {
                ++counts.n_lost;
                return;
            }
            u = w2;
            bs3_input = 1;
        }
        bs3.absorb(bs3_input, u);
        auto [c3, w3] = bs3.emit(stream);
        u = w3;
        if (c3 != 0) {
            ++counts.n_h;
            return;
        }
        if (flipper_on) u = spin_rotator(u, kPi);
        u = spin_rotator(u, alpha);
        if (0.5 * (1.0 + u.m_z()) > stream.uniform_open()) {
            ++counts.n_o_up;
        } else {
            ++counts.n_o_rejected;
        }
    }
};

std::string run_label(const char* what, double alpha, double chi) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s(%.17g,%.17g)", what, alpha, chi);
    return buf;
}

// Adapt a freshly seeded network before any counting: the start-up state of
// the splitters (random registers, detuned v) leaks intensity into what
// should be dark fringes, and that leakage is a fixed event budget, not a
// fixed fraction, so it must be spent outside the counted sample.
void settle(Network& net, double chi0, double chi1, double alpha, bool flipper_on,
            std::uint64_t warmup, RngStream& stream) {
    RunCounts scratch;
    for (std::uint64_t n = 0; n < warmup; ++n) {
        net.trace(chi0, chi1, alpha, flipper_on, stream, scratch);
    }
}

} // namespace

NeutronMessage spin_up_message() { return NeutronMessage{{1.0, 0.0}, {0.0, 0.0}}; }

NeutronMessage rotate_about_axis(const NeutronMessage& u, const std::array<double, 3>& axis,
                                 double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const std::complex<double> u00(c, s * axis[2]);
    const std::complex<double> u01(s * axis[1], s * axis[0]);
    const std::complex<double> u10(-s * axis[1], s * axis[0]);
    const std::complex<double> u11(c, -s * axis[2]);
    return NeutronMessage{u00 * u.amp_up + u01 * u.amp_down,
                          u10 * u.amp_up + u11 * u.amp_down};
}

NeutronMessage mu_metal(const NeutronMessage& u, MuMetalPath path) {
    return rotate_about_axis(u, {0.0, 1.0, 0.0}, path == MuMetalPath::H ? kHalfPi : -kHalfPi);
}

NeutronMessage phase_shift(const NeutronMessage& u, double chi) {
    const std::complex<double> f = std::polar(1.0, chi);
    return NeutronMessage{f * u.amp_up, f * u.amp_down};
}

NeutronMessage spin_rotator(const NeutronMessage& u, double alpha) {
    return rotate_about_axis(u, {1.0, 0.0, 0.0}, alpha);
}

DlmBeamSplitter::DlmBeamSplitter(double R, double gamma) : R_(R), gamma_(gamma) {
    if (!(R > 0.0 && R < 1.0)) throw ConfigError("beam splitter: R must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ConfigError("beam splitter: gamma must lie in (0,1)");
    }
}

void DlmBeamSplitter::initialize(RngStream& stream) {
    const double v0 = stream.uniform_open();
    v_[0] = v0;
    v_[1] = 1.0 - v0;
    for (NeutronMessage& reg : reg_) {
        const double psi1 = stream.uniform_angle();
        const double psi2 = stream.uniform_angle();
        const double theta = kPi * stream.uniform_open();
        reg.amp_up = std::polar(std::cos(theta / 2), psi1);
        reg.amp_down = std::polar(std::sin(theta / 2), psi2);
    }
}

void DlmBeamSplitter::absorb(int channel, const NeutronMessage& u) {
    reg_[channel] = u;
    const double va = gamma_ * v_[channel] + (1.0 - gamma_);
    v_[channel] = va;
    v_[1 - channel] = 1.0 - va;
}

namespace {

struct Outputs {
    NeutronMessage out0, out1;
};

Outputs build_outputs(double R, const NeutronMessage* reg, const double* v) {
    const double sT = std::sqrt(1.0 - R);
    const double sR = std::sqrt(R);
    const double a0 = std::sqrt(v[0]);
    const double a1 = std::sqrt(v[1]);
    const double t0 = sT * a0;
    const double t1 = sT * a1;
    const std::complex<double> r0(0.0, sR * a0);
    const std::complex<double> r1(0.0, sR * a1);
    Outputs o;
    o.out1 = NeutronMessage{t0 * reg[0].amp_up + r1 * reg[1].amp_up,
                            t0 * reg[0].amp_down + r1 * reg[1].amp_down};
    o.out0 = NeutronMessage{r0 * reg[0].amp_up + t1 * reg[1].amp_up,
                            r0 * reg[0].amp_down + t1 * reg[1].amp_down};
    return o;
}

} // namespace

std::pair<int, NeutronMessage> DlmBeamSplitter::emit(RngStream& stream) const {
    const Outputs o = build_outputs(R_, reg_, v_);
    const double p1 = o.out1.norm2();
    const int channel = p1 > stream.uniform_open() ? 1 : 0;
    NeutronMessage sel = channel == 1 ? o.out1 : o.out0;
    const double n2 = sel.norm2();
    if (n2 < 1e-30) throw DegenerateStateError("beam splitter: selected output has zero norm");
    const double inv = 1.0 / std::sqrt(n2);
    sel.amp_up *= inv;
    sel.amp_down *= inv;
    return {channel, sel};
}

std::array<double, 2> DlmBeamSplitter::emission_weights() const {
    const Outputs o = build_outputs(R_, reg_, v_);
    return {o.out0.norm2(), o.out1.norm2()};
}

RunCounts run_interferometer(const InterferometerConfig& cfg, RngStream& stream) {
    check_network_params(cfg.R, cfg.gamma, cfg.n_per_setting);
    Network net(cfg.R, cfg.gamma);
    net.initialize(stream);
    settle(net, cfg.chi0, cfg.chi1, cfg.alpha, cfg.flipper_on, cfg.warmup, stream);
    RunCounts counts;
    for (std::uint64_t n = 0; n < cfg.n_per_setting; ++n) {
        net.trace(cfg.chi0, cfg.chi1, cfg.alpha, cfg.flipper_on, stream, counts);
    }
    return counts;
}

CorrelationRuns measure_correlation_runs(double alpha, double chi,
                                         const InterferometerConfig& base,
                                         const RngStream& stream) {
    check_network_params(base.R, base.gamma, base.n_per_setting);
    const double settings[4][2] = {
        {alpha, chi}, {alpha + kPi, chi + kPi}, {alpha + kPi, chi}, {alpha, chi + kPi}};
    CorrelationRuns out;
    RngStream sub = stream.substream(run_label("E", alpha, chi));
    Network net(base.R, base.gamma);
    net.initialize(sub);
    settle(net, settings[0][1], 0.0, settings[0][0], base.flipper_on, base.warmup, sub);
    for (int i = 0; i < 4; ++i) {
        for (std::uint64_t n = 0; n < base.n_per_setting; ++n) {
            net.trace(settings[i][1], 0.0, settings[i][0], base.flipper_on, sub, out.counts[i]);
        }
    }
    const double n0 = static_cast<double>(out.counts[0].n_o_up);
    const double n1 = static_cast<double>(out.counts[1].n_o_up);
    const double n2 = static_cast<double>(out.counts[2].n_o_up);
    const double n3 = static_cast<double>(out.counts[3].n_o_up);
    const double denom = n0 + n1 + n2 + n3;
    if (denom == 0.0) throw EmptyTableError("correlation: all four O-beam counts are zero");
    out.E = (n0 + n1 - n2 - n3) / denom;
    return out;
}

double measure_correlation(double alpha, double chi, const InterferometerConfig& base,
                           const RngStream& stream) {
    return measure_correlation_runs(alpha, chi, base, stream).E;
}

double chsh_neutron(double alpha, double chi, double alpha_p, double chi_p,
                    const InterferometerConfig& base, const RngStream& stream,
                    ChshSign sign) {
    const double E_ac = measure_correlation(alpha, chi, base, stream);
    const double E_acp = measure_correlation(alpha, chi_p, base, stream);
    const double E_apc = measure_correlation(alpha_p, chi, base, stream);
    const double E_apcp = measure_correlation(alpha_p, chi_p, base, stream);
    return sign == ChshSign::NeutronPattern ? E_ac + E_acp - E_apc + E_apcp
                                            : E_ac - E_acp + E_apc + E_apcp;
}

std::vector<RandomChiPoint> random_chi_run(double alpha, const std::vector<double>& chi_set,
                                           const InterferometerConfig& base,
                                           const RngStream& stream) {
    check_network_params(base.R, base.gamma, base.n_per_setting);
    if (chi_set.empty()) throw ConfigError("random chi run: chi list is empty");

    std::vector<double> shifted;
    shifted.reserve(chi_set.size());
    for (double chi : chi_set) shifted.push_back(chi + kPi);

    const double pass_alpha[4] = {alpha, alpha + kPi, alpha + kPi, alpha};
    const std::vector<double>* pass_set[4] = {&chi_set, &shifted, &chi_set, &shifted};
    std::vector<RunCounts> bins[4];

    RngStream sub = stream.substream(run_label("random", alpha, 0.0));
    Network net(base.R, base.gamma);
    net.initialize(sub);
    {
        RunCounts scratch;
        for (std::uint64_t n = 0; n < base.warmup; ++n) {
            auto idx = static_cast<std::size_t>(sub.uniform_open() *
                                                static_cast<double>(chi_set.size()));
            if (idx >= chi_set.size()) idx = chi_set.size() - 1;
            net.trace(chi_set[idx], 0.0, alpha, base.flipper_on, sub, scratch);
        }
    }
    for (int p = 0; p < 4; ++p) {
        const std::vector<double>& chis = *pass_set[p];
        bins[p].assign(chis.size(), RunCounts{});
        for (std::uint64_t n = 0; n < base.n_per_setting; ++n) {
            auto idx = static_cast<std::size_t>(sub.uniform_open() *
                                                static_cast<double>(chis.size()));
            if (idx >= chis.size()) idx = chis.size() - 1;
            net.trace(chis[idx], 0.0, pass_alpha[p], base.flipper_on, sub, bins[p][idx]);
        }
    }

    std::vector<RandomChiPoint> points;
    points.reserve(chi_set.size());
    for (std::size_t k = 0; k < chi_set.size(); ++k) {
        const double n0 = static_cast<double>(bins[0][k].n_o_up);
        const double n1 = static_cast<double>(bins[1][k].n_o_up);
        const double n2 = static_cast<double>(bins[2][k].n_o_up);
        const double n3 = static_cast<double>(bins[3][k].n_o_up);
        const double denom = n0 + n1 + n2 + n3;
        if (denom == 0.0) {
            throw EmptyTableError("random chi run: all four O-beam bins are zero");
        }
        RandomChiPoint pt;
        pt.alpha = alpha;
        pt.chi = chi_set[k];
        pt.E = (n0 + n1 - n2 - n3) / denom;
        pt.n_counted = bins[0][k].n_o_up + bins[1][k].n_o_up + bins[2][k].n_o_up +
                       bins[3][k].n_o_up;
        pt.pass_counts = bins[0][k];
        points.push_back(pt);
    }
    return points;
}

} // namespace bellsim
