#include <cmath>
#include <complex>

#include "bellsim/errors.hpp"
#include "bellsim/neutron.hpp"
#include "bellsim/oracle.hpp"
#include "doctest.h"

using namespace bellsim;

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

bool close(const std::complex<double>& a, const std::complex<double>& b, double tol = 1e-12) {
    return std::abs(a - b) <= tol;
}

NeutronMessage random_message(RngStream& s) {
    NeutronMessage u;
    const double theta = pi * s.uniform_open();
    u.amp_up = std::polar(std::cos(theta / 2), s.uniform_angle());
    u.amp_down = std::polar(std::sin(theta / 2), s.uniform_angle());
    return u;
}

} // namespace

TEST_CASE("spin-up message basics") {
    const NeutronMessage u = spin_up_message();
    CHECK(u.amp_up == std::complex<double>{1.0, 0.0});
    CHECK(u.amp_down == std::complex<double>{0.0, 0.0});
    CHECK(u.norm2() == doctest::Approx(1.0));
    CHECK(u.m_z() == doctest::Approx(1.0));
}

TEST_CASE("rotations reproduce the reference matrices") {
    const NeutronMessage up = spin_up_message();

    const NeutronMessage x_pi = rotate_about_axis(up, {1.0, 0.0, 0.0}, pi);
    CHECK(close(x_pi.amp_up, {0.0, 0.0}, 1e-15));
    CHECK(close(x_pi.amp_down, {0.0, 1.0}, 1e-15));

    const double r = 1.0 / std::sqrt(2.0);
    const NeutronMessage y_half = rotate_about_axis(up, {0.0, 1.0, 0.0}, pi / 2);
    CHECK(close(y_half.amp_up, {r, 0.0}));
    CHECK(close(y_half.amp_down, {-r, 0.0}));

    const NeutronMessage id = rotate_about_axis(up, {0.0, 0.0, 1.0}, 0.0);
    CHECK(close(id.amp_up, up.amp_up));
    CHECK(close(id.amp_down, up.amp_down));
}

TEST_CASE("mu-metal turners are opposite quarter turns") {
    const NeutronMessage up = spin_up_message();
    const double r = 1.0 / std::sqrt(2.0);
    const NeutronMessage h = mu_metal(up, MuMetalPath::H);
    CHECK(close(h.amp_up, {r, 0.0}));
    CHECK(close(h.amp_down, {-r, 0.0}));
    const NeutronMessage o = mu_metal(up, MuMetalPath::O);
    CHECK(close(o.amp_up, {r, 0.0}));
    CHECK(close(o.amp_down, {r, 0.0}));
    // One after the other cancels.
    const NeutronMessage both = mu_metal(mu_metal(up, MuMetalPath::H), MuMetalPath::O);
    CHECK(close(both.amp_up, up.amp_up));
    CHECK(close(both.amp_down, up.amp_down));
}

TEST_CASE("phase shift is a global factor and leaves m_z alone") {
    RngStream s(51);
    for (int rep = 0; rep < 20; ++rep) {
        const NeutronMessage u = random_message(s);
        const double chi = s.uniform_angle();
        const NeutronMessage w = phase_shift(u, chi);
        CHECK(w.m_z() == doctest::Approx(u.m_z()).epsilon(1e-12));
        CHECK(close(w.amp_up, u.amp_up * std::polar(1.0, chi)));
        CHECK(close(w.amp_down, u.amp_down * std::polar(1.0, chi)));
    }
    const NeutronMessage u = spin_up_message();
    CHECK(close(phase_shift(u, pi).amp_up, {-1.0, 0.0}));
}

TEST_CASE("spin rotator flips spin at pi and is 4pi periodic") {
    const NeutronMessage up = spin_up_message();
    const NeutronMessage flip = spin_rotator(up, pi);
    CHECK(std::abs(flip.amp_up) < 1e-15);
    CHECK(std::abs(flip.amp_down) == doctest::Approx(1.0));
    CHECK(flip.m_z() == doctest::Approx(-1.0));
    const NeutronMessage once_around = spin_rotator(up, 2 * pi);
    CHECK(close(once_around.amp_up, {-1.0, 0.0}, 1e-12));
    CHECK(once_around.m_z() == doctest::Approx(1.0));
}

TEST_CASE("all message transforms are unitary") {
    RngStream s(52);
    for (int rep = 0; rep < 50; ++rep) {
        NeutronMessage u = random_message(s);
        u = rotate_about_axis(u, {0.0, 1.0, 0.0}, s.uniform_angle());
        u = phase_shift(u, s.uniform_angle());
        u = spin_rotator(u, s.uniform_angle());
        u = mu_metal(u, MuMetalPath::H);
        CHECK(std::fabs(u.norm2() - 1.0) < 1e-12);
    }
}

TEST_CASE("beam splitter arrival update follows the learning rule") {
    DlmBeamSplitter bs(0.2, 0.99);
    // Fresh instances start from the symmetric arrival estimate.
    CHECK(bs.v0() == 0.5);
    CHECK(bs.v1() == 0.5);
    bs.absorb(0, spin_up_message());
    CHECK(bs.v0() == doctest::Approx(0.505).epsilon(1e-12));
    CHECK(bs.v1() == doctest::Approx(0.495).epsilon(1e-12));
    CHECK(bs.reg(0).amp_up == std::complex<double>{1.0, 0.0});

    RngStream s(53);
    DlmBeamSplitter learner(0.3, 0.55);
    learner.initialize(s);
    for (int i = 0; i < 200; ++i) {
        learner.absorb(s.random_bit(), random_message(s));
        CHECK(learner.v0() + learner.v1() == 1.0);
        CHECK(learner.v0() > 0.0);
        CHECK(learner.v1() > 0.0);
    }
    for (int i = 0; i < 5000; ++i) learner.absorb(0, spin_up_message());
    CHECK(learner.v0() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("emission weights and routing at a fully trained splitter") {
    RngStream s(54);
    DlmBeamSplitter bs(0.2, 0.55);
    bs.initialize(s);
    for (int i = 0; i < 5000; ++i) bs.absorb(0, spin_up_message());
    // One-sided training drives v to within one ulp of (1,0), so the stale
    // register keeps a sqrt(ulp) ~ 1e-8 amplitude admixture forever.
    const auto w = bs.emission_weights();
    CHECK(w[1] == doctest::Approx(0.8).epsilon(1e-7));   // transmits 1 - R
    CHECK(w[0] == doctest::Approx(0.2).epsilon(1e-7));   // reflects R
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));

    int ch1 = 0;
    const int n = 100000;
    NeutronMessage transmitted, reflected;
    for (int i = 0; i < n; ++i) {
        auto [ch, u] = bs.emit(s);
        if (ch == 1) {
            ++ch1;
            transmitted = u;
        } else {
            reflected = u;
        }
    }
    CHECK(std::fabs(static_cast<double>(ch1) / n - 0.8) < 0.004);
    CHECK(close(transmitted.amp_up, {1.0, 0.0}, 1e-7));
    // The reflected message picks up the factor i.
    CHECK(close(reflected.amp_up, {0.0, 1.0}, 1e-7));
    CHECK(std::abs(reflected.amp_down) < 1e-7);
}

TEST_CASE("emission weights sum to one for any trained state") {
    RngStream s(55);
    for (int rep = 0; rep < 20; ++rep) {
        DlmBeamSplitter bs(0.1 + 0.8 * s.uniform_open(), 0.5 + 0.4 * s.uniform_open());
        bs.initialize(s);
        for (int i = 0; i < 30; ++i) bs.absorb(s.random_bit(), random_message(s));
        const auto w = bs.emission_weights();
        CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));
        auto [ch, u] = bs.emit(s);
        CHECK(std::fabs(u.norm2() - 1.0) < 1e-12);
    }
}

TEST_CASE("beam splitter rejects out-of-range parameters") {
    CHECK_THROWS_AS(DlmBeamSplitter(0.0, 0.99), ConfigError);
    CHECK_THROWS_AS(DlmBeamSplitter(1.0, 0.99), ConfigError);
    CHECK_THROWS_AS(DlmBeamSplitter(0.2, 0.0), ConfigError);
    CHECK_THROWS_AS(DlmBeamSplitter(0.2, 1.0), ConfigError);
}

TEST_CASE("interferometer fringe at the bright and dark settings") {
    InterferometerConfig cfg;
    cfg.n_per_setting = 10000;
    RngStream s(56);
    const RunCounts bright = run_interferometer(cfg, s);
    CHECK(bright.total() == cfg.n_per_setting);
    const double rate = static_cast<double>(bright.n_o_up) / cfg.n_per_setting;
    CHECK(std::fabs(rate - 0.064) < 0.008);

    cfg.chi0 = pi;
    RngStream s2(57);
    const RunCounts dark = run_interferometer(cfg, s2);
    CHECK(static_cast<double>(dark.n_o_up) / cfg.n_per_setting < 0.005);
}

TEST_CASE("the fringe follows chi0 - chi1") {
    InterferometerConfig cfg;
    cfg.n_per_setting = 10000;
    cfg.chi0 = 1.3;
    cfg.chi1 = 1.3;
    RngStream s(58);
    const RunCounts counts = run_interferometer(cfg, s);
    const double rate = static_cast<double>(counts.n_o_up) / cfg.n_per_setting;
    CHECK(std::fabs(rate - 0.064) < 0.008);
}

TEST_CASE("interferometer runs are reproducible") {
    InterferometerConfig cfg;
    cfg.alpha = 0.7;
    cfg.chi0 = 0.4;
    RngStream s1(59);
    RngStream s2(59);
    const RunCounts a = run_interferometer(cfg, s1);
    const RunCounts b = run_interferometer(cfg, s2);
    CHECK(a.n_o_up == b.n_o_up);
    CHECK(a.n_o_rejected == b.n_o_rejected);
    CHECK(a.n_h == b.n_h);
    CHECK(a.n_lost == b.n_lost);
}

TEST_CASE("correlation measurements track cos(alpha + chi)") {
    InterferometerConfig base;
    base.n_per_setting = 10000;
    RngStream root(60);
    CHECK(std::fabs(measure_correlation(0.0, 0.0, base, root) - 1.0) < 0.05);
    CHECK(std::fabs(measure_correlation(0.0, pi / 2, base, root)) < 0.05);
    CHECK(std::fabs(measure_correlation(pi / 4, pi / 4, base, root)) < 0.05);
    CHECK(std::fabs(measure_correlation(pi / 2, pi / 2, base, root) + 1.0) < 0.05);
}

TEST_CASE("identical settings give identical correlation estimates") {
    InterferometerConfig base;
    base.n_per_setting = 2000;
    RngStream root(61);
    const double a = measure_correlation(0.3, 0.9, base, root);
    const double b = measure_correlation(0.3, 0.9, base, root);
    CHECK(a == b);
}

TEST_CASE("the H-beam rate carries no setting dependence") {
    InterferometerConfig base;
    base.n_per_setting = 10000;
    RngStream root(62);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const CorrelationRuns runs =
                measure_correlation_runs(i * pi / 2, j * pi / 2, base, root);
            double h[4];
            double total = 0.0;
            for (int k = 0; k < 4; ++k) {
                h[k] = static_cast<double>(runs.counts[k].n_h);
                total += h[k];
            }
            const double E_h = (h[0] + h[1] - h[2] - h[3]) / total;
            CHECK(std::fabs(E_h) < 0.05);
        }
    }
}

TEST_CASE("flipper inverts the correlation") {
    InterferometerConfig base;
    base.n_per_setting = 10000;
    base.flipper_on = true;
    RngStream root(63);
    CHECK(std::fabs(measure_correlation(0.0, 0.0, base, root) + 1.0) < 0.05);
}

TEST_CASE("CHSH on the simulated interferometer approaches the quantum bound") {
    InterferometerConfig base;
    base.n_per_setting = 20000;
    RngStream root(64);
    const ChshSettings best = chsh_bound_settings();
    const double S =
        chsh_neutron(best.alpha, best.chi, best.alpha_p, best.chi_p, base, root);
    CHECK(std::fabs(S - 2.82) < 0.15);
    // The photon-pattern sign combination stays low at these settings.
    const double S_photon = chsh_neutron(best.alpha, best.chi, best.alpha_p, best.chi_p,
                                         base, root, ChshSign::PhotonPattern);
    CHECK(S_photon < 2.0);
}

TEST_CASE("a single-element random-chi run reduces to the four-run pattern") {
    InterferometerConfig base;
    base.n_per_setting = 20000;
    RngStream root(65);
    const auto points = random_chi_run(0.0, {pi / 4}, base, root);
    REQUIRE(points.size() == 1);
    CHECK(points[0].chi == pi / 4);
    CHECK(std::fabs(points[0].E - std::cos(pi / 4)) < 0.06);
    CHECK(points[0].n_counted > 0);
    const RunCounts& pass = points[0].pass_counts;
    CHECK(pass.total() == base.n_per_setting);
}

TEST_CASE("random-chi errors") {
    InterferometerConfig base;
    RngStream root(66);
    CHECK_THROWS_AS(random_chi_run(0.0, {}, base, root), ConfigError);
    base.n_per_setting = 0;
    CHECK_THROWS_AS(run_interferometer(base, root), ConfigError);
}
