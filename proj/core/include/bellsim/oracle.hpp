#pragma once

#include <array>
#include <complex>

namespace bellsim {

using Vec3 = std::array<double, 3>;

// Pure two-spin state c0|uu> + c1|du> + c2|ud> + c3|dd>
// (first arrow = particle 1).
struct TwoSpinState {
    std::complex<double> c0, c1, c2, c3;
};

TwoSpinState singlet_state();

struct Expectations {
    double E1 = 0.0;
    double E2 = 0.0;
    double E = 0.0;
};

// <sigma1.a1>, <sigma2.a2>, <(sigma1.a1)(sigma2.a2)> by explicit Pauli
// algebra on the 4-vector. Throws DegenerateStateError when the state norm
// is off by more than 1e-9.
Expectations expectations_from_state(const TwoSpinState& state, const Vec3& a1, const Vec3& a2);

// Photon-singlet predictions under the angle-doubling convention:
// E1 = E2 = 0, E = -cos 2(a1 - a2).
Expectations photon_singlet(double a1, double a2);

// Product state of definite polarizations zeta1, zeta2:
// E1 = cos 2(zeta1 - a1), E2 = cos 2(zeta2 - a2), E = E1*E2.
Expectations photon_product(double zeta1, double zeta2, double a1, double a2);

// O-beam spin-up detection probability p_O = T R^2 [1 + cos(alpha + chi)].
double neutron_po(double alpha, double chi, double R);

// Ideal interferometer correlation cos(alpha + chi).
double neutron_correlation(double alpha, double chi);

struct ChshSettings {
    double alpha = 0.0;
    double chi = 0.0;
    double alpha_p = 0.0;
    double chi_p = 0.0;
    double S = 0.0;
};

// Maximizer of E(a,c) + E(a,c') - E(a',c) + E(a',c') over the ideal
// correlation surface, found by grid search (gauge alpha = 0) and polished;
// attains 2*sqrt(2) at (0, pi/4, pi/2, -pi/4).
ChshSettings chsh_bound_settings();

// The same sign pattern evaluated on the ideal surface; used by the search
// and by tests.
double neutron_chsh_ideal(double alpha, double chi, double alpha_p, double chi_p);

} // namespace bellsim
