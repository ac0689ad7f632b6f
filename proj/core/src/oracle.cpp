#include "bellsim/oracle.hpp"

#include <cmath>

#include "bellsim/errors.hpp"

namespace bellsim {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using C = std::complex<double>;
using Vec4 = std::array<C, 4>;
using Mat2 = std::array<C, 4>;  // row-major 2x2

Mat2 pauli_dot(const Vec3& a) {
    return {C(a[2], 0.0), C(a[0], -a[1]), C(a[0], a[1]), C(-a[2], 0.0)};
}

// Basis index is s1 + 2*s2 with s = 0 for up, so particle 1 pairs components
// (0,1) and (2,3); particle 2 pairs (0,2) and (1,3).
Vec4 apply_particle1(const Mat2& m, const Vec4& v) {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1],
            m[0] * v[2] + m[1] * v[3], m[2] * v[2] + m[3] * v[3]};
}

Vec4 apply_particle2(const Mat2& m, const Vec4& v) {
    return {m[0] * v[0] + m[1] * v[2], m[0] * v[1] + m[1] * v[3],
            m[2] * v[0] + m[3] * v[2], m[2] * v[1] + m[3] * v[3]};
}

double re_inner(const Vec4& v, const Vec4& w) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += (std::conj(v[i]) * w[i]).real();
    return sum;
}

// Maximizing chi for E(0,chi) - E(a',chi) means maximizing
// cos(chi) - cos(a'+chi) = Re[(1 - e^{i a'}) e^{i chi}]; the optimum is
// chi = -arg(1 - e^{i a'}) with value |1 - e^{i a'}|. Same for the
// chi' pair with 1 + e^{i a'}.
double pair_value(double alpha_p, double sign) {
    return std::abs(1.0 + sign * std::polar(1.0, alpha_p));
}

double pair_argmax(double alpha_p, double sign) {
    return -std::arg(1.0 + sign * std::polar(1.0, alpha_p));
}

double scan_value(double alpha_p) {
    return pair_value(alpha_p, -1.0) + pair_value(alpha_p, +1.0);
}

} // namespace

TwoSpinState singlet_state() {
    const double s = 1.0 / std::sqrt(2.0);
    return TwoSpinState{{0.0, 0.0}, {s, 0.0}, {-s, 0.0}, {0.0, 0.0}};
}

Expectations expectations_from_state(const TwoSpinState& state, const Vec3& a1,
                                     const Vec3& a2) {
    const Vec4 v{state.c0, state.c1, state.c2, state.c3};
    double norm2 = 0.0;
    for (const C& c : v) norm2 += std::norm(c);
    if (std::abs(norm2 - 1.0) > 1e-9) {
        throw DegenerateStateError("two-spin state is not normalized");
    }
    const Mat2 m1 = pauli_dot(a1);
    const Mat2 m2 = pauli_dot(a2);
    const Vec4 m1v = apply_particle1(m1, v);
    const Vec4 m2v = apply_particle2(m2, v);
    Expectations e;
    e.E1 = re_inner(v, m1v);
    e.E2 = re_inner(v, m2v);
    e.E = re_inner(v, apply_particle1(m1, m2v));
    return e;
}

Expectations photon_singlet(double a1, double a2) {
    return Expectations{0.0, 0.0, -std::cos(2.0 * (a1 - a2))};
}

Expectations photon_product(double zeta1, double zeta2, double a1, double a2) {
    Expectations e;
    e.E1 = std::cos(2.0 * (zeta1 - a1));
    e.E2 = std::cos(2.0 * (zeta2 - a2));
    e.E = e.E1 * e.E2;
    return e;
}

double neutron_po(double alpha, double chi, double R) {
    return (1.0 - R) * R * R * (1.0 + std::cos(alpha + chi));
}

double neutron_correlation(double alpha, double chi) { return std::cos(alpha + chi); }

double neutron_chsh_ideal(double alpha, double chi, double alpha_p, double chi_p) {
    return neutron_correlation(alpha, chi) + neutron_correlation(alpha, chi_p) -
           neutron_correlation(alpha_p, chi) + neutron_correlation(alpha_p, chi_p);
}

ChshSettings chsh_bound_settings() {
    // The correlation depends only on sums alpha + chi, so alpha = 0 is a free
    // gauge choice. For fixed alpha' the best chi and chi' have closed forms
    // (see pair_value); the remaining 1-D profile is scanned on a 0.01 mesh
    // and polished by golden-section search.
    const double mesh = 0.01;
    double best_a = 0.0;
    double best_val = -1.0;
    for (double a = 0.0; a < 2.0 * kPi; a += mesh) {
        const double val = scan_value(a);
        if (val > best_val) {
            best_val = val;
            best_a = a;
        }
    }

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_a - mesh;
    double hi = best_a + mesh;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = scan_value(x1);
    double f2 = scan_value(x2);
    for (int iter = 0; iter < 200; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = scan_value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = scan_value(x1);
        }
    }
    const double alpha_p = 0.5 * (lo + hi);

    ChshSettings s;
    s.alpha = 0.0;
    s.alpha_p = alpha_p;
    s.chi = pair_argmax(alpha_p, -1.0);
    s.chi_p = pair_argmax(alpha_p, +1.0);
    s.S = neutron_chsh_ideal(s.alpha, s.chi, s.alpha_p, s.chi_p);
    return s;
}

} // namespace bellsim
