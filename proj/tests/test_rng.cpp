#include <algorithm>
#include <cmath>
#include <vector>

#include "bellsim/rng.hpp"
#include "doctest.h"

using bellsim::RngStream;

TEST_CASE("uniform draws stay inside the open unit interval") {
    RngStream s(42);
    double prev = -1.0;
    bool all_distinct_from_prev = true;
    for (int i = 0; i < 100000; ++i) {
        double u = s.uniform_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        if (u == prev) all_distinct_from_prev = false;
        prev = u;
    }
    CHECK(all_distinct_from_prev);
}

TEST_CASE("same seed reproduces the same sequence") {
    RngStream a(7);
    RngStream b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform_open() == b.uniform_open());
    RngStream c(7);
    RngStream d(7);
    for (int i = 0; i < 100; ++i) CHECK(c.random_bit() == d.random_bit());
    RngStream e(8);
    RngStream f(7);
    int diff = 0;
    for (int i = 0; i < 100; ++i) diff += e.random_bit() != f.random_bit();
    CHECK(diff > 0);
}

TEST_CASE("uniform mean and bit balance") {
    RngStream s(1);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += s.uniform_open();
    CHECK(std::fabs(sum / n - 0.5) < 0.005);

    RngStream b(2);
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += b.random_bit();
    CHECK(std::fabs(static_cast<double>(ones) / n - 0.5) < 0.005);
}

TEST_CASE("angle draws cover [0, 2pi) uniformly") {
    RngStream s(3);
    const int n = 100000;
    const double two_pi = 8.0 * std::atan(1.0);
    double sum = 0.0, cos_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = s.uniform_angle();
        CHECK(a >= 0.0);
        CHECK(a < two_pi);
        sum += a;
        cos_sum += std::cos(a);
    }
    CHECK(std::fabs(sum / n - two_pi / 2) < 0.02);
    CHECK(std::fabs(cos_sum / n) < 0.01);
}

TEST_CASE("empirical distribution passes a KS uniformity check") {
    RngStream s(4);
    const int n = 20000;
    std::vector<double> u(n);
    for (double& x : u) x = s.uniform_open();
    std::sort(u.begin(), u.end());
    double D = 0.0;
    for (int i = 0; i < n; ++i) {
        D = std::max(D, std::fabs(u[i] - static_cast<double>(i + 1) / n));
        D = std::max(D, std::fabs(u[i] - static_cast<double>(i) / n));
    }
    // 1% critical value of the Kolmogorov statistic.
    CHECK(D < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("substreams are reproducible and labeled") {
    RngStream root(99);
    RngStream a = root.substream("station1");
    RngStream b = root.substream("station1");
    for (int i = 0; i < 50; ++i) CHECK(a.uniform_open() == b.uniform_open());

    RngStream c = root.substream("station1");
    RngStream d = root.substream("station2");
    int diff = 0;
    for (int i = 0; i < 50; ++i) diff += c.uniform_open() != d.uniform_open();
    CHECK(diff > 0);
}

TEST_CASE("drawing from a child leaves the parent sequence untouched") {
    RngStream a(123);
    RngStream b(123);
    RngStream child = a.substream("side-work");
    for (int i = 0; i < 1000; ++i) child.uniform_open();
    for (int i = 0; i < 100; ++i) CHECK(a.uniform_open() == b.uniform_open());
}

TEST_CASE("sibling substreams look statistically independent") {
    RngStream root(5);
    RngStream a = root.substream("left");
    RngStream b = root.substream("right");
    const int n = 100000;
    double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = a.uniform_open() - 0.5;
        double y = b.uniform_open() - 0.5;
        sum_ab += x * y;
        sum_a += x;
        sum_b += y;
    }
    const double corr = (sum_ab / n - (sum_a / n) * (sum_b / n)) / (1.0 / 12.0);
    CHECK(std::fabs(corr) < 0.01);
}
