#include <cmath>

#include "doctest.h"
#include "netmom/config.hpp"
#include "netmom/errors.hpp"
#include "netmom/rng.hpp"
#include "netmom/signals.hpp"

using namespace netmom;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TEST_SUITE_BEGIN("signals");

TEST_CASE("ewma seeds at the first defined value") {
    Eigen::VectorXd x(4);
    x << kNaN, 3.0, 3.0, 5.0;
    Eigen::VectorXd m = ewma(x, 0.5);
    CHECK(std::isnan(m(0)));
    CHECK(m(1) == 3.0);
    CHECK(m(2) == 3.0);
    CHECK(m(3) == 4.0);
}

TEST_CASE("oscillator of a constant scaled price is identically zero") {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(200, 4.2);
    for (int k : {1, 3, 6}) {
        Eigen::VectorXd r = oscillator(p, k, 3.0);
        CHECK(r.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("oscillator of a rising price is positive after warming up") {
    // Direct recursion oracle: a linear ramp keeps fast above slow.
    Eigen::VectorXd p(300);
    for (int t = 0; t < 300; ++t) p(t) = 0.1 * t;
    Eigen::VectorXd r = oscillator(p, 2, 3.0);
    for (int t = 50; t < 300; ++t) CHECK(r(t) > 0.0);

    // Oracle recursion for the last value.
    const double af = 0.25, as = 1.0 / 12.0;
    double fast = p(0), slow = p(0);
    for (int t = 1; t < 300; ++t) {
        fast += af * (p(t) - fast);
        slow += as * (p(t) - slow);
    }
    CHECK(r(299) == doctest::Approx(fast - slow).epsilon(1e-12));
}

TEST_CASE("fast speeds revert toward zero sooner after a step") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(400);
    for (int t = 100; t < 400; ++t) p(t) = 1.0;
    Eigen::VectorXd r1 = oscillator(p, 1, 3.0);
    Eigen::VectorXd r6 = oscillator(p, 6, 3.0);
    // Well after the step the fast oscillator has collapsed back while the
    // slow one still carries the trend.
    CHECK(std::abs(r1(180)) < 0.02);
    CHECK(std::abs(r6(180)) > 0.10);
    CHECK(r1.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("network feature: single-edge exchange swaps the rows") {
    NetworkMatrix net;
    net.values = Eigen::MatrixXd::Zero(2, 2);
    net.values(0, 1) = 1.0;
    net.values(1, 0) = 1.0;
    Eigen::MatrixXd osc(2, 3);
    osc << 1, 2, 3, 4, 5, 6;
    Eigen::MatrixXd f = network_feature(osc, net);
    CHECK(f.row(0) == osc.row(1));
    CHECK(f.row(1) == osc.row(0));
}

TEST_CASE("network feature: empty graph produces zero features") {
    NetworkMatrix net;
    net.values = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd osc = Eigen::MatrixXd::Random(3, 2);
    CHECK(network_feature(osc, net).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("network feature is linear in the oscillators") {
    Rng rng(5);
    NetworkMatrix net;
    net.values = Eigen::MatrixXd::Random(4, 4).cwiseAbs();
    net.values.diagonal().setZero();
    Eigen::MatrixXd osc = Eigen::MatrixXd::Random(4, 6);
    Eigen::MatrixXd f1 = network_feature(osc, net);
    Eigen::MatrixXd f2 = network_feature(2.0 * osc, net);
    CHECK((f2 - 2.0 * f1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("response is odd with its peak at 1/lambda") {
    const double lambda = std::sqrt(2.0);
    CHECK(response(0.0, lambda) == 0.0);
    for (double x : {0.2, 0.7, 1.3, 2.4})
        CHECK(response(-x, lambda) == -response(x, lambda));
    const double peak = 1.0 / lambda;
    for (double x = 0.05; x < 3.0; x += 0.05)
        CHECK(response(x, lambda) <= response(peak, lambda) + 1e-12);
    // Strictly attenuating beyond the peak.
    double prev = response(peak, lambda);
    for (double x = peak + 0.05; x < 4.0; x += 0.05) {
        CHECK(response(x, lambda) < prev);
        prev = response(x, lambda);
    }
}

TEST_CASE("response normalisation gives unit variance under a standard normal") {
    // Gaussian-moment oracle: E[x^2 exp(-l^2 x^2)] = (1 + 2 l^2)^(-3/2).
    const double lambda = std::sqrt(2.0);
    CHECK(response_norm_constant(lambda) ==
          doctest::Approx(std::pow(5.0, 0.75)).epsilon(1e-14));
    Rng rng(77);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = response(rng.normal(), lambda);
        sum += r;
        sumsq += r * r;
    }
    const double var = sumsq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("position signal basics") {
    Eigen::VectorXd vol = Eigen::VectorXd::Constant(2, 0.5);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(2, 10.0);
    Eigen::VectorXd e = Eigen::VectorXd::Ones(2);
    Eigen::MatrixXd zero_feats = Eigen::MatrixXd::Zero(2, 3);
    Eigen::VectorXd lots = position_signal(zero_feats, vol, f, e, 1e8, 0.10,
                                           std::sqrt(2.0));
    CHECK(lots.cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd feats(2, 1);
    feats << 0.4, -0.3;
    Eigen::VectorXd base =
        position_signal(feats, vol, f, e, 1e8, 0.10, std::sqrt(2.0));
    CHECK(base(0) > 0.0);
    CHECK(base(1) < 0.0);

    // Doubling gamma doubles every position exactly.
    Eigen::VectorXd doubled =
        position_signal(feats, vol, f, e, 2e8, 0.10, std::sqrt(2.0));
    CHECK(doubled == 2.0 * base);

    // Doubling one market's sigma halves its position exactly.
    Eigen::VectorXd vol2 = vol;
    vol2(0) *= 2.0;
    Eigen::VectorXd halved =
        position_signal(feats, vol2, f, e, 1e8, 0.10, std::sqrt(2.0));
    CHECK(halved(0) == base(0) / 2.0);
    CHECK(halved(1) == base(1));
}

TEST_CASE("undefined features and unusable sigma zero the position") {
    Eigen::VectorXd vol(2), f = Eigen::VectorXd::Constant(2, 10.0),
                            e = Eigen::VectorXd::Ones(2);
    vol << 0.5, kNaN;
    Eigen::MatrixXd feats(2, 2);
    feats << kNaN, 0.5, 0.4, 0.4;
    Eigen::VectorXd lots =
        position_signal(feats, vol, f, e, 1e8, 0.10, std::sqrt(2.0));
    CHECK(lots(0) == 0.0);  // NaN feature
    CHECK(lots(1) == 0.0);  // NaN sigma
}

TEST_CASE("non-positive risk denominators are rejected") {
    Eigen::VectorXd vol = Eigen::VectorXd::Constant(1, 0.5);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(1, 0.0);
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd feats = Eigen::MatrixXd::Constant(1, 1, 0.3);
    CHECK_THROWS_AS(position_signal(feats, vol, f, e, 1e8, 0.10, std::sqrt(2.0)),
                    DataError);
}

TEST_CASE("single-market position carries the sign of its feature") {
    Eigen::VectorXd vol = Eigen::VectorXd::Constant(1, 0.4);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(1, 10.0);
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    const double lambda = std::sqrt(2.0);
    for (double feat : {-0.65, -0.3, -0.05, 0.05, 0.3, 0.65}) {
        Eigen::MatrixXd feats = Eigen::MatrixXd::Constant(1, 1, feat);
        Eigen::VectorXd lots =
            position_signal(feats, vol, f, e, 1e8, 0.10, lambda);
        CHECK(lots(0) * feat > 0.0);
    }
}

TEST_CASE("exchange network reproduces the baseline of the partner market") {
    // With equal risk denominators and a one-to-one exchange matrix, the
    // network position of market 1 is the baseline position of market 2.
    NetworkMatrix net;
    net.values = Eigen::MatrixXd::Zero(2, 2);
    net.values(0, 1) = 1.0;
    net.values(1, 0) = 1.0;
    Eigen::MatrixXd osc(2, 3);
    osc << 0.3, -0.1, 0.6, -0.4, 0.2, 0.1;
    Eigen::VectorXd vol = Eigen::VectorXd::Constant(2, 0.7);
    Eigen::VectorXd f = Eigen::VectorXd::Constant(2, 25.0);
    Eigen::VectorXd e = Eigen::VectorXd::Ones(2);
    const double gamma = 5e7, tgt = 0.10, lambda = std::sqrt(2.0);
    Eigen::VectorXd macd = position_signal(osc, vol, f, e, gamma, tgt, lambda);
    Eigen::VectorXd nmm = position_signal(network_feature(osc, net), vol, f, e,
                                          gamma, tgt, lambda);
    CHECK(nmm(0) == macd(1));
    CHECK(nmm(1) == macd(0));
}

TEST_SUITE_END();
