#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <limits>
#include <numeric>
#include <vector>

#include "itlm/errors.hpp"
#include "itlm/glm.hpp"
#include "itlm/rng.hpp"

using itlm::Dataset;
using itlm::Index;
using itlm::LinkFunction;
using itlm::Matrix;
using itlm::Parameter;
using itlm::Vector;

namespace {

Dataset make_dataset(const Matrix& features, const Vector& responses,
                     LinkFunction link = LinkFunction::identity()) {
    Dataset data;
    data.features = features;
    data.responses = responses;
    data.link = link;
    data.validate();
    return data;
}

Parameter make_theta(std::initializer_list<double> values) {
    Parameter p;
    p.theta = Vector(static_cast<Index>(values.size()));
    Index i = 0;
    for (double v : values) {
        p.theta[i++] = v;
    }
    return p;
}

// Central finite difference of sample_loss in coordinate j.
double fd_gradient(const Parameter& theta, const Dataset& data, Index i,
                   Index j, double step) {
    Parameter hi = theta;
    Parameter lo = theta;
    hi.theta[j] += step;
    lo.theta[j] -= step;
    return (itlm::sample_loss(hi, data, i) - itlm::sample_loss(lo, data, i)) /
           (2.0 * step);
}

} // namespace

TEST_CASE("link function evaluation and slope bounds") {
    const LinkFunction ident = LinkFunction::identity();
    CHECK(ident.is_identity());
    CHECK(ident.value(-3.5) == -3.5);
    CHECK(ident.derivative(0.0) == 1.0);

    const LinkFunction pw = LinkFunction::piecewise_linear(1.0, 1.2);
    CHECK_FALSE(pw.is_identity());
    CHECK(pw.value(-2.0) == -2.0);
    CHECK(pw.value(2.0) == doctest::Approx(2.4));
    CHECK(pw.derivative(-1.0) == 1.0);
    CHECK(pw.derivative(1.0) == 1.2);
    // Kink derivative is pinned to the positive-branch slope.
    CHECK(pw.derivative(0.0) == 1.2);
    CHECK(pw.min_derivative() == 1.0);
    CHECK(pw.max_derivative() == 1.2);

    const LinkFunction steep = LinkFunction::piecewise_linear(3.0, 0.5);
    CHECK(steep.min_derivative() == 0.5);
    CHECK(steep.max_derivative() == 3.0);

    CHECK(LinkFunction::piecewise_linear(1.0, 1.0).is_identity());
    CHECK_THROWS_AS(LinkFunction::piecewise_linear(0.0, 1.0),
                    itlm::ConfigError);
    CHECK_THROWS_AS(LinkFunction::piecewise_linear(1.0, -2.0),
                    itlm::ConfigError);
}

TEST_CASE("predict applies the link to the linear predictor") {
    SUBCASE("identity") {
        Matrix phi(1, 1);
        phi << 3.0;
        Vector y(1);
        y << 0.0;
        const Dataset data = make_dataset(phi, y);
        CHECK(itlm::predict(make_theta({2.0}), data, 0) == 6.0);
    }
    SUBCASE("piecewise negative branch") {
        Matrix phi(1, 1);
        phi << -2.0;
        Vector y(1);
        y << 0.0;
        const Dataset data =
            make_dataset(phi, y, LinkFunction::piecewise_linear(1.0, 1.2));
        CHECK(itlm::predict(make_theta({1.0}), data, 0) == -2.0);
    }
    SUBCASE("piecewise positive branch") {
        Matrix phi(1, 1);
        phi << 2.0;
        Vector y(1);
        y << 0.0;
        const Dataset data =
            make_dataset(phi, y, LinkFunction::piecewise_linear(1.0, 1.2));
        CHECK(itlm::predict(make_theta({1.0}), data, 0) ==
              doctest::Approx(2.4));
    }
    SUBCASE("index and dimension errors") {
        Matrix phi(2, 2);
        phi << 1.0, 0.0, 0.0, 1.0;
        Vector y(2);
        y << 0.0, 0.0;
        const Dataset data = make_dataset(phi, y);
        CHECK_THROWS_AS((void)itlm::predict(make_theta({1.0, 1.0}), data, 2),
                        itlm::ConfigError);
        CHECK_THROWS_AS((void)itlm::predict(make_theta({1.0, 1.0}), data, -1),
                        itlm::ConfigError);
        CHECK_THROWS_AS((void)itlm::predict(make_theta({1.0}), data, 0),
                        itlm::ConfigError);
    }
}

TEST_CASE("sample loss is the unhalved squared residual") {
    SUBCASE("exact fit") {
        Matrix phi(1, 1);
        phi << 3.0;
        Vector y(1);
        y << 6.0;
        const Dataset data = make_dataset(phi, y);
        CHECK(itlm::sample_loss(make_theta({2.0}), data, 0) == 0.0);
    }
    SUBCASE("scalar residual") {
        Matrix phi(1, 1);
        phi << 1.0;
        Vector y(1);
        y << 3.0;
        const Dataset data = make_dataset(phi, y);
        CHECK(itlm::sample_loss(make_theta({0.0}), data, 0) == 9.0);
    }
    SUBCASE("two-dimensional residual") {
        Matrix phi(1, 2);
        phi << 1.0, 2.0;
        Vector y(1);
        y << 0.0;
        const Dataset data = make_dataset(phi, y);
        CHECK(itlm::sample_loss(make_theta({1.0, 1.0}), data, 0) == 9.0);
    }
}

TEST_CASE("loss gradient matches the analytic form") {
    SUBCASE("identity link scalar") {
        Matrix phi(1, 1);
        phi << 1.0;
        Vector y(1);
        y << 1.0;
        const Dataset data = make_dataset(phi, y);
        const Vector g = itlm::loss_gradient(make_theta({0.0}), data, 0);
        REQUIRE(g.size() == 1);
        CHECK(g[0] == -2.0);
    }
    SUBCASE("exact fit gives the zero vector") {
        Matrix phi(1, 2);
        phi << 2.0, -1.0;
        Vector y(1);
        y << 5.0;
        const Dataset data = make_dataset(phi, y);
        const Vector g = itlm::loss_gradient(make_theta({3.0, 1.0}), data, 0);
        CHECK(g.norm() == 0.0);
    }
    SUBCASE("piecewise positive branch, cross-checked by differencing") {
        // -2 (0 - 1.2) * 1.2 * 1 = 2.88 with u = 1 on the positive branch.
        Matrix phi(1, 1);
        phi << 1.0;
        Vector y(1);
        y << 0.0;
        const Dataset data =
            make_dataset(phi, y, LinkFunction::piecewise_linear(1.0, 1.2));
        const Parameter theta = make_theta({1.0});
        const Vector g = itlm::loss_gradient(theta, data, 0);
        REQUIRE(g.size() == 1);
        CHECK(g[0] == doctest::Approx(2.88).epsilon(1e-12));
        CHECK(fd_gradient(theta, data, 0, 0, 1e-6) ==
              doctest::Approx(2.88).epsilon(1e-7));
    }
}

TEST_CASE("gradient agrees with central differences on random pairs") {
    const LinkFunction links[] = {LinkFunction::identity(),
                                  LinkFunction::piecewise_linear(1.0, 1.2)};
    itlm::SplitMix64 rng(314159);
    const Index d = 4;
    int checked = 0;
    for (const LinkFunction& link : links) {
        for (int trial = 0; trial < 20; ++trial) {
            Matrix phi(1, d);
            Parameter theta;
            theta.theta = Vector(d);
            for (Index j = 0; j < d; ++j) {
                phi(0, j) = rng.next_gaussian();
                theta.theta[j] = rng.next_gaussian();
            }
            // Re-draw if the predictor sits near the kink; the one-sided
            // derivative there is not what a symmetric difference measures.
            const double u = (phi.row(0) * theta.theta).value();
            if (std::abs(u) < 1e-3) {
                --trial;
                continue;
            }
            Vector y(1);
            y << rng.next_gaussian() * 2.0;
            const Dataset data = make_dataset(phi, y, link);

            const Vector g = itlm::loss_gradient(theta, data, 0);
            for (Index j = 0; j < d; ++j) {
                const double fd = fd_gradient(theta, data, 0, j, 1e-6);
                const double scale = std::max(1.0, std::abs(g[j]));
                CHECK(std::abs(g[j] - fd) / scale <= 1e-5);
            }
            ++checked;
        }
    }
    CHECK(checked == 40);
}

TEST_CASE("trim count floors with decimal tolerance") {
    CHECK(itlm::trim_count(2.0 / 3.0, 3) == 2);
    CHECK(itlm::trim_count(1.0, 7) == 7);
    CHECK(itlm::trim_count(0.6, 5) == 3);  // 0.6*5 = 2.9999... in binary
    CHECK(itlm::trim_count(0.7, 1000) == 700);
    CHECK(itlm::trim_count(0.5, 3) == 1);
    CHECK_THROWS_AS((void)itlm::trim_count(0.0, 5), itlm::ConfigError);
    CHECK_THROWS_AS((void)itlm::trim_count(1.5, 5), itlm::ConfigError);
    CHECK_THROWS_AS((void)itlm::trim_count(-0.2, 5), itlm::ConfigError);
}

TEST_CASE("trimmed loss sums the smallest squares") {
    SUBCASE("two of three") {
        Matrix phi(3, 1);
        phi << 1.0, 1.0, 1.0;
        Vector y(3);
        y << 1.0, 2.0, 3.0;
        const Dataset data = make_dataset(phi, y);
        const itlm::TrimmedLoss tl =
            itlm::trimmed_loss(make_theta({0.0}), data, 2.0 / 3.0);
        CHECK(tl.value == doctest::Approx(5.0));
        CHECK(tl.subset == std::vector<Index>{0, 1});
    }
    SUBCASE("alpha one keeps everything") {
        Matrix phi(3, 1);
        phi << 1.0, 1.0, 1.0;
        Vector y(3);
        y << 1.0, 2.0, 3.0;
        const Dataset data = make_dataset(phi, y);
        const itlm::TrimmedLoss tl =
            itlm::trimmed_loss(make_theta({0.0}), data, 1.0);
        CHECK(tl.value == doctest::Approx(14.0));
        CHECK(tl.subset == std::vector<Index>{0, 1, 2});
    }
    SUBCASE("exact zeros are kept") {
        Matrix phi(5, 1);
        phi << 1.0, 1.0, 1.0, 1.0, 1.0;
        Vector y(5);
        y << 0.0, 0.0, 0.0, 10.0, 10.0;
        const Dataset data = make_dataset(phi, y);
        const itlm::TrimmedLoss tl =
            itlm::trimmed_loss(make_theta({0.0}), data, 0.6);
        CHECK(tl.value == 0.0);
        CHECK(tl.subset == std::vector<Index>{0, 1, 2});
    }
    SUBCASE("degenerate alpha is rejected") {
        Matrix phi(5, 1);
        phi << 1.0, 1.0, 1.0, 1.0, 1.0;
        Vector y(5);
        y << 0.0, 0.0, 0.0, 10.0, 10.0;
        const Dataset data = make_dataset(phi, y);
        CHECK_THROWS_AS(
            (void)itlm::trimmed_loss(make_theta({0.0}), data, 0.1),
            itlm::ConfigError);
    }
}

TEST_CASE("trimmed subset beats every other subset of the same size") {
    itlm::SplitMix64 rng(2718);
    const Index n = 8;
    const Index d = 2;
    Matrix phi(n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            phi(i, j) = rng.next_gaussian();
        }
        y[i] = rng.next_gaussian();
    }
    const Dataset data = make_dataset(phi, y);
    const Parameter theta = make_theta({0.3, -1.1});
    const itlm::TrimmedLoss tl = itlm::trimmed_loss(theta, data, 0.625);
    const Index k = 5;
    REQUIRE(tl.subset.size() == static_cast<std::size_t>(k));

    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        losses[static_cast<std::size_t>(i)] = itlm::sample_loss(theta, data, i);
    }
    // Every k-subset, via the sorted-mask trick.
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    std::fill(pick.begin(), pick.begin() + k, 1);
    std::sort(pick.begin(), pick.end());
    int subsets = 0;
    do {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (pick[static_cast<std::size_t>(i)]) {
                total += losses[static_cast<std::size_t>(i)];
            }
        }
        CHECK(tl.value <= total + 1e-12);
        ++subsets;
    } while (std::next_permutation(pick.begin(), pick.end()));
    CHECK(subsets == 56);
}

TEST_CASE("trimmed loss grows with alpha") {
    itlm::SplitMix64 rng(55);
    const Index n = 12;
    Matrix phi(n, 1);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        phi(i, 0) = rng.next_gaussian();
        y[i] = rng.next_gaussian();
    }
    const Dataset data = make_dataset(phi, y);
    const Parameter theta = make_theta({0.7});
    double prev = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(n);
        const itlm::TrimmedLoss tl = itlm::trimmed_loss(theta, data, alpha);
        CHECK(tl.subset.size() == static_cast<std::size_t>(k));
        CHECK(tl.value >= prev - 1e-15);
        prev = tl.value;
    }
}

TEST_CASE("identity losses are invariant under compensated scaling") {
    itlm::SplitMix64 rng(77);
    const Index n = 6;
    const Index d = 3;
    Matrix phi(n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            phi(i, j) = rng.next_gaussian();
        }
        y[i] = rng.next_gaussian();
    }
    const Dataset data = make_dataset(phi, y);
    Parameter theta;
    theta.theta = Vector(d);
    theta.theta << 0.4, -1.2, 2.5;

    const double c = 3.0;
    Parameter scaled_theta;
    scaled_theta.theta = theta.theta * c;
    const Dataset scaled = make_dataset(phi / c, y);
    for (Index i = 0; i < n; ++i) {
        CHECK(itlm::sample_loss(theta, data, i) ==
              doctest::Approx(itlm::sample_loss(scaled_theta, scaled, i))
                  .epsilon(1e-12));
    }
}

TEST_CASE("dataset validation rejects malformed structures") {
    Matrix phi(2, 2);
    phi << 1.0, 0.0, 0.0, 1.0;
    Vector y(2);
    y << 1.0, 2.0;

    SUBCASE("response length mismatch") {
        Dataset data;
        data.features = phi;
        data.responses = Vector(3);
        data.responses << 1.0, 2.0, 3.0;
        CHECK_THROWS_AS(data.validate(), itlm::ConfigError);
    }
    SUBCASE("non-finite feature") {
        Dataset data;
        data.features = phi;
        data.features(0, 1) = std::numeric_limits<double>::quiet_NaN();
        data.responses = y;
        CHECK_THROWS_AS(data.validate(), itlm::ConfigError);
    }
    SUBCASE("truth mask length mismatch") {
        Dataset data;
        data.features = phi;
        data.responses = y;
        itlm::TruthInfo truth;
        truth.theta_star.push_back(Vector::Ones(2));
        truth.clean_mask = {1};
        truth.component_id = {0, -1};
        data.truth = truth;
        CHECK_THROWS_AS(data.validate(), itlm::ConfigError);
    }
    SUBCASE("component id out of range") {
        Dataset data;
        data.features = phi;
        data.responses = y;
        itlm::TruthInfo truth;
        truth.theta_star.push_back(Vector::Ones(2));
        truth.clean_mask = {1, 0};
        truth.component_id = {0, 3};
        data.truth = truth;
        CHECK_THROWS_AS(data.validate(), itlm::ConfigError);
    }
    SUBCASE("well-formed dataset passes") {
        Dataset data;
        data.features = phi;
        data.responses = y;
        itlm::TruthInfo truth;
        truth.theta_star.push_back(Vector::Ones(2));
        truth.clean_mask = {1, 0};
        truth.component_id = {0, -1};
        data.truth = truth;
        CHECK_NOTHROW(data.validate());
    }
}
