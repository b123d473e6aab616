#include <cmath>
#include <cstring>
#include <doctest.h>
#include <string>
#include <vector>

#include "itlm/errors.hpp"
#include "itlm/glm.hpp"
#include "itlm/model_update.hpp"
#include "itlm/oracle.hpp"
#include "itlm/rng.hpp"

using itlm::BatchSgdUpdate;
using itlm::Dataset;
using itlm::FullGradientUpdate;
using itlm::Index;
using itlm::LinkFunction;
using itlm::Matrix;
using itlm::Parameter;
using itlm::UpdatePolicy;
using itlm::Vector;

namespace {

Dataset random_dataset(Index n, Index d, std::uint64_t seed,
                       LinkFunction link = LinkFunction::identity()) {
    itlm::SplitMix64 rng(seed);
    Dataset data;
    data.features = Matrix(n, d);
    data.responses = Vector(n);
    data.link = link;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            data.features(i, j) = rng.next_gaussian();
        }
        data.responses[i] = rng.next_gaussian();
    }
    data.validate();
    return data;
}

std::vector<Index> all_indices(Index n) {
    std::vector<Index> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = i;
    }
    return out;
}

double subset_loss(const Parameter& theta, const Dataset& data,
                   const std::vector<Index>& subset) {
    double total = 0.0;
    for (Index i : subset) {
        total += itlm::sample_loss(theta, data, i);
    }
    return total;
}

UpdatePolicy sgd_policy(BatchSgdUpdate params) {
    UpdatePolicy policy;
    policy.mode = params;
    return policy;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        return false;
    }
    return std::memcmp(a.data(), b.data(),
                       sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

} // namespace

TEST_CASE("closed form recovers an exact linear relation") {
    Dataset data;
    data.features = Matrix(3, 1);
    data.features << 1.0, 2.0, 3.0;
    data.responses = Vector(3);
    data.responses << 2.0, 4.0, 6.0;
    const Parameter theta = itlm::closed_form_ls(data, all_indices(3));
    CHECK(theta.theta[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed form on repeated features returns the mean") {
    Dataset data;
    data.features = Matrix(2, 1);
    data.features << 1.0, 1.0;
    data.responses = Vector(2);
    data.responses << 0.0, 10.0;
    const Parameter theta = itlm::closed_form_ls(data, all_indices(2));
    CHECK(theta.theta[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("closed form matches a hand-built normal-equations solve") {
    const Dataset data = random_dataset(6, 2, 401);
    const std::vector<Index> subset{0, 2, 3, 5};
    const Parameter theta = itlm::closed_form_ls(data, subset);

    // Independent route: accumulate the 2x2 normal equations with scalar
    // arithmetic and invert the Gram matrix directly.
    double g00 = 0.0, g01 = 0.0, g11 = 0.0, r0 = 0.0, r1 = 0.0;
    for (Index i : subset) {
        const double a = data.features(i, 0);
        const double b = data.features(i, 1);
        const double y = data.responses[i];
        g00 += a * a;
        g01 += a * b;
        g11 += b * b;
        r0 += a * y;
        r1 += b * y;
    }
    const double det = g00 * g11 - g01 * g01;
    REQUIRE(std::abs(det) > 1e-8);
    const double t0 = (g11 * r0 - g01 * r1) / det;
    const double t1 = (g00 * r1 - g01 * r0) / det;
    CHECK(std::abs(theta.theta[0] - t0) <= 1e-10);
    CHECK(std::abs(theta.theta[1] - t1) <= 1e-10);
}

TEST_CASE("closed form residual gradient is numerically zero") {
    const Dataset data = random_dataset(40, 5, 402);
    const std::vector<Index> subset{1, 4, 7, 9, 13, 20, 22, 31, 38};
    const Parameter theta = itlm::closed_form_ls(data, subset);

    Matrix phi(static_cast<Index>(subset.size()), data.d());
    Vector y(static_cast<Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j) {
        phi.row(static_cast<Index>(j)) = data.features.row(subset[j]);
        y[static_cast<Index>(j)] = data.responses[subset[j]];
    }
    const double residual_gradient =
        (phi.transpose() * phi * theta.theta - phi.transpose() * y).norm();
    CHECK(residual_gradient <= 1e-8 * (1.0 + y.norm()));
}

TEST_CASE("closed form solution is a subset-loss minimum") {
    const Dataset data = random_dataset(12, 3, 403);
    const std::vector<Index> subset{0, 1, 3, 5, 6, 8, 10, 11};
    const Parameter theta = itlm::closed_form_ls(data, subset);
    const double base = subset_loss(theta, data, subset);

    itlm::SplitMix64 rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        Vector dir(data.d());
        for (Index j = 0; j < data.d(); ++j) {
            dir[j] = rng.next_gaussian();
        }
        dir.normalize();
        for (double sign : {1.0, -1.0}) {
            Parameter moved = theta;
            moved.theta += sign * 1e-3 * dir;
            CHECK(subset_loss(moved, data, subset) >= base - 1e-12);
        }
    }
}

TEST_CASE("closed form rejects unusable inputs") {
    SUBCASE("non-identity link") {
        Dataset data = random_dataset(4, 2, 405,
                                      LinkFunction::piecewise_linear(1.0, 1.2));
        CHECK_THROWS_AS((void)itlm::closed_form_ls(data, all_indices(4)),
                        itlm::ConfigError);
    }
    SUBCASE("subset smaller than the dimension") {
        const Dataset data = random_dataset(4, 2, 406);
        const std::vector<Index> subset{1};
        CHECK_THROWS_AS((void)itlm::closed_form_ls(data, subset),
                        itlm::ConfigError);
    }
    SUBCASE("duplicate subset index") {
        const Dataset data = random_dataset(4, 2, 406);
        const std::vector<Index> subset{1, 1, 2};
        CHECK_THROWS_AS((void)itlm::closed_form_ls(data, subset),
                        itlm::ConfigError);
    }
    SUBCASE("rank-deficient rows report the eigenvalue ratio") {
        Dataset data;
        data.features = Matrix(3, 2);
        // Second column is twice the first: Gram rank 1.
        data.features << 1.0, 2.0, 2.0, 4.0, -1.0, -2.0;
        data.responses = Vector(3);
        data.responses << 1.0, 2.0, 3.0;
        try {
            (void)itlm::closed_form_ls(data, all_indices(3));
            FAIL("expected NumericalError");
        } catch (const itlm::NumericalError& err) {
            CHECK(std::string(err.what()).find("eigenvalue ratio") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("single SGD step on a single sample") {
    Dataset data;
    data.features = Matrix(1, 1);
    data.features << 1.0;
    data.responses = Vector(1);
    data.responses << 1.0;
    Parameter theta;
    theta.theta = Vector::Zero(1);
    itlm::SplitMix64 rng(1);
    const Parameter next = itlm::batch_sgd_update(
        theta, data, all_indices(1),
        sgd_policy({.eta = 0.5, .steps = 1, .batch = 1}), rng);
    // 0 - 0.5 * (-2) = 1.
    CHECK(next.theta[0] == 1.0);
}

TEST_CASE("SGD validates its policy") {
    const Dataset data = random_dataset(5, 2, 407);
    Parameter theta;
    theta.theta = Vector::Zero(2);
    itlm::SplitMix64 rng(2);
    const std::vector<Index> subset{0, 1, 2};

    CHECK_THROWS_AS(
        (void)itlm::batch_sgd_update(
            theta, data, subset, sgd_policy({.eta = 0.1, .steps = 0}), rng),
        itlm::ConfigError);
    CHECK_THROWS_AS(
        (void)itlm::batch_sgd_update(
            theta, data, subset,
            sgd_policy({.eta = 0.1, .steps = 1, .batch = 4}), rng),
        itlm::ConfigError);
    CHECK_THROWS_AS(
        (void)itlm::batch_sgd_update(
            theta, data, subset, sgd_policy({.eta = -0.5, .steps = 1}), rng),
        itlm::ConfigError);
    CHECK_THROWS_AS(
        (void)itlm::batch_sgd_update(
            theta, data, subset,
            sgd_policy({.eta = 0.1,
                        .steps = 1,
                        .batch = 1,
                        .reinit = true,
                        .reinit_scale = 0.0}),
            rng),
        itlm::ConfigError);
    UpdatePolicy wrong_mode;
    wrong_mode.mode = FullGradientUpdate{0.1};
    CHECK_THROWS_AS((void)itlm::batch_sgd_update(theta, data, subset,
                                                 wrong_mode, rng),
                    itlm::ConfigError);
    Parameter short_theta;
    short_theta.theta = Vector::Zero(1);
    CHECK_THROWS_AS(
        (void)itlm::batch_sgd_update(
            short_theta, data, subset,
            sgd_policy({.eta = 0.1, .steps = 1, .batch = 1}), rng),
        itlm::ConfigError);
}

TEST_CASE("exact-fit parameters survive any number of SGD steps") {
    // Responses generated exactly by theta = (1.5, -2): gradients vanish.
    // Row-by-row dot products so the residual is bitwise zero.
    Dataset data = random_dataset(8, 2, 408);
    Vector truth(2);
    truth << 1.5, -2.0;
    for (Index i = 0; i < data.n(); ++i) {
        data.responses[i] = data.features.row(i).dot(truth);
    }
    Parameter theta;
    theta.theta = truth;
    itlm::SplitMix64 rng(3);
    const Parameter next = itlm::batch_sgd_update(
        theta, data, all_indices(8),
        sgd_policy({.eta = 0.2, .steps = 17, .batch = 3}), rng);
    CHECK(bitwise_equal(next.theta, truth));
}

TEST_CASE("SGD is bit-reproducible for a fixed stream seed") {
    const Dataset data = random_dataset(20, 3, 409);
    Parameter theta;
    theta.theta = Vector::Zero(3);
    const UpdatePolicy policy = sgd_policy(
        {.eta = 0.05, .steps = 25, .batch = 4, .reinit = true,
         .reinit_scale = 0.7});
    const std::vector<Index> subset{0, 2, 3, 5, 7, 8, 11, 13, 14, 17, 19};

    itlm::SplitMix64 rng_a(500);
    itlm::SplitMix64 rng_b(500);
    const Parameter a = itlm::batch_sgd_update(theta, data, subset, policy,
                                               rng_a);
    const Parameter b = itlm::batch_sgd_update(theta, data, subset, policy,
                                               rng_b);
    CHECK(bitwise_equal(a.theta, b.theta));

    itlm::SplitMix64 rng_c(501);
    const Parameter c = itlm::batch_sgd_update(theta, data, subset, policy,
                                               rng_c);
    CHECK_FALSE(bitwise_equal(a.theta, c.theta));
}

TEST_CASE("re-initialization ignores the incoming parameter") {
    const Dataset data = random_dataset(10, 2, 410);
    const UpdatePolicy policy = sgd_policy(
        {.eta = 0.1, .steps = 3, .batch = 2, .reinit = true,
         .reinit_scale = 2.0});
    const std::vector<Index> subset{0, 1, 2, 3, 4, 5};

    Parameter zero;
    zero.theta = Vector::Zero(2);
    Parameter far;
    far.theta = Vector(2);
    far.theta << 1e6, -1e6;

    itlm::SplitMix64 rng_a(600);
    itlm::SplitMix64 rng_b(600);
    const Parameter a = itlm::batch_sgd_update(zero, data, subset, policy,
                                               rng_a);
    const Parameter b = itlm::batch_sgd_update(far, data, subset, policy,
                                               rng_b);
    CHECK(bitwise_equal(a.theta, b.theta));
}

TEST_CASE("re-initialization draws coordinates in order, then steps") {
    const Dataset data = random_dataset(6, 3, 411);
    const std::vector<Index> subset{0, 1, 2, 3, 4, 5};
    const double scale = 0.9;
    const UpdatePolicy policy = sgd_policy(
        {.eta = 0.3, .steps = 1, .batch = 6, .reinit = true,
         .reinit_scale = scale});

    Parameter ignored;
    ignored.theta = Vector::Ones(3);
    itlm::SplitMix64 rng(700);
    const Parameter got = itlm::batch_sgd_update(ignored, data, subset,
                                                 policy, rng);

    // Reconstruct: d Gaussians in coordinate order, then one full-batch
    // step, which must match the deterministic full-gradient form.
    itlm::SplitMix64 replay(700);
    Parameter start;
    start.theta = Vector(3);
    for (Index j = 0; j < 3; ++j) {
        start.theta[j] = scale * replay.next_gaussian();
    }
    const Parameter expected =
        itlm::full_gradient_step(start, data, subset, 0.3);
    CHECK(bitwise_equal(got.theta, expected.theta));
}

TEST_CASE("full-batch SGD consumes no randomness") {
    const Dataset data = random_dataset(7, 2, 412);
    Parameter theta;
    theta.theta = Vector::Zero(2);
    itlm::SplitMix64 rng(800);
    (void)itlm::batch_sgd_update(
        theta, data, all_indices(7),
        sgd_policy({.eta = 0.1, .steps = 4, .batch = 7}), rng);
    itlm::SplitMix64 fresh(800);
    CHECK(rng.next() == fresh.next());
}

TEST_CASE("full gradient step averages the subset gradients") {
    Dataset data;
    data.features = Matrix(2, 1);
    data.features << 1.0, 1.0;
    data.responses = Vector(2);
    data.responses << 2.0, 4.0;
    Parameter theta;
    theta.theta = Vector::Zero(1);
    const Parameter next =
        itlm::full_gradient_step(theta, data, all_indices(2), 0.5);
    // Mean gradient (-4 + -8)/2 = -6; step 0 - 0.5*(-6) = 3.
    CHECK(next.theta[0] == 3.0);
}

TEST_CASE("full gradient step leaves an exact fit unchanged") {
    Dataset data = random_dataset(9, 3, 413);
    Vector truth(3);
    truth << 0.25, -1.0, 3.0;
    for (Index i = 0; i < data.n(); ++i) {
        data.responses[i] = data.features.row(i).dot(truth);
    }
    Parameter theta;
    theta.theta = truth;
    const Parameter next =
        itlm::full_gradient_step(theta, data, all_indices(9), 0.4);
    CHECK(bitwise_equal(next.theta, truth));
}

TEST_CASE("full gradient step validates inputs") {
    const Dataset data = random_dataset(4, 2, 414);
    Parameter theta;
    theta.theta = Vector::Zero(2);
    const std::vector<Index> empty;
    CHECK_THROWS_AS(
        (void)itlm::full_gradient_step(theta, data, empty, 0.1),
        itlm::ConfigError);
    CHECK_THROWS_AS(
        (void)itlm::full_gradient_step(theta, data, all_indices(4), 0.0),
        itlm::ConfigError);
    const std::vector<Index> out_of_range{0, 4};
    CHECK_THROWS_AS(
        (void)itlm::full_gradient_step(theta, data, out_of_range, 0.1),
        itlm::ConfigError);
}

TEST_CASE("full gradient step moves along the differenced descent direction") {
    const Dataset data = random_dataset(10, 3, 415,
                                        LinkFunction::piecewise_linear(1.0, 1.2));
    const std::vector<Index> subset{0, 2, 3, 5, 7, 9};
    Parameter theta;
    theta.theta = Vector(3);
    theta.theta << 0.4, -0.9, 1.3;
    const Parameter next = itlm::full_gradient_step(theta, data, subset, 0.05);
    const Vector step = next.theta - theta.theta;

    // Central-difference gradient of the subset loss.
    Vector fd(3);
    for (Index j = 0; j < 3; ++j) {
        Parameter hi = theta;
        Parameter lo = theta;
        hi.theta[j] += 1e-6;
        lo.theta[j] -= 1e-6;
        fd[j] = (subset_loss(hi, data, subset) -
                 subset_loss(lo, data, subset)) / 2e-6;
    }
    REQUIRE(fd.norm() > 1e-6);
    CHECK(step.dot(-fd) > 0.0);
}

TEST_CASE("full gradient equals one full-batch SGD step bit for bit") {
    for (auto link : {LinkFunction::identity(),
                      LinkFunction::piecewise_linear(1.0, 1.2)}) {
        const Dataset data = random_dataset(15, 4, 416, link);
        const std::vector<Index> subset{1, 2, 4, 6, 7, 10, 11, 14};
        Parameter theta;
        theta.theta = Vector(4);
        theta.theta << 0.1, -2.0, 0.7, 1.9;

        const Parameter direct =
            itlm::full_gradient_step(theta, data, subset, 0.37);
        itlm::SplitMix64 rng(900);
        const Parameter via_sgd = itlm::batch_sgd_update(
            theta, data, subset,
            sgd_policy({.eta = 0.37,
                        .steps = 1,
                        .batch = static_cast<Index>(subset.size())}),
            rng);
        CHECK(bitwise_equal(direct.theta, via_sgd.theta));
    }
}

TEST_CASE("small-step full gradient strictly decreases the subset loss") {
    const Dataset data = random_dataset(6, 2, 417);
    const std::vector<Index> subset = all_indices(6);
    const itlm::RegularityReport reg =
        itlm::regularity_constants(data.features, 6);
    const double max_eta =
        1.0 / (2.0 * reg.psi_plus / static_cast<double>(subset.size()));

    itlm::SplitMix64 rng(418);
    for (int trial = 0; trial < 8; ++trial) {
        Parameter theta;
        theta.theta = Vector(2);
        theta.theta << rng.next_gaussian() * 2.0, rng.next_gaussian() * 2.0;
        const double before = subset_loss(theta, data, subset);
        for (double eta : {max_eta, 0.5 * max_eta}) {
            const Parameter next =
                itlm::full_gradient_step(theta, data, subset, eta);
            if ((next.theta - theta.theta).norm() == 0.0) {
                continue;  // gradient exactly zero
            }
            CHECK(subset_loss(next, data, subset) < before);
        }
    }
}

TEST_CASE("round schedule overrides only the SGD step count") {
    UpdatePolicy policy = sgd_policy({.eta = 0.1, .steps = 5, .batch = 2});
    policy.steps_schedule = {{0, 2}, {3, 7}};

    const UpdatePolicy round0 = itlm::with_round_schedule(policy, 0);
    CHECK(std::get<BatchSgdUpdate>(round0.mode).steps == 2);
    const UpdatePolicy round1 = itlm::with_round_schedule(policy, 1);
    CHECK(std::get<BatchSgdUpdate>(round1.mode).steps == 5);
    const UpdatePolicy round3 = itlm::with_round_schedule(policy, 3);
    CHECK(std::get<BatchSgdUpdate>(round3.mode).steps == 7);
    CHECK(std::get<BatchSgdUpdate>(round3.mode).eta == 0.1);
    CHECK(std::get<BatchSgdUpdate>(round3.mode).batch == 2);

    UpdatePolicy bad = policy;
    bad.steps_schedule = {{1, 0}};
    CHECK_THROWS_AS((void)itlm::with_round_schedule(bad, 1),
                    itlm::ConfigError);

    // Schedules attached to non-SGD modes are inert.
    UpdatePolicy closed;
    closed.mode = itlm::ClosedFormUpdate{};
    closed.steps_schedule = {{0, 3}};
    CHECK_NOTHROW((void)itlm::with_round_schedule(closed, 0));
}
