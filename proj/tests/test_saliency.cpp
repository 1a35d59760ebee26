/**
 * \file test_saliency.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "support.hpp"

#include "jforge/error.hpp"
#include "jforge/saliency.hpp"

#include <doctest.h>

#include <limits>
#include <numeric>
#include <optional>

using namespace jforge;

namespace {

/// Jacobian from a list of (target derivative, other derivatives...) columns.
Jacobian from_columns(const std::vector<std::vector<double>> &columns) {
    JacobianMatrix m(static_cast<Eigen::Index>(columns.front().size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i)
        for (std::size_t j = 0; j < columns[i].size(); ++j)
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = columns[i][j];
    return Jacobian{m, Tap::probabilities};
}

std::vector<std::size_t> all_features(std::size_t m) {
    std::vector<std::size_t> d(m);
    std::iota(d.begin(), d.end(), 0);
    return d;
}

} // namespace

TEST_CASE("increase map follows the rejection and product clauses") {
    const Jacobian jac = from_columns({{-0.5, -1.0, 0.0}, {2.0, -1.0, -0.5}, {0.0, 0.0, 0.0}, {1.0, 0.5, 0.0}});
    const SaliencyMap map = saliency_increase(jac, 0);
    CHECK(map.values[0] == 0.0);
    CHECK(map.values[1] == 3.0);
    CHECK(map.values[2] == 0.0);
    CHECK(map.values[3] == 0.0);
    CHECK(map.variant == Variant::increase);
}

TEST_CASE("decrease map follows the mirrored clauses") {
    const Jacobian jac = from_columns({{-2.0, 1.0, 0.5}, {0.1, -4.0, -2.0}, {-1.0, -1.0, 0.0}});
    const SaliencyMap map = saliency_decrease(jac, 0);
    CHECK(map.values[0] == 3.0);
    CHECK(map.values[1] == 0.0);
    CHECK(map.values[2] == 0.0);
}

TEST_CASE("decrease map equals the increase map of the negated jacobian") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Jacobian jac = testing::random_jacobian(4, 12, rng, trial % 2 == 0);
        const Jacobian neg{-jac.values, jac.tap};
        for (std::size_t t = 0; t < 4; ++t)
            CHECK(saliency_decrease(jac, t).values == saliency_increase(neg, t).values);
    }
}

TEST_CASE("maps are non-negative and all-zero on a zero jacobian") {
    const Jacobian zero{JacobianMatrix::Zero(3, 7), Tap::probabilities};
    for (double v : saliency_increase(zero, 1).values)
        CHECK(v == 0.0);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Jacobian jac = testing::random_jacobian(5, 20, rng, false);
        for (Variant v : {Variant::increase, Variant::decrease})
            for (double s : saliency_map(jac, 2, v).values)
                CHECK(s >= 0.0);
    }
}

TEST_CASE("out of range targets raise index errors") {
    const Jacobian jac{JacobianMatrix::Zero(3, 4), Tap::probabilities};
    CHECK_THROWS_AS(saliency_increase(jac, 3), IndexError);
    CHECK_THROWS_AS(saliency_decrease(jac, 7), IndexError);
    const std::vector<std::size_t> domain{0, 1};
    CHECK_THROWS_AS(pairwise_saliency(jac, domain, 3, Variant::increase), IndexError);
    const std::vector<std::size_t> bad{0, 4};
    CHECK_THROWS_AS(pairwise_saliency(jac, bad, 0, Variant::increase), IndexError);
}

TEST_CASE("a pair of individually rejected features can be selected together") {
    const Jacobian jac = from_columns({{5.0, 0.1}, {-0.5, -6.0}});
    const SaliencyMap single = saliency_increase(jac, 0);
    CHECK(single.values[0] == 0.0);
    CHECK(single.values[1] == 0.0);
    const std::vector<std::size_t> domain{0, 1};
    const PairSearch found = pairwise_saliency(jac, domain, 0, Variant::increase);
    REQUIRE(found.status == PairStatus::found);
    CHECK(found.pair.p1 == 0);
    CHECK(found.pair.p2 == 1);
    CHECK(found.pair.alpha == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(found.pair.beta == doctest::Approx(-5.9).epsilon(1e-15));
    CHECK(found.pair.score == doctest::Approx(26.55).epsilon(1e-14));
}

TEST_CASE("no pair qualifies when every target derivative is negative") {
    std::mt19937_64 rng(3);
    Jacobian jac = testing::random_jacobian(3, 10, rng, false);
    jac.values.row(1) = -jac.values.row(1).cwiseAbs() - JacobianMatrix::Constant(1, 10, 0.01);
    const auto domain = all_features(10);
    CHECK(pairwise_saliency(jac, domain, 1, Variant::increase).status == PairStatus::no_valid_pair);
}

TEST_CASE("a dominant pair among three candidates is returned") {
    const Jacobian jac = from_columns({{1.0, -1.0}, {0.5, -0.2}, {2.0, -3.0}});
    const auto domain = all_features(3);
    const PairSearch found = pairwise_saliency(jac, domain, 0, Variant::increase);
    const testing::BrutePair brute = testing::brute_pair_search(jac, domain, 0, Variant::increase);
    REQUIRE(found.status == PairStatus::found);
    REQUIRE(brute.pair);
    CHECK(std::make_pair(found.pair.p1, found.pair.p2) == std::make_pair<std::size_t, std::size_t>(0, 2));
    CHECK(*brute.pair == std::make_pair<std::size_t, std::size_t>(0, 2));
    CHECK(found.pair.score == 12.0);
}

TEST_CASE("fewer than two features exhaust the domain") {
    const Jacobian jac{JacobianMatrix::Ones(2, 5), Tap::probabilities};
    const std::vector<std::size_t> one{3};
    CHECK(pairwise_saliency(jac, one, 0, Variant::increase).status == PairStatus::domain_exhausted);
    CHECK(pairwise_saliency(jac, std::span<const std::size_t>{}, 0, Variant::decrease).status ==
          PairStatus::domain_exhausted);
}

TEST_CASE("pair search equals exhaustive enumeration on random jacobians") {
    std::mt19937_64 rng(4);
    std::bernoulli_distribution keep(0.7);
    int found_count = 0;
    for (int trial = 0; trial < 600; ++trial) {
        const bool gridded = trial % 2 == 0;
        const std::size_t n = 2 + trial % 5;
        const std::size_t m = 2 + trial % 19;
        const Jacobian jac = testing::random_jacobian(n, m, rng, gridded);
        std::vector<std::size_t> domain;
        for (std::size_t i = 0; i < m; ++i)
            if (keep(rng))
                domain.push_back(i);
        const std::size_t t = trial % n;
        for (Variant v : {Variant::increase, Variant::decrease}) {
            const PairSearch got = pairwise_saliency(jac, domain, t, v);
            if (domain.size() < 2) {
                CHECK(got.status == PairStatus::domain_exhausted);
                continue;
            }
            const testing::BrutePair want = testing::brute_pair_search(jac, domain, t, v);
            if (!want.pair) {
                CHECK(got.status == PairStatus::no_valid_pair);
                continue;
            }
            ++found_count;
            REQUIRE(got.status == PairStatus::found);
            CHECK(std::make_pair(got.pair.p1, got.pair.p2) == *want.pair);
            CHECK(got.pair.score == want.score);
            CHECK(pair_qualifies(got.pair.alpha, got.pair.beta, v));
        }
    }
    CHECK(found_count > 300);
}

TEST_CASE("selection is invariant to positive scaling of the jacobian") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Jacobian jac = testing::random_jacobian(4, 16, rng, trial % 2 == 0);
        const double lambda = std::pow(2.0, std::round(log_scale(rng)));
        const Jacobian scaled{lambda * jac.values, jac.tap};
        const auto domain = all_features(16);
        for (Variant v : {Variant::increase, Variant::decrease}) {
            const PairSearch a = pairwise_saliency(jac, domain, 1, v);
            const PairSearch b = pairwise_saliency(scaled, domain, 1, v);
            CHECK(a.status == b.status);
            CHECK(a.pair.p1 == b.pair.p1);
            CHECK(a.pair.p2 == b.pair.p2);
            const auto ma = saliency_map(jac, 1, v).values, mb = saliency_map(scaled, 1, v).values;
            CHECK(argmax(ma) == argmax(mb));
        }
    }
}

TEST_CASE("every sign pattern of alpha and beta is classified correctly") {
    const double signs[] = {-1.0, 0.0, 1.0};
    for (double alpha : signs)
        for (double beta : signs) {
            CHECK(pair_qualifies(alpha, beta, Variant::increase) == (alpha > 0 && beta < 0));
            CHECK(pair_qualifies(alpha, beta, Variant::decrease) == (alpha < 0 && beta > 0));
        }
    // beta exactly zero never qualifies
    const Jacobian jac = from_columns({{1.0, 0.5}, {1.0, -0.5}});
    const auto domain = all_features(2);
    CHECK(pairwise_saliency(jac, domain, 0, Variant::increase).status == PairStatus::no_valid_pair);
}

TEST_CASE("prefilter with a large enough budget matches the exhaustive search") {
    std::mt19937_64 rng(6);
    int agree = 0, total = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Jacobian jac = testing::random_jacobian(10, 60, rng, false);
        const auto domain = all_features(60);
        const PairSearch exact = pairwise_saliency(jac, domain, trial % 10, Variant::increase);
        const PairSearch all = pairwise_saliency(jac, domain, trial % 10, Variant::increase, {60});
        CHECK(all.status == exact.status);
        CHECK(all.pair.p1 == exact.pair.p1);
        CHECK(all.pair.p2 == exact.pair.p2);
        const PairSearch top = pairwise_saliency(jac, domain, trial % 10, Variant::increase, {20});
        if (top.status == PairStatus::found) {
            CHECK(top.pair.score <= exact.pair.score);
            CHECK(pair_qualifies(top.pair.alpha, top.pair.beta, Variant::increase));
            ++total;
            agree += top.pair.p1 == exact.pair.p1 && top.pair.p2 == exact.pair.p2;
        }
    }
    MESSAGE("top-20 prefilter agreed with exhaustive search on " << agree << " of " << total << " jacobians");
    CHECK(total > 0);
}

TEST_CASE("qualifying pair count matches brute force") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Jacobian jac = testing::random_jacobian(3, 15, rng, trial % 2 == 0);
        for (Variant v : {Variant::increase, Variant::decrease}) {
            const TargetSplit s = split_target(jac, 0);
            std::size_t count = 0;
            for (std::size_t p = 0; p < 15; ++p)
                for (std::size_t q = p + 1; q < 15; ++q)
                    count += pair_qualifies(s.target[p] + s.target[q], s.others[p] + s.others[q], v);
            CHECK(count_qualifying_pairs(jac, 0, v) == count);
        }
    }
    CHECK(count_qualifying_pairs(Jacobian{JacobianMatrix::Zero(2, 6), Tap::probabilities}, 0, Variant::increase) == 0);
}
