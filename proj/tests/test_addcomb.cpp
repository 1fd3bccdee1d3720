#include <gtest/gtest.h>

#include <cmath>

#include "dexp/addcomb.hpp"
#include "dexp/oracle.hpp"
#include "dexp/prng.hpp"

using namespace dexp;

namespace {

FpSet random_set(std::uint32_t p, std::size_t size, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<std::uint32_t> xs;
    size = std::min<std::size_t>(size, p);
    while (xs.size() < size) {
        const auto x = static_cast<std::uint32_t>(rng.bounded(p));
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    return FpSet(p, xs);
}

}  // namespace

TEST(FpSet, Construction) {
    const FpSet a(7, {3, 1, 3});
    EXPECT_EQ(a.size(), 2u);
    EXPECT_TRUE(a.contains(1));
    EXPECT_TRUE(a.contains(3));
    EXPECT_FALSE(a.contains(2));
    EXPECT_THROW(FpSet(7, {7}), std::out_of_range);
    EXPECT_EQ(FpSet::full(7).size(), 7u);
    EXPECT_EQ(FpSet::full_minus_zero(7).size(), 6u);
    EXPECT_FALSE(FpSet::full_minus_zero(7).contains(0));
    EXPECT_TRUE(FpSet::empty(7).empty());
    EXPECT_EQ(FpSet::from_bitmap(70, {std::uint64_t{1} << 5, 1}), FpSet(70, {5, 64}));
}

TEST(FpSet, Transforms) {
    const FpSet a(7, {1, 3});
    EXPECT_EQ(a.negated(), FpSet(7, {4, 6}));
    EXPECT_EQ(a.translated(5), FpSet(7, {6, 1}));
    EXPECT_EQ(a.dilated(3), FpSet(7, {3, 2}));
    EXPECT_TRUE(a.subset_of(FpSet(7, {0, 1, 3})));
    EXPECT_FALSE(a.subset_of(FpSet(7, {1})));
}

TEST(DifferenceSet, Examples) {
    EXPECT_EQ(difference_set(FpSet(7, {0})), FpSet(7, {0}));
    EXPECT_EQ(difference_set(FpSet(7, {1, 3})), FpSet(7, {0, 2, 5}));
    EXPECT_EQ(difference_set(FpSet::full(11)), FpSet::full(11));
    EXPECT_THROW(difference_set(FpSet::empty(7)), std::invalid_argument);
}

TEST(IteratedSumset, Examples) {
    const FpSet s(7, {0, 2, 5});
    EXPECT_EQ(iterated_sumset(s, 1), s);
    EXPECT_EQ(iterated_sumset(s, 2), FpSet(7, {0, 2, 3, 4, 5}));
    EXPECT_EQ(iterated_sumset(FpSet::full(13), 3), FpSet::full(13));
    EXPECT_THROW(iterated_sumset(s, 0), std::invalid_argument);
}

TEST(Sumset, MatchesBruteForceOnWideModuli) {
    for (std::uint32_t p : {7u, 61u, 67u, 127u, 131u, 499u}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const FpSet a = random_set(p, 1 + seed % 9, seed * 31 + p);
            const FpSet b = random_set(p, 1 + (seed * 7) % 13, seed * 17 + p);
            ASSERT_EQ(sumset(a, b), oracle::sumset(a, b)) << "p=" << p << " seed=" << seed;
        }
    }
}

TEST(Rho, Example) {
    const PrimeModulus pm(7);
    const CountVector r = rho(FpSet(7, {1, 3}), 1, pm);
    CountVector expect(7);
    expect[0] = 2;
    expect[2] = 1;
    expect[5] = 1;
    EXPECT_EQ(r, expect);
}

TEST(Rho, MatchesTupleEnumeration) {
    for (std::uint32_t p : {7u, 11u, 31u}) {
        const PrimeModulus pm(p);
        for (unsigned k = 1; k <= 3; ++k) {
            const FpSet n = random_set(p, 4, p * 10 + k);
            const CountVector fast = rho(n, k, pm);
            const auto slow = oracle::rho(n, k);
            for (std::uint32_t l = 0; l < p; ++l) ASSERT_EQ(fast[l], Count{slow[l]}) << "p=" << p << " k=" << k;
            ASSERT_EQ(fast.total(), Count{1} << (2 * k * 2));  // |N|^{2k} with |N| = 4
        }
    }
}

TEST(Rho, SymmetricAndPeaksAtZero) {
    const PrimeModulus pm(101);
    const FpSet n = random_set(101, 9, 5);
    const CountVector r = rho(n, 2, pm);
    for (std::uint32_t l = 1; l < 101; ++l) {
        EXPECT_EQ(r[l], r[101 - l]);
        EXPECT_LE(r[l], r[0]);
    }
    EXPECT_EQ(r[0], additive_energy(n, n, pm));
}

TEST(Energy, Examples) {
    const PrimeModulus p7(7);
    EXPECT_EQ(additive_energy(FpSet(7, {0}), FpSet(7, {0}), p7), Count{1});
    EXPECT_EQ(additive_energy(FpSet(7, {0, 1}), FpSet(7, {0, 1}), p7), Count{6});
    for (std::uint32_t p : {5u, 13u, 101u}) {
        const PrimeModulus pm(p);
        EXPECT_EQ(additive_energy(FpSet::full(p), FpSet::full(p), pm), Count{p} * p * p);
    }
}

TEST(Energy, MatchesQuadrupleLoop) {
    const PrimeModulus pm(31);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FpSet a = random_set(31, 2 + seed % 10, seed);
        const FpSet b = random_set(31, 3 + seed % 7, seed + 100);
        ASSERT_EQ(additive_energy(a, b, pm), Count{oracle::energy(a, b)});
    }
}

TEST(Density, Examples) {
    EXPECT_EQ(density(FpSet::empty(7)).value(), 0.0);
    EXPECT_EQ(density(FpSet::full(7)).value(), 1.0);
    EXPECT_EQ(density(FpSet(7, {1, 3})), (Density{2, 7}));
}

TEST(FourierBias, Examples) {
    for (std::uint32_t p : {7u, 13u, 101u}) {
        const PrimeModulus pm(p);
        EXPECT_NEAR(fourier_bias(FpSet::full(p), pm).bias, 0.0, 1e-12);
        EXPECT_NEAR(fourier_bias(FpSet(p, {0}), pm).bias, 1.0 / p, 1e-15);
    }
    const PrimeModulus p7(7);
    double best = 0;
    for (int xi = 1; xi < 7; ++xi) {
        best = std::max(best, std::abs(std::polar(1.0, -2 * M_PI * xi / 7.0) + std::polar(1.0, -2 * M_PI * 3 * xi / 7.0)) / 7.0);
    }
    EXPECT_NEAR(fourier_bias(FpSet(7, {1, 3}), p7).bias, best, 1e-14);
}

TEST(FourierBias, EmptySetHasZeroBias) {
    const PrimeModulus pm(11);
    const BiasResult b = fourier_bias(FpSet::empty(11), pm);
    EXPECT_EQ(b.bias, 0.0);
    EXPECT_EQ(b.argmax_xi, 1u);
}

TEST(FourierBias, TranslationAndDilationInvariance) {
    const PrimeModulus pm(101);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FpSet a = random_set(101, 5 + seed, seed);
        const double b0 = fourier_bias(a, pm).bias;
        EXPECT_NEAR(fourier_bias(a.translated(17 + seed), pm).bias, b0, 1e-12);
        EXPECT_NEAR(fourier_bias(a.dilated(3 + seed), pm).bias, b0, 1e-12);
        EXPECT_NEAR(fourier_bias(a.negated(), pm).bias, b0, 1e-12);
    }
}

TEST(FourierBias, MatchesSerialReferenceAtAnyThreadCount) {
    const PrimeModulus pm(499);
    const FpSet a = random_set(499, 40, 77);
    const auto ref = reference::fourier_magnitudes(a, pm);
    for (int threads : {1, 2, 4}) {
        set_num_threads(threads);
        const BiasResult b = fourier_bias(a, pm, true);
        ASSERT_EQ(b.all_values.size(), ref.size());
        for (std::size_t xi = 0; xi < ref.size(); ++xi) EXPECT_NEAR(b.all_values[xi], ref[xi], 1e-13);
        EXPECT_EQ(b.bias, fourier_bias(a, pm).bias);
        EXPECT_NEAR(b.bias, oracle::fourier_bias(a), 1e-13);
    }
    set_num_threads(0);
}

TEST(RepresentationCounts, TripleSumsMatchConvolution) {
    const PrimeModulus pm(13);
    const std::vector<FpSet> sets{FpSet(13, {1, 2}), FpSet(13, {0, 5}), FpSet(13, {3})};
    const CountVector r = representation_counts(sets, pm);
    CountVector expect(13);
    for (std::uint32_t a : {1u, 2u})
        for (std::uint32_t b : {0u, 5u}) expect[(a + b + 3) % 13] += 1;
    EXPECT_EQ(r, expect);
}

TEST(Argmax, FirstMaximum) {
    CountVector v(5);
    v[1] = 3;
    v[3] = 3;
    EXPECT_EQ(argmax(v), 1u);
}
