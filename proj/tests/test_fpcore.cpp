#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dexp/addcomb.hpp"
#include "dexp/fpcore.hpp"
#include "dexp/prng.hpp"

using namespace dexp;

namespace {

CountVector random_counts(std::uint32_t p, std::uint64_t seed, std::uint64_t max_value, double fill) {
    Xoshiro256 rng(seed);
    CountVector v(p);
    for (std::uint32_t i = 0; i < p; ++i) {
        if (rng.uniform() < fill) v[i] = rng.bounded(max_value) + 1;
    }
    return v;
}

}  // namespace

TEST(Primality, SmallAndLarge) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t n = 0; n < 200; ++n) {
        if (is_prime(n)) primes.push_back(n);
    }
    ASSERT_EQ(primes.size(), 46u);
    EXPECT_EQ(primes.front(), 2u);
    EXPECT_EQ(primes.back(), 199u);
    EXPECT_TRUE(is_prime(2147483647ull));
    EXPECT_FALSE(is_prime(3215031751ull));  // strong pseudoprime to 2, 3, 5, 7
    EXPECT_FALSE(is_prime(4294967295ull));
    EXPECT_TRUE(is_prime(4294967291ull));
    EXPECT_THROW(is_prime(4294967297ull), std::invalid_argument);
}

TEST(PrimeModulus, RejectsNonPrimes) {
    EXPECT_THROW(PrimeModulus(1), std::invalid_argument);
    EXPECT_THROW(PrimeModulus(2), std::invalid_argument);
    EXPECT_THROW(PrimeModulus(9), std::invalid_argument);
    EXPECT_NO_THROW(PrimeModulus(3));
}

TEST(ModInv, Examples) {
    const PrimeModulus p7(7);
    EXPECT_EQ(mod_inv(3, p7), 5u);
    EXPECT_EQ(mod_inv(1, p7), 1u);
    EXPECT_EQ(mod_inv(6, p7), 6u);
    EXPECT_THROW(mod_inv(0, p7), std::domain_error);
    EXPECT_THROW(mod_inv(14, p7), std::domain_error);
}

TEST(ModInv, AllResiduesForSeveralPrimes) {
    for (std::uint32_t p : {3u, 5u, 7u, 101u, 499u, 7919u}) {
        const PrimeModulus pm(p);
        for (std::uint32_t x = 1; x < p; ++x) {
            const std::uint32_t y = mod_inv(x, pm);
            ASSERT_EQ(std::uint64_t{x} * y % p, 1u) << "p=" << p << " x=" << x;
            ASSERT_EQ(y, mod_pow(x, p - 2, p));
        }
    }
}

TEST(PrimeModulus, ReduceAndPow) {
    const PrimeModulus pm(7);
    EXPECT_EQ(pm.reduce(-1), 6u);
    EXPECT_EQ(pm.reduce(-15), 6u);
    EXPECT_EQ(pm.reduce(15), 1u);
    EXPECT_EQ(pm.pow(3, -1), 5u);
    EXPECT_EQ(pm.pow(3, -2), 4u);
    EXPECT_EQ(pm.pow(3, 6), 1u);
    EXPECT_EQ(pm.pow(0, 0), 1u);
    EXPECT_THROW(pm.pow(0, -1), std::domain_error);
}

TEST(EpEval, Examples) {
    for (std::uint32_t p : {7u, 101u, 499u}) {
        const PrimeModulus pm(p);
        EXPECT_EQ(ep_eval(0, pm), Complex(1.0, 0.0));
        Complex total = 0;
        for (std::uint32_t z = 0; z < p; ++z) {
            total += ep_eval(z, pm);
            if (z > 0) {
                const Complex prod = ep_eval(z, pm) * ep_eval(p - z, pm);
                EXPECT_NEAR(prod.real(), 1.0, 1e-12);
                EXPECT_NEAR(prod.imag(), 0.0, 1e-12);
            }
            const double angle = 2.0 * M_PI * z / p;
            EXPECT_NEAR(ep_eval(z, pm).real(), std::cos(angle), 1e-14);
            EXPECT_NEAR(ep_eval(z, pm).imag(), std::sin(angle), 1e-14);
        }
        EXPECT_LT(std::abs(total), 1e-9);
    }
}

TEST(Dft, PointMassIsFlat) {
    const PrimeModulus pm(13);
    const auto t = dft_table(delta(13, 0), pm);
    for (const Complex& z : t) {
        EXPECT_NEAR(z.real(), 1.0 / 13, 1e-15);
        EXPECT_NEAR(z.imag(), 0.0, 1e-15);
    }
}

TEST(Dft, AllOnesIsOrthogonal) {
    const PrimeModulus pm(31);
    CountVector ones(31);
    for (auto& c : ones.counts) c = 1;
    const auto t = dft_table(ones, pm);
    EXPECT_NEAR(t[0].real(), 1.0, 1e-12);
    for (std::uint32_t xi = 1; xi < 31; ++xi) EXPECT_LT(std::abs(t[xi]), 1e-9);
}

TEST(Dft, TwoPointSetMatchesDirectEvaluation) {
    const PrimeModulus pm(7);
    const auto t = dft_table(FpSet(7, {1, 3}).indicator(), pm);
    for (std::uint32_t xi = 0; xi < 7; ++xi) {
        const Complex expect = (std::polar(1.0, -2 * M_PI * xi / 7.0) + std::polar(1.0, -2 * M_PI * 3.0 * xi / 7.0)) / 7.0;
        EXPECT_NEAR(t[xi].real(), expect.real(), 1e-14);
        EXPECT_NEAR(t[xi].imag(), expect.imag(), 1e-14);
    }
}

TEST(Dft, Parseval) {
    for (std::uint32_t p : {11u, 101u, 499u}) {
        const PrimeModulus pm(p);
        const CountVector f = random_counts(p, p, 9, 0.4);
        const auto t = dft_table(f, pm);
        double freq = 0, space = 0;
        for (const Complex& z : t) freq += std::norm(z);
        for (Count c : f.counts) space += to_double(c) * to_double(c);
        EXPECT_NEAR(freq * p, space, 1e-9 * space);
    }
}

TEST(Convolve, Examples) {
    const PrimeModulus pm(7);
    const CountVector u = FpSet(7, {1, 3}).indicator();
    const CountVector w = cyclic_convolve(u, u, pm);
    CountVector expect(7);
    expect[2] = 1;
    expect[4] = 2;
    expect[6] = 1;
    EXPECT_EQ(w, expect);

    const CountVector v = random_counts(7, 3, 50, 0.8);
    EXPECT_EQ(cyclic_convolve(delta(7, 0), v, pm), v);
}

TEST(Convolve, ConvolutionTheorem) {
    const std::uint32_t p = 101;
    const PrimeModulus pm(p);
    const CountVector u = random_counts(p, 1, 20, 0.3);
    const CountVector v = random_counts(p, 2, 20, 0.5);
    const auto w = dft_table(cyclic_convolve(u, v, pm), pm);
    const auto fu = dft_table(u, pm);
    const auto fv = dft_table(v, pm);
    for (std::uint32_t xi = 0; xi < p; ++xi) {
        const Complex expect = fu[xi] * fv[xi] * static_cast<double>(p);
        EXPECT_NEAR(std::abs(w[xi] - expect), 0.0, 1e-9 * (1.0 + std::abs(expect)));
    }
}

TEST(Convolve, CommutativeAndAssociative) {
    const std::uint32_t p = 31;
    const PrimeModulus pm(p);
    const CountVector a = random_counts(p, 11, 1000, 0.5);
    const CountVector b = random_counts(p, 12, 1000, 0.2);
    const CountVector c = random_counts(p, 13, 1000, 0.9);
    EXPECT_EQ(cyclic_convolve(a, b, pm), cyclic_convolve(b, a, pm));
    EXPECT_EQ(cyclic_convolve(cyclic_convolve(a, b, pm), c, pm), cyclic_convolve(a, cyclic_convolve(b, c, pm), pm));
}

TEST(Convolve, Beyond64BitMassIsExact) {
    const std::uint32_t p = 5;
    const PrimeModulus pm(p);
    CountVector u(p), v(p);
    u[1] = Count{1} << 40;
    v[2] = Count{1} << 40;
    const CountVector w = cyclic_convolve(u, v, pm);
    EXPECT_EQ(w[3], Count{1} << 80);
    EXPECT_EQ(to_string(w[3]), "1208925819614629174706176");
}

TEST(Convolve, OverflowIsDetected) {
    const std::uint32_t p = 5;
    const PrimeModulus pm(p);
    CountVector u(p), v(p);
    u[0] = Count{1} << 70;
    v[0] = Count{1} << 70;
    EXPECT_THROW(cyclic_convolve(u, v, pm), std::overflow_error);
}

TEST(Reference, ParallelKernelsAreBitIdenticalAcrossThreadCounts) {
    for (std::uint32_t p : {7u, 101u, 1009u}) {
        const PrimeModulus pm(p);
        const CountVector u = random_counts(p, p + 1, 30, 0.3);
        const CountVector v = random_counts(p, p + 2, 30, 0.7);
        const auto ref_dft = reference::dft_table(u, pm);
        const auto ref_conv = reference::cyclic_convolve(u, v, pm);
        for (int threads : {1, 2, 3, 4}) {
            set_num_threads(threads);
            const auto d = dft_table(u, pm);
            ASSERT_EQ(d.size(), ref_dft.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                ASSERT_EQ(d[i], ref_dft[i]) << "p=" << p << " threads=" << threads << " xi=" << i;
            }
            EXPECT_EQ(cyclic_convolve(u, v, pm), ref_conv);
        }
        set_num_threads(0);
    }
}

TEST(CompensatedSum, RecoversSmallTerms) {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(Count, ToString) {
    EXPECT_EQ(to_string(Count{0}), "0");
    EXPECT_EQ(to_string(Count{12345}), "12345");
    EXPECT_EQ(to_string(~Count{0}), "340282366920938463463374607431768211455");
}
