#pragma once

// Brute-force evaluations that share no code path with the kernels: tuple
// enumeration for counts and libm trigonometry instead of the root table.
// Only practical for tiny sets and primes.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dexp/addcomb.hpp"
#include "dexp/expsums.hpp"

namespace dexp::oracle {

Complex ep(std::uint64_t z, std::uint32_t p);

std::uint64_t energy(const FpSet& a, const FpSet& b);
std::vector<std::uint64_t> rho(const FpSet& n, unsigned k);
FpSet sumset(const FpSet& a, const FpSet& b);
double fourier_bias(const FpSet& a);
double moment(const FpSet& m, const FpSet& n, const MomentParams& params);
double g_sum(const FpSet& m, const FpSet& frak_n);
std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> nu(const FpSet& a_set, const FpSet& m_prime,
                                                                    const FpSet& frak_n);

struct Comparison {
    std::string name;
    double fast = 0.0;
    double brute = 0.0;
    double tolerance = 0.0;
    bool agree = false;
};

/// Every kernel against its brute-force counterpart on (M, N, k); M must avoid 0.
std::vector<Comparison> compare_all(const FpSet& m, const FpSet& n, unsigned k, const PrimeModulus& pm);

}  // namespace dexp::oracle
