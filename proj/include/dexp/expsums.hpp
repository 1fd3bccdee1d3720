#pragma once

/**
 * @file expsums.hpp
 * @brief Exponential-sum quantities over F_p.
 *
 * The double exponential moment
 *
 *     S(M, N, r, s; k) = sum_{x in M} | sum_{y in N} e_p(a x^r y^s) |^{2k},
 *
 * its r = 1, s = -1 specialization evaluated through the representation
 * function rho, the weighted sum, and the quantities of the shifting
 * argument: G = sum_{n in frakN} |sum_{m in M} e_p(n / m)|, the counts
 * nu(s, t), R1 = sum nu, R2 = sum nu^2 and the complete moment
 *
 *     sum_{s, t != 0} | sum_{b in B} eta(b) e_p(t / (s + b)) |^{2r}.
 *
 * Floating sums are accumulated in a fixed order, so results do not depend
 * on the thread count.
 */

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dexp/addcomb.hpp"
#include "dexp/fpcore.hpp"

namespace dexp {

struct MomentParams {
    std::uint32_t a = 1;
    std::int64_t r_exp = 1;
    std::int64_t s_exp = -1;
    unsigned k = 1;

    /// S(M, N, k) = sum_m |sum_n e_p(a n / m)|^{2k}: inverse on the outer variable.
    static MomentParams inverse_outer(std::uint32_t a, unsigned k) { return {a, -1, 1, k}; }

    void validate(const PrimeModulus& pm) const;
};

enum class MomentMethod { direct, via_rho };

const char* to_string(MomentMethod m);

struct MomentReport {
    double value = 0.0;
    MomentMethod method = MomentMethod::direct;
    double error_bound = 0.0;
    /// Imaginary part left over by the via_rho route; zero for direct.
    double imag_residual = 0.0;
    MomentParams params;
    std::string set_descriptions;
};

struct NuEntry {
    std::uint32_t s = 0;
    std::uint32_t t = 0;
    std::uint64_t count = 0;

    friend bool operator==(const NuEntry&, const NuEntry&) = default;
};

/// Sparse nu(s, t) sorted by (s, t).
struct NuTable {
    std::uint32_t p = 0;
    std::vector<NuEntry> entries;
    /// Triples with m = 0 or n = 0, which have no (s, t) in (F_p^*)^2.
    std::uint64_t skipped = 0;
    std::uint64_t triples = 0;

    std::uint64_t at(std::uint32_t s, std::uint32_t t) const;
};

struct R1R2 {
    Count r1 = 0;
    Count r2 = 0;
};

struct KloostermanResult {
    double value = 0.0;
    /// (s, b) pairs with s + b = 0, dropped from the inner sum, times p - 1 values of t.
    std::uint64_t dropped_terms = 0;
    double error_bound = 0.0;
};

using Weights = std::map<std::uint32_t, Complex>;

Complex inner_sum(std::uint32_t m, const FpSet& n, const MomentParams& params, const PrimeModulus& pm);

MomentReport moment_direct(const FpSet& m, const FpSet& n, const MomentParams& params, const PrimeModulus& pm);

MomentReport moment_via_rho(const FpSet& m, const FpSet& n, std::uint32_t a, unsigned k, const PrimeModulus& pm);

Complex weighted_moment(const FpSet& m, const FpSet& n, const Weights& weights, const MomentParams& params,
                        const PrimeModulus& pm);

/// T_M(l) = sum_{m in M} e_p(l / m) for every l.
std::vector<Complex> inverse_phase_sums(const FpSet& m, const PrimeModulus& pm);

double g_sum(const FpSet& m, const FpSet& frak_n, const PrimeModulus& pm);

NuTable nu_counts(const FpSet& a_set, const FpSet& m_prime, const FpSet& frak_n, const PrimeModulus& pm);

R1R2 r1_r2(const NuTable& nu);

/// eta must be unimodular on B (checked to 1e-9); an empty map means eta = 1.
KloostermanResult kloosterman_moment(const FpSet& b, unsigned r, const Weights& eta, const PrimeModulus& pm);

namespace reference {

/// Direct O(p^2 |B|) evaluation without the per-s phase table.
double kloosterman_moment(const FpSet& b, unsigned r, const Weights& eta, const PrimeModulus& pm);

}  // namespace reference

}  // namespace dexp
