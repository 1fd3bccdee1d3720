#pragma once

/**
 * @file verify.hpp
 * @brief Inequality checkers.
 *
 * Every checker returns a VerifyReport with lhs, rhs and slack = rhs - lhs.
 * Exact inequalities are decided on integers or exact rationals wherever the
 * quantities allow it; the remaining float comparisons carry a tolerance
 * sized from the kernel error budgets.  Inequalities that hold only up to an
 * unspecified constant are reported with status `info` and a ratio, never
 * failed on magnitude.
 */

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dexp/addcomb.hpp"
#include "dexp/expsums.hpp"
#include "dexp/fpcore.hpp"

namespace dexp {

enum class Status { pass, fail, gated, info };

const char* to_string(Status s);

struct VerifyReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;
    Status status = Status::pass;
    /// Informational ratio for constant-free inequalities; NaN when unused.
    double ratio = std::numeric_limits<double>::quiet_NaN();
    std::string params;
    std::string note;

    bool passed() const { return status == Status::pass; }
    /// Exact checks are the ones that may fail a sweep.
    bool exact() const { return status == Status::pass || status == Status::fail; }
};

struct TheoremReport {
    double moment = 0.0;
    double bound_rhs = 0.0;
    double ratio = 0.0;
    double threshold = 0.0;
    bool n_above_threshold = false;
    bool sigma_proper = false;
    double trivial_bound = 0.0;
    bool nontrivial = false;
    bool gated = false;
    std::string gate_reason;
    std::size_t m_size = 0;
    std::size_t n_size = 0;
    std::size_t sigma_size = 0;
    std::size_t k_sigma_size = 0;
    unsigned k = 0;
    unsigned r = 0;
};

/// Lower and upper halves of  ||A||^4 <= E(A,A)/p^3 - (|A|/p)^4 <= ||A||^2 |A|/p.
std::pair<VerifyReport, VerifyReport> check_bias_sandwich(const FpSet& a, const PrimeModulus& pm);

/// ||A|| <= (|A|/p)^{1/2}
VerifyReport check_bias_upper(const FpSet& a, const PrimeModulus& pm);

/// | #{a_1+..+a_n = x} / p^{n-1} - prod P(A_i) | <= prod_{i<=n-2} ||A_i|| * (P(A_{n-1}) P(A_n))^{1/2}
VerifyReport check_uniformity_lemma(std::span<const FpSet> sets, std::uint32_t x, const PrimeModulus& pm);

/// The n = 4 instance (A, -A, A, -A) at x = 0, whose count is E(A, A).
VerifyReport check_uniformity_energy_instance(const FpSet& a, const PrimeModulus& pm);

/// max_l rho(l) <= 2 p^{(k-2)/2} |Sigma|^{k/2}; gated for k < 2 or Sigma = Z/p.
VerifyReport check_rho_bound(const FpSet& n, unsigned k, const PrimeModulus& pm);

/// Same right-hand side against #{(d_1..d_k) in Sigma^k : d_1+..+d_k = l}, the
/// quantity the uniformity lemma bounds when applied with A_i = Sigma.
VerifyReport check_rho_sigma_bound(const FpSet& n, unsigned k, const PrimeModulus& pm);

/// supp(rho(N, k)) is contained in k Sigma.
VerifyReport check_rho_support(const FpSet& n, unsigned k, const PrimeModulus& pm);

/// S(M, N, k) <= max_l rho(l) * G(M, k Sigma).
VerifyReport check_decomposition(const FpSet& m, const FpSet& n, unsigned k, const PrimeModulus& pm);

/// R1 + skipped = |A||M'||frakN| exactly, and R2 #supp(nu) >= R1^2.
std::pair<VerifyReport, VerifyReport> check_r1_r2(const FpSet& a_set, const FpSet& m_prime, const FpSet& frak_n,
                                                  const PrimeModulus& pm);

/// Ratio S / (p b^r + b^{2r}) with b the top of the shift interval.
VerifyReport check_kloosterman_ratio(const FpSet& b, std::uint32_t b_max, unsigned r, const Weights& eta,
                                     const PrimeModulus& pm);

/// Whether the elements of M form one contiguous run mod p.
/// Sets of the shifting argument for M = {I+1, ..., I+|M|}: shifts A = [A0/2, A0] with
/// A0 = floor((|M|^r / p)^{1/r}), and M' = [I - |M|, I + 2|M|] minus 0.
struct ShiftSets {
    FpSet a_set;
    FpSet m_prime;
    std::uint64_t a_top = 0;
    bool dropped_zero = false;
};

ShiftSets shifting_sets(std::size_t m_size, std::int64_t interval_start, unsigned r, const PrimeModulus& pm);

bool is_interval(const FpSet& m);

TheoremReport theorem_report(const FpSet& m_interval, const FpSet& n, unsigned k, unsigned r, const PrimeModulus& pm);

/// p^{1/2 - (1 - 1/r)/(4 r k)}
double nontriviality_threshold(std::uint32_t p, unsigned k, unsigned r);

}  // namespace dexp
