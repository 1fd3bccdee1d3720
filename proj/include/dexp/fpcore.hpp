#pragma once

/**
 * @file fpcore.hpp
 * @brief Arithmetic kernels over Z/p.
 *
 * Exact modular arithmetic, the additive character e_p(z) = exp(2 pi i z / p)
 * read from a precomputed root table, the normalized DFT
 *
 *     hat f(xi) = (1/p) sum_x f(x) e_p(-x xi),
 *
 * and exact integer cyclic convolution.  The parallel kernels (OpenMP) have
 * serial counterparts in `dexp::reference`; both produce bit-identical output.
 */

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dexp {

using Complex = std::complex<double>;

/// Exact nonnegative count. 128 bits; overflow is detected, never wrapped.
using Count = unsigned __int128;

std::string to_string(Count value);
double to_double(Count value);

/// Deterministic primality test, exact for all n < 2^32.
bool is_prime(std::uint64_t n);

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p);

/// An odd prime 3 <= p < 2^31 together with its unit-root and inverse tables.
/// Immutable after construction; share freely across threads.
class PrimeModulus {
public:
    explicit PrimeModulus(std::uint32_t p);

    std::uint32_t p() const { return p_; }

    /// e_p(z) for 0 <= z < p.
    const Complex& root(std::uint32_t z) const { return roots_[z]; }
    std::span<const Complex> roots() const { return roots_; }

    /// Inverse of x in 1..p-1; throws std::domain_error for x == 0 mod p.
    std::uint32_t inv(std::uint64_t x) const;

    std::uint32_t reduce(std::int64_t x) const;
    std::uint32_t mul(std::uint32_t x, std::uint32_t y) const {
        return static_cast<std::uint32_t>(std::uint64_t{x} * y % p_);
    }
    std::uint32_t add(std::uint32_t x, std::uint32_t y) const {
        std::uint32_t s = x + y;
        return s >= p_ ? s - p_ : s;
    }
    std::uint32_t neg(std::uint32_t x) const { return x == 0 ? 0 : p_ - x; }

    /// x^e mod p with negative e meaning powers of the inverse.
    std::uint32_t pow(std::uint32_t x, std::int64_t e) const;

    friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) { return a.p_ == b.p_; }

private:
    std::uint32_t p_;
    std::vector<Complex> roots_;
    std::vector<std::uint32_t> inv_;  // inv_[x] for x in 1..p-1, inv_[0] unused
};

/// Exact integer-valued function on Z/p.
struct CountVector {
    std::uint32_t p = 0;
    std::vector<Count> counts;

    CountVector() = default;
    explicit CountVector(std::uint32_t modulus) : p(modulus), counts(modulus, 0) {}

    Count operator[](std::size_t i) const { return counts[i]; }
    Count& operator[](std::size_t i) { return counts[i]; }
    std::size_t size() const { return counts.size(); }

    /// Throws std::overflow_error if the mass exceeds the carrier.
    Count total() const;
    std::vector<std::uint32_t> support() const;

    friend bool operator==(const CountVector&, const CountVector&) = default;
};

CountVector delta(std::uint32_t p, std::uint32_t at);

std::uint32_t mod_inv(std::uint64_t x, const PrimeModulus& pm);
Complex ep_eval(std::uint32_t z, const PrimeModulus& pm);

/// xi -> (1/p) sum_x f(x) e_p(-x xi), parallel over xi.
std::vector<Complex> dft_table(const CountVector& f, const PrimeModulus& pm);

/// w(l) = sum_j u(j) v(l - j), exact.  Throws std::overflow_error when the
/// output mass does not fit in Count.
CountVector cyclic_convolve(const CountVector& u, const CountVector& v, const PrimeModulus& pm);

/// Neumaier-compensated running sum with a fixed summation order.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(Complex z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

/// Serial kernels kept as the reference the parallel paths are tested against.
namespace reference {

std::vector<Complex> dft_table(const CountVector& f, const PrimeModulus& pm);
CountVector cyclic_convolve(const CountVector& u, const CountVector& v, const PrimeModulus& pm);

}  // namespace reference

/// Threads used by the parallel kernels; 0 leaves the OpenMP default.
void set_num_threads(int n);
int max_threads();

}  // namespace dexp
