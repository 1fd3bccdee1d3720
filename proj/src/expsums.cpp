#include "dexp/expsums.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dexp {

namespace {

double power_of_norm(Complex z, unsigned k) {
    const double n2 = z.real() * z.real() + z.imag() * z.imag();
    double out = 1.0;
    for (unsigned i = 0; i < k; ++i) out *= n2;
    return out;
}

void require_units(const FpSet& m, const char* what) {
    if (m.contains(0)) throw std::domain_error(std::string(what) + ": outer set must not contain 0");
}

void require_modulus(const FpSet& s, const PrimeModulus& pm, const char* what) {
    if (s.p() != pm.p()) throw std::invalid_argument(std::string(what) + ": modulus mismatch");
}

std::string describe_pair(const FpSet& m, const FpSet& n) { return "M=" + m.describe() + " N=" + n.describe(); }

double float_budget(unsigned k, std::size_t outer, std::size_t inner) {
    return 2.0 * k * static_cast<double>(outer) * std::pow(static_cast<double>(inner), 2.0 * k) * 1e-14;
}

Complex phase_sum(std::span<const std::uint32_t> exps, std::uint32_t coeff, const PrimeModulus& pm) {
    const std::uint32_t p = pm.p();
    double re = 0.0, im = 0.0;
    for (std::uint32_t e : exps) {
        const Complex& w = pm.root(static_cast<std::uint32_t>(std::uint64_t{coeff} * e % p));
        re += w.real();
        im += w.imag();
    }
    return {re, im};
}

std::vector<std::uint32_t> powers(const FpSet& n, std::int64_t exponent, const PrimeModulus& pm) {
    std::vector<std::uint32_t> out;
    out.reserve(n.size());
    for (std::uint32_t y : n.elements()) out.push_back(pm.pow(y, exponent));
    return out;
}

std::vector<std::uint32_t> inverses(const FpSet& m, const PrimeModulus& pm) {
    std::vector<std::uint32_t> out;
    out.reserve(m.size());
    for (std::uint32_t x : m.elements()) out.push_back(pm.inv(x));
    return out;
}

}  // namespace

void MomentParams::validate(const PrimeModulus& pm) const {
    if (a % pm.p() == 0) throw std::invalid_argument("MomentParams: a must be nonzero mod p");
    if (k == 0) throw std::invalid_argument("MomentParams: k must be positive");
}

const char* to_string(MomentMethod m) { return m == MomentMethod::direct ? "direct" : "via_rho"; }

std::uint64_t NuTable::at(std::uint32_t s, std::uint32_t t) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), NuEntry{s, t, 0}, [](const NuEntry& x, const NuEntry& y) {
        return x.s != y.s ? x.s < y.s : x.t < y.t;
    });
    return (it != entries.end() && it->s == s && it->t == t) ? it->count : 0;
}

Complex inner_sum(std::uint32_t m, const FpSet& n, const MomentParams& params, const PrimeModulus& pm) {
    params.validate(pm);
    require_modulus(n, pm, "inner_sum");
    if (params.s_exp < 0 && n.contains(0)) throw std::domain_error("inner_sum: negative exponent on a set containing 0");
    if (params.r_exp < 0 && m % pm.p() == 0) throw std::domain_error("inner_sum: negative exponent at m = 0");
    const std::uint32_t coeff = pm.mul(params.a % pm.p(), pm.pow(m % pm.p(), params.r_exp));
    const std::vector<std::uint32_t> ys = powers(n, params.s_exp, pm);
    return phase_sum(ys, coeff, pm);
}

MomentReport moment_direct(const FpSet& m, const FpSet& n, const MomentParams& params, const PrimeModulus& pm) {
    params.validate(pm);
    require_modulus(m, pm, "moment_direct");
    require_modulus(n, pm, "moment_direct");
    if (params.s_exp < 0 && n.contains(0)) throw std::domain_error("moment_direct: negative exponent on a set containing 0");
    if (params.r_exp < 0 && m.contains(0)) throw std::domain_error("moment_direct: negative exponent at m = 0");

    const std::vector<std::uint32_t> ys = powers(n, params.s_exp, pm);
    const auto outer = m.elements();
    std::vector<double> terms(outer.size());
    const std::int64_t count = static_cast<std::int64_t>(outer.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const std::uint32_t x = outer[static_cast<std::size_t>(i)];
        const std::uint32_t coeff = pm.mul(params.a % pm.p(), pm.pow(x, params.r_exp));
        terms[static_cast<std::size_t>(i)] = power_of_norm(phase_sum(ys, coeff, pm), params.k);
    }
    CompensatedSum total;
    for (double t : terms) total.add(t);

    MomentReport report;
    report.value = total.value();
    report.method = MomentMethod::direct;
    report.error_bound = float_budget(params.k, m.size(), n.size());
    report.params = params;
    report.set_descriptions = describe_pair(m, n);
    return report;
}

MomentReport moment_via_rho(const FpSet& m, const FpSet& n, std::uint32_t a, unsigned k, const PrimeModulus& pm) {
    const MomentParams params = MomentParams::inverse_outer(a, k);
    params.validate(pm);
    require_modulus(m, pm, "moment_via_rho");
    require_units(m, "moment_via_rho");

    // S = sum_l rho(l) T_M(a l)
    const CountVector counts = rho(n, k, pm);
    const std::vector<std::uint32_t> supp = counts.support();
    const std::vector<std::uint32_t> minv = inverses(m, pm);
    std::vector<Complex> terms(supp.size());
    const std::int64_t len = static_cast<std::int64_t>(supp.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < len; ++i) {
        const std::uint32_t l = supp[static_cast<std::size_t>(i)];
        terms[static_cast<std::size_t>(i)] = to_double(counts[l]) * phase_sum(minv, pm.mul(a % pm.p(), l), pm);
    }
    CompensatedComplexSum total;
    for (const Complex& t : terms) total.add(t);

    MomentReport report;
    report.value = total.value().real();
    report.imag_residual = std::abs(total.value().imag());
    report.method = MomentMethod::via_rho;
    report.error_bound = float_budget(k, m.size(), n.size());
    report.params = params;
    report.set_descriptions = describe_pair(m, n);
    if (report.imag_residual > report.error_bound) {
        throw std::logic_error("moment_via_rho: imaginary residual exceeds the certified bound");
    }
    return report;
}

Complex weighted_moment(const FpSet& m, const FpSet& n, const Weights& weights, const MomentParams& params,
                        const PrimeModulus& pm) {
    params.validate(pm);
    require_modulus(m, pm, "weighted_moment");
    require_modulus(n, pm, "weighted_moment");
    if (params.s_exp < 0 && n.contains(0)) throw std::domain_error("weighted_moment: negative exponent on a set containing 0");
    if (params.r_exp < 0 && m.contains(0)) throw std::domain_error("weighted_moment: negative exponent at m = 0");
    const std::vector<std::uint32_t> ys = powers(n, params.s_exp, pm);
    CompensatedComplexSum total;
    for (std::uint32_t x : m.elements()) {
        auto it = weights.find(x);
        if (it == weights.end()) throw std::invalid_argument("weighted_moment: no weight for m = " + std::to_string(x));
        const std::uint32_t coeff = pm.mul(params.a % pm.p(), pm.pow(x, params.r_exp));
        total.add(it->second * phase_sum(ys, coeff, pm));
    }
    return total.value();
}

std::vector<Complex> inverse_phase_sums(const FpSet& m, const PrimeModulus& pm) {
    require_modulus(m, pm, "inverse_phase_sums");
    require_units(m, "inverse_phase_sums");
    const std::vector<std::uint32_t> minv = inverses(m, pm);
    const std::int64_t p = pm.p();
    std::vector<Complex> out(static_cast<std::size_t>(p));
#pragma omp parallel for schedule(static)
    for (std::int64_t l = 0; l < p; ++l) {
        out[static_cast<std::size_t>(l)] = phase_sum(minv, static_cast<std::uint32_t>(l), pm);
    }
    return out;
}

double g_sum(const FpSet& m, const FpSet& frak_n, const PrimeModulus& pm) {
    require_modulus(m, pm, "g_sum");
    require_modulus(frak_n, pm, "g_sum");
    require_units(m, "g_sum");
    const std::vector<std::uint32_t> minv = inverses(m, pm);
    const auto outer = frak_n.elements();
    std::vector<double> terms(outer.size());
    const std::int64_t count = static_cast<std::int64_t>(outer.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        terms[static_cast<std::size_t>(i)] = std::abs(phase_sum(minv, outer[static_cast<std::size_t>(i)], pm));
    }
    CompensatedSum total;
    for (double t : terms) total.add(t);
    return total.value();
}

NuTable nu_counts(const FpSet& a_set, const FpSet& m_prime, const FpSet& frak_n, const PrimeModulus& pm) {
    require_modulus(a_set, pm, "nu_counts");
    require_modulus(m_prime, pm, "nu_counts");
    require_modulus(frak_n, pm, "nu_counts");
    if (a_set.contains(0)) throw std::domain_error("nu_counts: shift set must not contain 0");
    const std::uint64_t p = pm.p();

    NuTable table;
    table.p = pm.p();
    table.triples = static_cast<std::uint64_t>(a_set.size()) * m_prime.size() * frak_n.size();
    const bool n_has_zero = frak_n.contains(0);
    std::vector<std::uint64_t> keys;
    keys.reserve(table.triples);
    for (std::uint32_t a : a_set.elements()) {
        const std::uint32_t ainv = pm.inv(a);
        for (std::uint32_t m : m_prime.elements()) {
            if (m == 0) {
                table.skipped += frak_n.size();
                continue;
            }
            if (n_has_zero) ++table.skipped;
            const std::uint64_t s = pm.mul(ainv, m);
            for (std::uint32_t n : frak_n.elements()) {
                if (n == 0) continue;
                keys.push_back(s * p + pm.mul(ainv, n));
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        table.entries.push_back(
            {static_cast<std::uint32_t>(keys[i] / p), static_cast<std::uint32_t>(keys[i] % p), j - i});
        i = j;
    }
    return table;
}

R1R2 r1_r2(const NuTable& nu) {
    R1R2 out;
    for (const NuEntry& e : nu.entries) {
        out.r1 += e.count;
        out.r2 += Count{e.count} * e.count;
    }
    return out;
}

namespace {

std::vector<Complex> resolve_eta(const FpSet& b, const Weights& eta) {
    std::vector<Complex> out;
    out.reserve(b.size());
    for (std::uint32_t x : b.elements()) {
        if (eta.empty()) {
            out.emplace_back(1.0, 0.0);
            continue;
        }
        auto it = eta.find(x);
        if (it == eta.end()) throw std::invalid_argument("kloosterman_moment: no eta for b = " + std::to_string(x));
        if (std::abs(std::abs(it->second) - 1.0) > 1e-9) {
            throw std::invalid_argument("kloosterman_moment: eta(" + std::to_string(x) + ") is not unimodular");
        }
        out.push_back(it->second);
    }
    return out;
}

}  // namespace

KloostermanResult kloosterman_moment(const FpSet& b, unsigned r, const Weights& eta, const PrimeModulus& pm) {
    require_modulus(b, pm, "kloosterman_moment");
    if (r == 0) throw std::invalid_argument("kloosterman_moment: r must be positive");
    const std::vector<Complex> weights = resolve_eta(b, eta);
    const std::uint32_t p = pm.p();
    const auto shifts = b.elements();

    std::vector<double> per_s(p, 0.0);
    std::vector<std::uint64_t> dropped(p, 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t si = 1; si < static_cast<std::int64_t>(p); ++si) {
        const std::uint32_t s = static_cast<std::uint32_t>(si);
        std::vector<std::uint32_t> step;
        std::vector<Complex> w;
        for (std::size_t j = 0; j < shifts.size(); ++j) {
            const std::uint32_t sb = pm.add(s, shifts[j]);
            if (sb == 0) {
                ++dropped[s];
                continue;
            }
            step.push_back(pm.inv(sb));
            w.push_back(weights[j]);
        }
        std::vector<std::uint32_t> idx = step;  // (s + b)^{-1} t at t = 1
        CompensatedSum acc;
        for (std::uint32_t t = 1; t < p; ++t) {
            double re = 0.0, im = 0.0;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const Complex& root = pm.root(idx[j]);
                re += w[j].real() * root.real() - w[j].imag() * root.imag();
                im += w[j].real() * root.imag() + w[j].imag() * root.real();
                idx[j] = pm.add(idx[j], step[j]);
            }
            acc.add(power_of_norm({re, im}, r));
        }
        per_s[s] = acc.value();
    }

    KloostermanResult result;
    CompensatedSum total;
    for (std::uint32_t s = 1; s < p; ++s) {
        total.add(per_s[s]);
        result.dropped_terms += dropped[s] * (p - 1);
    }
    result.value = total.value();
    const double pm1 = p - 1.0;
    result.error_bound = 2.0 * r * pm1 * pm1 * std::pow(static_cast<double>(b.size()), 2.0 * r) * 1e-14;
    return result;
}

namespace reference {

double kloosterman_moment(const FpSet& b, unsigned r, const Weights& eta, const PrimeModulus& pm) {
    const std::vector<Complex> weights = resolve_eta(b, eta);
    const std::uint32_t p = pm.p();
    double total = 0.0;
    for (std::uint32_t s = 1; s < p; ++s) {
        for (std::uint32_t t = 1; t < p; ++t) {
            Complex z(0.0, 0.0);
            for (std::size_t j = 0; j < b.size(); ++j) {
                const std::uint32_t sb = pm.add(s, b.elements()[j]);
                if (sb == 0) continue;
                const long double angle = 2.0L * 3.14159265358979323846264338327950288L *
                                          static_cast<long double>(pm.mul(pm.inv(sb), t)) / p;
                z += weights[j] * Complex(static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle)));
            }
            total += std::pow(std::norm(z), static_cast<double>(r));
        }
    }
    return total;
}

}  // namespace reference

}  // namespace dexp
