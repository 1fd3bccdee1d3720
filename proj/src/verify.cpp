#include "dexp/verify.hpp"

#include "dexp/setspec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dexp {

namespace {

using Signed = __int128;

VerifyReport float_report(std::string name, double lhs, double rhs, double tolerance, std::string params) {
    VerifyReport rep;
    rep.name = std::move(name);
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.slack = rhs - lhs;
    rep.tolerance = tolerance;
    rep.status = (std::isfinite(rep.slack) && rep.slack >= -tolerance) ? Status::pass : Status::fail;
    rep.params = std::move(params);
    return rep;
}

/// lhs <= rhs decided on integers.
VerifyReport exact_report(std::string name, Signed lhs, Signed rhs, std::string params) {
    VerifyReport rep;
    rep.name = std::move(name);
    rep.lhs = static_cast<double>(lhs);
    rep.rhs = static_cast<double>(rhs);
    rep.slack = static_cast<double>(rhs - lhs);
    rep.tolerance = 0.0;
    rep.status = lhs <= rhs ? Status::pass : Status::fail;
    rep.params = std::move(params);
    return rep;
}

VerifyReport gated_report(std::string name, std::string reason, std::string params) {
    VerifyReport rep;
    rep.name = std::move(name);
    rep.status = Status::gated;
    rep.note = std::move(reason);
    rep.params = std::move(params);
    return rep;
}

std::string set_params(const FpSet& a) {
    std::ostringstream os;
    os << "p=" << a.p() << " |A|=" << a.size();
    return os.str();
}

std::string rho_params(const FpSet& n, unsigned k, std::size_t sigma) {
    std::ostringstream os;
    os << "p=" << n.p() << " |N|=" << n.size() << " k=" << k << " |Sigma|=" << sigma;
    return os.str();
}

double rho_rhs(std::uint32_t p, unsigned k, std::size_t sigma) {
    return 2.0 * std::pow(static_cast<double>(p), (static_cast<double>(k) - 2.0) / 2.0) *
           std::pow(static_cast<double>(sigma), k / 2.0);
}

std::string lemma_range_note(unsigned k) {
    return k < 3 ? "outside derivation's lemma range (uniformity lemma needs n = k >= 3)" : "";
}

Count max_count(const CountVector& v) { return v[argmax(v)]; }

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::gated: return "gated";
        case Status::info: return "info";
    }
    return "?";
}

std::pair<VerifyReport, VerifyReport> check_bias_sandwich(const FpSet& a, const PrimeModulus& pm) {
    if (a.empty()) throw std::invalid_argument("check_bias_sandwich: empty set");
    const double bias = fourier_bias(a, pm).bias;
    const Signed p = pm.p();
    const Signed size = static_cast<Signed>(a.size());
    const Signed p4 = p * p * p * p;
    // E/p^3 - (|A|/p)^4 = (E p - |A|^4) / p^4, exact numerator.
    const Signed numerator = static_cast<Signed>(additive_energy(a, a, pm)) * p - size * size * size * size;
    const double middle = static_cast<double>(numerator) / static_cast<double>(p4);
    const double dens = static_cast<double>(a.size()) / pm.p();
    const std::string params = set_params(a);

    VerifyReport lower = float_report("bias_sandwich_lower", bias * bias * bias * bias, middle, 1e-9, params);
    VerifyReport upper = float_report("bias_sandwich_upper", middle, bias * bias * dens, 1e-9, params);
    return {lower, upper};
}

VerifyReport check_bias_upper(const FpSet& a, const PrimeModulus& pm) {
    if (a.empty()) throw std::invalid_argument("check_bias_upper: empty set");
    const double bias = fourier_bias(a, pm).bias;
    return float_report("bias_upper", bias, std::sqrt(density(a).value()), 1e-9, set_params(a));
}

VerifyReport check_uniformity_lemma(std::span<const FpSet> sets, std::uint32_t x, const PrimeModulus& pm) {
    const std::size_t n = sets.size();
    if (n < 3) throw std::invalid_argument("check_uniformity_lemma: needs at least 3 sets");
    const CountVector counts = representation_counts(sets, pm);
    const Signed p = pm.p();
    Signed pn = 1;
    Signed product = 1;
    for (const FpSet& s : sets) {
        pn *= p;
        product *= static_cast<Signed>(s.size());
    }
    // count/p^{n-1} - prod |A_i|/p = (count p - prod |A_i|) / p^n
    Signed diff = static_cast<Signed>(counts[x % pm.p()]) * p - product;
    if (diff < 0) diff = -diff;
    const double lhs = static_cast<double>(diff) / static_cast<double>(pn);

    double rhs = 1.0;
    for (std::size_t i = 0; i + 2 < n; ++i) rhs *= fourier_bias(sets[i], pm).bias;
    rhs *= std::sqrt(density(sets[n - 2]).value() * density(sets[n - 1]).value());

    std::ostringstream params;
    params << "p=" << pm.p() << " n=" << n << " x=" << x << " sizes=";
    for (std::size_t i = 0; i < n; ++i) params << (i ? "," : "") << sets[i].size();
    return float_report("uniformity_lemma", lhs, rhs, 1e-9 * static_cast<double>(n), params.str());
}

VerifyReport check_uniformity_energy_instance(const FpSet& a, const PrimeModulus& pm) {
    const FpSet neg = a.negated();
    const std::vector<FpSet> sets{a, neg, a, neg};
    VerifyReport rep = check_uniformity_lemma(sets, 0, pm);
    rep.name = "uniformity_energy";
    return rep;
}

VerifyReport check_rho_bound(const FpSet& n, unsigned k, const PrimeModulus& pm) {
    const std::string name = "rho_bound";
    if (k < 2) return gated_report(name, "k < 2: outside the checker's range", rho_params(n, k, 0));
    const FpSet sigma = difference_set(n);
    const std::string params = rho_params(n, k, sigma.size());
    if (sigma.is_full()) return gated_report(name, "hypothesis violated: Sigma = Z/p", params);
    const CountVector counts = rho(n, k, pm);
    const std::uint32_t at = argmax(counts);
    const double rhs = rho_rhs(pm.p(), k, sigma.size());
    VerifyReport rep = float_report(name, to_double(counts[at]), rhs, 1e-9 * rhs, params);
    rep.note = "argmax_l=" + std::to_string(at);
    if (k < 3) rep.note += "; " + lemma_range_note(k);
    return rep;
}

VerifyReport check_rho_sigma_bound(const FpSet& n, unsigned k, const PrimeModulus& pm) {
    const std::string name = "rho_sigma_bound";
    if (k < 2) return gated_report(name, "k < 2: outside the checker's range", rho_params(n, k, 0));
    const FpSet sigma = difference_set(n);
    const std::string params = rho_params(n, k, sigma.size());
    if (sigma.is_full()) return gated_report(name, "hypothesis violated: Sigma = Z/p", params);
    const std::vector<FpSet> copies(k, sigma);
    const CountVector counts = representation_counts(copies, pm);
    const std::uint32_t at = argmax(counts);
    const double rhs = rho_rhs(pm.p(), k, sigma.size());
    VerifyReport rep = float_report(name, to_double(counts[at]), rhs, 1e-9 * rhs, params);
    rep.note = "argmax_l=" + std::to_string(at);
    if (k < 3) rep.note += "; " + lemma_range_note(k);
    return rep;
}

VerifyReport check_rho_support(const FpSet& n, unsigned k, const PrimeModulus& pm) {
    const FpSet sigma = difference_set(n);
    const FpSet k_sigma = iterated_sumset(sigma, k);
    const CountVector counts = rho(n, k, pm);
    Signed outside = 0;
    for (std::uint32_t l : counts.support()) {
        if (!k_sigma.contains(l)) ++outside;
    }
    VerifyReport rep = exact_report("rho_support", outside, 0, rho_params(n, k, sigma.size()));
    rep.note = "|kSigma|=" + std::to_string(k_sigma.size());
    return rep;
}

VerifyReport check_decomposition(const FpSet& m, const FpSet& n, unsigned k, const PrimeModulus& pm) {
    const MomentReport moment = moment_via_rho(m, n, 1, k, pm);
    const CountVector counts = rho(n, k, pm);
    const FpSet k_sigma = iterated_sumset(difference_set(n), k);
    const double g = g_sum(m, k_sigma, pm);
    const double rhs = to_double(max_count(counts)) * g;
    std::ostringstream params;
    params << "p=" << pm.p() << " |M|=" << m.size() << " |N|=" << n.size() << " k=" << k;
    VerifyReport rep = float_report("decomposition", moment.value, rhs, 1e-6 * std::max(rhs, 1.0), params.str());
    rep.note = "G=" + std::to_string(g) + " argmax_l=" + std::to_string(argmax(counts));
    return rep;
}

std::pair<VerifyReport, VerifyReport> check_r1_r2(const FpSet& a_set, const FpSet& m_prime, const FpSet& frak_n,
                                                  const PrimeModulus& pm) {
    const NuTable nu = nu_counts(a_set, m_prime, frak_n, pm);
    const R1R2 sums = r1_r2(nu);
    std::ostringstream params;
    params << "p=" << pm.p() << " |A|=" << a_set.size() << " |M'|=" << m_prime.size() << " |frakN|=" << frak_n.size();

    // |R1 + skipped - |A||M'||frakN|| <= 0
    Signed deviation = static_cast<Signed>(sums.r1) + nu.skipped - static_cast<Signed>(nu.triples);
    if (deviation < 0) deviation = -deviation;
    VerifyReport identity = exact_report("r1_identity", deviation, 0, params.str());
    identity.note = "R1=" + to_string(sums.r1) + " skipped=" + std::to_string(nu.skipped) +
                    " triples=" + std::to_string(nu.triples);

    // R1^2 <= R2 #supp(nu)
    const Signed support = static_cast<Signed>(nu.entries.size());
    const Signed r1 = static_cast<Signed>(sums.r1);
    VerifyReport floor = exact_report("r2_cauchy_schwarz", r1 * r1, static_cast<Signed>(sums.r2) * support, params.str());
    const double base = static_cast<double>(a_set.size()) * m_prime.size() * frak_n.size();
    floor.ratio = base > 0 ? to_double(sums.r2) / base : 0.0;
    floor.note = "R2=" + to_string(sums.r2) + " supp=" + std::to_string(nu.entries.size()) +
                 " R2/(|A||M'||frakN|)=" + std::to_string(floor.ratio) +
                 " log(p)=" + std::to_string(std::log(static_cast<double>(pm.p())));
    return {identity, floor};
}

VerifyReport check_kloosterman_ratio(const FpSet& b, std::uint32_t b_max, unsigned r, const Weights& eta,
                                     const PrimeModulus& pm) {
    const KloostermanResult s = kloosterman_moment(b, r, eta, pm);
    const double bm = b_max;
    const double rhs = pm.p() * std::pow(bm, r) + std::pow(bm, 2.0 * r);
    VerifyReport rep;
    rep.name = "kloosterman_ratio";
    rep.lhs = s.value;
    rep.rhs = rhs;
    rep.slack = rhs - s.value;
    rep.ratio = s.value / rhs;
    rep.status = std::isfinite(rep.ratio) ? Status::info : Status::fail;
    std::ostringstream params;
    params << "p=" << pm.p() << " |B|=" << b.size() << " Bmax=" << b_max << " r=" << r
           << " eta=" << (eta.empty() ? "one" : "random");
    rep.params = params.str();
    rep.note = "dropped_terms=" + std::to_string(s.dropped_terms);
    return rep;
}

ShiftSets shifting_sets(std::size_t m_size, std::int64_t interval_start, unsigned r, const PrimeModulus& pm) {
    const std::uint32_t p = pm.p();
    unsigned __int128 mr = 1;
    for (unsigned i = 0; i < r; ++i) mr *= m_size;
    const unsigned __int128 q = mr / p;
    const std::uint64_t q64 = q > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(q);
    const std::uint64_t a_top = std::max<std::uint64_t>(1, integer_root(q64, r));
    std::vector<std::uint32_t> shifts;
    for (std::uint64_t a = std::max<std::uint64_t>(1, (a_top + 1) / 2); a <= a_top; ++a) {
        shifts.push_back(static_cast<std::uint32_t>(a % p));
    }

    const std::int64_t size = static_cast<std::int64_t>(m_size);
    const std::int64_t len = std::min<std::int64_t>(3 * size + 1, p);
    std::vector<std::uint32_t> mp;
    bool dropped_zero = false;
    for (std::int64_t i = 0; i < len; ++i) {
        const std::uint32_t x = pm.reduce(interval_start - 1 - size + i);
        if (x == 0) {
            dropped_zero = true;
            continue;
        }
        mp.push_back(x);
    }
    return {FpSet(p, std::move(shifts)), FpSet(p, std::move(mp)), a_top, dropped_zero};
}

bool is_interval(const FpSet& m) {
    if (m.empty() || m.is_full()) return true;
    // Exactly one run: exactly one element whose successor is missing.
    std::size_t ends = 0;
    for (std::uint32_t x : m.elements()) {
        if (!m.contains(x + 1 == m.p() ? 0 : x + 1)) ++ends;
    }
    return ends == 1;
}

double nontriviality_threshold(std::uint32_t p, unsigned k, unsigned r) {
    const double rd = r;
    return std::pow(static_cast<double>(p), 0.5 - (1.0 - 1.0 / rd) / (4.0 * rd * k));
}

TheoremReport theorem_report(const FpSet& m_interval, const FpSet& n, unsigned k, unsigned r, const PrimeModulus& pm) {
    if (!is_interval(m_interval)) throw std::invalid_argument("theorem_report: M is not an interval mod p");
    if (k == 0) throw std::invalid_argument("theorem_report: k must be positive");
    if (n.empty()) throw std::invalid_argument("theorem_report: empty N");

    TheoremReport rep;
    rep.k = k;
    rep.r = r;
    rep.m_size = m_interval.size();
    rep.n_size = n.size();
    const FpSet sigma = difference_set(n);
    const FpSet k_sigma = iterated_sumset(sigma, k);
    rep.sigma_size = sigma.size();
    rep.k_sigma_size = k_sigma.size();
    rep.sigma_proper = !sigma.is_full();

    std::vector<std::string> reasons;
    if (m_interval.contains(0)) reasons.emplace_back("0 in M");
    if (n.contains(0)) reasons.emplace_back("0 in N");
    if (!rep.sigma_proper) reasons.emplace_back("Sigma = Z/p");
    if (r < 2) reasons.emplace_back("r < 2");
    for (const std::string& s : reasons) rep.gate_reason += (rep.gate_reason.empty() ? "" : "; ") + s;
    rep.gated = !reasons.empty();

    const double p = pm.p();
    const double rd = std::max(r, 1u);
    const double mm = static_cast<double>(m_interval.size());
    rep.bound_rhs = std::pow(p, 1.0 / (2.0 * rd * rd)) * std::pow(mm, 1.0 - 1.0 / rd) *
                    std::pow(p, (static_cast<double>(k) - 2.0) / 2.0) *
                    std::pow(static_cast<double>(sigma.size()), k / 2.0) *
                    std::pow(static_cast<double>(k_sigma.size()), 1.0 - 1.0 / (2.0 * rd));
    rep.threshold = nontriviality_threshold(pm.p(), k, std::max(r, 1u));
    rep.n_above_threshold = static_cast<double>(n.size()) > rep.threshold;
    rep.trivial_bound = mm * std::pow(static_cast<double>(n.size()), 2.0 * k);
    rep.nontrivial = rep.bound_rhs < rep.trivial_bound;

    if (!m_interval.contains(0) && !n.contains(0)) {
        rep.moment = moment_direct(m_interval, n, MomentParams::inverse_outer(1, k), pm).value;
        rep.ratio = rep.moment / rep.bound_rhs;
    }
    return rep;
}

}  // namespace dexp
