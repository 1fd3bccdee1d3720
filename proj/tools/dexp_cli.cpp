// dexp: command-line front end for the moment kernels, checkers and sweeps.
//
// Exit codes: 0 success / all exact checks passed, 1 an exact check failed,
// 2 usage or configuration error, 130 interrupted sweep.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dexp/addcomb.hpp"
#include "dexp/expsums.hpp"
#include "dexp/oracle.hpp"
#include "dexp/prng.hpp"
#include "dexp/setspec.hpp"
#include "dexp/sweep.hpp"
#include "dexp/verify.hpp"

using nlohmann::ordered_json;

namespace {

struct CommonOptions {
    std::uint32_t p = 101;
    std::string set_m;
    std::string set_n;
    unsigned k = 1;
    unsigned r = 2;
    std::uint32_t a = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    int threads = 0;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--p", o.p, "odd prime modulus")->capture_default_str();
    sub->add_option("--set-m", o.set_m, "outer set spec (e.g. interval:1:20)");
    sub->add_option("--set-n", o.set_n, "inner set spec (e.g. random:15:42)");
    sub->add_option("--k", o.k, "half the moment power")->capture_default_str();
    sub->add_option("--r", o.r, "Holder parameter r")->capture_default_str();
    sub->add_option("--a", o.a, "multiplier a")->capture_default_str();
    sub->add_option("--seed", o.seed, "seed for random specs without one")->capture_default_str();
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--threads", o.threads, "OpenMP threads (0 = default)");
}

dexp::FpSet make_set(const std::string& text, const dexp::PrimeModulus& pm, std::uint64_t seed, const char* what,
                     bool require_nonzero = false) {
    if (text.empty()) throw UsageError(std::string("missing ") + what);
    try {
        const dexp::SetSpec spec = dexp::resolve_template(text, pm.p(), 10, seed);
        return dexp::generate_set(spec, pm, {require_nonzero});
    } catch (const std::exception& e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

std::string cell(const ordered_json& v) {
    if (v.is_string()) return dexp::csv_escape(v.get<std::string>());
    if (v.is_number_float()) return dexp::format_double(v.get<double>());
    return v.dump();
}

void emit(const std::vector<ordered_json>& records, const CommonOptions& o) {
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + o.out + "'");
    }
    std::ostream& os = o.out.empty() ? std::cout : file;
    if (o.format == "json") {
        os << ordered_json(records).dump(2) << '\n';
        return;
    }
    if (records.empty()) return;
    bool first = true;
    for (auto it = records[0].begin(); it != records[0].end(); ++it) {
        os << (first ? "" : ",") << it.key();
        first = false;
    }
    os << '\n';
    for (const ordered_json& rec : records) {
        first = true;
        for (auto it = rec.begin(); it != rec.end(); ++it) {
            os << (first ? "" : ",") << cell(it.value());
            first = false;
        }
        os << '\n';
    }
}

ordered_json record(const dexp::VerifyReport& v) {
    ordered_json j;
    j["checker"] = v.name;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["slack"] = v.slack;
    j["tolerance"] = v.tolerance;
    j["status"] = dexp::to_string(v.status);
    j["ratio"] = std::isnan(v.ratio) ? std::string() : dexp::format_double(v.ratio);
    j["params"] = v.params;
    j["note"] = v.note;
    return j;
}

ordered_json record(const dexp::TheoremReport& t) {
    ordered_json j;
    j["checker"] = "theorem";
    j["moment"] = t.moment;
    j["bound_rhs"] = t.bound_rhs;
    j["ratio"] = t.ratio;
    j["threshold"] = t.threshold;
    j["n_above_threshold"] = t.n_above_threshold;
    j["sigma_proper"] = t.sigma_proper;
    j["trivial_bound"] = t.trivial_bound;
    j["nontrivial"] = t.nontrivial;
    j["gated"] = t.gated;
    j["gate_reason"] = t.gate_reason;
    return j;
}

dexp::FpSet upper_half_interval(std::uint64_t top, const dexp::PrimeModulus& pm) {
    top = std::max<std::uint64_t>(1, top);
    std::vector<std::uint32_t> out;
    for (std::uint64_t b = std::max<std::uint64_t>(1, (top + 1) / 2); b <= top; ++b) {
        out.push_back(static_cast<std::uint32_t>(b % pm.p()));
    }
    return dexp::FpSet(pm.p(), std::move(out));
}

dexp::Weights random_eta(const dexp::FpSet& b, std::uint64_t seed) {
    dexp::Xoshiro256 rng(seed);
    dexp::Weights eta;
    for (std::uint32_t x : b.elements()) eta[x] = std::polar(1.0, 2.0 * 3.14159265358979323846 * rng.uniform());
    return eta;
}

int exit_for(const std::vector<dexp::VerifyReport>& reps) {
    for (const auto& r : reps) {
        if (r.status == dexp::Status::fail) return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dexp: moments of double exponential sums over F_p"};
    app.require_subcommand(1);

    CommonOptions o;
    std::int64_t x_exp = -1, y_exp = 1;
    std::string method = "auto";
    bool all_values = false;
    std::string frak_n_spec, set_b, eta_kind = "one";
    std::string checker;
    std::uint32_t residue_x = 0;
    std::string config_path;

    auto* moment = app.add_subcommand("moment", "sum_m |sum_n e_p(a m^x n^y)|^{2k}");
    add_common(moment, o);
    moment->add_option("--x-exp", x_exp, "exponent on the outer variable")->capture_default_str();
    moment->add_option("--y-exp", y_exp, "exponent on the inner variable")->capture_default_str();
    moment->add_option("--method", method, "direct, via_rho, both or auto")
        ->check(CLI::IsMember({"direct", "via_rho", "both", "auto"}));

    auto* bias = app.add_subcommand("bias", "Fourier bias of --set-n");
    add_common(bias, o);
    bias->add_flag("--all", all_values, "print every |hat 1_A(xi)|");

    auto* energy = app.add_subcommand("energy", "additive energy E(M, N), or E(N, N) without --set-m");
    add_common(energy, o);

    auto* rho_cmd = app.add_subcommand("rho", "representation function rho(l) of --set-n");
    add_common(rho_cmd, o);

    auto* gsum = app.add_subcommand("gsum", "G = sum_{n in frakN} |sum_{m in M} e_p(n/m)|, frakN = k(N-N) by default");
    add_common(gsum, o);
    gsum->add_option("--frak-n", frak_n_spec, "explicit frakN spec");

    auto* kl = app.add_subcommand("kloosterman", "sum_{s,t} |sum_b eta(b) e_p(t/(s+b))|^{2r}");
    add_common(kl, o);
    kl->add_option("--set-b", set_b, "shift set (default integers in [B/2, B], B = floor(p^{1/r}))");
    kl->add_option("--eta", eta_kind, "one or random")->check(CLI::IsMember({"one", "random"}));

    auto* verify = app.add_subcommand("verify", "run one checker");
    add_common(verify, o);
    verify->add_option("checker", checker, "checker name")->required()->check(CLI::IsMember(dexp::all_checkers()));
    verify->add_option("--x", residue_x, "target residue for the uniformity lemma");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep (default sweep without --config)");
    std::string sweep_out;
    int sweep_threads = 0;
    std::uint64_t sweep_seed = 0;
    sweep->add_option("--config", config_path, "JSON sweep config");
    sweep->add_option("--out", sweep_out, "CSV output path (overrides config)");
    sweep->add_option("--threads", sweep_threads, "OpenMP threads (overrides config)");
    auto* seed_opt = sweep->add_option("--seed", sweep_seed, "seed (overrides config)");

    auto* oracle = app.add_subcommand("oracle", "compare kernels with brute force on small inputs");
    add_common(oracle, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) {
            dexp::SweepConfig cfg;
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw dexp::ConfigError("cannot read config '" + config_path + "'");
                std::stringstream ss;
                ss << f.rdbuf();
                cfg = dexp::parse_sweep_config(ss.str());
            }
            if (!sweep_out.empty()) {
                cfg.out = sweep_out;
                cfg.summary.clear();
                cfg.theorem_out.clear();
            }
            if (sweep_threads > 0) cfg.threads = sweep_threads;
            if (seed_opt->count() > 0) cfg.seed = sweep_seed;
            const int code = dexp::run_sweep_to_files(cfg);
            std::cerr << "sweep: wrote " << cfg.out << ", " << cfg.theorem_path() << ", " << cfg.summary_path()
                      << " (exit " << code << ")\n";
            return code;
        }

        dexp::set_num_threads(o.threads);
        std::unique_ptr<dexp::PrimeModulus> pm_holder;
        try {
            pm_holder = std::make_unique<dexp::PrimeModulus>(o.p);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        const dexp::PrimeModulus& pm = *pm_holder;
        std::vector<ordered_json> records;

        if (moment->parsed()) {
            const dexp::FpSet m =
                make_set(o.set_m.empty() ? "full_minus_zero" : o.set_m, pm, o.seed, "--set-m", x_exp < 0);
            const dexp::FpSet n = make_set(o.set_n, pm, o.seed, "--set-n");
            const dexp::MomentParams params{o.a, x_exp, y_exp, o.k};
            const bool specialization = x_exp == -1 && y_exp == 1;
            if (method == "auto") method = specialization ? "both" : "direct";
            if ((method == "via_rho" || method == "both") && !specialization) {
                throw UsageError("via_rho needs --x-exp -1 --y-exp 1");
            }
            std::vector<dexp::MomentReport> reps;
            if (method == "direct" || method == "both") reps.push_back(dexp::moment_direct(m, n, params, pm));
            if (method == "via_rho" || method == "both") reps.push_back(dexp::moment_via_rho(m, n, o.a, o.k, pm));
            for (const auto& rep : reps) {
                ordered_json j;
                j["method"] = dexp::to_string(rep.method);
                j["value"] = rep.value;
                j["error_bound"] = rep.error_bound;
                j["imag_residual"] = rep.imag_residual;
                j["p"] = o.p;
                j["a"] = rep.params.a;
                j["x_exp"] = rep.params.r_exp;
                j["y_exp"] = rep.params.s_exp;
                j["k"] = rep.params.k;
                j["sets"] = rep.set_descriptions;
                records.push_back(j);
            }
        } else if (bias->parsed()) {
            const dexp::FpSet a = make_set(o.set_n, pm, o.seed, "--set-n");
            const dexp::BiasResult b = dexp::fourier_bias(a, pm, all_values);
            if (all_values) {
                for (std::uint32_t xi = 0; xi < pm.p(); ++xi) {
                    ordered_json j;
                    j["xi"] = xi;
                    j["magnitude"] = b.all_values[xi];
                    records.push_back(j);
                }
            } else {
                ordered_json j;
                j["p"] = o.p;
                j["size"] = a.size();
                j["density"] = dexp::density(a).value();
                j["bias"] = b.bias;
                j["argmax_xi"] = b.argmax_xi;
                records.push_back(j);
            }
        } else if (energy->parsed()) {
            const dexp::FpSet n = make_set(o.set_n, pm, o.seed, "--set-n");
            const dexp::FpSet m = o.set_m.empty() ? n : make_set(o.set_m, pm, o.seed, "--set-m");
            ordered_json j;
            j["p"] = o.p;
            j["size_a"] = m.size();
            j["size_b"] = n.size();
            j["energy"] = dexp::to_string(dexp::additive_energy(m, n, pm));
            records.push_back(j);
        } else if (rho_cmd->parsed()) {
            const dexp::FpSet n = make_set(o.set_n, pm, o.seed, "--set-n");
            const dexp::CountVector counts = dexp::rho(n, o.k, pm);
            for (std::uint32_t l : counts.support()) {
                ordered_json j;
                j["l"] = l;
                j["rho"] = dexp::to_string(counts.counts[l]);
                records.push_back(j);
            }
        } else if (gsum->parsed()) {
            const dexp::FpSet m = make_set(o.set_m, pm, o.seed, "--set-m", true);
            const dexp::FpSet frak_n = frak_n_spec.empty()
                                           ? dexp::iterated_sumset(dexp::difference_set(make_set(o.set_n, pm, o.seed, "--set-n")), o.k)
                                           : make_set(frak_n_spec, pm, o.seed, "--frak-n");
            ordered_json j;
            j["p"] = o.p;
            j["size_m"] = m.size();
            j["size_frak_n"] = frak_n.size();
            j["g_sum"] = dexp::g_sum(m, frak_n, pm);
            records.push_back(j);
        } else if (kl->parsed()) {
            const std::uint64_t top = dexp::integer_root(o.p, std::max(1u, o.r));
            const dexp::FpSet b = set_b.empty() ? upper_half_interval(top, pm) : make_set(set_b, pm, o.seed, "--set-b");
            const dexp::Weights eta = eta_kind == "random" ? random_eta(b, o.seed) : dexp::Weights{};
            const dexp::KloostermanResult res = dexp::kloosterman_moment(b, o.r, eta, pm);
            ordered_json j;
            j["p"] = o.p;
            j["r"] = o.r;
            j["size_b"] = b.size();
            j["eta"] = eta_kind;
            j["value"] = res.value;
            j["dropped_terms"] = res.dropped_terms;
            j["error_bound"] = res.error_bound;
            records.push_back(j);
        } else if (verify->parsed()) {
            std::vector<dexp::VerifyReport> reps;
            auto need_n = [&] { return make_set(o.set_n, pm, o.seed, "--set-n"); };
            auto need_m = [&] { return make_set(o.set_m, pm, o.seed, "--set-m", true); };
            if (checker == "bias_sandwich") {
                auto [lo, hi] = dexp::check_bias_sandwich(need_n(), pm);
                reps = {lo, hi};
            } else if (checker == "bias_upper") {
                reps.push_back(dexp::check_bias_upper(need_n(), pm));
            } else if (checker == "uniformity") {
                const dexp::FpSet n = need_n();
                reps.push_back(dexp::check_uniformity_energy_instance(n, pm));
                const std::vector<dexp::FpSet> triple{n, o.set_m.empty() ? n : make_set(o.set_m, pm, o.seed, "--set-m"), n};
                reps.push_back(dexp::check_uniformity_lemma(triple, residue_x % o.p, pm));
            } else if (checker == "rho_bound") {
                reps.push_back(dexp::check_rho_bound(need_n(), o.k, pm));
            } else if (checker == "rho_sigma_bound") {
                reps.push_back(dexp::check_rho_sigma_bound(need_n(), o.k, pm));
            } else if (checker == "rho_support") {
                reps.push_back(dexp::check_rho_support(need_n(), o.k, pm));
            } else if (checker == "decomposition") {
                reps.push_back(dexp::check_decomposition(need_m(), need_n(), o.k, pm));
            } else if (checker == "r1_r2") {
                const dexp::FpSet m = need_m();
                const dexp::FpSet n = need_n();
                const dexp::ShiftSets sh = dexp::shifting_sets(m.size(), m.elements()[0], o.r, pm);
                auto [id, cs] = dexp::check_r1_r2(sh.a_set, sh.m_prime,
                                                  dexp::iterated_sumset(dexp::difference_set(n), o.k), pm);
                reps = {id, cs};
            } else if (checker == "kloosterman") {
                const std::uint64_t top = dexp::integer_root(o.p, std::max(1u, o.r));
                reps.push_back(dexp::check_kloosterman_ratio(upper_half_interval(top, pm),
                                                             static_cast<std::uint32_t>(std::max<std::uint64_t>(1, top)),
                                                             o.r, {}, pm));
            } else if (checker == "theorem") {
                records.push_back(record(dexp::theorem_report(need_m(), need_n(), o.k, o.r, pm)));
            }
            for (const auto& r : reps) records.push_back(record(r));
            emit(records, o);
            return exit_for(reps);
        } else if (oracle->parsed()) {
            const dexp::FpSet m = make_set(o.set_m.empty() ? "interval:1:p/5" : o.set_m, pm, o.seed, "--set-m", true);
            const dexp::FpSet n = make_set(o.set_n, pm, o.seed, "--set-n");
            if (n.size() > 12 || o.p > 211) throw UsageError("oracle is brute force: use |N| <= 12 and p <= 211");
            bool all = true;
            for (const auto& c : dexp::oracle::compare_all(m, n, o.k, pm)) {
                ordered_json j;
                j["quantity"] = c.name;
                j["kernel"] = c.fast;
                j["brute_force"] = c.brute;
                j["tolerance"] = c.tolerance;
                j["agree"] = c.agree;
                all = all && c.agree;
                records.push_back(j);
            }
            emit(records, o);
            return all ? 0 : 1;
        }
        emit(records, o);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dexp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
