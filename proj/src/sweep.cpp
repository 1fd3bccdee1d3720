#include "dexp/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <csignal>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dexp/prng.hpp"
#include "dexp/setspec.hpp"

namespace dexp {

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_interrupt(int) { g_stop = 1; }

std::string replace_extension(const std::string& path, const std::string& suffix) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? path.substr(0, dot) : path;
    return stem + suffix;
}

bool known_checker(const std::string& name) {
    const auto& all = all_checkers();
    return std::find(all.begin(), all.end(), name) != all.end();
}

}  // namespace

void SweepConfig::validate() const {
    for (std::uint32_t p : primes) {
        if (p < 3 || !is_prime(p)) throw ConfigError("config: " + std::to_string(p) + " is not an odd prime");
    }
    for (unsigned k : k_values) {
        if (k == 0) throw ConfigError("config: k values must be positive");
    }
    for (unsigned r : r_values) {
        if (r == 0) throw ConfigError("config: r values must be positive");
    }
    for (const std::string& c : checkers) {
        if (!known_checker(c)) throw ConfigError("config: unknown checker '" + c + "'");
    }
    if (out.empty()) throw ConfigError("config: output path is empty");
    try {
        for (std::uint32_t p : primes) {
            resolve_template(m_template, p, 2, 0);
            resolve_template(n_template, p, 2, 0);
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad set template: ") + e.what());
    }
}

std::string SweepConfig::summary_path() const { return summary.empty() ? replace_extension(out, ".json") : summary; }

std::string SweepConfig::theorem_path() const {
    return theorem_out.empty() ? replace_extension(out, "_theorem.csv") : theorem_out;
}

SweepConfig parse_sweep_config(const std::string& json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    SweepConfig cfg;
    try {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const std::string& key = it.key();
            const json& v = it.value();
            if (key == "primes") cfg.primes = v.get<std::vector<std::uint32_t>>();
            else if (key == "k_values") cfg.k_values = v.get<std::vector<unsigned>>();
            else if (key == "r_values") cfg.r_values = v.get<std::vector<unsigned>>();
            else if (key == "m_template") cfg.m_template = v.get<std::string>();
            else if (key == "n_template") cfg.n_template = v.get<std::string>();
            else if (key == "n_count") cfg.n_count = v.get<unsigned>();
            else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "checkers") cfg.checkers = v.get<std::vector<std::string>>();
            else if (key == "out") cfg.out = v.get<std::string>();
            else if (key == "summary") cfg.summary = v.get<std::string>();
            else if (key == "theorem_out") cfg.theorem_out = v.get<std::string>();
            else if (key == "threads") cfg.threads = v.get<int>();
            else throw ConfigError("config: unknown field '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: wrong field type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::uint64_t auto_set_size(std::uint32_t p, unsigned i, unsigned count) {
    const std::uint64_t lo = std::min<std::uint64_t>(2, p - 1);
    std::uint64_t hi = integer_root(4ull * p, 2);
    if (hi * hi < 4ull * p) ++hi;
    hi = std::clamp<std::uint64_t>(hi, lo, p - 1);
    if (count <= 1) return lo;
    return lo + std::uint64_t{i % count} * (hi - lo) / (count - 1);
}

std::size_t SweepResult::exact_failures() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.report.status == Status::fail; }));
}

int SweepResult::exit_code() const { return exact_failures() == 0 ? 0 : 1; }

namespace {

enum class TaskKind { kloosterman, set_level, r_level };

struct Task {
    TaskKind kind;
    std::uint32_t p;
    unsigned k;
    unsigned r;
    unsigned instance;
};

struct TaskOutput {
    std::vector<SweepRow> rows;
    std::vector<TheoremRow> theorem_rows;
    bool done = false;
};

struct Instance {
    SetSpec m_spec;
    SetSpec n_spec;
    FpSet m;
    FpSet n;
    std::uint64_t seed;
};

class Runner {
public:
    explicit Runner(const SweepConfig& cfg) : cfg_(cfg) {
        for (const std::string& c : cfg.checkers) enabled_[c] = true;
        for (std::uint32_t p : cfg.primes) moduli_.emplace(p, std::make_unique<PrimeModulus>(p));
    }

    std::vector<Task> tasks() const {
        std::vector<Task> out;
        for (std::uint32_t p : cfg_.primes) {
            if (on("kloosterman")) {
                for (unsigned r : cfg_.r_values) out.push_back({TaskKind::kloosterman, p, 0, r, 0});
            }
            for (unsigned k : cfg_.k_values) {
                for (unsigned i = 0; i < cfg_.n_count; ++i) {
                    out.push_back({TaskKind::set_level, p, k, 0, i});
                    if (on("r1_r2") || on("theorem")) {
                        for (unsigned r : cfg_.r_values) out.push_back({TaskKind::r_level, p, k, r, i});
                    }
                }
            }
        }
        return out;
    }

    void run(const Task& t, TaskOutput& out) const {
        const PrimeModulus& pm = *moduli_.at(t.p);
        switch (t.kind) {
            case TaskKind::kloosterman: run_kloosterman(t, pm, out); break;
            case TaskKind::set_level: run_set_level(t, pm, out); break;
            case TaskKind::r_level: run_r_level(t, pm, out); break;
        }
        out.done = true;
    }

private:
    bool on(const std::string& name) const { return enabled_.count(name) != 0; }

    Instance instance(const Task& t, const PrimeModulus& pm) const {
        Instance inst;
        inst.seed = derive_seed(cfg_.seed, t.p, t.k, t.instance);
        const std::uint64_t size = auto_set_size(t.p, t.instance, cfg_.n_count);
        try {
            inst.m_spec = resolve_template(cfg_.m_template, t.p, size, derive_seed(inst.seed, 0x4d));
            inst.n_spec = resolve_template(cfg_.n_template, t.p, size, inst.seed);
            inst.m = generate_set(inst.m_spec, pm);
            inst.n = generate_set(inst.n_spec, pm);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: cannot build sets for p=") + std::to_string(t.p) + ": " + e.what());
        }
        if (inst.n.empty()) throw ConfigError("config: N template produced an empty set at p=" + std::to_string(t.p));
        return inst;
    }

    SweepRow row(VerifyReport rep, const Task& t, unsigned k, unsigned r, const std::string& m, const std::string& n,
                 std::uint64_t seed) const {
        SweepRow out;
        out.report = std::move(rep);
        out.p = t.p;
        out.k = k;
        out.r = r;
        out.instance = t.instance;
        out.set_m = m;
        out.set_n = n;
        out.seed = seed;
        return out;
    }

    void run_kloosterman(const Task& t, const PrimeModulus& pm, TaskOutput& out) const {
        const std::uint32_t b_max = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, integer_root(t.p, t.r)));
        const std::uint32_t b_min = std::max<std::uint32_t>(1, (b_max + 1) / 2);
        SetSpec b_spec;
        b_spec.kind = SetKind::interval;
        b_spec.start = b_min;
        b_spec.length = b_max - b_min + 1;
        const FpSet b = generate_set(b_spec, pm);
        const std::string b_text = to_string(b_spec);

        out.rows.push_back(row(check_kloosterman_ratio(b, b_max, t.r, {}, pm), t, 0, t.r, "-", b_text, cfg_.seed));

        const std::uint64_t eta_seed = derive_seed(cfg_.seed, t.p, t.r, 0xe7a);
        Xoshiro256 rng(eta_seed);
        Weights eta;
        for (std::uint32_t x : b.elements()) eta[x] = std::polar(1.0, 2.0 * 3.14159265358979323846 * rng.uniform());
        out.rows.push_back(row(check_kloosterman_ratio(b, b_max, t.r, eta, pm), t, 0, t.r, "-", b_text, eta_seed));
    }

    void run_set_level(const Task& t, const PrimeModulus& pm, TaskOutput& out) const {
        const Instance inst = instance(t, pm);
        const std::string ms = to_string(inst.m_spec);
        const std::string ns = to_string(inst.n_spec);
        auto emit = [&](VerifyReport rep) { out.rows.push_back(row(std::move(rep), t, t.k, 0, ms, ns, inst.seed)); };

        if (on("bias_sandwich")) {
            auto [lower, upper] = check_bias_sandwich(inst.n, pm);
            emit(std::move(lower));
            emit(std::move(upper));
        }
        if (on("bias_upper")) emit(check_bias_upper(inst.n, pm));
        if (on("uniformity")) {
            emit(check_uniformity_energy_instance(inst.n, pm));
            const std::vector<FpSet> triple{inst.n, inst.m.empty() ? inst.n : inst.m, inst.n};
            emit(check_uniformity_lemma(triple, 0, pm));
        }
        if (on("rho_bound")) emit(check_rho_bound(inst.n, t.k, pm));
        if (on("rho_sigma_bound")) emit(check_rho_sigma_bound(inst.n, t.k, pm));
        if (on("rho_support")) emit(check_rho_support(inst.n, t.k, pm));
        if (on("decomposition")) {
            if (inst.m.empty() || inst.m.contains(0)) {
                VerifyReport rep;
                rep.name = "decomposition";
                rep.status = Status::gated;
                rep.note = "M must be nonempty and avoid 0";
                emit(std::move(rep));
            } else {
                emit(check_decomposition(inst.m, inst.n, t.k, pm));
            }
        }
    }

    void run_r_level(const Task& t, const PrimeModulus& pm, TaskOutput& out) const {
        const Instance inst = instance(t, pm);
        const std::string ms = to_string(inst.m_spec);
        const std::string ns = to_string(inst.n_spec);

        if (on("r1_r2")) {
            const std::int64_t start = inst.m_spec.kind == SetKind::interval
                                           ? inst.m_spec.start
                                           : (inst.m.empty() ? 1 : static_cast<std::int64_t>(inst.m.elements()[0]));
            const ShiftSets sh = shifting_sets(inst.m.size(), start, t.r, pm);
            const FpSet frak_n = iterated_sumset(difference_set(inst.n), t.k);
            auto [identity, floor] = check_r1_r2(sh.a_set, sh.m_prime, frak_n, pm);
            const std::string extra = " A=" + std::to_string(sh.a_top) + (sh.dropped_zero ? " mprime_dropped_zero=1" : "");
            identity.note += extra;
            floor.note += extra;
            out.rows.push_back(row(std::move(identity), t, t.k, t.r, ms, ns, inst.seed));
            out.rows.push_back(row(std::move(floor), t, t.k, t.r, ms, ns, inst.seed));
        }
        if (on("theorem")) {
            TheoremRow tr;
            tr.p = t.p;
            tr.instance = t.instance;
            tr.set_m = ms;
            tr.set_n = ns;
            tr.seed = inst.seed;
            if (!is_interval(inst.m) || inst.m.empty()) {
                tr.report.k = t.k;
                tr.report.r = t.r;
                tr.report.gated = true;
                tr.report.gate_reason = "M is not a nonempty interval";
            } else {
                tr.report = theorem_report(inst.m, inst.n, t.k, t.r, pm);
            }
            out.theorem_rows.push_back(std::move(tr));
        }
    }

    const SweepConfig& cfg_;
    std::map<std::string, bool> enabled_;
    std::map<std::uint32_t, std::unique_ptr<PrimeModulus>> moduli_;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    set_num_threads(config.threads);
    Runner runner(config);
    const std::vector<Task> tasks = runner.tasks();
    std::vector<TaskOutput> outputs(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::vector<char> config_error(tasks.size(), 0);

    const std::int64_t n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        if (g_stop) continue;
        const std::size_t idx = static_cast<std::size_t>(i);
        try {
            runner.run(tasks[idx], outputs[idx]);
        } catch (const ConfigError& e) {
            errors[idx] = e.what();
            config_error[idx] = 1;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i].empty()) continue;
        if (config_error[i]) throw ConfigError(errors[i]);
        throw std::runtime_error(errors[i]);
    }

    SweepResult result;
    for (TaskOutput& o : outputs) {
        if (!o.done) {
            result.interrupted = true;
            continue;
        }
        for (SweepRow& r : o.rows) result.rows.push_back(std::move(r));
        for (TheoremRow& r : o.theorem_rows) result.theorem_rows.push_back(std::move(r));
    }
    return result;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string opt_uint(unsigned v) { return v == 0 ? "-" : std::to_string(v); }

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& header_comment) {
    if (!header_comment.empty()) os << "# " << header_comment << '\n';
    os << "checker,p,k,r,instance,set_m,set_n,lhs,rhs,slack,tolerance,status,ratio,seed,params,note\n";
    for (const SweepRow& r : rows) {
        const VerifyReport& v = r.report;
        os << v.name << ',' << r.p << ',' << opt_uint(r.k) << ',' << opt_uint(r.r) << ',' << r.instance << ','
           << csv_escape(r.set_m) << ',' << csv_escape(r.set_n) << ',' << format_double(v.lhs) << ','
           << format_double(v.rhs) << ',' << format_double(v.slack) << ',' << format_double(v.tolerance) << ','
           << to_string(v.status) << ',' << (std::isnan(v.ratio) ? "" : format_double(v.ratio)) << ',' << r.seed << ','
           << csv_escape(v.params) << ',' << csv_escape(v.note) << '\n';
    }
}

void write_theorem_csv(std::ostream& os, const std::vector<TheoremRow>& rows) {
    os << "p,k,r,instance,set_m,set_n,m_size,n_size,sigma_size,k_sigma_size,moment,bound_rhs,ratio,threshold,"
          "n_above_threshold,sigma_proper,trivial_bound,nontrivial,gated,gate_reason,seed\n";
    for (const TheoremRow& row : rows) {
        const TheoremReport& t = row.report;
        os << row.p << ',' << t.k << ',' << t.r << ',' << row.instance << ',' << csv_escape(row.set_m) << ','
           << csv_escape(row.set_n) << ',' << t.m_size << ',' << t.n_size << ',' << t.sigma_size << ','
           << t.k_sigma_size << ',' << format_double(t.moment) << ',' << format_double(t.bound_rhs) << ','
           << format_double(t.ratio) << ',' << format_double(t.threshold) << ',' << int(t.n_above_threshold) << ','
           << int(t.sigma_proper) << ',' << format_double(t.trivial_bound) << ',' << int(t.nontrivial) << ','
           << int(t.gated) << ',' << csv_escape(t.gate_reason) << ',' << row.seed << '\n';
    }
}

std::string summary_json(const SweepConfig& config, const SweepResult& result) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["prng"] = kPrngName;
    doc["seed"] = config.seed;
    doc["primes"] = config.primes;
    doc["k_values"] = config.k_values;
    doc["r_values"] = config.r_values;
    doc["m_template"] = config.m_template;
    doc["n_template"] = config.n_template;
    doc["n_count"] = config.n_count;
    doc["checkers_selected"] = config.checkers;
    doc["rows"] = result.rows.size();
    doc["interrupted"] = result.interrupted;

    struct Tally {
        std::size_t pass = 0, fail = 0, gated = 0, info = 0;
        double rmin = INFINITY, rmax = -INFINITY;
    };
    std::vector<std::string> order;
    std::map<std::string, Tally> tallies;
    for (const SweepRow& r : result.rows) {
        const VerifyReport& v = r.report;
        if (!tallies.count(v.name)) order.push_back(v.name);
        Tally& t = tallies[v.name];
        switch (v.status) {
            case Status::pass: ++t.pass; break;
            case Status::fail: ++t.fail; break;
            case Status::gated: ++t.gated; break;
            case Status::info: ++t.info; break;
        }
        if (!std::isnan(v.ratio)) {
            t.rmin = std::min(t.rmin, v.ratio);
            t.rmax = std::max(t.rmax, v.ratio);
        }
    }
    ordered_json checkers = ordered_json::object();
    for (const std::string& name : order) {
        const Tally& t = tallies[name];
        ordered_json c;
        c["pass"] = t.pass;
        c["fail"] = t.fail;
        c["gated"] = t.gated;
        c["info"] = t.info;
        if (t.rmin <= t.rmax) {
            c["ratio_min"] = t.rmin;
            c["ratio_max"] = t.rmax;
        }
        checkers[name] = c;
    }
    doc["checkers"] = checkers;

    std::size_t gated = 0, nontrivial = 0, premise = 0, violations = 0;
    bool all_finite = true;
    double rmin = INFINITY, rmax = -INFINITY;
    for (const TheoremRow& row : result.theorem_rows) {
        const TheoremReport& t = row.report;
        if (t.gated) ++gated;
        if (t.nontrivial) ++nontrivial;
        if (!std::isfinite(t.ratio)) all_finite = false;
        if (!t.gated) {
            rmin = std::min(rmin, t.ratio);
            rmax = std::max(rmax, t.ratio);
        }
        if (t.sigma_proper && t.n_above_threshold) {
            ++premise;
            if (!t.nontrivial) ++violations;
        }
    }
    ordered_json th;
    th["rows"] = result.theorem_rows.size();
    th["gated"] = gated;
    th["nontrivial"] = nontrivial;
    th["above_threshold_and_sigma_proper"] = premise;
    th["implication_violations"] = violations;
    th["all_ratios_finite"] = all_finite;
    if (rmin <= rmax) {
        th["ratio_min"] = rmin;
        th["ratio_max"] = rmax;
    }
    doc["theorem"] = th;
    doc["exact_failures"] = result.exact_failures();
    doc["exit_code"] = result.interrupted ? 130 : result.exit_code();
    return doc.dump(2) + "\n";
}

int run_sweep_to_files(const SweepConfig& config) {
    g_stop = 0;
    auto previous = std::signal(SIGINT, on_interrupt);
    SweepResult result;
    try {
        result = run_sweep(config);
    } catch (...) {
        std::signal(SIGINT, previous);
        throw;
    }
    std::signal(SIGINT, previous);

    auto open = [](const std::string& path) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
        return f;
    };
    {
        std::ofstream f = open(config.out);
        write_rows_csv(f, result.rows, std::string("prng=") + kPrngName + "; seed=" + std::to_string(config.seed));
    }
    {
        std::ofstream f = open(config.theorem_path());
        write_theorem_csv(f, result.theorem_rows);
    }
    {
        std::ofstream f = open(config.summary_path());
        f << summary_json(config, result);
    }
    return result.interrupted ? 130 : result.exit_code();
}

}  // namespace dexp
