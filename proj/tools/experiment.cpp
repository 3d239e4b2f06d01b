#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <sstream>
#include <mutex>
#include <thread>

#include "rtm/decay_rates.hpp"
#include "rtm/entropy_bounds.hpp"
#include "rtm/replica_average.hpp"
#include "rtm/rtm_compress.hpp"

namespace rtm::cli {

namespace {

const std::vector<std::string> kExperiments{"pk", "bounds", "spectrum", "sweep", "replica", "rates"};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Runs f(i) for i in [0, n) on up to `jobs` threads; each result lands in its own slot.
void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += p;
    return s;
}

BoundMode bound_mode(const ExperimentConfig& c, const Gate& g) {
    if (c.bounds_mode == "dual-unitary") return BoundMode::dual_unitary;
    if (c.bounds_mode == "generic") return BoundMode::generic;
    return is_dual_unitary(g) ? BoundMode::dual_unitary : BoundMode::generic;
}

std::vector<int> selected_t0(const ExperimentConfig& c, const std::vector<BoundReport>& reps) {
    std::vector<int> out;
    if (c.t0 == "all") {
        for (const auto& r : reps) out.push_back(r.t0);
    } else if (c.t0 == "max-entropy") {
        int best = 0;
        for (const auto& r : reps)
            if (*r.exact > *reps[best].exact) best = r.t0;
        out.push_back(best);
    } else {
        const int v = std::stoi(c.t0);
        if (v >= 0 && v < int(reps.size())) out.push_back(v);
    }
    return out;
}

std::vector<BoundReport> bounds_for(const ExperimentConfig& c, int t) {
    const Gate g = make_gate(c, c.d);
    CircuitSpec spec = uniform_circuit(g, t, make_dimer(c, c.d));
    const InfluenceMatrix L = build_influence(spec, Side::left), R = build_influence(spec, Side::right);
    return bounds_from_influence(L, R, bound_mode(c, g));
}

std::string run_pk_or_bounds(const ExperimentConfig& c) {
    const int n = c.t_hi - c.t_lo + 1;
    std::vector<std::string> rows(n);
    parallel_for(n, c.jobs, [&](int i) {
        const int t = c.t_lo + i;
        const auto reps = bounds_for(c, t);
        std::ostringstream os;
        for (int t0 : selected_t0(c, reps)) {
            const auto& r = reps[t0];
            if (c.experiment == "pk") {
                for (std::size_t k = 0; k < r.p.size(); ++k)
                    os << t << ',' << t0 << ',' << k << ',' << num(r.p[k]) << ',' << num(r.s_sigma[k]) << '\n';
            } else {
                os << t << ',' << t0 << ',' << num(r.lower) << ',' << num(*r.exact) << ',' << num(r.upper) << ','
                   << num(r.shannon) << '\n';
            }
        }
        rows[i] = os.str();
    });
    const std::string head = c.experiment == "pk" ? "t,t0,k,p_k,S_sigma_k\n" : "t,t0,lower,exact,upper,shannon\n";
    return head + join(rows);
}

std::string run_spectrum(const ExperimentConfig& c) {
    const int n = c.t_hi - c.t_lo + 1;
    std::vector<std::string> rows(n);
    parallel_for(n, c.jobs, [&](int i) {
        const int t = c.t_lo + i;
        const Gate g = make_gate(c, c.d);
        CircuitSpec spec = uniform_circuit(g, t, make_dimer(c, c.d));
        const InfluenceMatrix L = build_influence(spec, Side::left), R = build_influence(spec, Side::right);
        const auto all = build_rtm_all(L, R);
        std::vector<BoundReport> fake(all.size());
        std::vector<Spectrum> spec_t0;
        for (std::size_t j = 0; j < all.size(); ++j) {
            spec_t0.push_back(all[j].spectrum());
            fake[j].t0 = int(j);
            fake[j].exact = entropy(spec_t0.back());
        }
        std::ostringstream os;
        for (int t0 : selected_t0(c, fake)) {
            const Spectrum& s = spec_t0[t0];
            const double n2 = s.sum_sq();
            for (std::size_t k = 0; k < s.values.size(); ++k)
                if (s.values[k] > 0.0)
                    os << t << ',' << t0 << ',' << k << ',' << num(s.values[k]) << ','
                       << num(s.values[k] * s.values[k] / n2) << '\n';
        }
        rows[i] = os.str();
    });
    return "t,t0,n,sigma,lambda\n" + join(rows);
}

std::string run_sweep(const ExperimentConfig& c) {
    const int t = c.t_hi;
    const Gate g = make_gate(c, c.d);
    CircuitSpec spec = uniform_circuit(g, t, make_dimer(c, c.d));
    const InfluenceMatrix L = build_influence(spec, Side::left), R = build_influence(spec, Side::right);
    Schedule sch;
    if (!c.eps.empty())
        sch = Schedule::tolerances(c.eps.size() == 1 ? std::vector<double>(std::size_t(t), c.eps[0]) : c.eps);
    else
        sch = Schedule::ranks(c.chi.size() == 1 ? std::vector<int>(std::size_t(t), c.chi[0]) : c.chi);
    SweepResult res = joint_sweep(L, R, sch);
    if (c.d == 2)
        for (char p : {'I', 'X', 'Y', 'Z'}) res.probe(L, R, std::string(1, p), pauli(p));
    else
        res.probe(L, R, "I", Mat::Identity(c.d, c.d));
    json j;
    j["config_hash"] = c.hash();
    j["seed"] = c.seed;
    j["report"] = json::parse(res.report.to_json());
    return j.dump(2) + "\n";
}

std::string run_replica(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "d,p,c,t0,t1,k,A_contract,A_closed,abs_diff\n";
    double worst = 0.0;
    for (int d : {2, 3}) {
        const double cc = c_constant(make_dimer(c, d), d);
        for (int t0 = 0; t0 <= 6; ++t0)
            for (int t1 = 0; t1 <= 6; ++t1)
                for (int k = 0; k <= t1; ++k) {
                    AveragedNetworkParams prm{d, critical_p(d), t0, t1, k, cc};
                    const double a = averaged_Ak_contract(prm), b = closed_form_EAk(prm);
                    worst = std::max(worst, std::abs(a - b));
                    os << d << ',' << num(prm.p) << ',' << num(cc) << ',' << t0 << ',' << t1 << ',' << k << ','
                       << num(a) << ',' << num(b) << ',' << num(std::abs(a - b)) << '\n';
                }
    }
    if (!(worst < 1e-12)) throw NumericalError("replica grid: contraction and closed form differ by " + num(worst));
    return os.str();
}

std::string run_rates(const ExperimentConfig& c) {
    const std::vector<double> ps = c.p_list.empty() ? std::vector<double>{c.p} : c.p_list;
    const int n = int(ps.size()) * c.samples;
    std::vector<std::string> rows(n);
    parallel_for(n, c.jobs, [&](int i) {
        const double p = ps[std::size_t(i / c.samples)];
        const std::uint64_t seed = c.seed + std::uint64_t(i % c.samples);
        std::ostringstream os;
        if (c.rates_mode == "gate") {
            const GateRates r = r_mag_gate(du_gate_w_symmetric(p, seed));
            os << num(p) << ',' << seed << ',' << num(r.left.rate) << ',' << num(r.right.rate) << ','
               << num(r.min()) << ',' << num(r_mag_avg(p, 2)) << '\n';
        } else {
            const Gate g = du_gate_w_random(p, seed);
            CircuitSpec spec = uniform_circuit(g, c.t_hi, make_dimer(c, 2));
            const InfluenceMatrix L = build_influence(spec, Side::left), R = build_influence(spec, Side::right);
            const RateReport f = fit_pk_decay(top_sector_series(bounds_from_influence(L, R, BoundMode::dual_unitary)), 2);
            os << num(p) << ',' << seed << ',' << num(f.r_fit) << ',' << num(f.r2) << ',' << f.window_lo << ','
               << f.window_hi << ',' << num(r_mag_avg(p, 2)) << '\n';
        }
        rows[i] = os.str();
    });
    const std::string head = c.rates_mode == "gate" ? "p,seed,r_left,r_right,r_mag_gate,r_mag_avg\n"
                                                    : "p,seed,r_fit,r2,window_lo,window_hi,r_mag_avg\n";
    return head + join(rows);
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["gate"] = gate;
    j["p"] = p;
    j["p_list"] = p_list;
    j["d"] = d;
    j["t"] = std::to_string(t_lo) + ".." + std::to_string(t_hi);
    j["t0"] = t0;
    j["dimer"] = dimer;
    j["bounds_mode"] = bounds_mode;
    j["rates_mode"] = rates_mode;
    j["chi"] = chi;
    j["eps"] = eps;
    j["samples"] = samples;
    j["seed"] = seed;
    j["jobs"] = jobs;
    j["out"] = out;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known{"experiment", "gate", "p", "p_list", "d", "t", "t0", "dimer",
                                                "bounds_mode", "rates_mode", "chi", "eps", "samples", "seed",
                                                "jobs", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key: " + it.key());
    try {
        if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
        if (j.contains("gate")) c.gate = j["gate"].get<std::string>();
        if (j.contains("p")) c.p = j["p"].get<double>();
        if (j.contains("p_list")) c.p_list = j["p_list"].get<std::vector<double>>();
        if (j.contains("d")) c.d = j["d"].get<int>();
        if (j.contains("t")) {
            const auto r = j["t"].is_number() ? std::pair<int, int>{j["t"].get<int>(), j["t"].get<int>()}
                                              : parse_t_range(j["t"].get<std::string>());
            c.t_lo = r.first;
            c.t_hi = r.second;
        }
        if (j.contains("t0")) c.t0 = j["t0"].is_number() ? std::to_string(j["t0"].get<int>()) : j["t0"].get<std::string>();
        if (j.contains("dimer")) c.dimer = j["dimer"].get<std::string>();
        if (j.contains("bounds_mode")) c.bounds_mode = j["bounds_mode"].get<std::string>();
        if (j.contains("rates_mode")) c.rates_mode = j["rates_mode"].get<std::string>();
        if (j.contains("chi")) c.chi = j["chi"].get<std::vector<int>>();
        if (j.contains("eps")) c.eps = j["eps"].get<std::vector<double>>();
        if (j.contains("samples")) c.samples = j["samples"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
        throw ConfigError("unknown experiment '" + experiment + "'");
    static const std::vector<std::string> gates{"du-fixed", "du-fixed-raw", "du-u", "du-sym", "du-random", "haar",
                                                "phase-swap"};
    if (std::find(gates.begin(), gates.end(), gate) == gates.end() && gate.rfind("file:", 0) != 0)
        throw ConfigError("unknown gate family '" + gate + "'");
    if (d < 2) throw ConfigError("d must be at least 2");
    if (gate.rfind("du-", 0) == 0 && d != 2) throw ConfigError("the dual-unitary qubit families need d = 2");
    if (t_lo < 0 || t_hi < t_lo) throw ConfigError("t range must satisfy 0 <= lo <= hi");
    if (t0 != "all" && t0 != "max-entropy") {
        std::size_t pos = 0;
        int v = -1;
        try {
            v = std::stoi(t0, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != t0.size() || v < 0) throw ConfigError("t0 must be all, max-entropy or a nonnegative integer");
    }
    if (dimer != "random" && dimer != "bell" && dimer != "product") throw ConfigError("dimer must be random, bell or product");
    if (bounds_mode != "auto" && bounds_mode != "dual-unitary" && bounds_mode != "generic")
        throw ConfigError("bounds_mode must be auto, dual-unitary or generic");
    if (rates_mode != "gate" && rates_mode != "fit") throw ConfigError("rates_mode must be gate or fit");
    if (samples < 1) throw ConfigError("samples must be positive");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    if (experiment == "sweep") {
        if (chi.empty() == eps.empty()) throw ConfigError("sweep needs exactly one of --chi or --eps");
        for (int x : chi)
            if (x < 1) throw ConfigError("chi entries must be positive");
        for (double x : eps)
            if (x < 0) throw ConfigError("eps entries must be nonnegative");
    }
    for (double x : p_list.empty() ? std::vector<double>{p} : p_list)
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("p must lie in [0, 1]");
}

std::string ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("out");
    j.erase("jobs");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::pair<int, int> parse_t_range(const std::string& s) {
    try {
        const auto pos = s.find("..");
        std::size_t used = 0;
        if (pos == std::string::npos) {
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw ConfigError("");
            return {v, v};
        }
        const std::string a = s.substr(0, pos), b = s.substr(pos + 2);
        const int lo = std::stoi(a, &used);
        if (used != a.size()) throw ConfigError("");
        const int hi = std::stoi(b, &used);
        if (used != b.size() || hi < lo) throw ConfigError("");
        return {lo, hi};
    } catch (const std::exception&) {
        throw ConfigError("t must be an integer or a range a..b, got '" + s + "'");
    }
}

Gate make_gate(const ExperimentConfig& c, int d) {
    if (c.gate == "du-fixed") return du_gate_w_fixed(c.p);
    if (c.gate == "du-fixed-raw") return du_gate_w(c.p, FixedDressing::raw());
    if (c.gate == "du-u") return du_gate_u(c.p);
    if (c.gate == "du-sym") return du_gate_w_symmetric(c.p, c.seed);
    if (c.gate == "du-random") return du_gate_w_random(c.p, c.seed);
    if (c.gate == "haar") return haar_gate(d, c.seed);
    if (c.gate == "phase-swap") return phase_swap_gate(d, c.p);
    if (c.gate.rfind("file:", 0) == 0) return load_gate_file(c.gate.substr(5));
    throw ConfigError("unknown gate family '" + c.gate + "'");
}

Vec make_dimer(const ExperimentConfig& c, int d) {
    if (c.dimer == "bell") return bell_dimer(d);
    if (c.dimer == "product") return product_dimer(d, 0, 0);
    return random_dimer(d, c.seed);
}

Artifact run(const ExperimentConfig& c) {
    c.validate();
    Artifact a;
    const std::string& e = c.experiment;
    if (e == "pk" || e == "bounds")
        a.body = run_pk_or_bounds(c);
    else if (e == "spectrum")
        a.body = run_spectrum(c);
    else if (e == "sweep") {
        a.body = run_sweep(c);
        a.is_json = true;
    } else if (e == "replica")
        a.body = run_replica(c);
    else
        a.body = run_rates(c);
    if (!a.is_json)
        a.header = "# rtm " + e + " config_hash=" + c.hash() + " seed=" + std::to_string(c.seed) + "\n# config " +
                   [&] {
                       json j = c.to_json();
                       j.erase("out");
                       j.erase("jobs");
                       return j.dump();
                   }() +
                   "\n# timestamp " + timestamp() + "\n";
    else
        a.header = timestamp();
    return a;
}

}  // namespace rtm::cli
