#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "experiment.hpp"

using rtm::cli::ExperimentConfig;
using rtm::cli::json;

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
    return code;
}

struct Flags {
    std::string config, gate, t, t0, out, dimer, bounds_mode, rates_mode;
    double p = 0.0;
    std::vector<double> p_list, eps;
    std::vector<int> chi;
    int d = 0, jobs = 0, samples = 0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file; flags override its values");
    sub->add_option("--gate", f.gate, "du-fixed | du-fixed-raw | du-u | du-sym | du-random | haar | phase-swap | file:PATH");
    sub->add_option("--p", f.p, "entangling power (phase-swap: coupling J)");
    sub->add_option("--d", f.d, "local dimension");
    sub->add_option("--t", f.t, "depth or range a..b");
    sub->add_option("--t0", f.t0, "all | max-entropy | integer");
    sub->add_option("--dimer", f.dimer, "random | bell | product");
    sub->add_option("--seed", f.seed, "seed for random gates and dimers");
    sub->add_option("--jobs", f.jobs, "worker threads");
    sub->add_option("--out", f.out, "output path (default stdout)");
}

ExperimentConfig assemble(const std::string& name, CLI::App* sub, const Flags& f) {
    ExperimentConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw rtm::ConfigError("cannot open config file " + f.config);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw rtm::ConfigError(std::string("config file: ") + e.what());
        }
        c = ExperimentConfig::from_json(j);
    }
    c.experiment = name;
    auto given = [&](const char* opt) { return sub->count(opt) > 0; };
    if (given("--gate")) c.gate = f.gate;
    if (given("--p")) c.p = f.p;
    if (given("--d")) c.d = f.d;
    if (given("--t")) std::tie(c.t_lo, c.t_hi) = rtm::cli::parse_t_range(f.t);
    if (given("--t0")) c.t0 = f.t0;
    if (given("--dimer")) c.dimer = f.dimer;
    if (given("--seed")) c.seed = f.seed;
    if (given("--jobs")) c.jobs = f.jobs;
    if (given("--out")) c.out = f.out;
    if (sub->get_option_no_throw("--chi") && given("--chi")) c.chi = f.chi;
    if (sub->get_option_no_throw("--eps") && given("--eps")) c.eps = f.eps;
    if (sub->get_option_no_throw("--mode") && given("--mode")) {
        if (name == "rates")
            c.rates_mode = f.rates_mode;
        else
            c.bounds_mode = f.bounds_mode;
    }
    if (sub->get_option_no_throw("--samples") && given("--samples")) c.samples = f.samples;
    if (sub->get_option_no_throw("--ps") && given("--ps")) c.p_list = f.p_list;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced transition matrix experiments"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    const std::pair<const char*, const char*> names[] = {
        {"pk", "sector weights p_k and sector entropies per (t, t0)"},
        {"bounds", "lower bound, exact entropy and upper bound per (t, t0)"},
        {"spectrum", "singular values and density-operator eigenvalues per (t, t0)"},
        {"sweep", "joint compression sweep with its error certificate (JSON)"},
        {"replica", "averaged replica contraction against the closed form"},
        {"rates", "magnon decay rates: single-gate channels or fitted p_k decay"}};
    for (const auto& [name, help] : names) {
        CLI::App* s = app.add_subcommand(name, help);
        add_common(s, f);
        subs.push_back({name, s});
    }
    for (auto& [name, s] : subs) {
        if (name == "pk" || name == "bounds")
            s->add_option("--mode", f.bounds_mode, "auto | dual-unitary | generic");
        if (name == "sweep") {
            s->add_option("--chi", f.chi, "rank per bond (one value applies to all)")->delimiter(',');
            s->add_option("--eps", f.eps, "trace-norm tolerance per bond (one value applies to all)")->delimiter(',');
        }
        if (name == "rates") {
            s->add_option("--mode", f.rates_mode, "gate | fit");
            s->add_option("--samples", f.samples, "samples per entangling power");
            s->add_option("--ps", f.p_list, "entangling powers")->delimiter(',');
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("config", e.what(), 2);
    }
    try {
        std::string name;
        CLI::App* sub = nullptr;
        for (auto& [n, s] : subs)
            if (s->parsed()) {
                name = n;
                sub = s;
            }
        const ExperimentConfig c = assemble(name, sub, f);
        const rtm::cli::Artifact a = rtm::cli::run(c);
        std::ostringstream os;
        if (a.is_json) {
            json j = json::parse(a.body);
            j["timestamp"] = a.header;
            os << j.dump(2) << "\n";
        } else {
            os << a.header << a.body;
        }
        if (c.out.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream out(c.out);
            if (!out) throw rtm::ConfigError("cannot write " + c.out);
            out << os.str();
        }
    } catch (const rtm::Error& e) {
        return fail(e.kind_name(), e.what(), rtm::exit_code(e.kind()));
    } catch (const std::bad_alloc&) {
        return fail("resource", "out of memory", 3);
    } catch (const std::exception& e) {
        return fail("numerical", e.what(), 4);
    }
    return 0;
}
