#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lclt/harness.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string n, p, seed, samples, workers, out;
    std::vector<std::string> set;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "Manifest file")->check(CLI::ExistingFile);
    sub->add_option("--n", o.n, "Vertex counts, comma separated");
    sub->add_option("--p", o.p, "Edge probabilities, comma separated");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--samples", o.samples, "Monte Carlo samples");
    sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    sub->add_option("--out", o.out, "Output root directory");
    sub->add_option("--set", o.set, "Any manifest key as key=value")->take_all();
}

lclt::Manifest build_manifest(const std::string& kind, const Overrides& o) {
    lclt::Manifest mf;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        mf = lclt::parse_manifest(in);
    }
    mf.kind = lclt::parse_kind(kind);
    for (const auto& kv : o.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) lclt::fail(lclt::ErrorKind::invalid_parameter, "--set expects key=value");
        lclt::set_manifest_value(mf, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const std::pair<const char*, const std::string*> flags[] = {{"n", &o.n},          {"p", &o.p},
                                                                  {"seed", &o.seed},    {"samples", &o.samples},
                                                                  {"workers", &o.workers}, {"out", &o.out}};
    for (const auto& [key, value] : flags)
        if (!value->empty()) lclt::set_manifest_value(mf, key, *value);
    return mf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangle-count local limit experiments"};
    app.require_subcommand(1);
    Overrides overrides;
    for (const char* name : {"pmf", "charfn", "decouple", "distances", "verify", "cover"})
        add_common(app.add_subcommand(name), overrides);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const lclt::Manifest mf = build_manifest(app.get_subcommands().front()->get_name(), overrides);
        const lclt::RunResult result = lclt::run(mf);
        (result.exit_code == 0 ? std::cout : std::cerr) << result.message << '\n';
        return result.exit_code;
    } catch (const lclt::Error& e) {
        std::cerr << e.what() << '\n';
        return lclt::exit_code(e.kind());
    }
}
