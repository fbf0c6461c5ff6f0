// Batch front end: experiment orchestration over the C API.
// Exit codes: 0 all assertions passed, 1 assertion/run failure, 2 usage or
// config error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fsflow.h"

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    bool quiet = false;
};

int run(const std::string& experiment, const Options& opt) {
    fsf_config* cfg = fsf_config_create();
    if (!opt.config_path.empty()) {
        if (fsf_config_load(cfg, opt.config_path.c_str()) != FSF_OK) {
            std::fprintf(stderr, "error: %s\n", fsf_last_error());
            fsf_config_free(cfg);
            return 2;
        }
    }
    if (fsf_config_set(cfg, "experiment", experiment.c_str()) != FSF_OK) {
        std::fprintf(stderr, "error: %s\n", fsf_last_error());
        fsf_config_free(cfg);
        return 2;
    }
    for (const auto& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            fsf_config_free(cfg);
            return 2;
        }
        if (fsf_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != FSF_OK) {
            std::fprintf(stderr, "error: %s\n", fsf_last_error());
            fsf_config_free(cfg);
            return 2;
        }
    }
    if (fsf_config_validate(cfg) != FSF_OK) {
        std::fprintf(stderr, "error: %s\n", fsf_last_error());
        fsf_config_free(cfg);
        return 2;
    }
    for (int i = 0; i < fsf_config_num_warnings(cfg); ++i)
        std::fprintf(stderr, "warning: %s\n", fsf_config_warning(cfg, i));

    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "error: cannot create output directory '%s'\n", opt.out_dir.c_str());
        fsf_config_free(cfg);
        return 2;
    }

    fsf_report* rep = nullptr;
    const fsf_status st = fsf_run_experiment(cfg, opt.out_dir.c_str(), &rep);
    int code = 0;
    if (st == FSF_OK || st == FSF_ASSERT_FAIL) {
        char* text = fsf_report_text(rep);
        if (!opt.quiet) std::fputs(text, stdout);
        const std::string report_path = opt.out_dir + "/report.txt";
        std::ofstream out(report_path, std::ios::binary);
        out << text;
        fsf_string_free(text);
        code = (st == FSF_OK) ? 0 : 1;
    } else {
        std::fprintf(stderr, "error: %s\n", fsf_last_error());
        code = (st == FSF_CONFIG_ERROR) ? 2 : 1;
    }
    fsf_report_free(rep);
    fsf_config_free(cfg);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsflow: numerical laboratory for viscous free-surface flow over a flattened half-space"};
    app.require_subcommand(0, 1);

    Options opt;
    bool dump_defaults = false;
    app.add_flag("--dump-config", dump_defaults, "print the default configuration and exit");

    const char* names[] = {"simulate",         "linear-decay",      "duhamel-check",
                           "resolvent-sweep",  "convergence-study", "consistency-check"};
    const char* descr[] = {"small-data nonlinear run with Picard time marching",
                           "semigroup decay exponents on the continuum wavevector grid",
                           "weighted Duhamel-integral estimate on a model semigroup",
                           "resolvent sweep: estimate stability and reduced-route agreement",
                           "extension and divergence-identity convergence orders",
                           "manufactured transformed-equation consistency"};
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descr[i]);
        sub->add_option("--config", opt.config_path, "configuration file (key = value)");
        sub->add_option("--set", opt.overrides, "override one key (key=value, repeatable)");
        sub->add_option("--out", opt.out_dir, "output directory for CSV artifacts and report.txt");
        sub->add_flag("--quiet", opt.quiet, "suppress the report on stdout");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage errors are exit code 2
    }

    if (dump_defaults) {
        fsf_config* cfg = fsf_config_create();
        char* text = fsf_config_dump(cfg);
        std::fputs(text, stdout);
        fsf_string_free(text);
        fsf_config_free(cfg);
        return 0;
    }
    for (int i = 0; i < 6; ++i)
        if (subs[i]->parsed()) return run(names[i], opt);
    std::fputs(app.help().c_str(), stderr);
    return 2;
}
