#include "cdpep/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <ostream>

namespace cdpep::cli {

namespace {

int do_sweep(SweepFlags& flags, std::ostream& out, std::ostream& err) {
    const SweepSpec& spec = flags.spec;
    const auto rows = run_sweep(spec);
    if (flags.out.empty()) {
        write_csv(out, rows, spec.timing);
    } else {
        std::ofstream os(flags.out);
        if (!os) throw UsageError(fmt::format("cannot open {} for writing", flags.out));
        write_csv(os, rows, spec.timing);
    }
    int bad = 0;
    for (const auto& r : rows) {
        if (r.status == sdp::Status::optimal) continue;
        ++bad;
        err << fmt::format("warning: index {} finished {}\n", r.index, sdp::to_string(r.status));
    }
    return bad ? kSolver : kOk;
}

int do_validate(const std::vector<std::string>& suites, const ValidateOptions& opts, std::ostream& out) {
    int failed = 0;
    for (const auto& suite : suites) {
        for (const auto& c : run_suite(suite, opts)) {
            out << fmt::format("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail) << std::flush;
            failed += c.passed ? 0 : 1;
        }
    }
    out << (failed ? fmt::format("{} check(s) failed\n", failed) : std::string("all checks passed\n"));
    return failed ? kValidation : kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Worst-case bounds for coordinate descent methods via performance estimation"};
    app.name("cdpep");
    app.require_subcommand(1);

    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "compute bounds over a range of N or cycles and print CSV");
    sweep_flags.attach(*sweep);

    ValidateOptions vopts;
    std::vector<std::string> suites;
    auto* validate = app.add_subcommand("validate", "run consistency checks against fixtures and concrete runs");
    validate->add_option("--suite", suites, "suites to run (default: all)")
        ->check(CLI::IsMember(kSuites));
    validate->add_option("--seed", vopts.seed, "seed for sampled instances")->capture_default_str();
    validate->add_option("--data-dir", vopts.data_dir, "fixture directory")->default_str(default_data_dir());
    validate->add_option("--figure", vopts.only_figure, "figures suite: only this figure");
    validate->add_option("--tol", vopts.solver.tol, "solver tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (sweep->parsed()) {
            sweep_flags.finish();
            return do_sweep(sweep_flags, out, err);
        }
        if (suites.empty()) suites = kSuites;
        return do_validate(suites, vopts, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolver;
    }
}

} // namespace cdpep::cli
