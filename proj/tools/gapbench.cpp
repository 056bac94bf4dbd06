// Exit codes: 0 certificate PASS, 1 certificate FAIL, 2 config error,
// 3 external-protocol error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "gapbench/algorithm.hpp"
#include "gapbench/config.hpp"
#include "gapbench/experiments.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    nlohmann::json config;
    try {
        config = gapbench::load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        gapbench::ExperimentResult result = gapbench::run_experiment(config);
        const std::string out_dir = config.value("output_dir", std::string("out"));
        gapbench::write_report_files(result.report, out_dir);
        std::cout << (result.pass ? "PASS" : "FAIL") << "  kind=" << config["kind"].get<std::string>()
                  << "  hash=" << result.report["config_hash"].get<std::string>()
                  << "  report=" << out_dir << "/report.json\n";
        if (result.report["results"].contains("certificates"))
            for (const auto& c : result.report["results"]["certificates"])
                std::cout << "  " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                          << c["name"].get<std::string>() << "  beta_hat=" << c["beta_hat"]
                          << "  lambda=" << c["lambda"] << "\n";
        return result.pass ? 0 : 1;
    } catch (const gapbench::ProtocolError& e) {
        std::cerr << "external protocol error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_describe(const std::string& kind) {
    try {
        std::cout << gapbench::describe_kind(kind) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_recheck(const std::string& report_path) {
    try {
        std::ifstream in(report_path);
        if (!in) throw std::invalid_argument("cannot open " + report_path);
        nlohmann::json report = nlohmann::json::parse(in);
        const nlohmann::json verdict = gapbench::recheck_report(report);
        std::cout << verdict.dump(2) << "\n";
        return verdict["ok"].get<bool>() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "recheck error: " << e.what() << "\n";
        return 2;
    }
}

// Canonical transcript of an echo-zero session; doubles as a conformance
// vector for external clients.
int cmd_protocol_fixture() {
    std::cout
        << R"(# finite-dimensional session, one JSON object per line, harness <-> client
> {"type":"plan","n":4,"d":1}
< {"type":"points","points":[[0.125],[0.375],[0.625],[0.875]]}
> {"type":"values","values":[0.0,0.0,0.0,0.0]}
< {"type":"model_ready"}
> {"type":"query","points":[[0.5]]}
< {"type":"predictions","values":[0.0]}
> {"type":"end"}
# operator session: points become function payloads on the shared grid
> {"type":"plan","n":2,"grid":4}
< {"type":"inputs","grid":4,"functions":[[0.0,0.0,0.0,0.0],[0.1,0.2,0.3,0.4]]}
> {"type":"values","values":[0.0,0.0]}
< {"type":"model_ready"}
> {"type":"query","functions":[[0.0,0.1,0.2,0.3]]}
< {"type":"predictions","values":[0.0]}
> {"type":"end"}
# error codes: PROTO_POINTCOUNT (wrong point/function count),
#              PROTO_NONFINITE (null or non-finite numbers),
#              PROTO_MALFORMED (anything else off-grammar)
)";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sampling-complexity gap benchmark"};
    app.require_subcommand(1);

    std::string config_path, kind, report_path;
    auto* run = app.add_subcommand("run", "run an experiment config and write reports");
    run->add_option("config", config_path, "TOML or JSON config file")->required();
    auto* describe = app.add_subcommand("describe", "explain an experiment kind");
    describe->add_option("kind", kind, "experiment kind")->required();
    auto* fixture =
        app.add_subcommand("protocol-fixture", "print the external-client conformance transcript");
    auto* recheck = app.add_subcommand("recheck", "re-validate a report's certificates");
    recheck->add_option("report", report_path, "report.json path")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path);
    if (describe->parsed()) return cmd_describe(kind);
    if (fixture->parsed()) return cmd_protocol_fixture();
    if (recheck->parsed()) return cmd_recheck(report_path);
    return 2;
}
