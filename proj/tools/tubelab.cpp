// tubelab CLI: runs experiment configs and writes CSV/JSON/plot data.
//
//   tubelab run <config.json> [--out PATH] [--format csv|json|plot]
//                             [--threads N] [--override key=value]... [--stamp]
//
// Exit codes: 0 success, 1 failed checks, 2 usage error, 3 numerical
// failure (conjugate point / tube self-focus / chart escape).

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tubelab/report.hpp"
#include "tubelab/summation.hpp"

namespace {

std::string now_iso8601() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tubelab: tube and volume-density calculus on model Riemannian manifolds"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    std::vector<std::string> overrides;
    int threads = 1;
    bool stamp = false;

    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    run_cmd->add_option("--out", out_path, "output path (default: from config or stdout)");
    run_cmd->add_option("--format", format, "csv | json | plot (default: from config)");
    run_cmd->add_option("--threads", threads, "worker threads for quadrature loops");
    run_cmd->add_option("--override", overrides, "dotted-path config override, key=value");
    run_cmd->add_flag("--stamp", stamp,
                      "include a wall-clock timestamp in JSON meta (breaks byte determinism)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    tubelab::set_worker_threads(threads);

    tubelab::report::Json doc;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "tubelab: cannot open config " << config_path << "\n";
            return 2;
        }
        try {
            in >> doc;
        } catch (const std::exception& e) {
            std::cerr << "tubelab: config is not valid JSON: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        for (const std::string& ov : overrides) tubelab::report::apply_override(doc, ov);
        tubelab::report::RunResult result = tubelab::report::run_document(doc);

        // Output selection: CLI flags win over the config document.
        std::string fmt = format;
        std::string path = out_path;
        if (fmt.empty() || path.empty()) {
            const tubelab::report::Json* leaf = &doc;
            if (doc.contains("suite") && doc["suite"].is_array() && !doc["suite"].empty())
                leaf = &doc["suite"][0];
            if (fmt.empty() && leaf->contains("output"))
                fmt = (*leaf)["output"].value("format", "csv");
            if (path.empty() && leaf->contains("output"))
                path = (*leaf)["output"].value("path", "");
        }
        if (fmt.empty()) fmt = "csv";

        std::string text;
        if (fmt == "csv")
            text = tubelab::report::emit_csv(result.rows);
        else if (fmt == "json")
            text = tubelab::report::emit_json(doc, result.rows, stamp ? now_iso8601() : "");
        else if (fmt == "plot")
            text = tubelab::report::emit_plot(result.rows);
        else
            throw tubelab::report::UsageError("unknown format: " + fmt);

        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(path, std::ios::binary);
            if (!out) {
                std::cerr << "tubelab: cannot write " << path << "\n";
                return 2;
            }
            out << text;
        }
        return result.exit_code;
    } catch (const tubelab::report::UsageError& e) {
        std::cerr << "tubelab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tubelab: " << e.what() << "\n";
        return 3;
    }
}
