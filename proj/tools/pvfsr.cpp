// pvfsr: fit, simulate, serve.
//
// Exit codes: 0 success, 1 bad command line, 2 malformed input (CSV,
// scenario config or path document), 3 solver failure, 4 any other error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pvfsr/config.hpp"
#include "pvfsr/document.hpp"
#include "pvfsr/errors.hpp"
#include "pvfsr/io.hpp"
#include "pvfsr/service.hpp"

// After Eigen: <resolv.h> defines a `_res` macro.
#include <httplib.h>

namespace {

enum Exit { ok = 0, usage = 1, bad_input = 2, solver = 3, other = 4 };

struct FitArgs {
    std::string data;
    std::string family = "linear";
    std::string response;
    std::string status;
    std::string screen = "cv";
    int b = 100;
    std::vector<double> alphas;
    bool no_permutation = false;
    std::uint64_t seed = 1;
    int lambda_count = 100;
    std::optional<double> lambda_ratio;
    int cv_folds = 10;
    unsigned threads = 1;
    std::string out;
};

struct SimArgs {
    std::string config;
    std::string out;
    std::string json_out;
    unsigned threads = 0;
};

struct ServeArgs {
    std::string document;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

int run_fit(const FitArgs& a) {
    using namespace pvfsr;
    const Family family = family_from_string(a.family);
    const CsvTable table = read_csv_file(a.data);
    const Dataset data = load_dataset(table, family, a.response,
                                      a.status.empty() ? std::nullopt : std::optional<std::string>(a.status));

    FsrConfig cfg;
    cfg.b_replicates = a.b;
    cfg.use_permutation = !a.no_permutation;
    cfg.alpha_targets = a.alphas.empty() ? std::vector<double>{0.1, 0.2, 0.3} : a.alphas;
    cfg.screening = screen_method_from_string(a.screen);
    cfg.cv_folds = a.cv_folds;
    cfg.lambda_count = a.lambda_count;
    cfg.lambda_ratio = a.lambda_ratio;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    const FsrCurve curve = estimate_fsr(data.x, data.y, cfg);
    const PathDocument doc = make_path_document(curve, data.x, cfg, data.response_column, data.status_column);
    if (a.out.empty() || a.out == "-")
        std::cout << dump_path_document(doc);
    else
        write_path_document(doc, a.out);

    for (const DocumentSelection& s : doc.selected) {
        std::cerr << "alpha " << s.alpha << ": ";
        if (!s.feasible) {
            std::cerr << "no lambda on the grid meets the target\n";
            continue;
        }
        std::cerr << "lambda " << s.lambda << " {";
        for (std::size_t k = 0; k < s.active_set.size(); ++k) std::cerr << (k ? ", " : "") << s.active_set[k];
        std::cerr << "}\n";
    }
    for (const std::string& w : doc.metadata.warnings) std::cerr << "warning: " << w << '\n';
    return ok;
}

int run_simulate(const SimArgs& a) {
    using namespace pvfsr;
    const SimConfig cfg = read_sim_config(a.config);
    const unsigned threads = a.threads > 0 ? a.threads : cfg.threads;
    std::vector<SimResult> results;
    for (const SimRun& run : cfg.runs) {
        FsrConfig base;
        base.b_replicates = run.b_replicates;
        base.use_permutation = run.use_permutation;
        results.push_back(run_scenario(run.scenario, run.method, base, threads));
        const SimResult& r = results.back();
        std::cerr << run.scenario.name << " " << to_string(run.method) << ": fsr " << r.mean_fsr << " (se " << r.se_fsr
                  << "), tsr " << r.mean_tsr << ", " << r.seconds << " s";
        if (r.failures > 0) std::cerr << ", " << r.failures << " failed";
        std::cerr << '\n';
    }
    if (a.out.empty() || a.out == "-") {
        write_sim_csv(results, std::cout);
    } else {
        std::ofstream out(a.out);
        if (!out) throw Error("cannot write '" + a.out + "'");
        write_sim_csv(results, out);
    }
    if (!a.json_out.empty()) {
        std::ofstream out(a.json_out);
        if (!out) throw Error("cannot write '" + a.json_out + "'");
        out << sim_results_to_json(results).dump(1) << '\n';
    }
    return ok;
}

int run_serve(const ServeArgs& a) {
    using namespace pvfsr;
    const PathService service = PathService::from_file(a.document);
    httplib::Server server;
    mount(server, service, a.static_dir.empty() ? std::nullopt : std::optional<std::string>(a.static_dir));
    std::cerr << "serving " << a.document << " on http://" << a.host << ':' << a.port << "/\n";
    if (!server.listen(a.host, a.port)) throw Error("cannot listen on " + a.host + ":" + std::to_string(a.port));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lasso paths with estimated false selection rates"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "estimate the FSR curve for a CSV data set and write a path document");
    f->add_option("data", fit.data, "CSV file with a header row")->required();
    f->add_option("--family", fit.family, "linear, logistic or cox")->capture_default_str();
    f->add_option("--response", fit.response, "response column (survival time for cox)")->required();
    f->add_option("--status", fit.status, "event indicator column (cox)");
    f->add_option("--screen", fit.screen, "screening method: cv or pseudo")->capture_default_str();
    f->add_option("--B", fit.b, "pseudo-variable replicates")->capture_default_str()->check(CLI::PositiveNumber);
    f->add_option("--alpha", fit.alphas, "target FSR, repeatable (default 0.1 0.2 0.3)")->check(CLI::Range(0.0, 1.0));
    f->add_flag("--no-permutation", fit.no_permutation, "skip the permuted copy of the screened columns");
    f->add_option("--seed", fit.seed, "master seed")->capture_default_str();
    f->add_option("--lambda-count", fit.lambda_count, "grid size")->capture_default_str()->check(CLI::Range(2, 100000));
    f->add_option("--lambda-ratio", fit.lambda_ratio, "smallest lambda as a fraction of lambda_max")
        ->check(CLI::Range(1e-12, 1.0));
    f->add_option("--cv-folds", fit.cv_folds, "folds for cv screening")->capture_default_str();
    f->add_option("--threads", fit.threads, "worker threads for replicates")->capture_default_str();
    f->add_option("--out", fit.out, "output path (stdout when omitted)");

    SimArgs sim;
    auto* s = app.add_subcommand("simulate", "run the scenarios of a config file");
    s->add_option("config", sim.config, "scenario config")->required();
    s->add_option("--out", sim.out, "summary CSV (stdout when omitted)");
    s->add_option("--json", sim.json_out, "also write per-replicate JSON here");
    s->add_option("--threads", sim.threads, "worker threads (overrides the config)");

    ServeArgs serve;
    auto* v = app.add_subcommand("serve", "serve a path document over HTTP");
    v->add_option("document", serve.document, "path document written by fit")->required();
    v->add_option("--port", serve.port, "TCP port")->capture_default_str()->check(CLI::Range(1, 65535));
    v->add_option("--host", serve.host, "bind address")->capture_default_str();
    v->add_option("--static", serve.static_dir, "directory served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*f) return run_fit(fit);
        if (*s) return run_simulate(sim);
        if (*v) return run_serve(serve);
    } catch (const pvfsr::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const pvfsr::NoConvergence& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver;
    } catch (const pvfsr::ZeroVarianceResponse& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver;
    } catch (const pvfsr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return other;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return other;
    }
    return usage;
}
