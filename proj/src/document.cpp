#include "pvfsr/document.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "pvfsr/errors.hpp"

namespace pvfsr {

using nlohmann::json;

namespace {

std::vector<std::string> names_of(const IndexSet& s, const DesignMatrix& x) {
    std::vector<std::string> out;
    for (Index j : s) out.push_back(x.column_names[static_cast<std::size_t>(j)]);
    return out;
}

}  // namespace

PathDocument make_path_document(const FsrCurve& curve, const DesignMatrix& x, const FsrConfig& cfg,
                                const std::string& response, const std::string& status) {
    PathDocument d;
    DocumentMetadata& md = d.metadata;
    md.family = to_string(curve.full_path.family);
    md.response = response;
    md.status = status;
    md.n = x.n();
    md.p = x.p();
    md.column_names = x.column_names;
    md.seed = cfg.seed;
    md.b_replicates = cfg.b_replicates;
    md.use_permutation = cfg.use_permutation;
    md.screening = to_string(curve.screening.method);
    md.screened = names_of(curve.screening.a0_hat, x);
    md.degraded = curve.degraded;
    md.path_status = curve.full_path.status == PathStatus::complete ? "complete" : "separation";
    if (!curve.full_path.warning.empty()) md.warnings.push_back(curve.full_path.warning);
    if (!curve.screening.warning.empty()) md.warnings.push_back(curve.screening.warning);
    if (curve.degraded) md.warnings.push_back("screening selected nothing; null columns are permuted copies of the design");

    const std::size_t m = curve.lambdas.size();
    d.lambdas = curve.lambdas;
    d.fsr_mean = curve.mean;
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = static_cast<Index>(i);
        d.intercepts.push_back(curve.full_path.intercepts(row));
        std::vector<double> c(static_cast<std::size_t>(x.p()));
        for (Index j = 0; j < x.p(); ++j) c[static_cast<std::size_t>(j)] = curve.full_path.coefs(row, j);
        d.coefficients.push_back(std::move(c));
        d.active_set_sizes.push_back(static_cast<Index>(curve.full_path.active_sets[i].size()));
    }
    for (Index b = 0; b < curve.per_replicate.rows(); ++b) {
        std::vector<double> r(m);
        for (std::size_t i = 0; i < m; ++i) r[i] = curve.per_replicate(b, static_cast<Index>(i));
        d.fsr_per_replicate.push_back(std::move(r));
    }
    for (const AlphaSelection& a : curve.selected)
        d.selected.push_back({a.alpha, a.feasible, a.lambda_index, a.lambda, names_of(a.active_set, x)});
    return d;
}

json to_json(const PathDocument& doc) {
    const DocumentMetadata& md = doc.metadata;
    json meta = {
        {"family", md.family},
        {"response", md.response},
        {"status", md.status},
        {"n", md.n},
        {"p", md.p},
        {"column_names", md.column_names},
        {"seed", md.seed},
        {"b_replicates", md.b_replicates},
        {"use_permutation", md.use_permutation},
        {"screening", md.screening},
        {"screened", md.screened},
        {"degraded", md.degraded},
        {"path_status", md.path_status},
        {"warnings", md.warnings},
    };
    json sel = json::array();
    for (const DocumentSelection& s : doc.selected)
        sel.push_back({{"alpha", s.alpha},
                       {"feasible", s.feasible},
                       {"lambda_index", s.lambda_index},
                       {"lambda", s.lambda},
                       {"active_set", s.active_set}});
    return json{
        {"schema_version", doc.schema_version},
        {"metadata", std::move(meta)},
        {"lambdas", doc.lambdas},
        {"intercepts", doc.intercepts},
        {"coefficients", doc.coefficients},
        {"active_set_sizes", doc.active_set_sizes},
        {"fsr", {{"mean", doc.fsr_mean}, {"per_replicate", doc.fsr_per_replicate}}},
        {"selected", std::move(sel)},
    };
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
    if (!j.contains(key)) throw ParseError(std::string("path document: missing field '") + key + "'");
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ParseError(std::string("path document: bad field '") + key + "': " + e.what());
    }
}

}  // namespace

PathDocument path_document_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("path document: expected a JSON object");
    PathDocument d;
    take(j, "schema_version", d.schema_version);
    if (d.schema_version != kSchemaVersion)
        throw ParseError("path document: unsupported schema_version " + std::to_string(d.schema_version));
    if (!j.contains("metadata") || !j["metadata"].is_object()) throw ParseError("path document: missing metadata");
    const json& m = j["metadata"];
    DocumentMetadata& md = d.metadata;
    take(m, "family", md.family);
    take(m, "response", md.response);
    take(m, "status", md.status);
    take(m, "n", md.n);
    take(m, "p", md.p);
    take(m, "column_names", md.column_names);
    take(m, "seed", md.seed);
    take(m, "b_replicates", md.b_replicates);
    take(m, "use_permutation", md.use_permutation);
    take(m, "screening", md.screening);
    take(m, "screened", md.screened);
    take(m, "degraded", md.degraded);
    take(m, "path_status", md.path_status);
    take(m, "warnings", md.warnings);

    take(j, "lambdas", d.lambdas);
    take(j, "intercepts", d.intercepts);
    take(j, "coefficients", d.coefficients);
    take(j, "active_set_sizes", d.active_set_sizes);
    if (!j.contains("fsr") || !j["fsr"].is_object()) throw ParseError("path document: missing fsr");
    take(j["fsr"], "mean", d.fsr_mean);
    take(j["fsr"], "per_replicate", d.fsr_per_replicate);
    if (!j.contains("selected") || !j["selected"].is_array()) throw ParseError("path document: missing selected");
    for (const json& s : j["selected"]) {
        DocumentSelection ds;
        take(s, "alpha", ds.alpha);
        take(s, "feasible", ds.feasible);
        take(s, "lambda_index", ds.lambda_index);
        take(s, "lambda", ds.lambda);
        take(s, "active_set", ds.active_set);
        d.selected.push_back(std::move(ds));
    }

    const std::size_t m_len = d.lambdas.size();
    if (d.intercepts.size() != m_len || d.coefficients.size() != m_len || d.active_set_sizes.size() != m_len ||
        d.fsr_mean.size() != m_len)
        throw ParseError("path document: per-lambda arrays differ in length");
    for (const auto& row : d.coefficients)
        if (static_cast<Index>(row.size()) != md.p) throw ParseError("path document: coefficient row of wrong length");
    for (const auto& row : d.fsr_per_replicate)
        if (row.size() != m_len) throw ParseError("path document: replicate row of wrong length");
    if (static_cast<Index>(md.column_names.size()) != md.p) throw ParseError("path document: column_names length differs from p");
    return d;
}

std::string dump_path_document(const PathDocument& doc) { return to_json(doc).dump(1) + "\n"; }

void write_path_document(const PathDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << dump_path_document(doc);
    if (!out) throw Error("write to '" + path + "' failed");
}

PathDocument read_path_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("path document: ") + e.what());
    }
    return path_document_from_json(j);
}

void write_sim_csv(const std::vector<SimResult>& results, std::ostream& out) {
    out << "scenario,method,family,n,p,rho,amplitude,s,alpha,replicates,failures,mean_fsr,se_fsr,mean_tsr,se_tsr,"
           "mean_selected,empty_fraction,mean_censoring,seconds\n";
    for (const SimResult& r : results) {
        const Scenario& sc = r.scenario;
        std::ostringstream row;
        row.precision(10);
        // Scenario names come from config section headers and never contain quotes or commas.
        row << sc.name << ',' << to_string(r.method) << ',' << to_string(sc.family) << ',' << sc.n << ',' << sc.p << ','
            << sc.rho << ',' << sc.amplitude << ',' << sc.sparsity << ',' << sc.alpha << ',' << r.per_replicate.size()
            << ',' << r.failures << ',' << r.mean_fsr << ',' << r.se_fsr << ',' << r.mean_tsr << ',' << r.se_tsr << ','
            << r.mean_selected << ',' << r.empty_fraction << ',' << r.mean_censoring << ',' << r.seconds << '\n';
        out << row.str();
    }
}

json sim_results_to_json(const std::vector<SimResult>& results) {
    json arr = json::array();
    for (const SimResult& r : results) {
        const Scenario& sc = r.scenario;
        json reps = json::array();
        for (const ReplicateOutcome& o : r.per_replicate) {
            json e = {{"beta_index", o.beta_index}, {"dataset_index", o.dataset_index}, {"failed", o.failed},
                      {"fsr", o.fsr},  {"tsr", o.tsr},  {"selected", o.selected},  {"degraded", o.degraded}};
            if (sc.family == Family::cox) e["censoring"] = o.censoring;
            if (o.failed) e["error"] = o.error;
            reps.push_back(std::move(e));
        }
        arr.push_back({{"schema_version", kSchemaVersion},
                       {"scenario",
                        {{"name", sc.name}, {"family", to_string(sc.family)}, {"n", sc.n}, {"p", sc.p}, {"rho", sc.rho},
                         {"amplitude", sc.amplitude}, {"s", sc.sparsity}, {"alpha", sc.alpha}, {"c", sc.intercept_c},
                         {"beta_draws", sc.n_beta_draws}, {"datasets_per_beta", sc.n_datasets_per_beta},
                         {"seed", sc.seed}}},
                       {"method", to_string(r.method)},
                       {"mean_fsr", r.mean_fsr}, {"se_fsr", r.se_fsr}, {"mean_tsr", r.mean_tsr}, {"se_tsr", r.se_tsr},
                       {"mean_selected", r.mean_selected}, {"empty_fraction", r.empty_fraction},
                       {"mean_censoring", r.mean_censoring}, {"failures", r.failures}, {"seconds", r.seconds},
                       {"per_replicate", std::move(reps)}});
    }
    return arr;
}

}  // namespace pvfsr
