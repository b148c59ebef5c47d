#include "pvfsr/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pvfsr/errors.hpp"

namespace pvfsr {

using nlohmann::json;

namespace {

Reply error_reply(int status, const std::string& message) {
    return {status, json{{"error", message}}.dump(), "application/json"};
}

const char* kPlaceholder =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>pvfsr</title></head><body>"
    "<p>No explorer bundle is installed. The data is available at "
    "<a href=\"/api/path\">/api/path</a> and /api/fsr?lambda_index=i.</p></body></html>\n";

}  // namespace

PathService::PathService(PathDocument doc, std::string raw) : doc_(std::move(doc)), raw_(std::move(raw)) {}

PathService PathService::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string raw = ss.str();
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("path document: ") + e.what());
    }
    return PathService(path_document_from_json(j), std::move(raw));
}

Reply PathService::path() const { return {200, raw_, "application/json"}; }

json PathService::slice(Index i) const {
    const auto k = static_cast<std::size_t>(i);
    const auto& names = doc_.metadata.column_names;
    const auto& coef = doc_.coefficients[k];

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < coef.size(); ++j)
        if (coef[j] != 0.0) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(coef[a]) > std::abs(coef[b]); });
    json nonzero = json::array();
    std::vector<std::string> active;
    for (std::size_t j = 0; j < coef.size(); ++j)
        if (coef[j] != 0.0) active.push_back(names[j]);
    for (std::size_t j : order) nonzero.push_back({{"name", names[j]}, {"value", coef[j]}});

    std::vector<double> reps;
    for (const auto& row : doc_.fsr_per_replicate) reps.push_back(row[k]);
    double lo = 0.0, hi = 0.0, sd = 0.0;
    if (!reps.empty()) {
        lo = *std::min_element(reps.begin(), reps.end());
        hi = *std::max_element(reps.begin(), reps.end());
        const double mu = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
        for (double r : reps) sd += (r - mu) * (r - mu);
        sd = reps.size() > 1 ? std::sqrt(sd / static_cast<double>(reps.size() - 1)) : 0.0;
    }
    std::vector<double> satisfied;
    for (const DocumentSelection& s : doc_.selected)
        if (doc_.fsr_mean[k] <= s.alpha) satisfied.push_back(s.alpha);

    return json{
        {"lambda_index", i},
        {"lambda", doc_.lambdas[k]},
        {"intercept", doc_.intercepts[k]},
        {"column_names", names},
        {"coefficients", coef},
        {"nonzero", std::move(nonzero)},
        {"active_set", active},
        {"active_set_size", doc_.active_set_sizes[k]},
        {"fsr", doc_.fsr_mean[k]},
        {"fsr_min", lo},
        {"fsr_max", hi},
        {"fsr_sd", sd},
        {"per_replicate", reps},
        {"alpha_satisfied", satisfied},
    };
}

Reply PathService::fsr(const std::map<std::string, std::string>& query) const {
    const auto it = query.find("lambda_index");
    if (it == query.end()) return error_reply(400, "missing query parameter lambda_index");
    const std::string& v = it->second;
    long long idx = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), idx);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
        return error_reply(400, "lambda_index must be an integer");
    if (idx < 0 || idx >= doc_.size())
        return error_reply(404, "lambda_index " + v + " is outside [0, " + std::to_string(doc_.size()) + ")");
    return {200, slice(static_cast<Index>(idx)).dump(), "application/json"};
}

void mount(httplib::Server& server, const PathService& service, const std::optional<std::string>& static_dir) {
    server.Get("/api/path", [&service](const httplib::Request&, httplib::Response& res) {
        const Reply r = service.path();
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    });
    server.Get("/api/fsr", [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> q;
        for (const auto& [k, v] : req.params) q.emplace(k, v);
        const Reply r = service.fsr(q);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    });
    if (static_dir) {
        if (!server.set_mount_point("/", *static_dir)) throw Error("static directory '" + *static_dir + "' not found");
    } else {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kPlaceholder, "text/html"); });
    }
}

}  // namespace pvfsr
