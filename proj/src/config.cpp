#include "pvfsr/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "pvfsr/errors.hpp"

namespace pvfsr {

namespace {

struct Entry {
    std::string key;
    std::vector<std::string> values;
    long line = 0;
};

struct Group {
    std::string name;
    std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return true;
}

std::string unquote(const std::string& raw, long line) {
    const std::string v = trim(raw);
    if (v.empty()) throw ParseError("empty value", line);
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ParseError("unterminated string", line);
        return v.substr(1, v.size() - 2);
    }
    return v;
}

std::vector<std::string> parse_value(const std::string& raw, long line) {
    const std::string v = trim(raw);
    if (v.empty()) throw ParseError("missing value", line);
    if (v.front() != '[') return {unquote(v, line)};
    if (v.back() != ']') throw ParseError("unterminated list", line);
    std::vector<std::string> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(unquote(item, line));
    if (out.empty()) throw ParseError("empty list", line);
    return out;
}

std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

double as_double(const std::string& v, const std::string& key, long line) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ParseError("key '" + key + "' expects a number, got '" + v + "'", line);
    return out;
}

long long as_int(const std::string& v, const std::string& key, long line) {
    long long out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ParseError("key '" + key + "' expects an integer, got '" + v + "'", line);
    return out;
}

bool as_bool(const std::string& v, const std::string& key, long line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError("key '" + key + "' expects true or false, got '" + v + "'", line);
}

void apply(SimRun& run, unsigned& threads, const std::string& key, const std::string& v, long line) {
    Scenario& sc = run.scenario;
    try {
        if (key == "family") sc.family = family_from_string(v);
        else if (key == "n") sc.n = static_cast<Index>(as_int(v, key, line));
        else if (key == "p") sc.p = static_cast<Index>(as_int(v, key, line));
        else if (key == "rho") sc.rho = as_double(v, key, line);
        else if (key == "amplitude" || key == "A") sc.amplitude = as_double(v, key, line);
        else if (key == "s") sc.sparsity = static_cast<Index>(as_int(v, key, line));
        else if (key == "alpha") sc.alpha = as_double(v, key, line);
        else if (key == "c") sc.intercept_c = as_double(v, key, line);
        else if (key == "beta_draws") sc.n_beta_draws = static_cast<int>(as_int(v, key, line));
        else if (key == "datasets") sc.n_datasets_per_beta = static_cast<int>(as_int(v, key, line));
        else if (key == "seed") sc.seed = static_cast<std::uint64_t>(as_int(v, key, line));
        else if (key == "method") run.method = sim_method_from_string(v);
        else if (key == "B") run.b_replicates = static_cast<int>(as_int(v, key, line));
        else if (key == "permutation") run.use_permutation = as_bool(v, key, line);
        else if (key == "threads") threads = static_cast<unsigned>(as_int(v, key, line));
        else throw ParseError("unknown key '" + key + "'", line);
    } catch (const ParseError& e) {
        if (e.line() >= 0) throw;
        throw ParseError(e.what(), line);
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
}

std::string label(const std::string& v) {
    std::string out;
    for (char c : v) out += valid_name(std::string(1, c)) ? c : '_';
    return out;
}

}  // namespace

SimConfig parse_sim_config(std::istream& in) {
    std::vector<Entry> defaults;
    std::vector<Group> groups;
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("malformed section header", line);
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (!valid_name(name)) throw ParseError("section names use letters, digits, '_', '-' or '.'", line);
            groups.push_back({name, {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
        Entry e{trim(s.substr(0, eq)), parse_value(s.substr(eq + 1), line), line};
        if (e.key.empty()) throw ParseError("missing key", line);
        auto& target = groups.empty() ? defaults : groups.back().entries;
        for (const Entry& prior : target)
            if (prior.key == e.key) throw ParseError("duplicate key '" + e.key + "'", line);
        target.push_back(std::move(e));
    }
    if (groups.empty()) groups.push_back({"scenario", {}});

    SimConfig cfg;
    for (const Group& g : groups) {
        // Section keys override defaults of the same name.
        std::vector<Entry> entries;
        for (const Entry& d : defaults) {
            bool overridden = false;
            for (const Entry& e : g.entries) overridden = overridden || e.key == d.key;
            if (!overridden) entries.push_back(d);
        }
        entries.insert(entries.end(), g.entries.begin(), g.entries.end());

        std::vector<std::size_t> pos(entries.size(), 0);
        for (;;) {
            SimRun run;
            run.scenario.name = g.name;
            for (std::size_t k = 0; k < entries.size(); ++k) {
                const Entry& e = entries[k];
                const std::string& v = e.values[pos[k]];
                apply(run, cfg.threads, e.key, v, e.line);
                if (e.values.size() > 1 && e.key != "method") run.scenario.name += "_" + e.key + "=" + label(v);
            }
            try {
                validate(run.scenario);
            } catch (const Error& ex) {
                throw ParseError(std::string("section [") + g.name + "]: " + ex.what());
            }
            if (run.b_replicates < 1) throw ParseError("section [" + g.name + "]: B must be at least 1");
            cfg.runs.push_back(std::move(run));

            bool done = true;
            for (std::size_t k = entries.size(); k-- > 0;) {
                if (++pos[k] < entries[k].values.size()) {
                    done = false;
                    break;
                }
                pos[k] = 0;
            }
            if (done) break;
        }
    }
    if (cfg.threads < 1) cfg.threads = 1;
    return cfg;
}

SimConfig parse_sim_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_sim_config(in);
}

SimConfig read_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_sim_config(in);
}

}  // namespace pvfsr
