#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pvfsr/config.hpp"
#include "pvfsr/document.hpp"
#include "pvfsr/errors.hpp"
#include "pvfsr/io.hpp"
#include "test_support.hpp"

using namespace pvfsr;
using pvfsr::testing::gaussian;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("pvfsr_test_" + name)).string();
}

PathDocument small_document() {
    const DesignMatrix x = make_design(gaussian(40, 5, 8), {"a", "b", "c", "d", "e"});
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(5);
    beta(1) = 1.0;
    const Response y = Response::continuous(x.values * beta + gaussian(40, 1, 9).col(0));
    FsrConfig cfg;
    cfg.b_replicates = 3;
    cfg.lambda_count = 12;
    cfg.cv_folds = 5;
    cfg.alpha_targets = {0.1, 0.3};
    const FsrCurve c = estimate_fsr(x, y, cfg);
    return make_path_document(c, x, cfg, "y");
}

}  // namespace

TEST_CASE("csv: plain, quoted and multi-line fields") {
    const CsvTable t = parse_csv_string("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n2,\"two\nlines\",3\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x, y");
    CHECK(t.rows[0][2] == "say \"hi\"");
    CHECK(t.rows[1][1] == "two\nlines");
    CHECK(t.row_lines == std::vector<std::size_t>{2, 3});
}

TEST_CASE("csv: no trailing newline, blank lines and empty fields") {
    const CsvTable t = parse_csv_string("a,b\n\n1,\n,2");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1].empty());
    CHECK(t.rows[1][0].empty());
    CHECK(t.row_lines[1] == 4);
}

TEST_CASE("csv: malformed input reports the line") {
    try {
        parse_csv_string("a,b\n1,2\n3,4,5\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_csv_string("a,b\n1,\"open\n"), ParseError);
    CHECK_THROWS_AS(parse_csv_string("a,b\n1,x\"y\n"), ParseError);
    CHECK_THROWS_AS(parse_csv_string("a,b\n1,\"q\"z\n"), ParseError);
    CHECK_THROWS_AS(parse_csv_string(""), ParseError);
    CHECK_THROWS_AS(parse_csv_string("a,,c\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(read_csv_file(temp_path("does_not_exist.csv")), ParseError);
}

TEST_CASE("dataset loading picks predictors and names the offending cell") {
    const CsvTable t = parse_csv_string("x1,y,x2\n1,0.5,2\n2,1.5,1\n3,0.1,5\n");
    const Dataset d = load_dataset(t, Family::linear, "y");
    CHECK(d.x.column_names == std::vector<std::string>{"x1", "x2"});
    CHECK(d.x.values(2, 1) == 5.0);
    CHECK(d.y.y(1) == 1.5);

    const CsvTable bad = parse_csv_string("x1,y\n1,2\nabc,3\n");
    try {
        load_dataset(bad, Family::linear, "y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("'x1'") != std::string::npos);
    }
    CHECK_THROWS_AS(load_dataset(t, Family::linear, "z"), ParseError);
    CHECK_THROWS_AS(load_dataset(t, Family::logistic, "y"), ParseError);
    CHECK_THROWS_AS(load_dataset(t, Family::cox, "y"), ParseError);
    CHECK_THROWS_AS(load_dataset(parse_csv_string("x,y\n1,2\n,3\n"), Family::linear, "y"), ParseError);
}

TEST_CASE("dataset loading for survival data") {
    const CsvTable t = parse_csv_string("time,event,x\n5,1,0.1\n3,0,0.4\n8,1,-1\n2,1,0.3\n");
    const Dataset d = load_dataset(t, Family::cox, "time", std::string("event"));
    CHECK(d.x.p() == 1);
    CHECK(d.y.delta.sum() == 3.0);
    CHECK(d.status_column == "event");
    CHECK_THROWS_AS(load_dataset(parse_csv_string("time,event,x\n5,2,0.1\n3,0,0.4\n"), Family::cox, "time",
                                 std::string("event")),
                    ParseError);
}

TEST_CASE("path document arrays are consistent and start at the null model") {
    const PathDocument d = small_document();
    CHECK(d.schema_version == 1);
    CHECK(d.coefficients.size() == d.lambdas.size());
    CHECK(d.fsr_mean.size() == d.lambdas.size());
    CHECK(d.fsr_per_replicate.size() == 3);
    CHECK(d.active_set_sizes.front() == 0);
    CHECK(d.fsr_mean.front() == 0.0);
    for (double c : d.coefficients.front()) CHECK(c == 0.0);
    REQUIRE(d.selected.size() == 2);
    CHECK(d.metadata.column_names.size() == 5);
}

TEST_CASE("path document round-trips through JSON and files") {
    const PathDocument d = small_document();
    const PathDocument back = path_document_from_json(nlohmann::json::parse(dump_path_document(d)));
    CHECK(back == d);
    const std::string path = temp_path("doc.json");
    write_path_document(d, path);
    CHECK(read_path_document(path) == d);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == dump_path_document(read_path_document(path)));
    std::remove(path.c_str());
}

TEST_CASE("malformed path documents are rejected") {
    nlohmann::json j = to_json(small_document());
    nlohmann::json v = j;
    v["schema_version"] = 2;
    CHECK_THROWS_AS(path_document_from_json(v), ParseError);
    nlohmann::json missing = j;
    missing.erase("lambdas");
    CHECK_THROWS_AS(path_document_from_json(missing), ParseError);
    nlohmann::json shorter = j;
    shorter["lambdas"].erase(0);
    CHECK_THROWS_AS(path_document_from_json(shorter), ParseError);
    nlohmann::json typed = j;
    typed["metadata"]["n"] = "forty";
    CHECK_THROWS_AS(path_document_from_json(typed), ParseError);
}

TEST_CASE("config: lists expand to a grid and sections override defaults") {
    const SimConfig c = parse_sim_config_string(R"(
# shared settings
n = 200
rho = 0.5
method = [pseudo1, pseudo2]
B = 10

[factor1]
p = [30, 70, 110]

[null]
s = 0
family = "linear"   # comment after a value
beta_draws = 2
)");
    REQUIRE(c.runs.size() == 3 * 2 + 2);
    CHECK(c.runs[0].scenario.name == "factor1_p=30");
    // Defaults come first and the last list varies fastest.
    CHECK(c.runs[0].method == SimMethod::pseudo1);
    CHECK(c.runs[1].scenario.p == 70);
    CHECK(c.runs[2].scenario.p == 110);
    CHECK(c.runs[3].method == SimMethod::pseudo2);
    CHECK(c.runs[3].scenario.p == 30);
    for (const SimRun& r : c.runs) {
        CHECK(r.scenario.n == 200);
        CHECK(r.b_replicates == 10);
    }
    CHECK(c.runs[6].scenario.name == "null");
    CHECK(c.runs[6].scenario.sparsity == 0);
    CHECK(c.runs[6].scenario.n_beta_draws == 2);
}

TEST_CASE("config: errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse_sim_config_string(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -100L;
    };
    CHECK(line_of("n = 10\np = abc\n") == 2);
    CHECK(line_of("n = 10\nbogus = 1\n") == 2);
    CHECK(line_of("\n\nn 10\n") == 3);
    CHECK(line_of("n = 50\nn = 60\n") == 2);
    CHECK(line_of("[bad name]\n") == 1);
    CHECK(line_of("p = [1, 2\n") == 1);
    CHECK(line_of("family = poisson\n") == 1);
    CHECK_THROWS_AS(parse_sim_config_string("s = 80\np = 50\n"), ParseError);
    CHECK_THROWS_AS(read_sim_config(temp_path("missing.cfg")), ParseError);
}

TEST_CASE("simulation summaries: one CSV row per result") {
    SimResult r;
    r.scenario.name = "x";
    r.per_replicate.resize(2);
    r.per_replicate[0].fsr = 0.5;
    aggregate(r);
    std::ostringstream out;
    write_sim_csv({r, r}, out);
    const CsvTable t = parse_csv_string(out.str());
    CHECK(t.rows.size() == 2);
    CHECK(t.header.front() == "scenario");
    const auto col = std::find(t.header.begin(), t.header.end(), "mean_fsr") - t.header.begin();
    CHECK(std::stod(t.rows[0][static_cast<std::size_t>(col)]) == doctest::Approx(0.25));
    const nlohmann::json j = sim_results_to_json({r});
    CHECK(j[0]["per_replicate"].size() == 2);
}
