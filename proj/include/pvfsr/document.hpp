#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "pvfsr/fsr.hpp"
#include "pvfsr/simgen.hpp"

namespace pvfsr {

inline constexpr int kSchemaVersion = 1;

struct DocumentMetadata {
    std::string family;
    std::string response;
    std::string status;  ///< empty unless the family is cox
    Index n = 0;
    Index p = 0;
    std::vector<std::string> column_names;
    std::uint64_t seed = 0;
    int b_replicates = 0;
    bool use_permutation = true;
    std::string screening;
    std::vector<std::string> screened;  ///< names of the screened columns
    bool degraded = false;
    std::string path_status;
    std::vector<std::string> warnings;

    bool operator==(const DocumentMetadata&) const = default;
};

struct DocumentSelection {
    double alpha = 0.0;
    bool feasible = false;
    Index lambda_index = -1;
    double lambda = 0.0;
    std::vector<std::string> active_set;

    bool operator==(const DocumentSelection&) const = default;
};

/// Everything the explorer needs: the full-data path plus the FSR curve.
struct PathDocument {
    int schema_version = kSchemaVersion;
    DocumentMetadata metadata;
    std::vector<double> lambdas;
    std::vector<double> intercepts;
    std::vector<std::vector<double>> coefficients;   ///< m rows of p
    std::vector<Index> active_set_sizes;
    std::vector<double> fsr_mean;
    std::vector<std::vector<double>> fsr_per_replicate;  ///< B rows of m
    std::vector<DocumentSelection> selected;

    Index size() const { return static_cast<Index>(lambdas.size()); }
    bool operator==(const PathDocument&) const = default;
};

PathDocument make_path_document(const FsrCurve& curve, const DesignMatrix& x, const FsrConfig& cfg,
                                const std::string& response, const std::string& status = {});

nlohmann::json to_json(const PathDocument& doc);
/// Throws ParseError on a missing field, a wrong type or an unsupported schema version.
PathDocument path_document_from_json(const nlohmann::json& j);

std::string dump_path_document(const PathDocument& doc);
void write_path_document(const PathDocument& doc, const std::string& path);
PathDocument read_path_document(const std::string& path);

/// One summary row per result.
void write_sim_csv(const std::vector<SimResult>& results, std::ostream& out);
nlohmann::json sim_results_to_json(const std::vector<SimResult>& results);

}  // namespace pvfsr
