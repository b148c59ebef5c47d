#pragma once

#include <map>
#include <optional>
#include <string>

#include "pvfsr/document.hpp"

namespace httplib {
class Server;
}

namespace pvfsr {

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Read-only view over one PathDocument. Safe to share across request threads.
class PathService {
public:
    /// `raw` is served verbatim by /api/path.
    PathService(PathDocument doc, std::string raw);
    static PathService from_file(const std::string& path);

    const PathDocument& document() const { return doc_; }

    Reply path() const;
    Reply fsr(const std::map<std::string, std::string>& query) const;
    nlohmann::json slice(Index lambda_index) const;

private:
    PathDocument doc_;
    std::string raw_;
};

/// GET /api/path, GET /api/fsr?lambda_index=i and GET / (files under
/// `static_dir`, or a short placeholder page when none is given).
void mount(httplib::Server& server, const PathService& service, const std::optional<std::string>& static_dir = std::nullopt);

}  // namespace pvfsr
