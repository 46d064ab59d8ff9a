#ifndef HOLOPNT_REPORT_HPP
#define HOLOPNT_REPORT_HPP

#include "holopnt/geometry.hpp"
#include "holopnt/holonomy.hpp"
#include "holopnt/pnt.hpp"

#include <json.hpp>

#include <string>

namespace holopnt::report {

using Json = nlohmann::ordered_json;

// Every emitted report embeds its manifest: tool version, input digest and
// the fully resolved configuration. The timestamp stays empty by default so
// identical runs emit byte-identical documents.
struct RunManifest {
    std::string tool_version;
    std::string model_digest;
    Json resolved_config;
    std::string timestamp;
};

RunManifest make_manifest(const std::string& model_document_bytes, Json resolved_config,
                          bool stamp);

Json manifest_json(const RunManifest& manifest);

// Self-describing document wrapper: schema, manifest, command, result.
Json wrap_document(const RunManifest& manifest, const std::string& command, Json result);

Json parameter_point_json(const ParameterPoint& point);
Json matrix_json(const CMatrix& m);
Json span_json(const geometry::LieSpanResult& span);
Json pnt_json(const pnt::PntReport& report);
Json holonomy_json(const holonomy::HolonomyResult& result);

// Flat export, one eigenspace row per line, in the column order
// label, eigenvalue, degeneracy, particles, dim_F, dim_Hol.
std::string pnt_table_csv(const pnt::PntReport& report);
std::string pnt_text(const pnt::PntReport& report);

}  // namespace holopnt::report

#endif
