#include "holopnt/report.hpp"

#include "holopnt/sha256.hpp"
#include "holopnt/version.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

namespace holopnt::report {

RunManifest make_manifest(const std::string& model_document_bytes, Json resolved_config,
                          bool stamp) {
    RunManifest m;
    m.tool_version = HOLOPNT_VERSION;
    m.model_digest = sha256_hex(model_document_bytes);
    m.resolved_config = std::move(resolved_config);
    if (stamp) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::ostringstream out;
        out << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
        m.timestamp = out.str();
    }
    return m;
}

Json manifest_json(const RunManifest& manifest) {
    Json j;
    j["tool_version"] = manifest.tool_version;
    j["model_digest"] = manifest.model_digest;
    j["config"] = manifest.resolved_config;
    j["timestamp"] = manifest.timestamp;
    return j;
}

Json wrap_document(const RunManifest& manifest, const std::string& command, Json result) {
    Json j;
    j["schema"] = HOLOPNT_REPORT_SCHEMA;
    j["command"] = command;
    j["manifest"] = manifest_json(manifest);
    j["result"] = std::move(result);
    return j;
}

Json parameter_point_json(const ParameterPoint& point) {
    Json j = Json::object();
    for (const auto& [k, v] : point.values()) j[k] = v;
    return j;
}

Json matrix_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json span_json(const geometry::LieSpanResult& span) {
    Json j;
    j["rank"] = span.rank;
    j["matrices_considered"] = span.matrices_considered;
    j["rank_by_order"] = span.rank_by_order;
    j["stagnation_order"] = span.stagnation_order;
    j["abelian"] = span.abelian;
    j["singular_values"] = span.singular_values;
    Json pts = Json::array();
    for (const auto& p : span.sample_points) pts.push_back(parameter_point_json(p));
    j["sample_points"] = std::move(pts);
    return j;
}

Json pnt_json(const pnt::PntReport& report) {
    Json j;
    j["n_t"] = report.n_t;
    j["argmax_label"] = report.argmax_label;
    j["n_max"] = report.n_max;
    j["k_max"] = report.k_max;
    j["seed"] = report.seed;
    j["attainment"] = report.attainment;
    j["base_point"] = parameter_point_json(report.base_point);
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        Json row;
        row["label"] = r.label;
        row["eigenvalue"] = r.eigenvalue;
        row["degeneracy"] = r.degeneracy;
        row["particles_needed"] = r.particles_needed;
        row["dim_curvature"] = r.dim_curvature;
        row["dim_holonomy"] = r.dim_holonomy;
        row["stagnation_order"] = r.stagnation_order;
        row["abelian"] = r.abelian;
        row["capability"] = r.capability;
        row["warnings"] = r.warnings;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["notes"] = report.notes;
    return j;
}

Json holonomy_json(const holonomy::HolonomyResult& result) {
    Json j;
    switch (result.method) {
        case holonomy::HolonomyResult::Method::ordered_exponential:
            j["method"] = "ordered-exponential";
            break;
        case holonomy::HolonomyResult::Method::projector_transport:
            j["method"] = "projector-transport";
            break;
        case holonomy::HolonomyResult::Method::adiabatic: j["method"] = "adiabatic"; break;
    }
    j["unitary"] = matrix_json(result.unitary);
    j["discretization_estimate"] = result.discretization_estimate;
    j["segments_used"] = result.segments_used;
    j["unitarity_defect"] = unitarity_defect(result.unitary);
    return j;
}

std::string pnt_table_csv(const pnt::PntReport& report) {
    std::ostringstream out;
    out << "label,eigenvalue,degeneracy,particles,dim_F,dim_Hol\n";
    for (const auto& r : report.rows) {
        out << r.label << ',' << r.eigenvalue << ',' << r.degeneracy << ',' << r.particles_needed
            << ',' << r.dim_curvature << ',' << r.dim_holonomy << '\n';
    }
    return out.str();
}

std::string pnt_text(const pnt::PntReport& report) {
    std::ostringstream out;
    out << "N_t = " << report.n_t << "  (argmax eigenspace label " << report.argmax_label
        << ", certified up to N_max = " << report.n_max << ")\n";
    out << "D(n): ";
    for (std::size_t n = 0; n < report.attainment.size(); ++n) {
        out << (n ? " " : "") << "D(" << n << ")=" << report.attainment[n];
    }
    out << "\n\n";
    out << "  l    eps      d    <=N   dimF   dimHol  abelian\n";
    for (const auto& r : report.rows) {
        out << std::setw(3) << r.label << std::setw(8) << r.eigenvalue << std::setw(6)
            << r.degeneracy << std::setw(6) << r.particles_needed << std::setw(7)
            << r.dim_curvature << std::setw(8) << r.dim_holonomy << std::setw(9)
            << (r.abelian ? "yes" : "no") << '\n';
        for (const auto& w : r.warnings) out << "      warning: " << w << '\n';
    }
    for (const auto& n : report.notes) out << "note: " << n << '\n';
    return out.str();
}

}  // namespace holopnt::report
