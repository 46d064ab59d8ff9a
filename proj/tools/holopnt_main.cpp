// holopnt: geometric-phase structure and particle-number thresholds of
// parametrized second-quantized Hamiltonians.
//
// Subcommands: validate, spectrum, curvature, holonomy, pnt.
// Exit codes: 0 success, 2 input error, 3 numerical failure,
//             4 reliability failure in --strict mode.

#include "holopnt/geometry.hpp"
#include "holopnt/holonomy.hpp"
#include "holopnt/pnt.hpp"
#include "holopnt/report.hpp"
#include "holopnt/sha256.hpp"
#include "holopnt/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace holopnt;
using report::Json;

struct CommonArgs {
    std::string model_path;
    std::string params_text;
    std::string out_path;
    std::string format = "document";
    bool strict = false;
    bool stamp = false;
    std::uint64_t seed = 7041776;
    double step = 1e-3;
    double rank_tol = 1e-6;
    double cluster_tol = 1e-9;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + args.out_path);
    out << text;
}

ParameterPoint parse_params_arg(const std::string& text) {
    ParameterPoint p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("bad --params entry: " + item);
        try {
            p.set(item.substr(0, eq), std::stod(item.substr(eq + 1)));
        } catch (const std::exception&) {
            throw InputError("bad --params value in: " + item);
        }
    }
    return p;
}

// Deterministic default parameter point when --params is not given.
ParameterPoint default_point(const model::ModelSpec& spec, std::uint64_t seed) {
    pnt::ScanConfig cfg;
    cfg.seed = seed;
    cfg.random_samples = 1;
    return pnt::scan_sample_points(spec, cfg).front();
}

Json base_config(const CommonArgs& args) {
    Json j;
    j["seed"] = args.seed;
    j["step"] = args.step;
    j["rank_tol"] = args.rank_tol;
    j["cluster_tol"] = args.cluster_tol;
    j["strict"] = args.strict;
    j["format"] = args.format;
    return j;
}

int run_validate(const CommonArgs& args) {
    const std::string text = read_file(args.model_path);
    const model::ModelSpec spec = model::parse_model(text);
    Json result;
    result["ok"] = true;
    result["model"] = spec.name;
    result["bosons"] = spec.system.boson_modes;
    result["two_levels"] = spec.system.two_level_modes;
    result["number_conserving"] = spec.number_conserving();
    result["parameters"] = spec.parameter_names;
    const auto manifest = report::make_manifest(text, base_config(args), args.stamp);
    write_output(args, report::wrap_document(manifest, "validate", result).dump(2));
    return 0;
}

int run_spectrum(const CommonArgs& args, int layers, int cutoff) {
    const std::string text = read_file(args.model_path);
    model::ModelSpec spec = model::parse_model(text);
    const ParameterPoint params = args.params_text.empty()
                                      ? default_point(spec, args.seed)
                                      : parse_params_arg(args.params_text);
    Json result;
    result["params"] = report::parameter_point_json(params);
    if (cutoff > 0) spec.system.cutoff_per_boson_mode = cutoff;

    if (spec.number_conserving() && layers >= 0) {
        const auto families =
            spectral::family_across_layers(spec, params, layers, args.cluster_tol);
        Json rows = Json::array();
        for (const auto& fam : families) {
            Json row;
            row["label"] = fam.label;
            row["eigenvalue"] = fam.eigenvalue;
            row["degeneracy"] = fam.dimension();
            Json blocks = Json::array();
            for (const auto& b : fam.blocks) {
                Json bj;
                bj["particles"] = *b.particle_number;
                bj["dimension"] = b.dimension;
                bj["clustering_warning"] = b.clustering_warning;
                blocks.push_back(std::move(bj));
            }
            row["blocks"] = std::move(blocks);
            rows.push_back(std::move(row));
        }
        result["families"] = std::move(rows);
    } else {
        if (!spec.system.cutoff_per_boson_mode) {
            throw InputError("non-number-conserving models need --cutoff");
        }
        const fock::FockBasis basis = fock::enumerate_truncated(spec.system);
        const CMatrix h = model::hamiltonian_at(spec, params, basis);
        Json rows = Json::array();
        for (const auto& b : spectral::eigen_blocks(h, args.cluster_tol)) {
            Json row;
            row["eigenvalue"] = b.eigenvalue;
            row["degeneracy"] = b.dimension;
            row["clustering_warning"] = b.clustering_warning;
            rows.push_back(std::move(row));
        }
        result["blocks"] = std::move(rows);
    }
    Json cfg = base_config(args);
    cfg["layers"] = layers;
    cfg["cutoff"] = cutoff;
    const auto manifest = report::make_manifest(text, cfg, args.stamp);
    write_output(args, report::wrap_document(manifest, "spectrum", result).dump(2));
    return 0;
}

int run_curvature(const CommonArgs& args, int layer, int block_index, int order,
                  int extra_points) {
    const std::string text = read_file(args.model_path);
    const model::ModelSpec spec = model::parse_model(text);

    pnt::ScanConfig cfg;
    cfg.seed = args.seed;
    cfg.random_samples = extra_points;
    cfg.fd.step = args.step;
    cfg.rank.rank_tol = args.rank_tol;
    const auto samples = pnt::scan_sample_points(spec, cfg);

    fock::FockBasis basis = spec.number_conserving()
                                ? fock::enumerate_layer(spec.system, layer)
                                : fock::enumerate_truncated(spec.system);

    std::vector<geometry::BlockTarget> targets;
    if (spec.is_isospectral()) {
        const auto blocks = spectral::h0_blocks(spec, basis, args.cluster_tol);
        if (block_index < 0 || block_index >= static_cast<int>(blocks.size())) {
            throw InputError("--block out of range: " + std::to_string(blocks.size()) +
                             " blocks available");
        }
        targets.push_back(
            geometry::BlockTarget::isospectral(basis, blocks[block_index].frame));
    } else {
        const CMatrix h = model::hamiltonian_at(spec, samples.front(), basis);
        const auto blocks = spectral::eigen_blocks(h, args.cluster_tol);
        if (block_index < 0 || block_index >= static_cast<int>(blocks.size())) {
            throw InputError("--block out of range: " + std::to_string(blocks.size()) +
                             " blocks available");
        }
        targets.push_back(geometry::BlockTarget::transported(
            basis, blocks[block_index].eigenvalue, blocks[block_index].dimension));
    }

    geometry::HolonomyDimensionOptions opts;
    opts.max_order = order;
    opts.fd.step = args.step;
    opts.rank.rank_tol = args.rank_tol;
    opts.cluster_tol = args.cluster_tol == 1e-9 ? 1e-8 : args.cluster_tol;
    const auto span = geometry::holonomy_dimension(spec, targets, samples, opts);

    Json result = report::span_json(span);
    Json cfg_json = base_config(args);
    cfg_json["layer"] = layer;
    cfg_json["block"] = block_index;
    cfg_json["order"] = order;
    const auto manifest = report::make_manifest(text, cfg_json, args.stamp);
    write_output(args, report::wrap_document(manifest, "curvature", result).dump(2));
    return 0;
}

int run_holonomy(const CommonArgs& args, const std::string& loop_path,
                 const std::string& loop2_path, int layer, int block_index,
                 const std::string& method) {
    const std::string text = read_file(args.model_path);
    const model::ModelSpec spec = model::parse_model(text);
    const holonomy::ParameterLoop loop = holonomy::parse_loop(read_file(loop_path));

    const fock::FockBasis basis = spec.number_conserving()
                                      ? fock::enumerate_layer(spec.system, layer)
                                      : fock::enumerate_truncated(spec.system);
    const ParameterPoint& start = loop.waypoints.front();

    std::unique_ptr<spectral::FrameField> frames;
    double eigenvalue = 0.0;
    int dimension = 0;
    if (spec.is_isospectral()) {
        const auto blocks = spectral::h0_blocks(spec, basis, args.cluster_tol);
        if (block_index < 0 || block_index >= static_cast<int>(blocks.size())) {
            throw InputError("--block out of range");
        }
        frames = spectral::isospectral_frame(spec, basis, blocks[block_index].frame, start);
        eigenvalue = blocks[block_index].eigenvalue;
        dimension = blocks[block_index].dimension;
    } else {
        const CMatrix h = model::hamiltonian_at(spec, start, basis);
        const auto blocks = spectral::eigen_blocks(h, 1e-8);
        if (block_index < 0 || block_index >= static_cast<int>(blocks.size())) {
            throw InputError("--block out of range");
        }
        eigenvalue = blocks[block_index].eigenvalue;
        dimension = blocks[block_index].dimension;
        frames = spectral::local_frame(spec, basis, start, block_index, 1e-8);
    }

    holonomy::HolonomyOptions hopts;
    hopts.step = args.step;

    Json result;
    if (!loop2_path.empty()) {
        const holonomy::ParameterLoop loop2 = holonomy::parse_loop(read_file(loop2_path));
        const auto u1 = holonomy::holonomy_ordered_exp(*frames, loop, hopts);
        const auto u2 = holonomy::holonomy_ordered_exp(*frames, loop2, hopts);
        result["holonomy"] = report::holonomy_json(u1);
        result["holonomy2"] = report::holonomy_json(u2);
        result["commutator_defect"] = holonomy::commutator_defect(u1.unitary, u2.unitary);
    } else if (method == "ordered-exp") {
        result["holonomy"] = report::holonomy_json(holonomy::holonomy_ordered_exp(*frames, loop, hopts));
    } else if (method == "transport") {
        result["holonomy"] = report::holonomy_json(holonomy::holonomy_projector_transport(
            spec, basis, eigenvalue, dimension, loop, hopts));
    } else if (method == "both") {
        const auto a = holonomy::holonomy_ordered_exp(*frames, loop, hopts);
        const auto b = holonomy::holonomy_projector_transport(spec, basis, eigenvalue, dimension,
                                                              loop, hopts);
        result["holonomy"] = report::holonomy_json(a);
        result["holonomy_transport"] = report::holonomy_json(b);
        // Compare gauge-invariantly through eigenvalue multisets.
        Eigen::ComplexEigenSolver<CMatrix> ea(a.unitary), eb(b.unitary);
        std::vector<double> pa, pb;
        for (Eigen::Index i = 0; i < ea.eigenvalues().size(); ++i) {
            pa.push_back(std::arg(ea.eigenvalues()(i)));
            pb.push_back(std::arg(eb.eigenvalues()(i)));
        }
        std::sort(pa.begin(), pa.end());
        std::sort(pb.begin(), pb.end());
        double dev = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) dev = std::max(dev, std::abs(pa[i] - pb[i]));
        result["cross_method_phase_deviation"] = dev;
    } else {
        throw InputError("unknown --method '" + method + "'");
    }
    if (dimension == 1) {
        const Json& u = result["holonomy"]["unitary"];
        result["phase"] = std::atan2(double(u[0][0][1]), double(u[0][0][0]));
    }

    Json cfg = base_config(args);
    cfg["layer"] = layer;
    cfg["block"] = block_index;
    cfg["method"] = method;
    const auto manifest = report::make_manifest(text + read_file(loop_path), cfg, args.stamp);
    write_output(args, report::wrap_document(manifest, "holonomy", result).dump(2));
    return 0;
}

int run_pnt(const CommonArgs& args, int n_max, int k_max) {
    const std::string text = read_file(args.model_path);
    const model::ModelSpec spec = model::parse_model(text);

    pnt::ScanConfig cfg;
    cfg.n_max = n_max;
    cfg.k_max = k_max;
    cfg.seed = args.seed;
    cfg.fd.step = args.step;
    cfg.rank.rank_tol = args.rank_tol;
    cfg.cluster_tol = args.cluster_tol;

    const pnt::PntReport rep = pnt::pnt_scan(spec, cfg);

    bool unreliable = false;
    for (const auto& row : rep.rows) unreliable = unreliable || !row.warnings.empty();

    Json cfg_json = base_config(args);
    cfg_json["n_max"] = n_max;
    cfg_json["k_max"] = k_max;
    const auto manifest = report::make_manifest(text, cfg_json, args.stamp);

    if (args.format == "table") {
        write_output(args, report::pnt_table_csv(rep));
    } else if (args.format == "text") {
        write_output(args, report::pnt_text(rep));
    } else {
        write_output(args, report::wrap_document(manifest, "pnt", report::pnt_json(rep)).dump(2));
    }
    if (args.strict && unreliable) return 4;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holopnt " HOLOPNT_VERSION
                 ": non-Abelian geometric phases and particle-number thresholds"};
    app.require_subcommand(1);

    CommonArgs args;
    int layers = 2;
    int cutoff = 0;
    int block_index = 0;
    int order = 3;
    int extra_points = 3;
    int n_max = 4;
    std::string loop_path, loop2_path, method = "ordered-exp";

    auto add_common = [&](CLI::App* cmd, bool needs_model = true) {
        if (needs_model) {
            cmd->add_option("--model", args.model_path, "model document file")->required();
        }
        cmd->add_option("--out", args.out_path, "output file (default stdout)");
        cmd->add_option("--format", args.format, "document|table|text");
        cmd->add_option("--seed", args.seed, "random seed for sample points");
        cmd->add_option("--step", args.step, "finite-difference step");
        cmd->add_option("--rank-tol", args.rank_tol, "relative rank tolerance");
        cmd->add_option("--cluster-tol", args.cluster_tol, "eigenvalue cluster tolerance");
        cmd->add_flag("--strict", args.strict, "escalate reliability warnings to exit 4");
        cmd->add_flag("--stamp", args.stamp, "include a wall-clock timestamp in the manifest");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and check a model document");
    add_common(validate);

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues and degeneracy layout");
    add_common(spectrum);
    spectrum->add_option("--params", args.params_text, "comma-separated name=value bindings");
    spectrum->add_option("--N", layers, "scan layers 0..N (number-conserving models)");
    spectrum->add_option("--cutoff", cutoff, "truncated-basis cutoff override");

    CLI::App* curvature = app.add_subcommand("curvature", "curvature span rank of one eigenspace");
    add_common(curvature);
    curvature->add_option("--N", layers, "Fock layer (number-conserving models)");
    curvature->add_option("--block", block_index, "eigenspace block index (ascending energy)");
    curvature->add_option("--order", order, "covariant-derivative order cap");
    curvature->add_option("--points", extra_points, "extra random sample points");

    CLI::App* holonomy_cmd = app.add_subcommand("holonomy", "holonomy of a parameter loop");
    add_common(holonomy_cmd);
    holonomy_cmd->add_option("--loop", loop_path, "loop document file")->required();
    holonomy_cmd->add_option("--loop2", loop2_path, "second loop: report the commutator defect");
    holonomy_cmd->add_option("--N", layers, "Fock layer");
    holonomy_cmd->add_option("--block", block_index, "eigenspace block index");
    holonomy_cmd->add_option("--method", method, "ordered-exp|transport|both");

    CLI::App* pnt_cmd = app.add_subcommand("pnt", "particle-number-threshold scan");
    add_common(pnt_cmd);
    pnt_cmd->add_option("--N-max", n_max, "largest particle content scanned");
    pnt_cmd->add_option("--order", order, "covariant-derivative order cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(args);
        if (spectrum->parsed()) return run_spectrum(args, layers, cutoff);
        if (curvature->parsed()) return run_curvature(args, layers, block_index, order, extra_points);
        if (holonomy_cmd->parsed()) {
            return run_holonomy(args, loop_path, loop2_path, layers, block_index, method);
        }
        if (pnt_cmd->parsed()) return run_pnt(args, n_max, order);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
