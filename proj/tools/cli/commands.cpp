#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include <Eigen/Core>

#include "run.hpp"
#include "speclab/damping.hpp"
#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"
#include "speclab/perturbation.hpp"
#include "speclab/schrodinger.hpp"
#include "speclab/spectral_props.hpp"

namespace speclab::cli {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = 3.14159265358979323846;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    require(!s.empty() && end == s.c_str() + s.size() && std::isfinite(v), ErrorCode::config,
            "not a number: '" + s + "'");
    return v;
}

spectral::FemOptions fem_options(const RunConfig& cfg) {
    spectral::FemOptions o;
    o.max_iters = cfg.max_iters;
    o.residual_tol = cfg.residual_tol;
    o.gap_tol = cfg.gap_tol;
    o.seed = static_cast<unsigned>(cfg.seed);
    return o;
}

struct SystemBundle {
    DomainHandle dom;
    std::optional<geom::MeshedDomain> mesh;
    spectral::EigenSystem sys;
    std::string backend;
};

SystemBundle build_system(const RunConfig& cfg, int n) {
    SystemBundle b;
    b.dom = parse_domain(cfg.domain);
    if (b.dom.is_orthotope && !cfg.fem) {
        b.sys = spectral::orthotope_spectrum(b.dom.spec.ortho, n);
        b.backend = "closed-form";
    } else {
        b.mesh = geom::mesh_domain(b.dom.spec, cfg.h);
        b.sys = spectral::fem_spectrum(*b.mesh, n, fem_options(cfg));
        b.backend = "fem";
    }
    return b;
}

geom::VectorField2D parse_vfield(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    if (kind == "squash") {
        double rho = 4.0;
        if (colon != std::string::npos) rho = parse_number(text.substr(colon + 1));
        require(rho > 0.0, ErrorCode::config, "squash radius must be positive");
        return geom::squashing_field(rho);
    }
    fail(ErrorCode::config, "unknown field spec: '" + text + "' (try squash[:rho])");
}

spectral::ScalarField parse_field(const std::string& text, int dim) {
    if (text.size() == 2 && text[0] == 'x' && text[1] >= '1' && text[1] <= '9') {
        const int axis = text[1] - '1';
        require(axis < dim, ErrorCode::config,
                "field " + text + " needs a domain with at least " +
                    std::to_string(axis + 1) + " dimensions");
        return spectral::coordinate_field(axis, dim);
    }
    if (text.rfind("const:", 0) == 0)
        return spectral::constant_field(parse_number(text.substr(6)));
    if (!text.empty() && text[0] == '@') {
        const std::string path = text.substr(1);
        std::ifstream in(path);
        require(in.good(), ErrorCode::config, "cannot open field table: " + path);
        ordered_json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::config, "field table is not valid JSON: " + std::string(e.what()));
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (type == "poly") {
                std::vector<spectral::ScalarField::Term> terms;
                for (const auto& t : j.at("terms"))
                    terms.push_back({t.at("c").get<double>(),
                                     t.at("powers").get<std::vector<int>>()});
                return spectral::poly_field(std::move(terms), "table:" + path);
            }
            if (type == "cells")
                return spectral::cellwise_field(j.at("values").get<std::vector<double>>(),
                                                "table:" + path);
            fail(ErrorCode::config, "field table type must be poly or cells");
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::config, "malformed field table: " + std::string(e.what()));
        }
    }
    fail(ErrorCode::config,
         "unknown field spec: '" + text + "' (try x1, const:c, or @table.json)");
}

ordered_json to_json(const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
}

ordered_json to_json(const std::vector<int>& v) {
    ordered_json a = ordered_json::array();
    for (int x : v) a.push_back(x);
    return a;
}

ordered_json report_json(const spectral::PropertyReport& r) {
    ordered_json j;
    j["property"] = r.property;
    j["n"] = r.n;
    j["verdict"] = spectral::verdict_name(r.verdict);
    j["witness"] = r.witness;
    j["tolerance"] = r.tolerance;
    j["exact"] = r.exact;
    if (r.property == "simplicity") {
        j["min_gap"] = r.min_gap;
        j["gap_index"] = r.gap_index;
    }
    if (r.property == "squared_independence") {
        j["best_det"] = r.best_det;
        j["det_tol"] = r.det_tol;
        j["seed"] = r.seed;
        j["trials"] = r.trials;
        ordered_json pts = ordered_json::array();
        for (const auto& p : r.points) pts.push_back(to_json(p));
        j["points"] = pts;
    }
    if (r.property == "nonresonance") {
        j["height"] = r.height;
        ordered_json rel = ordered_json::array();
        for (const auto& q : r.relations) {
            ordered_json e;
            ordered_json qv = ordered_json::array();
            for (std::int64_t c : q.q) qv.push_back(c);
            e["q"] = qv;
            e["residual"] = q.residual;
            e["height"] = q.height;
            e["exact_zero"] = q.exact_zero;
            e["verified"] = q.verified;
            rel.push_back(e);
        }
        j["relations"] = rel;
    }
    return j;
}

ordered_json check_json(const spectral::DerivativeCheck& c) {
    ordered_json j;
    j["formula"] = c.formula;
    j["fd_slope"] = c.fd_slope;
    j["rel_error"] = c.rel_error;
    return j;
}

// --- run context: artifact bookkeeping shared by all commands ---

struct Run {
    const RunConfig& cfg;
    int threads;
    std::vector<std::string> artifacts;

    ordered_json preamble() const {
        ordered_json j;
        j["command"] = cfg.command;
        j["seed"] = cfg.seed;
        j["threads"] = threads;
        if (!cfg.no_timestamp) j["timestamp"] = utc_timestamp();
        return j;
    }

    void write(const std::string& name, const ordered_json& doc) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        write_atomic(path, dump_json(doc));
        artifacts.push_back(path.string());
    }

    void write_csv(const std::string& name, const std::string& body) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        write_atomic(path, body);
        artifacts.push_back(path.string());
    }

    ordered_json summary(std::initializer_list<std::pair<const char*, ordered_json>> kv) const {
        ordered_json j = preamble();
        j["status"] = "ok";
        for (const auto& [k, v] : kv) j[k] = v;
        ordered_json a = ordered_json::array();
        for (const auto& p : artifacts) a.push_back(p);
        j["artifacts"] = a;
        return j;
    }
};

// --- commands ---

ordered_json cmd_spectrum(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, cfg.n);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["n"] = cfg.n;
    doc["lambdas"] = to_json(b.sys.lambdas);
    ordered_json nd = ordered_json::array();
    for (char c : b.sys.near_degenerate) nd.push_back(c != 0);
    doc["near_degenerate"] = nd;
    doc["gap_tol"] = b.sys.gap_tol;

    if (const auto* ob = b.sys.orthotope()) {
        ordered_json modes = ordered_json::array();
        for (const auto& m : ob->modes) {
            ordered_json e;
            e["K"] = to_json(m.K);
            e["lambda"] = m.lambda;
            if (const auto s = spectral::exact_lambda(ob->domain, m.K)) {
                ordered_json ex;
                ex["a"] = s->a;
                ex["b"] = s->b;
                ex["D"] = s->D;
                e["exact"] = ex;
            }
            modes.push_back(e);
        }
        doc["modes"] = modes;
    } else {
        doc["h"] = cfg.h;
        doc["residuals"] = to_json(b.sys.mesh()->residuals);
        doc["cells"] = b.sys.mesh()->mesh.num_cells();
    }
    run.write("spectrum.json", doc);

    return run.summary({{"backend", b.backend},
                        {"lambda_1", b.sys.lambdas.front()},
                        {"lambda_n", b.sys.lambdas.back()}});
}

ordered_json cmd_converge(Run& run) {
    const RunConfig& cfg = run.cfg;
    const DomainHandle dom = parse_domain(cfg.domain);
    std::vector<double> hs;
    for (const auto& part : split(cfg.h_list, ',')) hs.push_back(parse_number(part));

    const auto table = spectral::convergence_study(dom.spec, hs, cfg.n);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = dom.spec.describe();
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
        ordered_json e;
        e["h"] = r.h;
        e["lambda_err"] = to_json(r.lambda_err);
        e["sup_err"] = to_json(r.sup_err);
        rows.push_back(e);
    }
    doc["rows"] = rows;
    doc["lambda_order"] = to_json(table.lambda_order);
    run.write("converge.json", doc);

    std::string csv = "h";
    for (int k = 1; k <= cfg.n; ++k) csv += ",lambda_err_" + std::to_string(k);
    for (int k = 1; k <= cfg.n; ++k) csv += ",sup_err_" + std::to_string(k);
    csv += "\n";
    for (const auto& r : table.rows) {
        csv += fmt17(r.h);
        for (double e : r.lambda_err) csv += "," + fmt17(e);
        for (double e : r.sup_err) csv += "," + fmt17(e);
        csv += "\n";
    }
    run.write_csv("converge.csv", csv);

    return run.summary({{"lambda_order", to_json(table.lambda_order)}});
}

ordered_json cmd_deform(Run& run) {
    const RunConfig& cfg = run.cfg;
    const DomainHandle dom = parse_domain(cfg.domain);
    const geom::MeshedDomain before = geom::mesh_domain(dom.spec, cfg.h);
    const geom::VectorField2D field = parse_vfield(cfg.field);
    const geom::MeshedDomain after = geom::flow_deform(before, field, cfg.t_final);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = dom.spec.describe();
    doc["field"] = field.descriptor;
    doc["t_final"] = cfg.t_final;
    doc["vertices"] = after.num_vertices();
    doc["cells"] = after.num_cells();
    doc["area_before"] = before.total_area();
    doc["area_after"] = after.total_area();
    double min_area = after.cell_area.empty() ? 0.0 : after.cell_area.front();
    for (double a : after.cell_area) min_area = std::min(min_area, a);
    doc["min_cell_area"] = min_area;
    run.write("deform.json", doc);

    ordered_json meshdoc = run.preamble();
    ordered_json verts = ordered_json::array();
    for (const auto& v : after.vertices) verts.push_back(to_json(std::vector<double>{v.x, v.y}));
    meshdoc["vertices"] = verts;
    ordered_json tris = ordered_json::array();
    for (const auto& t : after.triangles) tris.push_back(to_json(std::vector<int>{t[0], t[1], t[2]}));
    meshdoc["triangles"] = tris;
    run.write("deform-mesh.json", meshdoc);

    return run.summary({{"cells", after.num_cells()}, {"area_after", after.total_area()}});
}

geom::DeformationPath parse_path(const RunConfig& cfg, const DomainHandle& dom) {
    const auto colon = cfg.path.find(':');
    const std::string kind = colon == std::string::npos ? cfg.path : cfg.path.substr(0, colon);
    if (kind == "rect-mu2") {
        // rectangle side family mu2(t) = a + b*t over [0, t_final]; the end
        // mesh reuses the start connectivity so the path is an interpolation
        const auto ab = split(cfg.path.substr(colon + 1), ',');
        require(colon != std::string::npos && ab.size() == 2, ErrorCode::config,
                "rect-mu2 path looks like rect-mu2:a,b");
        const double a = parse_number(ab[0]), b = parse_number(ab[1]);
        require(a > 0.0 && a + b * cfg.t_final > 0.0, ErrorCode::config,
                "rect-mu2 side must stay positive over the path");
        require(dom.is_orthotope && dom.spec.ortho.dim() == 2, ErrorCode::config,
                "rect-mu2 needs a 2D orthotope domain (mu1 is taken from it)");
        const double mu1 = dom.spec.ortho.mu[0];
        geom::MeshedDomain m0 = geom::mesh_rectangle(mu1 * kPi, a * kPi, cfg.h);
        geom::MeshedDomain m1 = m0;
        const double scale = (a + b * cfg.t_final) / a;
        for (auto& v : m1.vertices) v.y *= scale;
        m1.rebuild_metrics();
        auto path = geom::interpolation_path(m0, m1, cfg.steps);
        for (double& t : path.t_grid) t *= cfg.t_final;
        path.generator = "rect-mu2(" + fmt17(a) + " + " + fmt17(b) + "*t)";
        return path;
    }
    if (kind == "flow-squash") {
        double rho = 4.0;
        if (colon != std::string::npos) rho = parse_number(cfg.path.substr(colon + 1));
        require(rho > 0.0, ErrorCode::config, "squash radius must be positive");
        const geom::MeshedDomain m = geom::mesh_domain(dom.spec, cfg.h);
        return geom::flow_path(m, geom::squashing_field(rho), cfg.t_final, cfg.steps);
    }
    fail(ErrorCode::config,
         "unknown path spec: '" + cfg.path + "' (try rect-mu2:a,b or flow-squash[:rho])");
}

ordered_json cmd_track(Run& run) {
    const RunConfig& cfg = run.cfg;
    const DomainHandle dom = parse_domain(cfg.domain);
    const geom::DeformationPath path = parse_path(cfg, dom);

    spectral::TrackOptions opts;
    opts.fem = fem_options(cfg);
    opts.crossing_tol = cfg.crossing_tol;
    const spectral::EigenPath ep = spectral::track_path(path, cfg.n, opts);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = dom.spec.describe();
    doc["generator"] = path.generator;
    doc["t_grid"] = to_json(ep.t_grid);
    ordered_json curves = ordered_json::array();
    for (const auto& c : ep.curves) curves.push_back(to_json(c));
    doc["curves"] = curves;
    ordered_json pairing = ordered_json::array();
    for (const auto& p : ep.pairing) pairing.push_back(to_json(p));
    doc["pairing"] = pairing;
    ordered_json crossings = ordered_json::array();
    for (const auto& ev : ep.crossings) {
        ordered_json e;
        e["t_lo"] = ev.t_lo;
        e["t_hi"] = ev.t_hi;
        e["mode_a"] = ev.mode_a;
        e["mode_b"] = ev.mode_b;
        e["min_gap"] = ev.min_gap;
        crossings.push_back(e);
    }
    doc["crossings"] = crossings;
    run.write("track.json", doc);

    std::string csv = "t";
    for (int k = 1; k <= ep.n(); ++k) csv += ",lambda_" + std::to_string(k);
    csv += "\n";
    for (int s = 0; s < ep.steps(); ++s) {
        csv += fmt17(ep.t_grid[static_cast<std::size_t>(s)]);
        for (int k = 0; k < ep.n(); ++k)
            csv += "," + fmt17(ep.curves[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)]);
        csv += "\n";
    }
    run.write_csv("track.csv", csv);

    return run.summary({{"steps", ep.steps()}, {"crossings", static_cast<int>(ep.crossings.size())}});
}

ordered_json cmd_check(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, cfg.n);

    spectral::PropertyReport rep;
    ordered_json extra = ordered_json::object();
    if (cfg.command == "check-simplicity") {
        rep = spectral::check_simplicity(b.sys, cfg.gap_tol);
    } else if (cfg.command == "check-independence") {
        rep = spectral::squared_independence_search(b.sys, cfg.trials, cfg.seed);
        const auto gram = spectral::squared_gram(b.sys);
        extra["gram_min_eigenvalue"] = gram.min_eigenvalue;
        extra["gram_tolerance"] = gram.tolerance;
    } else {
        rep = spectral::nonresonance_search(b.sys, cfg.n, cfg.height);
    }

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["lambdas"] = to_json(b.sys.lambdas);
    doc["report"] = report_json(rep);
    for (const auto& [k, v] : extra.items()) doc[k] = v;
    run.write(cfg.command + ".json", doc);

    return run.summary({{"verdict", spectral::verdict_name(rep.verdict)},
                        {"witness", rep.witness}});
}

ordered_json cmd_shape_derivative(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, std::max(cfg.n, cfg.mode));

    double value = 0.0;
    spectral::DerivativeCheck check;
    std::string pert_desc;
    if (b.backend == "closed-form") {
        const auto& ortho = b.dom.spec.ortho;
        const auto pert = spectral::orthotope_face(cfg.face_dim, cfg.face_side, cfg.speed);
        pert_desc = pert.descriptor;
        value = spectral::hadamard_derivative(b.sys, pert, cfg.mode);
        check = spectral::fd_shape_check(ortho, cfg.face_dim, cfg.face_side, cfg.speed,
                                         cfg.mode, cfg.dt);
    } else {
        const geom::VectorField2D field = parse_vfield(cfg.field);
        const auto pert = spectral::mesh_boundary_field(*b.mesh, field);
        pert_desc = pert.descriptor;
        value = spectral::hadamard_derivative(b.sys, pert, cfg.mode);
        check = spectral::fd_shape_check(*b.mesh, field, cfg.mode, cfg.dt, fem_options(cfg));
    }

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["perturbation"] = pert_desc;
    doc["mode"] = cfg.mode;
    doc["derivative"] = value;
    doc["fd_check"] = check_json(check);
    run.write("shape-derivative.json", doc);

    return run.summary({{"derivative", value}, {"fd_rel_error", check.rel_error}});
}

ordered_json cmd_potential_derivative(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, std::max(cfg.n, cfg.mode));
    const int dim = b.dom.is_orthotope ? b.dom.spec.ortho.dim() : 2;
    const spectral::ScalarField V = parse_field(cfg.potential, dim);

    const double value = spectral::potential_derivative(b.sys, V, cfg.mode);
    spectral::DerivativeCheck check;
    if (b.dom.is_orthotope && dim == 1) {
        check = spectral::fd_potential_check(b.dom.spec.ortho.side(0), V, cfg.mode, cfg.dt);
    } else {
        const geom::MeshedDomain& m =
            b.mesh ? *b.mesh : geom::mesh_domain(b.dom.spec, cfg.h);
        check = spectral::fd_potential_check(m, V, cfg.mode, cfg.dt, fem_options(cfg));
    }

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["potential"] = V.descriptor;
    doc["mode"] = cfg.mode;
    doc["derivative"] = value;
    doc["fd_check"] = check_json(check);
    run.write("potential-derivative.json", doc);

    return run.summary({{"derivative", value}, {"fd_rel_error", check.rel_error}});
}

ordered_json density_json(const spectral::DampingDensity& d) {
    ordered_json j;
    j["cells"] = d.cells.count();
    j["budget"] = d.budget;
    j["values"] = to_json(d.a);
    return j;
}

ordered_json cmd_optimize_damping(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, std::max(cfg.n, cfg.modes));
    const auto sol = spectral::optimize_relaxed(b.sys, cfg.ell, cfg.modes);
    const auto bb = spectral::bang_bang_report(sol);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["ell"] = cfg.ell;
    doc["modes"] = cfg.modes;
    doc["j_value"] = sol.j_value;
    doc["duality_gap"] = sol.duality_gap;
    doc["lp_iterations"] = sol.lp_iterations;
    doc["active"] = to_json(sol.active);
    doc["alpha"] = to_json(sol.alpha);
    doc["level"] = sol.level;
    doc["intermediate_measure"] = sol.intermediate_measure;
    ordered_json bbj;
    bbj["intermediate_area"] = bb.intermediate_area;
    bbj["residual"] = bb.residual;
    doc["bang_bang"] = bbj;
    doc["cells"] = sol.density.cells.count();
    run.write("optimize-damping.json", doc);

    ordered_json dj = run.preamble();
    const ordered_json body = density_json(sol.density);
    for (const auto& [k, v] : body.items()) dj[k] = v;
    run.write("density.json", dj);

    if (!cfg.sweep.empty()) {
        const auto parts = split(cfg.sweep, ',');
        require(parts.size() == 3, ErrorCode::config, "sweep looks like lo,hi,count");
        const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
        const int count = static_cast<int>(parse_number(parts[2]));
        require(lo > 0.0 && hi > lo && count >= 2 && count <= 200, ErrorCode::config,
                "sweep needs 0 < lo < hi and 2 <= count <= 200");
        std::string csv = "ell,j_value\n";
        for (int i = 0; i < count; ++i) {
            const double ell = lo + (hi - lo) * i / (count - 1);
            const auto s = spectral::optimize_relaxed(b.sys, ell, cfg.modes);
            csv += fmt17(ell) + "," + fmt17(s.j_value) + "\n";
        }
        run.write_csv("sweep.csv", csv);
    }

    return run.summary({{"j_value", sol.j_value}, {"duality_gap", sol.duality_gap}});
}

spectral::DampingDensity parse_density(const RunConfig& cfg, const spectral::EigenSystem& sys,
                                       std::string& source) {
    const auto cells = spectral::default_cells(sys);
    if (cfg.density == "uniform") {
        source = "uniform(ell=" + fmt17(cfg.ell) + ")";
        return spectral::uniform_density(cells, cfg.ell);
    }
    if (cfg.density == "full") {
        source = "full";
        return spectral::uniform_density(cells, cells.total_area());
    }
    if (!cfg.density.empty() && cfg.density[0] == '@') {
        const std::string path = cfg.density.substr(1);
        std::ifstream in(path);
        require(in.good(), ErrorCode::config, "cannot open density file: " + path);
        ordered_json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::config, "density file is not valid JSON: " + std::string(e.what()));
        }
        std::vector<double> values;
        double budget = -1.0;
        try {
            values = j.at("values").get<std::vector<double>>();
            if (j.contains("budget")) budget = j.at("budget").get<double>();
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::config, "malformed density file: " + std::string(e.what()));
        }
        auto d = spectral::density_from_values(cells, std::move(values));
        if (budget >= 0.0)
            require(std::abs(budget - d.budget) <= 1e-9 * (1.0 + cells.total_area()),
                    ErrorCode::config, "density file budget disagrees with its values");
        source = "table:" + path;
        return d;
    }
    fail(ErrorCode::config, "unknown density spec: '" + cfg.density +
                                "' (try uniform, full, or @cells.json)");
}

ordered_json cmd_decay_rate(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, std::max(cfg.n, cfg.pencil_modes));
    std::string source;
    const auto density = parse_density(cfg, b.sys, source);
    const double rate = spectral::modal_decay_rate(b.sys, density, cfg.k_damp, cfg.pencil_modes);

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;
    doc["density"] = source;
    doc["budget"] = density.budget;
    doc["k_damp"] = cfg.k_damp;
    doc["pencil_modes"] = cfg.pencil_modes;
    doc["rate"] = rate;
    run.write("decay-rate.json", doc);

    return run.summary({{"rate", rate}});
}

ordered_json controllability_json(const spectral::ControllabilityReport& rep) {
    ordered_json j;
    j["n"] = rep.n;
    j["height"] = rep.height;
    j["verdict"] = rep.verdict;
    j["failed_coupling"] = rep.failed_coupling;
    j["couplings"] = to_json(rep.couplings);
    j["coupling_tol"] = rep.coupling_tol;
    j["potential"] = rep.w_descriptor;
    j["nonresonance"] = report_json(rep.nonresonance);
    j["caveat"] = rep.caveat;
    return j;
}

ordered_json cmd_schrodinger_check(Run& run) {
    const RunConfig& cfg = run.cfg;
    SystemBundle b = build_system(cfg, cfg.n);
    const int dim = b.dom.is_orthotope ? b.dom.spec.ortho.dim() : 2;

    ordered_json doc = run.preamble();
    doc["config"] = config_to_json(cfg);
    doc["domain"] = b.dom.spec.describe();
    doc["backend"] = b.backend;

    std::string verdict;
    int attempts = 0;
    if (cfg.search) {
        const auto ps =
            spectral::find_admissible_potential(b.sys, cfg.n, cfg.height, cfg.seed, cfg.trials);
        attempts = ps.attempts;
        verdict = ps.report.verdict;
        doc["attempts"] = ps.attempts;
        doc["report"] = controllability_json(ps.report);
    } else {
        const spectral::ScalarField W = parse_field(cfg.potential, dim);
        const auto rep = spectral::controllability_precheck(b.sys, W, cfg.n, cfg.height);
        verdict = rep.verdict;
        doc["report"] = controllability_json(rep);
    }
    run.write("schrodinger-check.json", doc);

    if (cfg.search) return run.summary({{"verdict", verdict}, {"attempts", attempts}});
    return run.summary({{"verdict", verdict}});
}

} // namespace

ordered_json run_command(const RunConfig& cfg) {
    validate_config(cfg);
    Run run{cfg, resolve_threads(cfg), {}};
    Eigen::setNbThreads(run.threads);

    if (cfg.command == "spectrum") return cmd_spectrum(run);
    if (cfg.command == "converge") return cmd_converge(run);
    if (cfg.command == "deform") return cmd_deform(run);
    if (cfg.command == "track") return cmd_track(run);
    if (cfg.command == "check-simplicity" || cfg.command == "check-independence" ||
        cfg.command == "check-resonance")
        return cmd_check(run);
    if (cfg.command == "shape-derivative") return cmd_shape_derivative(run);
    if (cfg.command == "potential-derivative") return cmd_potential_derivative(run);
    if (cfg.command == "optimize-damping") return cmd_optimize_damping(run);
    if (cfg.command == "decay-rate") return cmd_decay_rate(run);
    if (cfg.command == "schrodinger-check") return cmd_schrodinger_check(run);
    fail(ErrorCode::config, "unknown command: " + cfg.command);
}

} // namespace speclab::cli
