#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "speclab/geometry.hpp"

namespace speclab::cli {

using ordered_json = nlohmann::ordered_json;

// Everything a run needs, whether it arrives via flags or a config file.
// Serialization keeps doubles at 17 significant digits so a written config
// reloads to the same bits.
struct RunConfig {
    std::string command;

    // domain
    std::string domain = "orthotope:1,1";  // orthotope:- / disk / ngon:k / polygon:- / mapped-disk:-
    double h = 0.05;
    bool fem = false;  // mesh an orthotope instead of using the closed form

    // solver
    int n = 6;
    double residual_tol = 1e-9;
    double gap_tol = 1e-6;
    int max_iters = 200;

    // command-specific
    int height = 10;                 // relation height H
    int trials = 200;                // independence search budget
    double ell = 0.0;                // damped-area budget
    int modes = 3;                   // damping mode count N
    std::string potential = "x1";    // W/V: x<i> | const:c | @table.json
    std::string density = "uniform"; // uniform | full | @cells.json
    double k_damp = 0.5;
    int pencil_modes = 8;            // modal truncation M
    int mode = 1;                    // derivative / tracking mode index
    int face_dim = 1;
    int face_side = 1;
    double speed = 1.0;
    double dt = 1e-3;                // finite-difference step
    std::string path;                // rect-mu2:a,b | flow-squash[:rho]
    std::string field = "squash";    // deformation field: squash[:rho]
    double t_final = 1.0;
    int steps = 21;
    std::string h_list;              // converge: comma-separated h values
    std::string sweep;               // optimize-damping: lo,hi,count -> CSV
    double crossing_tol = 1e-4;
    bool search = false;             // schrodinger-check: search for a passing W

    std::uint64_t seed = 12345;
    std::string out_dir = ".";
    int threads = 0;  // 0: SPECLAB_THREADS, then hardware count
    bool no_timestamp = false;
};

ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const ordered_json& j);
RunConfig load_config_file(const std::string& path);

// schema-level checks; failures here are exit-2 material
void validate_config(const RunConfig& cfg);

// resolved worker count: flag, then SPECLAB_THREADS, then hardware
int resolve_threads(const RunConfig& cfg);

// deterministic serialization: insertion-ordered keys, %.17g doubles
std::string dump_json(const ordered_json& j, int indent = 2);

void write_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string utc_timestamp();

// parsed --domain string; ortho is set for orthotope kinds of any dimension
struct DomainHandle {
    geom::DomainSpec spec;
    bool is_orthotope = false;
};
DomainHandle parse_domain(const std::string& text);

// executes cfg.command, writes artifacts under cfg.out_dir, returns the
// machine-readable summary to print on stdout
ordered_json run_command(const RunConfig& cfg);

} // namespace speclab::cli
