#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "run.hpp"
#include "speclab/errors.hpp"

namespace {

using speclab::cli::RunConfig;

struct Override {
    CLI::Option* opt = nullptr;
    std::function<void(RunConfig&)> apply;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speclab: spectral laboratory for the Laplacian-Dirichlet operator"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.set_help_flag("--help", "print help and exit");  // frees --h for the mesh size

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    RunConfig staged;
    std::vector<Override> overrides;
    auto bind = [&](const std::string& flag, auto member, const std::string& desc) {
        CLI::Option* opt = app.add_option(flag, staged.*member, desc);
        overrides.push_back({opt, [&staged, member](RunConfig& dst) { dst.*member = staged.*member; }});
        return opt;
    };
    auto bind_flag = [&](const std::string& flag, auto member, const std::string& desc) {
        CLI::Option* opt = app.add_flag(flag, staged.*member, desc);
        overrides.push_back({opt, [&staged, member](RunConfig& dst) { dst.*member = staged.*member; }});
        return opt;
    };

    bind("--domain", &RunConfig::domain,
         "orthotope:mu1,mu2 (exact tokens: 1, p^-1/2, p^-1/4) | disk | ngon:k | "
         "polygon:x,y;... | mapped-disk:affine:a,b,c,d | mapped-disk:fourier:c1,...");
    bind("--h", &RunConfig::h, "target mesh size");
    bind_flag("--fem", &RunConfig::fem, "mesh orthotopes instead of using the closed form");
    bind("--n", &RunConfig::n, "number of modes");
    bind("--residual-tol", &RunConfig::residual_tol, "eigensolver residual tolerance");
    bind("--gap-tol", &RunConfig::gap_tol, "relative gap below which eigenvalues cluster");
    bind("--max-iters", &RunConfig::max_iters, "eigensolver iteration budget");
    bind("--height", &RunConfig::height, "integer relation height H");
    bind("--trials", &RunConfig::trials, "search budget (independence points / potentials)");
    bind("--ell", &RunConfig::ell, "damped-area budget");
    bind("--N", &RunConfig::modes, "damping objective mode count");
    bind("--potential", &RunConfig::potential, "W/V: x1, x2, const:c, or @table.json");
    bind("--density", &RunConfig::density, "decay-rate density: uniform, full, or @cells.json");
    bind("--k-damp", &RunConfig::k_damp, "damping strength k");
    bind("--M", &RunConfig::pencil_modes, "modal truncation for the decay pencil");
    bind("--mode", &RunConfig::mode, "1-based mode index for derivatives");
    bind("--face-dim", &RunConfig::face_dim, "orthotope face axis (0-based)");
    bind("--face-side", &RunConfig::face_side, "0: x_d = 0 wall, 1: x_d = mu_d*pi wall");
    bind("--speed", &RunConfig::speed, "normal speed of the moving face");
    bind("--dt", &RunConfig::dt, "finite-difference step / epsilon");
    bind("--path", &RunConfig::path, "track family: rect-mu2:a,b or flow-squash[:rho]");
    bind("--field", &RunConfig::field, "deformation field: squash[:rho]");
    bind("--t-final", &RunConfig::t_final, "end of the deformation parameter range");
    bind("--steps", &RunConfig::steps, "path segments (grid step = t_final/steps)");
    bind("--h-list", &RunConfig::h_list, "converge: comma-separated mesh sizes");
    bind("--sweep", &RunConfig::sweep, "optimize-damping: ell sweep lo,hi,count -> CSV");
    bind("--crossing-tol", &RunConfig::crossing_tol, "relative gap counted as a crossing");
    bind_flag("--search", &RunConfig::search, "schrodinger-check: sample potentials until pass");
    bind("--seed", &RunConfig::seed, "RNG seed recorded in every output");
    bind("--out-dir", &RunConfig::out_dir, "artifact directory");
    bind("--threads", &RunConfig::threads, "worker threads (0: SPECLAB_THREADS, then hardware)");
    bind_flag("--no-timestamp", &RunConfig::no_timestamp, "omit timestamps for byte-stable output");

    for (const char* name :
         {"spectrum", "converge", "deform", "track", "check-simplicity", "check-independence",
          "check-resonance", "shape-derivative", "potential-derivative", "optimize-damping",
          "decay-rate", "schrodinger-check"})
        app.add_subcommand(name)->silent(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = speclab::cli::load_config_file(config_path);
        for (const auto& o : overrides)
            if (o.opt->count() > 0) o.apply(cfg);
        if (!app.get_subcommands().empty()) cfg.command = app.get_subcommands().front()->get_name();

        const auto summary = speclab::cli::run_command(cfg);
        std::fputs(speclab::cli::dump_json(summary, -1).c_str(), stdout);
        return 0;
    } catch (const speclab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == speclab::ErrorCode::config ? 2 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
