#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "run.hpp"
#include "speclab/errors.hpp"

namespace speclab::cli {

namespace {

const std::set<std::string> kCommands = {
    "spectrum",           "converge",        "deform",
    "track",              "check-simplicity", "check-independence",
    "check-resonance",    "shape-derivative", "potential-derivative",
    "optimize-damping",   "decay-rate",       "schrodinger-check"};

void append_double(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // bare integers are still doubles on reload; keep the marker
    if (out.find_first_of(".eE", out.size() - std::strlen(buf)) == std::string::npos)
        out += ".0";
}

void dump(const ordered_json& j, std::string& out, int indent, int depth) {
    const bool compact = indent <= 0;
    const std::string open_sep = compact ? "" : "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string item_sep = compact ? "," : "," + open_sep;
    const std::string close_sep = compact ? "" : "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case nlohmann::detail::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{" + open_sep;
            bool first = true;
            for (const auto& [key, val] : j.items()) {
                if (!first) out += item_sep;
                first = false;
                out += ordered_json(key).dump();
                out += compact ? ":" : ": ";
                dump(val, out, indent, depth + 1);
            }
            out += close_sep + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[" + open_sep;
            bool first = true;
            for (const auto& val : j) {
                if (!first) out += item_sep;
                first = false;
                dump(val, out, indent, depth + 1);
            }
            out += close_sep + "]";
            return;
        }
        case nlohmann::detail::value_t::number_float:
            append_double(out, j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

} // namespace

std::string dump_json(const ordered_json& j, int indent) {
    std::string out;
    dump(j, out, indent, 0);
    out += "\n";
    return out;
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["domain"] = c.domain;
    j["h"] = c.h;
    j["fem"] = c.fem;
    j["n"] = c.n;
    j["residual_tol"] = c.residual_tol;
    j["gap_tol"] = c.gap_tol;
    j["max_iters"] = c.max_iters;
    j["height"] = c.height;
    j["trials"] = c.trials;
    j["ell"] = c.ell;
    j["modes"] = c.modes;
    j["potential"] = c.potential;
    j["density"] = c.density;
    j["k_damp"] = c.k_damp;
    j["pencil_modes"] = c.pencil_modes;
    j["mode"] = c.mode;
    j["face_dim"] = c.face_dim;
    j["face_side"] = c.face_side;
    j["speed"] = c.speed;
    j["dt"] = c.dt;
    j["path"] = c.path;
    j["field"] = c.field;
    j["t_final"] = c.t_final;
    j["steps"] = c.steps;
    j["h_list"] = c.h_list;
    j["sweep"] = c.sweep;
    j["crossing_tol"] = c.crossing_tol;
    j["search"] = c.search;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["threads"] = c.threads;
    j["no_timestamp"] = c.no_timestamp;
    return j;
}

RunConfig config_from_json(const ordered_json& j) {
    require(j.is_object(), ErrorCode::config, "config document must be a JSON object");
    RunConfig c;
    const std::set<std::string> known = {
        "command", "domain", "h", "fem", "n", "residual_tol", "gap_tol", "max_iters",
        "height", "trials", "ell", "modes", "potential", "density", "k_damp",
        "pencil_modes", "mode", "face_dim", "face_side", "speed", "dt", "path", "field",
        "t_final", "steps", "h_list", "sweep", "crossing_tol", "search", "seed",
        "out_dir", "threads", "no_timestamp"};
    for (const auto& [key, val] : j.items())
        require(known.count(key) != 0, ErrorCode::config, "unknown config key: " + key);
    try {
        if (j.contains("command")) c.command = j.at("command").get<std::string>();
        if (j.contains("domain")) c.domain = j.at("domain").get<std::string>();
        if (j.contains("h")) c.h = j.at("h").get<double>();
        if (j.contains("fem")) c.fem = j.at("fem").get<bool>();
        if (j.contains("n")) c.n = j.at("n").get<int>();
        if (j.contains("residual_tol")) c.residual_tol = j.at("residual_tol").get<double>();
        if (j.contains("gap_tol")) c.gap_tol = j.at("gap_tol").get<double>();
        if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
        if (j.contains("height")) c.height = j.at("height").get<int>();
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("ell")) c.ell = j.at("ell").get<double>();
        if (j.contains("modes")) c.modes = j.at("modes").get<int>();
        if (j.contains("potential")) c.potential = j.at("potential").get<std::string>();
        if (j.contains("density")) c.density = j.at("density").get<std::string>();
        if (j.contains("k_damp")) c.k_damp = j.at("k_damp").get<double>();
        if (j.contains("pencil_modes")) c.pencil_modes = j.at("pencil_modes").get<int>();
        if (j.contains("mode")) c.mode = j.at("mode").get<int>();
        if (j.contains("face_dim")) c.face_dim = j.at("face_dim").get<int>();
        if (j.contains("face_side")) c.face_side = j.at("face_side").get<int>();
        if (j.contains("speed")) c.speed = j.at("speed").get<double>();
        if (j.contains("dt")) c.dt = j.at("dt").get<double>();
        if (j.contains("path")) c.path = j.at("path").get<std::string>();
        if (j.contains("field")) c.field = j.at("field").get<std::string>();
        if (j.contains("t_final")) c.t_final = j.at("t_final").get<double>();
        if (j.contains("steps")) c.steps = j.at("steps").get<int>();
        if (j.contains("h_list")) c.h_list = j.at("h_list").get<std::string>();
        if (j.contains("sweep")) c.sweep = j.at("sweep").get<std::string>();
        if (j.contains("crossing_tol")) c.crossing_tol = j.at("crossing_tol").get<double>();
        if (j.contains("search")) c.search = j.at("search").get<bool>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (j.contains("no_timestamp")) c.no_timestamp = j.at("no_timestamp").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config, std::string("config value has the wrong type: ") + e.what());
    }
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::config, "cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config, "config file is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

void validate_config(const RunConfig& c) {
    require(kCommands.count(c.command) != 0, ErrorCode::config,
            c.command.empty() ? std::string("no command given")
                              : "unknown command: " + c.command);
    require(c.h > 0.0, ErrorCode::config, "h must be positive");
    require(c.n >= 1, ErrorCode::config, "n must be at least 1");
    require(c.residual_tol > 0.0, ErrorCode::config, "residual_tol must be positive");
    require(c.gap_tol > 0.0, ErrorCode::config, "gap_tol must be positive");
    require(c.max_iters >= 1, ErrorCode::config, "max_iters must be at least 1");
    require(c.height >= 1, ErrorCode::config, "height must be at least 1");
    require(c.trials >= 1, ErrorCode::config, "trials must be at least 1");
    require(c.modes >= 1, ErrorCode::config, "modes must be at least 1");
    require(c.pencil_modes >= 1, ErrorCode::config, "pencil_modes must be at least 1");
    require(c.mode >= 1, ErrorCode::config, "mode must be at least 1");
    require(c.speed != 0.0, ErrorCode::config, "speed must be nonzero");
    require(c.dt > 0.0, ErrorCode::config, "dt must be positive");
    require(c.t_final > 0.0, ErrorCode::config, "t_final must be positive");
    require(c.steps >= 2, ErrorCode::config, "steps must be at least 2");
    require(c.crossing_tol > 0.0, ErrorCode::config, "crossing_tol must be positive");
    require(c.k_damp >= 0.0, ErrorCode::config, "k_damp must be nonnegative");
    require(c.threads >= 0, ErrorCode::config, "threads must be nonnegative");
    require(c.face_side == 0 || c.face_side == 1, ErrorCode::config, "face_side must be 0 or 1");
    require(c.face_dim >= 0, ErrorCode::config, "face_dim must be nonnegative");
    if (c.command == "optimize-damping")
        require(c.ell > 0.0, ErrorCode::config, "optimize-damping needs a positive --ell");
    if (c.command == "decay-rate" && c.density == "uniform")
        require(c.ell > 0.0, ErrorCode::config, "uniform density needs a positive --ell");
    if (c.command == "converge")
        require(!c.h_list.empty(), ErrorCode::config, "converge needs --h-list");
    if (c.command == "track")
        require(!c.path.empty(), ErrorCode::config, "track needs --path");

    try {
        parse_domain(c.domain);
    } catch (const Error& e) {
        fail(ErrorCode::config, e.what());
    }
}

int resolve_threads(const RunConfig& cfg) {
    int t = cfg.threads;
    if (t == 0) {
        if (const char* env = std::getenv("SPECLAB_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            require(end != env && *end == '\0' && v >= 1 && v <= 4096, ErrorCode::config,
                    "SPECLAB_THREADS must be a positive integer");
            t = static_cast<int>(v);
        }
    }
    if (t == 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return t;
}

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::io, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        require(out.good(), ErrorCode::io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

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
    require(end == s.c_str() + s.size() && !s.empty() && std::isfinite(v), ErrorCode::config,
            "not a number: '" + s + "'");
    return v;
}

// mu entry: plain decimal, or the exact tokens 1, p^-1/2 (mu^-2 = p) and
// p^-1/4 (mu^-2 = sqrt(p))
struct MuToken {
    double value = 0.0;
    bool exact = false;
    std::int64_t p = 0;   // radicand / integer
    int quarter = 0;      // 1: p^-1/4, 0: integer 1/mu^2
};

MuToken parse_mu(const std::string& s) {
    MuToken t;
    const auto caret = s.find('^');
    if (caret == std::string::npos) {
        t.value = parse_number(s);
        require(t.value > 0.0, ErrorCode::config, "mu entries must be positive");
        if (t.value == 1.0) {
            t.exact = true;
            t.p = 1;
        }
        return t;
    }
    const std::string base = s.substr(0, caret), exp = s.substr(caret + 1);
    char* end = nullptr;
    const long long p = std::strtoll(base.c_str(), &end, 10);
    require(end == base.c_str() + base.size() && p >= 1, ErrorCode::config,
            "exact mu tokens look like p^-1/2 or p^-1/4 with integer p: '" + s + "'");
    t.exact = true;
    t.p = p;
    if (exp == "-1/2") {
        t.quarter = 0;
        t.value = std::pow(static_cast<double>(p), -0.5);
    } else if (exp == "-1/4") {
        t.quarter = 1;
        t.value = std::pow(static_cast<double>(p), -0.25);
    } else {
        fail(ErrorCode::config, "unsupported exponent in mu token: '" + s + "'");
    }
    return t;
}

geom::Orthotope parse_orthotope(const std::string& body) {
    std::vector<MuToken> toks;
    for (const auto& part : split(body, ',')) toks.push_back(parse_mu(part));
    require(!toks.empty(), ErrorCode::config, "orthotope needs at least one mu entry");

    std::vector<double> mu;
    for (const auto& t : toks) mu.push_back(t.value);

    // exact metadata only when every axis is expressible over one radicand
    bool all_exact = true;
    std::int64_t D = 0;
    for (const auto& t : toks) {
        if (!t.exact) all_exact = false;
        else if (t.quarter == 1 && t.p != 1) {
            if (D == 0) D = t.p;
            else if (D != t.p) all_exact = false;
        }
    }
    if (!all_exact) return geom::make_orthotope(mu);

    std::vector<geom::ExactInvMuSq> inv;
    for (const auto& t : toks) {
        if (t.quarter == 1 && t.p != 1)
            inv.push_back({0, 1});  // 1/mu^2 = sqrt(D)
        else
            inv.push_back({t.quarter == 1 ? 1 : t.p, 0});
    }
    return geom::make_orthotope_exact(mu, D, inv);
}

} // namespace

DomainHandle parse_domain(const std::string& text) {
    DomainHandle out;
    const auto colon = text.find(':');
    const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (kind == "orthotope") {
        out.spec.kind = geom::DomainSpec::Kind::orthotope;
        out.spec.ortho = parse_orthotope(body);
        out.is_orthotope = true;
        return out;
    }
    if (kind == "disk") {
        require(body.empty(), ErrorCode::config, "disk takes no parameters");
        out.spec.kind = geom::DomainSpec::Kind::disk;
        return out;
    }
    if (kind == "ngon") {
        char* end = nullptr;
        const long k = std::strtol(body.c_str(), &end, 10);
        require(end == body.c_str() + body.size() && k >= 3, ErrorCode::config,
                "ngon:k needs an integer k >= 3");
        out.spec.kind = geom::DomainSpec::Kind::polygon;
        out.spec.polygon = geom::regular_polygon(static_cast<int>(k));
        return out;
    }
    if (kind == "polygon") {
        out.spec.kind = geom::DomainSpec::Kind::polygon;
        for (const auto& pair : split(body, ';')) {
            const auto xy = split(pair, ',');
            require(xy.size() == 2, ErrorCode::config,
                    "polygon vertices look like x,y;x,y;...");
            out.spec.polygon.push_back({parse_number(xy[0]), parse_number(xy[1])});
        }
        require(out.spec.polygon.size() >= 3, ErrorCode::config,
                "polygon needs at least three vertices");
        return out;
    }
    if (kind == "mapped-disk") {
        out.spec.kind = geom::DomainSpec::Kind::mapped_ball;
        const auto semi = body.find(';');
        const std::string head = semi == std::string::npos ? body : body.substr(0, semi);
        const auto c2 = head.find(':');
        const std::string map_kind = head.substr(0, c2 == std::string::npos ? head.size() : c2);
        const std::string args = c2 == std::string::npos ? "" : head.substr(c2 + 1);
        if (map_kind == "affine") {
            const auto a = split(args, ',');
            require(a.size() == 4, ErrorCode::config, "mapped-disk:affine:a11,a12,a21,a22");
            out.spec.map.kind = geom::DiskMap::Kind::affine;
            for (int i = 0; i < 4; ++i)
                out.spec.map.A[static_cast<std::size_t>(i)] = parse_number(a[static_cast<std::size_t>(i)]);
        } else if (map_kind == "fourier") {
            out.spec.map.kind = geom::DiskMap::Kind::radial_fourier;
            for (const auto& c : split(args, ','))
                out.spec.map.fourier_cos.push_back(parse_number(c));
        } else {
            fail(ErrorCode::config, "mapped-disk kinds: affine, fourier");
        }
        return out;
    }
    fail(ErrorCode::config, "unknown domain kind: '" + kind + "'");
}

} // namespace speclab::cli
