#include "fgpe/config.hpp"

#include "fgpe/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fgpe {

namespace {

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

// section -> key -> value, with consumption tracking for strict parsing
struct Document {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::map<std::string, std::map<std::string, bool>> used;

    const std::string* find(const std::string& section, const std::string& key) {
        auto s = sections.find(section);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        used[section][key] = true;
        return &k->second;
    }

    void reject_unused() const {
        for (const auto& [sec, keys] : sections) {
            for (const auto& [key, value] : keys) {
                auto s = used.find(sec);
                if (s == used.end() || !s->second.count(key))
                    throw ConfigError("unknown key '" + sec + "." + key + "'");
            }
        }
    }
};

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find_first_of("#;"); pos != std::string::npos)
            line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("empty section name at line " + std::to_string(lineno));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("key '" + key + "' outside any section");
        auto [it, inserted] = doc.sections[section].emplace(key, value);
        (void)it;
        if (!inserted)
            throw ConfigError("duplicate key '" + section + "." + key + "'");
    }
    return doc;
}

double parse_double(const std::string& name, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(name + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_int(const std::string& name, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(name + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// scalar broadcast or exactly `count` entries
template <typename T, typename Parse>
void parse_tuple(const std::string& name, const std::string& text, int count,
                 std::array<T, 3>& out, Parse parse) {
    auto toks = split_ws(text);
    if (toks.size() != 1 && static_cast<int>(toks.size()) != count)
        throw ConfigError(name + ": expected 1 or " + std::to_string(count) + " values");
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            parse(name, toks[toks.size() == 1 ? 0 : static_cast<std::size_t>(i)]);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* mode_name(RunMode m) {
    switch (m) {
    case RunMode::ground: return "ground";
    case RunMode::dynamics: return "dynamics";
    case RunMode::sweep: return "sweep";
    }
    return "";
}

const char* solver_name(InnerSolver s) {
    switch (s) {
    case InnerSolver::fixed_point: return "fixed_point";
    case InnerSolver::krylov_delta: return "krylov_delta";
    case InnerSolver::krylov_tf: return "krylov_tf";
    }
    return "";
}

const char* initial_name(InitialKind k) {
    switch (k) {
    case InitialKind::guess: return "guess";
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::vortex: return "vortex";
    case InitialKind::file: return "file";
    }
    return "";
}

const char* kernel_name(KernelVariant v) {
    switch (v) {
    case KernelVariant::coulomb: return "coulomb";
    case KernelVariant::dipole3d: return "dipole3d";
    case KernelVariant::dipole2d: return "dipole2d";
    }
    return "";
}

void require_file(const std::string& key, const std::string& path) {
    if (!std::filesystem::exists(path))
        throw ConfigError(key + ": file does not exist: '" + path + "'");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    Document doc = tokenize(text);
    RunConfig c;

    if (auto* v = doc.find("run", "mode")) {
        if (*v == "ground") c.mode = RunMode::ground;
        else if (*v == "dynamics") c.mode = RunMode::dynamics;
        else if (*v == "sweep") c.mode = RunMode::sweep;
        else throw ConfigError("run.mode: expected ground|dynamics|sweep, got '" + *v + "'");
    }
    if (auto* v = doc.find("run", "threads")) {
        c.threads = static_cast<int>(parse_int("run.threads", *v));
        if (c.threads < 1) throw ConfigError("run.threads: must be >= 1");
    }
    if (auto* v = doc.find("run", "seed"))
        c.seed = static_cast<std::uint64_t>(parse_int("run.seed", *v));
    if (auto* v = doc.find("run", "out")) c.out_dir = *v;

    if (auto* v = doc.find("grid", "dim")) {
        c.dim = static_cast<int>(parse_int("grid.dim", *v));
        if (c.dim != 2 && c.dim != 3) throw ConfigError("grid.dim: must be 2 or 3");
    }
    // grid defaults depend on mode: dynamics boxes are half the ground size
    const double default_half = c.mode == RunMode::dynamics ? 16.0 : 32.0;
    const int default_points = c.mode == RunMode::dynamics ? 256 : 512;
    c.lo.fill(-default_half);
    c.hi.fill(default_half);
    c.points.fill(default_points);
    if (auto* v = doc.find("grid", "lo"))
        parse_tuple("grid.lo", *v, c.dim, c.lo, parse_double);
    if (auto* v = doc.find("grid", "hi"))
        parse_tuple("grid.hi", *v, c.dim, c.hi, parse_double);
    if (auto* v = doc.find("grid", "points")) {
        std::array<long long, 3> pts{};
        parse_tuple("grid.points", *v, c.dim, pts, parse_int);
        for (int i = 0; i < c.dim; ++i) {
            if (pts[static_cast<std::size_t>(i)] < 4 || pts[static_cast<std::size_t>(i)] % 2 != 0)
                throw ConfigError("grid.points: must be even and >= 4");
            c.points[static_cast<std::size_t>(i)] = static_cast<int>(pts[static_cast<std::size_t>(i)]);
        }
    }
    for (int i = 0; i < c.dim; ++i)
        if (!(c.lo[static_cast<std::size_t>(i)] < c.hi[static_cast<std::size_t>(i)]))
            throw ConfigError("grid.lo/grid.hi: lo must be < hi on every axis");

    if (auto* v = doc.find("physics", "s")) c.physics.s = parse_double("physics.s", *v);
    if (auto* v = doc.find("physics", "m")) c.physics.m = parse_double("physics.m", *v);
    if (auto* v = doc.find("physics", "beta")) c.physics.beta = parse_double("physics.beta", *v);
    if (auto* v = doc.find("physics", "lambda")) c.physics.lambda = parse_double("physics.lambda", *v);
    if (auto* v = doc.find("physics", "omega")) c.physics.omega = parse_double("physics.omega", *v);
    if (auto* v = doc.find("physics", "gamma"))
        parse_tuple("physics.gamma", *v, c.dim, c.physics.gamma, parse_double);

    if (auto* v = doc.find("kernel", "variant")) {
        if (*v == "coulomb") c.physics.kernel.variant = KernelVariant::coulomb;
        else if (*v == "dipole3d") c.physics.kernel.variant = KernelVariant::dipole3d;
        else if (*v == "dipole2d") c.physics.kernel.variant = KernelVariant::dipole2d;
        else throw ConfigError("kernel.variant: expected coulomb|dipole3d|dipole2d, got '" + *v + "'");
    }
    if (auto* v = doc.find("kernel", "mu"))
        c.physics.kernel.exponent = parse_double("kernel.mu", *v);
    if (auto* v = doc.find("kernel", "axis"))
        parse_tuple("kernel.axis", *v, 3, c.physics.kernel.axis, parse_double);
    if (auto* v = doc.find("kernel", "delta")) {
        c.physics.kernel_delta = parse_double("kernel.delta", *v);
        if (!(c.physics.kernel_delta > 0.0 && c.physics.kernel_delta < 1.0))
            throw ConfigError("kernel.delta: must lie in (0, 1)");
    }
    if (auto* v = doc.find("kernel", "eps")) {
        c.physics.kernel_eps = parse_double("kernel.eps", *v);
        if (!(c.physics.kernel_eps > 0.0))
            throw ConfigError("kernel.eps: must be > 0");
    }

    if (auto* v = doc.find("trap", "file")) {
        c.trap_file = *v;
        if (!c.trap_file.empty()) require_file("trap.file", c.trap_file);
    }

    if (auto* v = doc.find("ground", "dt")) {
        c.ground.dt = parse_double("ground.dt", *v);
        if (!(c.ground.dt > 0.0)) throw ConfigError("ground.dt: must be > 0");
    }
    if (auto* v = doc.find("ground", "stop_eps")) {
        c.ground.stop_eps = parse_double("ground.stop_eps", *v);
        if (!(c.ground.stop_eps > 0.0)) throw ConfigError("ground.stop_eps: must be > 0");
    }
    if (auto* v = doc.find("ground", "solver")) {
        if (*v == "fixed_point") c.ground.solver = InnerSolver::fixed_point;
        else if (*v == "krylov_delta") c.ground.solver = InnerSolver::krylov_delta;
        else if (*v == "krylov_tf") c.ground.solver = InnerSolver::krylov_tf;
        else throw ConfigError("ground.solver: expected fixed_point|krylov_delta|krylov_tf, got '" + *v + "'");
    }
    if (auto* v = doc.find("ground", "inner_tol")) {
        c.ground.inner_tol = parse_double("ground.inner_tol", *v);
        if (!(c.ground.inner_tol > 0.0)) throw ConfigError("ground.inner_tol: must be > 0");
    }
    if (auto* v = doc.find("ground", "max_inner")) {
        c.ground.max_inner = static_cast<int>(parse_int("ground.max_inner", *v));
        if (c.ground.max_inner < 1) throw ConfigError("ground.max_inner: must be >= 1");
    }
    if (auto* v = doc.find("ground", "max_outer")) {
        c.ground.max_outer = static_cast<int>(parse_int("ground.max_outer", *v));
        if (c.ground.max_outer < 1) throw ConfigError("ground.max_outer: must be >= 1");
    }
    if (auto* v = doc.find("ground", "energy_floor"))
        c.ground.energy_floor = parse_double("ground.energy_floor", *v);
    if (auto* v = doc.find("ground", "energy_drop_limit")) {
        c.ground.energy_drop_limit = parse_double("ground.energy_drop_limit", *v);
        if (!(c.ground.energy_drop_limit > 0.0))
            throw ConfigError("ground.energy_drop_limit: must be > 0");
    }

    if (auto* v = doc.find("dynamics", "dt")) {
        c.dynamics.dt = parse_double("dynamics.dt", *v);
        if (!(c.dynamics.dt > 0.0)) throw ConfigError("dynamics.dt: must be > 0");
    }
    if (auto* v = doc.find("dynamics", "t_final")) {
        c.dynamics.t_final = parse_double("dynamics.t_final", *v);
        if (c.dynamics.t_final < 0.0) throw ConfigError("dynamics.t_final: must be >= 0");
    }
    if (auto* v = doc.find("dynamics", "diagnostics_every")) {
        c.dynamics.diagnostics_every =
            static_cast<int>(parse_int("dynamics.diagnostics_every", *v));
        if (c.dynamics.diagnostics_every < 1)
            throw ConfigError("dynamics.diagnostics_every: must be >= 1");
    }
    if (auto* v = doc.find("dynamics", "snapshot_every")) {
        c.dynamics.snapshot_every = static_cast<int>(parse_int("dynamics.snapshot_every", *v));
        if (c.dynamics.snapshot_every < 0)
            throw ConfigError("dynamics.snapshot_every: must be >= 0");
    }

    if (auto* v = doc.find("initial", "type")) {
        if (*v == "guess") c.initial.kind = InitialKind::guess;
        else if (*v == "gaussian") c.initial.kind = InitialKind::gaussian;
        else if (*v == "vortex") c.initial.kind = InitialKind::vortex;
        else if (*v == "file") c.initial.kind = InitialKind::file;
        else throw ConfigError("initial.type: expected guess|gaussian|vortex|file, got '" + *v + "'");
    }
    if (auto* v = doc.find("initial", "file")) c.initial.file = *v;
    if (auto* v = doc.find("initial", "x0"))
        parse_tuple("initial.x0", *v, c.dim, c.initial.shift, parse_double);
    if (auto* v = doc.find("initial", "v0")) c.initial.boost = parse_double("initial.v0", *v);
    if (c.initial.kind == InitialKind::file) {
        if (c.initial.file.empty())
            throw ConfigError("initial.file: required when initial.type = file");
        require_file("initial.file", c.initial.file);
    }

    if (auto* v = doc.find("sweep", "omega_lo"))
        c.sweep.omega_lo = parse_double("sweep.omega_lo", *v);
    if (auto* v = doc.find("sweep", "omega_hi"))
        c.sweep.omega_hi = parse_double("sweep.omega_hi", *v);
    if (auto* v = doc.find("sweep", "resolution")) {
        c.sweep.resolution = parse_double("sweep.resolution", *v);
        if (!(c.sweep.resolution > 0.0)) throw ConfigError("sweep.resolution: must be > 0");
    }
    if (auto* v = doc.find("sweep", "s_values")) {
        for (const auto& tok : split_ws(*v))
            c.sweep.s_values.push_back(parse_double("sweep.s_values", tok));
    }
    if (!(c.sweep.omega_lo < c.sweep.omega_hi))
        throw ConfigError("sweep.omega_lo/sweep.omega_hi: lo must be < hi");

    doc.reject_unused();
    c.physics.validate(c.dim);
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    const auto tuple = [&](const std::array<double, 3>& v, int n) {
        std::string s;
        for (int i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += fmt(v[static_cast<std::size_t>(i)]);
        }
        return s;
    };

    out << "[run]\n";
    out << "mode = " << mode_name(c.mode) << "\n";
    out << "threads = " << c.threads << "\n";
    out << "seed = " << c.seed << "\n";
    if (!c.out_dir.empty()) out << "out = " << c.out_dir << "\n";

    out << "\n[grid]\n";
    out << "dim = " << c.dim << "\n";
    out << "lo = " << tuple(c.lo, c.dim) << "\n";
    out << "hi = " << tuple(c.hi, c.dim) << "\n";
    out << "points =";
    for (int i = 0; i < c.dim; ++i) out << ' ' << c.points[static_cast<std::size_t>(i)];
    out << "\n";

    out << "\n[physics]\n";
    out << "s = " << fmt(c.physics.s) << "\n";
    out << "m = " << fmt(c.physics.m) << "\n";
    out << "beta = " << fmt(c.physics.beta) << "\n";
    out << "lambda = " << fmt(c.physics.lambda) << "\n";
    out << "omega = " << fmt(c.physics.omega) << "\n";
    out << "gamma = " << tuple(c.physics.gamma, c.dim) << "\n";

    out << "\n[kernel]\n";
    out << "variant = " << kernel_name(c.physics.kernel.variant) << "\n";
    out << "mu = " << fmt(c.physics.kernel.exponent) << "\n";
    out << "axis = " << tuple(c.physics.kernel.axis, 3) << "\n";
    out << "delta = " << fmt(c.physics.kernel_delta) << "\n";
    out << "eps = " << fmt(c.physics.kernel_eps) << "\n";

    if (!c.trap_file.empty()) out << "\n[trap]\nfile = " << c.trap_file << "\n";

    out << "\n[ground]\n";
    out << "dt = " << fmt(c.ground.dt) << "\n";
    out << "stop_eps = " << fmt(c.ground.stop_eps) << "\n";
    out << "solver = " << solver_name(c.ground.solver) << "\n";
    out << "inner_tol = " << fmt(c.ground.inner_tol) << "\n";
    out << "max_inner = " << c.ground.max_inner << "\n";
    out << "max_outer = " << c.ground.max_outer << "\n";
    out << "energy_floor = " << fmt(c.ground.energy_floor) << "\n";
    out << "energy_drop_limit = " << fmt(c.ground.energy_drop_limit) << "\n";

    out << "\n[dynamics]\n";
    out << "dt = " << fmt(c.dynamics.dt) << "\n";
    out << "t_final = " << fmt(c.dynamics.t_final) << "\n";
    out << "diagnostics_every = " << c.dynamics.diagnostics_every << "\n";
    out << "snapshot_every = " << c.dynamics.snapshot_every << "\n";

    out << "\n[initial]\n";
    out << "type = " << initial_name(c.initial.kind) << "\n";
    if (!c.initial.file.empty()) out << "file = " << c.initial.file << "\n";
    out << "x0 = " << tuple(c.initial.shift, c.dim) << "\n";
    out << "v0 = " << fmt(c.initial.boost) << "\n";

    out << "\n[sweep]\n";
    out << "omega_lo = " << fmt(c.sweep.omega_lo) << "\n";
    out << "omega_hi = " << fmt(c.sweep.omega_hi) << "\n";
    out << "resolution = " << fmt(c.sweep.resolution) << "\n";
    if (!c.sweep.s_values.empty()) {
        out << "s_values =";
        for (double s : c.sweep.s_values) out << ' ' << fmt(s);
        out << "\n";
    }
    return out.str();
}

GridPtr make_grid(const RunConfig& c) {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::array<int, 3> n{};
    for (int i = 0; i < c.dim; ++i) {
        lo[static_cast<std::size_t>(i)] = c.lo[static_cast<std::size_t>(i)];
        hi[static_cast<std::size_t>(i)] = c.hi[static_cast<std::size_t>(i)];
        n[static_cast<std::size_t>(i)] = c.points[static_cast<std::size_t>(i)];
    }
    return std::make_shared<Grid>(c.dim, lo, hi, n);
}

} // namespace fgpe
