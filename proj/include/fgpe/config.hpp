#pragma once

#include "fgpe/dynamics.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/physics.hpp"

#include <cstdint>
#include <string>

namespace fgpe {

enum class RunMode { ground, dynamics, sweep };

enum class InitialKind { guess, gaussian, vortex, file };

// initial state builder: analytic guesses, or a snapshot file; x0 shifts by
// whole grid cells, v0 imprints the momentum phase e^{i v0 (0.8 x + 0.5 y)}
struct InitialSpec {
    InitialKind kind = InitialKind::guess;
    std::string file;
    std::array<double, 3> shift{};
    double boost = 0.0;
};

struct SweepConfig {
    double omega_lo = 0.0;
    double omega_hi = 1.0;
    double resolution = 0.01;
    std::vector<double> s_values; // empty: sweep the single physics.s
};

struct RunConfig {
    RunMode mode = RunMode::ground;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string out_dir;

    int dim = 2;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::array<int, 3> points{};

    PhysicsParams physics; // sampled potential loaded later from trap_file
    std::string trap_file;
    GroundStateRun ground;
    DynamicsRun dynamics;
    InitialSpec initial;
    SweepConfig sweep;
};

// strict flat INI: unknown sections/keys are errors naming the key; grid
// defaults depend on mode (ground/sweep [-32,32]^2 512, dynamics [-16,16]^2
// 256, both h = 1/8); referenced files must exist
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// canonical full rendering; parse(serialize(c)) == c
std::string serialize_config(const RunConfig& config);

GridPtr make_grid(const RunConfig& config);

} // namespace fgpe
