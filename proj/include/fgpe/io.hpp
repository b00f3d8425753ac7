#pragma once

#include "fgpe/dynamics.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/observables.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace fgpe {

// binary field container: fixed header (grid spec, time, frame, rotation
// matrix, params hash), row-major little-endian payload, crc32 trailer
struct Snapshot {
    ComplexField field;
    double t = 0.0;
    bool rotating_frame = false;
    Mat3 rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::uint64_t params_hash = 0;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
// throws ConfigError on malformed header, size mismatch, or bad checksum
Snapshot read_snapshot(const std::string& path);

// hash of the physical parameters for snapshot provenance checks
std::uint64_t params_fingerprint(const PhysicsParams& p);

// CSV rows are %.17g so identical runs produce identical bytes
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);
std::string convergence_csv_header();
std::string convergence_csv_row(const OuterRecord& r);

// plain-text plot tables from a snapshot (slice_x, contour_grid) or a
// diagnostics CSV (timeseries, optional column filter); unknown kind throws
void emit_plot_data(const std::string& input_path, const std::string& kind,
                    std::ostream& out, const std::vector<std::string>& columns = {});

} // namespace fgpe
