#pragma once

#include <stdexcept>
#include <string>

namespace hprim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched grids / field shapes.
struct SizeError : Error {
    explicit SizeError(const std::string& msg) : Error(msg) {}
};

/// A documented precondition was violated (bad argument range, nonzero mean
/// where a mean-zero field is required, insufficient history, ...).
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

/// The flattening map degenerated: min J fell below the configured floor.
/// Carries the offending location so a run log can point at it.
struct DegenerateMetricError : Error {
    double min_j;
    int i1, i2, level;
    DegenerateMetricError(double mj, int i1_, int i2_, int lev, const std::string& msg)
        : Error(msg), min_j(mj), i1(i1_), i2(i2_), level(lev) {}
};

/// A per-mode implicit solve failed (singular block).
struct SolverError : Error {
    int kx, ky;
    SolverError(int kx_, int ky_, const std::string& msg) : Error(msg), kx(kx_), ky(ky_) {}
};

/// Config file syntax / validation problem; carries a 1-based line number
/// (0 when the problem is not tied to a specific line).
struct ConfigError : Error {
    int line;
    ConfigError(int line_, const std::string& msg) : Error(msg), line(line_) {}
};

/// Snapshot file malformed (bad magic, truncated payload, ...).
struct SnapshotError : Error {
    explicit SnapshotError(const std::string& msg) : Error(msg) {}
};

} // namespace hprim
