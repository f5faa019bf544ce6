#pragma once

#include "memvol/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace memvol {

/// Command-line overrides; empty fields fall back to the config.
struct CliOptions {
    std::string out;
    std::string surface;
    std::string method;            // effvol: exact | asymptotic | gaussian
    std::string engine = "mc";     // price: mc | pde
    std::string kind = "short-memory";  // simulate: base | short-memory | full-memory
    std::optional<std::size_t> paths;
    std::optional<double> t;       // moments evaluation time
};

/// Runs one of simulate, moments, effvol, price, verify. Outputs are written
/// atomically (temporary file, then rename). Returns the process exit code:
/// 0 on success, 1 when verify finds failures. Errors propagate as
/// exceptions; see error_json for the stderr form.
int run_subcommand(const std::string& name, const RunConfig& cfg, const CliOptions& opts,
                   std::ostream& out);

/// Machine-readable `{"error": ..., "message": ..., "problems": [...]}`.
std::string error_json(const std::exception& e);

/// Writes `contents` to `path` via a sibling temporary and rename.
void write_atomic(const std::string& path, const std::string& contents);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

} // namespace memvol
