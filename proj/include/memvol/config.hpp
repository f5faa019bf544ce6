#pragma once

#include "memvol/coeffs.hpp"
#include "memvol/effvol.hpp"
#include "memvol/errors.hpp"
#include "memvol/kernel.hpp"
#include "memvol/pricing.hpp"
#include "memvol/process.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace memvol {

/// Every problem found in a config file, in file order.
class ConfigError : public Error {
public:
    ConfigError(ErrorCode code, std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct RunConfig {
    // process.*
    CoefficientCurve a = CoefficientCurve::constant(0.0);
    CoefficientCurve b = CoefficientCurve::constant(0.2);
    double t0 = 0.0;
    double horizon = 1.0;  // process.T
    MemoryKernel kernel;

    // pricing.*
    double s0 = 100.0;
    CoefficientCurve A = CoefficientCurve::constant(0.0);
    double r = 0.05;
    OptionSpec option;
    DriftCoefficient drift = DriftCoefficient::Rate;

    // numerics.*
    std::size_t n_steps = 100;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    double quad_tol = 1e-9;
    std::size_t pde_space = 400;
    std::size_t pde_time = 400;
    int picard_max_iter = 50;
    double picard_tol = 1e-10;
    EffVolMethod effvol_method = EffVolMethod::Exact;

    // io.*
    std::string out;
    std::string surface;

    /// Canonical `key = value` lines (all keys, defaults filled, sorted).
    std::map<std::string, std::string> canonical;
    /// 16 hex digits of FNV-1a over the canonical text and any curve files.
    std::string digest;

    ProcessSpec process() const { return {a, b, kernel, t0}; }
    TimeGrid process_grid() const { return {t0, horizon, n_steps}; }
    TimeGrid pricing_grid() const { return {t0, option.maturity, n_steps}; }
    QuadratureOptions quadrature() const { return {quad_tol, 40}; }
    PicardOptions picard() const { return {picard_max_iter, picard_tol}; }
};

/// Documented defaults as `key = value` text.
std::string default_config_text();

/// Parses `key = value` lines with `#` comments and dotted section keys.
/// Collects every syntax error (with line numbers) and every validation
/// error (naming the key) before throwing a single ConfigError; its code is
/// ParseError if any syntax error occurred, else ValidationError. csv: paths resolve relative to the
/// config file's directory.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

} // namespace memvol
