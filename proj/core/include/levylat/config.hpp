#pragma once

#include <levylat/rational.hpp>
#include <levylat/reference.hpp>

#include <cstdint>
#include <string>

namespace levylat {

/// Hard module caps; config values clamp to these.
struct Caps {
    static constexpr int max_graph_edges = 8;
    static constexpr int max_k = 6;
    static constexpr int max_m = 6;
    static constexpr int max_d = 3;
    static constexpr int max_level = 8;
};

struct RunConfig {
    std::string family = "gamma";
    Rat alpha = 1;
    Rat beta = 1;
    Rat sigma = 1;
    Rat scale = 1;
    int d = 1;
    int n = 0;
    int m = 1;
    int k = 2;
    int level_lo = 0;
    int level_hi = 4;
    int m_lo = 3;
    int m_hi = 6;
    int m_max = 6;
    std::uint64_t seed = 20240801ULL;
    std::size_t samples = 1000000;
    int workers = 1;
    double tolerance = 1e-10;
    double z_threshold = 5.0;
    double grid_max = 10.0;
    int grid_points = 200;
    std::string out_dir = ".";

    /// Parse "p/q" or integer or decimal text into an exact rational.
    static Rat parse_rational(const std::string& text);

    /// Load keys from a flat JSON object file; unknown keys rejected.
    static RunConfig from_file(const std::string& path);
    /// Apply caps (clamping) and validate ranges; throws on nonsense.
    void validate_and_clamp();

    ReferenceFamily make_family() const;
    std::string canonical_echo() const;  // deterministic serialization for the manifest
};

}  // namespace levylat
