#pragma once

#include "gapbench/algorithm.hpp"

namespace gapbench {

// First n points of the tensor midpoint grid with ceil(n^(1/d)) cells per
// side; shared by the grid-based baselines and the protocol fixtures.
std::vector<Vec> midpoint_grid_points(std::size_t n, std::size_t d);

// Constant-zero reconstruction sampling at a midpoint grid.
AlgorithmPtr zero_algorithm();

struct NnLayout {
    enum class Kind { Grid, Iid } kind = Kind::Grid;
    std::uint64_t seed = 0;
    static NnLayout grid() { return {}; }
    static NnLayout iid(std::uint64_t seed) { return {Kind::Iid, seed}; }
};

// Piecewise-constant reconstruction: value of the sup-norm nearest sample
// point, ties broken by the lowest point index.
AlgorithmPtr nearest_neighbor_algorithm(NnLayout layout);

// Tensor-product piecewise-linear interpolation on a uniform vertex grid of
// m^d points, m = floor(N^(1/d)); leftover budget duplicates corner points.
AlgorithmPtr multilinear_interpolation_algorithm();

struct ExternalAlgorithmSpec {
    std::vector<std::string> command;
    int timeout_ms = 30000;
    std::vector<std::string> env_allowlist;  // PATH is always passed through
    std::string name = "external";
};

// Adapter speaking the line-delimited JSON protocol documented in
// docs/protocol.md; any deviation raises a ProtocolError attributed to the
// external process.
AlgorithmPtr external_algorithm(ExternalAlgorithmSpec spec);

}  // namespace gapbench
