#pragma once

// CSV emitters for benchmark matrices and workspace sample sets.

#include <string>

#include <fmt/format.h>

#include "vinedesign/design.hpp"

namespace vine {

/// One row per link budget, one column per target count; cells are the
/// fraction of targets reached.
inline std::string benchmark_csv(const BenchmarkTable& table) {
    std::string out = "n";
    for (auto m : table.m_values) out += fmt::format(",m={}", m);
    out += '\n';
    for (std::size_t r = 0; r < table.n_values.size(); ++r) {
        out += fmt::format("{}", table.n_values[r]);
        for (const auto& cell : table.cells[r]) out += fmt::format(",{:.3f}", cell.target_rate);
        out += '\n';
    }
    return out;
}

/// Long form with both success measures.
inline std::string benchmark_detail_csv(const BenchmarkTable& table) {
    std::string out = "n,m,trials,target_rate,instance_rate\n";
    for (const auto& row : table.cells)
        for (const auto& c : row)
            out += fmt::format("{},{},{},{:.4f},{:.4f}\n", c.links, c.targets, c.trials,
                               c.target_rate, c.instance_rate);
    return out;
}

inline std::string workspace_csv(const WorkspaceResult& result) {
    std::size_t links = 0;
    for (const auto& s : result.samples) links = std::max(links, s.configuration.angles.size());
    std::string out = "index,x,y,phi_deg,feasible,active_link,distance,orientation_error_deg";
    for (std::size_t k = 1; k <= links; ++k) out += fmt::format(",q{}_deg", k);
    out += '\n';
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& s = result.samples[i];
        out += fmt::format("{},{:.6f},{:.6f},{:.4f},{},{},{:.6f},{:.4f}", i, s.target.position.x(),
                           s.target.position.y(), s.target.orientation_degrees(),
                           s.feasible ? 1 : 0, s.active_link, s.distance,
                           rad2deg(s.orientation));
        for (std::size_t k = 0; k < links; ++k)
            out += k < s.configuration.angles.size()
                       ? fmt::format(",{:.4f}", rad2deg(s.configuration.angles[k]))
                       : std::string(",");
        out += '\n';
    }
    return out;
}

}  // namespace vine
