#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "greenroute/netmodel.hpp"
#include "greenroute/random.hpp"
#include "greenroute/traffic.hpp"

namespace greenroute::testing {

inline std::string data_path(const std::string& name) { return std::string(GREENROUTE_DATA_DIR) + "/" + name; }

/// Fresh, empty scratch directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("greenroute-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline Topology triangle(double capacity = 10.0) {
    std::vector<Link> links;
    for (NodeIndex a = 0; a < 3; ++a)
        for (NodeIndex b = 0; b < 3; ++b)
            if (a != b) links.push_back(Link{a, b, capacity, true});
    return Topology({"A", "B", "C"}, links);
}

/// Bidirectional ring of n nodes named n0..n{n-1}.
inline Topology ring(std::size_t n, double capacity = 100.0) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    std::vector<Link> links;
    for (std::size_t i = 0; i < n; ++i) {
        links.push_back(Link{i, (i + 1) % n, capacity, true});
        links.push_back(Link{(i + 1) % n, i, capacity, true});
    }
    return Topology(names, links);
}

/// Strongly connected random digraph: a directed ring 0->1->...->0 plus each
/// other ordered pair with probability p. Integer capacities in [5, 20].
inline Topology random_topology(Rng& rng, std::size_t n, double p) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Link> links;
    for (NodeIndex a = 0; a < n; ++a)
        for (NodeIndex b = 0; b < n; ++b)
            if (a != b && (b == (a + 1) % n || rng.uniform() < p)) links.push_back(Link{a, b, static_cast<double>(5 + rng.below(16)), true});
    return Topology(names, links);
}

/// Random demands on a fraction of pairs, rates on the 1/4 grid in [0, 8] so sums stay exact.
inline TrafficSnapshot random_snapshot(Rng& rng, const Topology& t, double density) {
    TrafficSnapshot s{"rand", {}};
    for (NodeIndex a = 0; a < t.node_count(); ++a)
        for (NodeIndex b = 0; b < t.node_count(); ++b)
            if (a != b && rng.uniform() < density) s.flows.push_back(Flow{a, b, 0.25 * static_cast<double>(rng.below(33))});
    return s;
}

}  // namespace greenroute::testing
