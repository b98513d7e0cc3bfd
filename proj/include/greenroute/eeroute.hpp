#pragma once

// Energy-aware routing under a utility interval (umin, umax).
//
// Flows are routed one at a time, heaviest first, onto one of their k
// candidate paths; link utilities accumulate as 100 * load / capacity and
// every link left at zero utility is switched off.
//
// Path choice for a flow of rate r. A candidate is feasible when every link
// stays at or below umax after adding r. Among feasible candidates prefer, in
// order:
//   1. fewest links that were idle before this flow,
//   2. most links whose new utility lies in [umin, umax],
//   3. fewest hops,
//   4. candidate order (node-index sequence).
// With no feasible candidate the one minimizing the largest new utility wins
// and the flow is counted as overloaded.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "greenroute/error.hpp"
#include "greenroute/netmodel.hpp"
#include "greenroute/paths.hpp"
#include "greenroute/text.hpp"
#include "greenroute/traffic.hpp"

namespace greenroute {

inline constexpr std::size_t kDefaultCandidatePaths = 4;

struct UtilityInterval {
    double umin = 0.0;
    double umax = 100.0;

    void validate() const {
        if (!(umin >= 0.0 && umin <= umax && umax <= 100.0))
            throw ValidationError("utility interval must satisfy 0 <= umin <= umax <= 100, got (" +
                                  text::exact(umin) + ", " + text::exact(umax) + ")");
    }
};

struct RoutedFlow {
    Flow flow;
    Path path;
    std::vector<LinkIndex> links;
};

struct RoutingOutcome {
    std::vector<double> loads;       // summed rate per link
    std::vector<double> utilities;   // percent, 100 * load / capacity
    std::vector<RoutedFlow> routes;  // processing order; zero-rate flows are not routed
    std::vector<LinkIndex> inactive_links;  // ascending
    std::size_t overloaded_flows = 0;
    double energy_saving = 0.0;
    double avg_path_length = 0.0;
};

/// 100 * |inactive| / |links|; 0 for a topology without links.
inline double energy_saving(const RoutingOutcome& o, const Topology& t) {
    if (t.link_count() == 0) return 0.0;
    return 100.0 * static_cast<double>(o.inactive_links.size()) / static_cast<double>(t.link_count());
}

/// Mean hop count over routed flows, 0 when nothing was routed.
inline double average_path_length(const RoutingOutcome& o) {
    if (o.routes.empty()) return 0.0;
    double hops = 0.0;
    for (const auto& r : o.routes) hops += static_cast<double>(r.links.size());
    return hops / static_cast<double>(o.routes.size());
}

namespace detail {

struct PathScore {
    std::size_t fresh = 0;  // links idle before this flow
    std::size_t well = 0;   // links ending inside [umin, umax]
    std::size_t hops = 0;

    bool better_than(const PathScore& o) const {
        if (fresh != o.fresh) return fresh < o.fresh;
        if (well != o.well) return well > o.well;
        return hops < o.hops;
    }
};

}  // namespace detail

/// Flows in routing order: descending rate, ties by (src, dst) index.
inline std::vector<Flow> routing_order(const std::vector<Flow>& flows) {
    std::vector<Flow> order = flows;
    std::sort(order.begin(), order.end(), [](const Flow& a, const Flow& b) {
        if (a.rate != b.rate) return a.rate > b.rate;
        return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });
    return order;
}

/// Per-link loads and utilities recomputed from the routed paths.
inline std::pair<std::vector<double>, std::vector<double>> recompute_utilities(const RoutingOutcome& o,
                                                                               const Topology& t) {
    std::vector<double> loads(t.link_count(), 0.0);
    for (const auto& r : o.routes)
        for (auto l : r.links) loads[l] += r.flow.rate;
    std::vector<double> util(t.link_count(), 0.0);
    for (LinkIndex l = 0; l < t.link_count(); ++l) util[l] = 100.0 * loads[l] / t.link(l).capacity;
    return {std::move(loads), std::move(util)};
}

inline RoutingOutcome route_mept(const Topology& t, const TrafficSnapshot& s, const UtilityInterval& u,
                                 const CandidateTable& candidates) {
    u.validate();
    if (candidates.node_count() != t.node_count()) throw ValidationError("candidate table built for another topology");

    RoutingOutcome out;
    out.loads.assign(t.link_count(), 0.0);

    for (const auto& f : routing_order(s.flows)) {
        if (f.rate <= 0.0) continue;
        const auto& options = candidates.at(f.src, f.dst);
        if (options.empty())
            throw UnroutableError("no path for flow " + t.node_id(f.src) + "->" + t.node_id(f.dst));

        std::size_t best = options.size();
        detail::PathScore best_score{};
        std::size_t fallback = 0;
        double fallback_peak = std::numeric_limits<double>::infinity();

        for (std::size_t c = 0; c < options.size(); ++c) {
            detail::PathScore score{0, 0, options[c].links.size()};
            double peak = 0.0;
            for (auto l : options[c].links) {
                const double load = out.loads[l];
                if (load == 0.0) ++score.fresh;
                const double after = 100.0 * (load + f.rate) / t.link(l).capacity;
                if (after >= u.umin && after <= u.umax) ++score.well;
                peak = std::max(peak, after);
            }
            if (peak < fallback_peak) {
                fallback_peak = peak;
                fallback = c;
            }
            if (peak > u.umax) continue;
            if (best == options.size() || score.better_than(best_score)) {
                best = c;
                best_score = score;
            }
        }
        if (best == options.size()) {
            best = fallback;
            ++out.overloaded_flows;
        }
        for (auto l : options[best].links) out.loads[l] += f.rate;
        out.routes.push_back(RoutedFlow{f, options[best].nodes, options[best].links});
    }

    out.utilities.resize(t.link_count());
    for (LinkIndex l = 0; l < t.link_count(); ++l) {
        out.utilities[l] = 100.0 * out.loads[l] / t.link(l).capacity;
        if (out.utilities[l] == 0.0) out.inactive_links.push_back(l);
    }
    out.energy_saving = energy_saving(out, t);
    out.avg_path_length = average_path_length(out);
    return out;
}

inline RoutingOutcome route_mept(const Topology& t, const TrafficSnapshot& s, const UtilityInterval& u,
                                 std::size_t k = kDefaultCandidatePaths) {
    return route_mept(t, s, u, CandidateTable(t, k));
}

/// The topology with every zero-utility link switched off.
inline Topology apply_outcome(const Topology& t, const RoutingOutcome& o) {
    std::vector<bool> active(t.link_count(), true);
    for (auto l : o.inactive_links) active[l] = false;
    return t.with_activity(active);
}

/// One `link` record per link followed by a `summary` record.
inline std::string outcome_csv(const RoutingOutcome& o, const Topology& t) {
    std::string out = "record,src,dst,utility,active,energy_saving,avg_path_length\n";
    std::vector<bool> off(t.link_count(), false);
    for (auto l : o.inactive_links) off[l] = true;
    for (LinkIndex l = 0; l < t.link_count(); ++l) {
        const auto& e = t.link(l);
        out += "link," + t.node_id(e.src) + "," + t.node_id(e.dst) + "," + text::fixed4(o.utilities[l]) + "," +
               (off[l] ? "0" : "1") + ",,\n";
    }
    out += "summary,,,,," + text::fixed4(o.energy_saving) + "," + text::fixed4(o.avg_path_length) + "\n";
    return out;
}

}  // namespace greenroute
