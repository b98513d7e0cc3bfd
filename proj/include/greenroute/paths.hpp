#pragma once

// Loop-free candidate paths, enumerated in (hop count, node-index sequence)
// order with Yen's algorithm. The spur search returns the lexicographically
// smallest among the minimum-hop paths, which keeps Yen's ordering argument
// valid for the lexicographic tie-break.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "greenroute/netmodel.hpp"

namespace greenroute {

using Path = std::vector<NodeIndex>;

struct PathOrder {
    bool operator()(const Path& a, const Path& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

namespace detail {

class SpurSearch {
public:
    explicit SpurSearch(const Topology& t) : topo_(t), in_(t.node_count()) {
        for (LinkIndex l = 0; l < t.link_count(); ++l)
            if (t.link(l).active) in_[t.link(l).dst].push_back(l);
        node_blocked_.assign(t.node_count(), false);
        link_blocked_.assign(t.link_count(), false);
        dist_.assign(t.node_count(), kInf);
    }

    void reset_blocks() {
        std::fill(node_blocked_.begin(), node_blocked_.end(), false);
        std::fill(link_blocked_.begin(), link_blocked_.end(), false);
    }
    void block_node(NodeIndex v) { node_blocked_[v] = true; }
    void block_link(LinkIndex l) { link_blocked_[l] = true; }

    /// Minimum-hop path from `from` to `to`, lexicographically smallest among ties.
    std::optional<Path> shortest(NodeIndex from, NodeIndex to) {
        if (node_blocked_[from] || node_blocked_[to]) return std::nullopt;
        std::fill(dist_.begin(), dist_.end(), kInf);
        dist_[to] = 0;
        std::deque<NodeIndex> queue{to};
        while (!queue.empty() && dist_[from] == kInf) {
            const auto v = queue.front();
            queue.pop_front();
            for (auto l : in_[v]) {
                const auto u = topo_.link(l).src;
                if (link_blocked_[l] || node_blocked_[u] || dist_[u] != kInf) continue;
                dist_[u] = dist_[v] + 1;
                queue.push_back(u);
            }
        }
        if (dist_[from] == kInf) return std::nullopt;
        Path p{from};
        auto u = from;
        while (u != to) {
            for (auto l : topo_.out_links(u)) {
                const auto& e = topo_.link(l);
                if (!e.active || link_blocked_[l] || node_blocked_[e.dst]) continue;
                if (dist_[e.dst] + 1 == dist_[u]) {
                    u = e.dst;
                    break;
                }
            }
            p.push_back(u);
        }
        return p;
    }

private:
    static constexpr std::size_t kInf = static_cast<std::size_t>(-1);

    const Topology& topo_;
    std::vector<std::vector<LinkIndex>> in_;
    std::vector<bool> node_blocked_;
    std::vector<bool> link_blocked_;
    std::vector<std::size_t> dist_;
};

}  // namespace detail

/// Up to k loop-free src->dst paths over active links, in nondecreasing hop
/// count with ties broken by node-index sequence. Empty if dst is unreachable.
inline std::vector<Path> candidate_paths(const Topology& t, NodeIndex src, NodeIndex dst, std::size_t k) {
    if (src >= t.node_count() || dst >= t.node_count()) throw ValidationError("node index out of range");
    if (src == dst) throw ValidationError("candidate paths need distinct endpoints");
    if (k == 0) throw ValidationError("k must be >= 1");

    detail::SpurSearch search(t);
    std::vector<Path> accepted;
    auto first = search.shortest(src, dst);
    if (!first) return accepted;
    accepted.push_back(std::move(*first));

    std::set<Path, PathOrder> pending;
    while (accepted.size() < k) {
        const Path prev = accepted.back();
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            search.reset_blocks();
            for (const auto& p : accepted)
                if (p.size() > i + 1 && std::equal(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(i) + 1, p.begin()))
                    search.block_link(*t.link_between(p[i], p[i + 1]));
            for (std::size_t r = 0; r < i; ++r) search.block_node(prev[r]);
            auto spur = search.shortest(prev[i], dst);
            if (!spur) continue;
            Path total(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(i));
            total.insert(total.end(), spur->begin(), spur->end());
            if (std::find(accepted.begin(), accepted.end(), total) == accepted.end())
                pending.insert(std::move(total));
        }
        if (pending.empty()) break;
        accepted.push_back(*pending.begin());
        pending.erase(pending.begin());
    }
    return accepted;
}

/// Links traversed by a node path. Throws if a hop has no link.
inline std::vector<LinkIndex> path_links(const Topology& t, const Path& p) {
    std::vector<LinkIndex> out;
    out.reserve(p.size() > 0 ? p.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const auto l = t.link_between(p[i], p[i + 1]);
        if (!l) throw ValidationError("path hop without a link");
        out.push_back(*l);
    }
    return out;
}

/// Candidate paths for every ordered pair, computed once per topology and reused across routings.
class CandidateTable {
public:
    struct Candidate {
        Path nodes;
        std::vector<LinkIndex> links;
    };

    CandidateTable(const Topology& t, std::size_t k) : n_(t.node_count()), k_(k), table_(n_ * n_) {
        for (NodeIndex s = 0; s < n_; ++s)
            for (NodeIndex d = 0; d < n_; ++d) {
                if (s == d) continue;
                for (auto& p : candidate_paths(t, s, d, k)) {
                    auto links = path_links(t, p);
                    table_[s * n_ + d].push_back(Candidate{std::move(p), std::move(links)});
                }
            }
    }

    const std::vector<Candidate>& at(NodeIndex src, NodeIndex dst) const { return table_.at(src * n_ + dst); }
    std::size_t k() const noexcept { return k_; }
    std::size_t node_count() const noexcept { return n_; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::vector<Candidate>> table_;
};

}  // namespace greenroute
