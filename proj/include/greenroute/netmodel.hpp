#pragma once

// Directed capacitated network graph and its text importers.
//
// Native topology format, one statement per line, '#' starts a comment:
//
//   node <id>
//   link <src> <dst> <capacity>     directed link
//   edge <a> <b> <capacity>         undirected edge, expands to a->b and b->a
//
// Files in SNDlib native format (NODES / LINKS sections) are detected and
// imported as well; each undirected SNDlib link becomes two directed links.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "greenroute/error.hpp"
#include "greenroute/sndlib.hpp"
#include "greenroute/text.hpp"

namespace greenroute {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

struct Link {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double capacity = 0.0;
    bool active = true;

    friend bool operator==(const Link&, const Link&) = default;
};

class Topology {
public:
    Topology() = default;

    /// Validates and indexes. Throws ValidationError on duplicate nodes,
    /// self-loops, duplicate directed links, bad endpoints or capacity <= 0.
    Topology(std::vector<std::string> nodes, std::vector<Link> links)
        : nodes_(std::move(nodes)), links_(std::move(links)) {
        const std::size_t n = nodes_.size();
        for (NodeIndex i = 0; i < n; ++i) {
            if (nodes_[i].empty()) throw ValidationError("empty node identifier");
            if (!index_.emplace(nodes_[i], i).second)
                throw ValidationError("duplicate node '" + nodes_[i] + "'");
        }
        link_at_.assign(n * n, kNoLink);
        out_.assign(n, {});
        for (LinkIndex l = 0; l < links_.size(); ++l) {
            const auto& e = links_[l];
            if (e.src >= n || e.dst >= n) throw ValidationError("link endpoint out of range");
            if (e.src == e.dst) throw ValidationError("self-loop link at '" + nodes_[e.src] + "'");
            if (!(e.capacity > 0.0))
                throw ValidationError("non-positive capacity on link " + describe(e));
            auto& slot = link_at_[e.src * n + e.dst];
            if (slot != kNoLink) throw ValidationError("duplicate link " + describe(e));
            slot = l;
            out_[e.src].push_back(l);
        }
        for (auto& adj : out_)
            std::sort(adj.begin(), adj.end(),
                      [&](LinkIndex a, LinkIndex b) { return links_[a].dst < links_[b].dst; });
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }
    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    const Link& link(LinkIndex l) const { return links_.at(l); }
    const std::string& node_id(NodeIndex i) const { return nodes_.at(i); }

    std::optional<NodeIndex> index_of(std::string_view id) const {
        const auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<LinkIndex> link_between(NodeIndex src, NodeIndex dst) const {
        if (src >= nodes_.size() || dst >= nodes_.size()) return std::nullopt;
        const auto l = link_at_[src * nodes_.size() + dst];
        if (l == kNoLink) return std::nullopt;
        return l;
    }

    /// Outgoing links of `node`, ordered by destination index.
    const std::vector<LinkIndex>& out_links(NodeIndex node) const { return out_.at(node); }

    /// Copy with the given per-link activity flags.
    Topology with_activity(const std::vector<bool>& active) const {
        if (active.size() != links_.size()) throw ValidationError("activity vector length mismatch");
        Topology copy = *this;
        for (LinkIndex l = 0; l < links_.size(); ++l) copy.links_[l].active = active[l];
        return copy;
    }

    std::string describe(const Link& e) const {
        return nodes_.at(e.src) + "->" + nodes_.at(e.dst);
    }

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.nodes_ == b.nodes_ && a.links_ == b.links_;
    }

private:
    static constexpr LinkIndex kNoLink = static_cast<LinkIndex>(-1);

    std::vector<std::string> nodes_;
    std::vector<Link> links_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<LinkIndex> link_at_;  // dense N x N
    std::vector<std::vector<LinkIndex>> out_;
};

/// Copy holding only the active links; the node set is unchanged.
inline Topology active_subgraph(const Topology& t) {
    std::vector<Link> kept;
    kept.reserve(t.link_count());
    for (const auto& e : t.links())
        if (e.active) kept.push_back(e);
    return Topology(t.nodes(), std::move(kept));
}

namespace detail {

class TopologyReader {
public:
    explicit TopologyReader(std::string source) : source_(std::move(source)) {}

    void add_node(std::size_t line, const std::string& id) {
        if (!index_.emplace(id, nodes_.size()).second)
            throw ValidationError(where(line) + "duplicate node '" + id + "'");
        nodes_.push_back(id);
    }

    void add_link(std::size_t line, std::string_view src, std::string_view dst, double capacity) {
        const auto s = lookup(line, src);
        const auto d = lookup(line, dst);
        if (s == d) throw ValidationError(where(line) + "self-loop link at '" + std::string(src) + "'");
        if (!(capacity > 0.0))
            throw ValidationError(where(line) + "non-positive capacity " + text::exact(capacity));
        if (!pairs_.emplace(s * kStride + d).second)
            throw ValidationError(where(line) + "duplicate link " + std::string(src) + "->" +
                                  std::string(dst));
        links_.push_back(Link{s, d, capacity, true});
    }

    Topology finish() { return Topology(std::move(nodes_), std::move(links_)); }

    std::string where(std::size_t line) const { return source_ + ":" + std::to_string(line) + ": "; }

private:
    static constexpr std::size_t kStride = std::size_t{1} << 32;

    NodeIndex lookup(std::size_t line, std::string_view id) const {
        const auto it = index_.find(std::string(id));
        if (it == index_.end())
            throw ValidationError(where(line) + "unknown endpoint '" + std::string(id) + "'");
        return it->second;
    }

    std::string source_;
    std::vector<std::string> nodes_;
    std::vector<Link> links_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::unordered_set<std::size_t> pairs_;
};

inline Topology parse_native_topology(std::string_view contents, const std::string& source) {
    TopologyReader reader(source);
    std::size_t line_no = 0;
    for (auto raw : text::split(contents, '\n')) {
        ++line_no;
        const auto toks = text::split_ws(text::trim(text::strip_comment(raw)));
        if (toks.empty()) continue;
        const auto& kw = toks[0];
        if (kw == "node") {
            if (toks.size() != 2) throw ParseError(source, line_no, "expected 'node <id>'");
            reader.add_node(line_no, std::string(toks[1]));
        } else if (kw == "link" || kw == "edge") {
            if (toks.size() != 4)
                throw ParseError(source, line_no, "expected '" + std::string(kw) + " <src> <dst> <capacity>'");
            double cap = 0.0;
            if (!text::parse_double(toks[3], cap))
                throw ParseError(source, line_no, "invalid capacity '" + std::string(toks[3]) + "'");
            reader.add_link(line_no, toks[1], toks[2], cap);
            if (kw == "edge") reader.add_link(line_no, toks[2], toks[1], cap);
        } else {
            throw ParseError(source, line_no, "unknown statement '" + std::string(kw) + "'");
        }
    }
    return reader.finish();
}

inline Topology parse_sndlib_topology(std::string_view contents, const std::string& source) {
    const auto doc = sndlib::parse(contents, source);
    if (!doc.has_nodes || !doc.has_links) throw ParseError(source, 0, "missing NODES or LINKS section");
    TopologyReader reader(source);
    for (const auto& e : doc.nodes) reader.add_node(e.line, e.tokens.at(0));
    for (const auto& e : doc.links) {
        const auto ep = sndlib::endpoints(e, source);
        if (ep.fields.empty()) throw ParseError(source, e.line, "missing pre-installed capacity");
        double cap = 0.0;
        if (!text::parse_double(ep.fields[0], cap))
            throw ParseError(source, e.line, "invalid capacity '" + ep.fields[0] + "'");
        if (cap == 0.0) {
            // Networks with no pre-installed capacity: take the largest module.
            const auto open = std::find(ep.fields.begin(), ep.fields.end(), "(");
            for (auto it = open == ep.fields.end() ? open : open + 1;
                 it != ep.fields.end() && *it != ")"; it += 2) {
                double m = 0.0;
                if (text::parse_double(*it, m)) cap = std::max(cap, m);
                if (it + 1 == ep.fields.end()) break;
            }
        }
        reader.add_link(e.line, ep.src, ep.dst, cap);
        reader.add_link(e.line, ep.dst, ep.src, cap);
    }
    return reader.finish();
}

}  // namespace detail

inline Topology parse_topology(std::string_view contents, const std::string& source = "<topology>") {
    if (sndlib::looks_like_sndlib(contents)) return detail::parse_sndlib_topology(contents, source);
    return detail::parse_native_topology(contents, source);
}

/// Loads a topology file; all links start active and node order is file order.
inline Topology load_topology(const std::string& path) {
    return parse_topology(text::read_file(path), path);
}

}  // namespace greenroute
