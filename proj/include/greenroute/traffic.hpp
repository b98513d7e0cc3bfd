#pragma once

// Traffic snapshots and their fixed-width feature encoding.
//
// Snapshot file format, '#' starts a comment:
//
//   timestamp <label>          optional; defaults to the file stem
//   demand <src> <dst> <rate>
//
// SNDlib native files with a DEMANDS section are imported too (demand value
// field). SNDlib self-demands (src == dst) never touch a link and are dropped.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "greenroute/error.hpp"
#include "greenroute/netmodel.hpp"
#include "greenroute/random.hpp"
#include "greenroute/sndlib.hpp"
#include "greenroute/text.hpp"

namespace greenroute {

struct Flow {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double rate = 0.0;

    friend bool operator==(const Flow&, const Flow&) = default;
};

struct TrafficSnapshot {
    std::string timestamp;
    std::vector<Flow> flows;

    friend bool operator==(const TrafficSnapshot&, const TrafficSnapshot&) = default;
};

/// Rates of every ordered pair (i, j), i != j, row-major by node index.
using FeatureVector = Eigen::VectorXd;

struct FeatureMatrix {
    Eigen::MatrixXd values;           // rows = samples, cols = features
    std::vector<std::string> labels;  // one per row

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

inline std::size_t feature_length(std::size_t node_count) {
    return node_count * (node_count == 0 ? 0 : node_count - 1);
}

/// Column of pair (src, dst) in a feature vector.
inline std::size_t feature_index(NodeIndex src, NodeIndex dst, std::size_t node_count) {
    return src * (node_count - 1) + (dst < src ? dst : dst - 1);
}

/// Throws ValidationError unless every flow is well-formed for `t` and pairs are unique.
inline void validate_snapshot(const TrafficSnapshot& s, const Topology& t) {
    const auto n = t.node_count();
    std::unordered_set<std::size_t> seen;
    for (const auto& f : s.flows) {
        if (f.src >= n || f.dst >= n) throw ValidationError("flow endpoint out of range");
        if (f.src == f.dst) throw ValidationError("flow with identical endpoints at '" + t.node_id(f.src) + "'");
        if (!(f.rate >= 0.0)) throw ValidationError("negative rate on " + t.node_id(f.src) + "->" + t.node_id(f.dst));
        if (!seen.insert(f.src * n + f.dst).second)
            throw ValidationError("duplicate demand " + t.node_id(f.src) + "->" + t.node_id(f.dst));
    }
}

namespace detail {

class SnapshotReader {
public:
    SnapshotReader(const Topology& t, std::string source) : topo_(t), source_(std::move(source)) {}

    void add(std::size_t line, std::string_view src, std::string_view dst, double rate) {
        const auto s = lookup(line, src);
        const auto d = lookup(line, dst);
        if (s == d) throw ValidationError(where(line) + "demand from '" + std::string(src) + "' to itself");
        if (!(rate >= 0.0)) throw ValidationError(where(line) + "negative rate " + text::exact(rate));
        if (!seen_.insert(s * topo_.node_count() + d).second)
            throw ValidationError(where(line) + "duplicate demand " + std::string(src) + "->" + std::string(dst));
        flows_.push_back(Flow{s, d, rate});
    }

    std::vector<Flow> take() { return std::move(flows_); }

    NodeIndex lookup(std::size_t line, std::string_view id) const {
        const auto idx = topo_.index_of(id);
        if (!idx) throw ValidationError(where(line) + "unknown node '" + std::string(id) + "'");
        return *idx;
    }

    std::string where(std::size_t line) const { return source_ + ":" + std::to_string(line) + ": "; }

private:
    const Topology& topo_;
    std::string source_;
    std::vector<Flow> flows_;
    std::unordered_set<std::size_t> seen_;
};

}  // namespace detail

inline TrafficSnapshot parse_snapshot(std::string_view contents, const Topology& t,
                                      const std::string& default_timestamp,
                                      const std::string& source = "<snapshot>") {
    TrafficSnapshot snap{default_timestamp, {}};
    detail::SnapshotReader reader(t, source);
    if (sndlib::looks_like_sndlib(contents)) {
        const auto doc = sndlib::parse(contents, source);
        if (!doc.has_demands) throw ParseError(source, 0, "missing DEMANDS section");
        for (const auto& e : doc.demands) {
            const auto ep = sndlib::endpoints(e, source);
            if (ep.fields.size() < 2) throw ParseError(source, e.line, "missing demand value");
            double value = 0.0;
            if (!text::parse_double(ep.fields[1], value))
                throw ParseError(source, e.line, "invalid demand value '" + ep.fields[1] + "'");
            if (ep.src == ep.dst) {
                reader.lookup(e.line, ep.src);
                continue;
            }
            reader.add(e.line, ep.src, ep.dst, value);
        }
    } else {
        std::size_t line_no = 0;
        for (auto raw : text::split(contents, '\n')) {
            ++line_no;
            const auto toks = text::split_ws(text::trim(text::strip_comment(raw)));
            if (toks.empty()) continue;
            if (toks[0] == "timestamp") {
                if (toks.size() != 2) throw ParseError(source, line_no, "expected 'timestamp <label>'");
                snap.timestamp = std::string(toks[1]);
            } else if (toks[0] == "demand") {
                if (toks.size() != 4) throw ParseError(source, line_no, "expected 'demand <src> <dst> <rate>'");
                double rate = 0.0;
                if (!text::parse_double(toks[3], rate))
                    throw ParseError(source, line_no, "invalid rate '" + std::string(toks[3]) + "'");
                reader.add(line_no, toks[1], toks[2], rate);
            } else {
                throw ParseError(source, line_no, "unknown statement '" + std::string(toks[0]) + "'");
            }
        }
    }
    snap.flows = reader.take();
    return snap;
}

inline TrafficSnapshot load_snapshot(const std::string& path, const Topology& t) {
    return parse_snapshot(text::read_file(path), t, std::filesystem::path(path).stem().string(), path);
}

/// Native-format text that parses back to an identical snapshot.
inline std::string format_snapshot(const TrafficSnapshot& s, const Topology& t) {
    std::string out = "timestamp " + s.timestamp + "\n";
    for (const auto& f : s.flows)
        out += "demand " + t.node_id(f.src) + " " + t.node_id(f.dst) + " " + text::exact(f.rate) + "\n";
    return out;
}

inline std::string volume_label(double volume_percent) { return text::exact(volume_percent); }

/// Multiplies every rate by volume_percent / 100 and tags the timestamp with "@<volume>".
inline TrafficSnapshot scale_snapshot(const TrafficSnapshot& s, double volume_percent) {
    if (!(volume_percent > 0.0 && volume_percent <= 100.0))
        throw ValidationError("traffic volume must lie in (0, 100], got " + text::exact(volume_percent));
    TrafficSnapshot out{s.timestamp + "@" + volume_label(volume_percent), s.flows};
    const double factor = volume_percent / 100.0;
    for (auto& f : out.flows) f.rate *= factor;
    return out;
}

inline FeatureVector to_feature_vector(const TrafficSnapshot& s, const Topology& t) {
    const auto n = t.node_count();
    FeatureVector v = FeatureVector::Zero(static_cast<Eigen::Index>(feature_length(n)));
    for (const auto& f : s.flows) v(static_cast<Eigen::Index>(feature_index(f.src, f.dst, n))) = f.rate;
    return v;
}

inline FeatureMatrix assemble_feature_matrix(const std::vector<TrafficSnapshot>& snapshots, const Topology& t) {
    if (snapshots.empty()) throw ValidationError("cannot assemble a feature matrix from zero snapshots");
    FeatureMatrix m;
    m.values.resize(static_cast<Eigen::Index>(snapshots.size()),
                    static_cast<Eigen::Index>(feature_length(t.node_count())));
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        m.values.row(static_cast<Eigen::Index>(i)) = to_feature_vector(snapshots[i], t).transpose();
        m.labels.push_back(snapshots[i].timestamp);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Synthetic low-rank traffic

struct SyntheticTraffic {
    std::vector<TrafficSnapshot> snapshots;
    Eigen::MatrixXd latent;  // count x latent_dim, the factor scores behind each snapshot
};

namespace detail {

/// Hop distances from `src` over active links; unreachable = SIZE_MAX.
inline std::vector<std::size_t> hop_distances(const Topology& t, NodeIndex src) {
    std::vector<std::size_t> dist(t.node_count(), SIZE_MAX);
    std::deque<NodeIndex> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (auto l : t.out_links(u)) {
            const auto& e = t.link(l);
            if (!e.active || dist[e.dst] != SIZE_MAX) continue;
            dist[e.dst] = dist[u] + 1;
            queue.push_back(e.dst);
        }
    }
    return dist;
}

}  // namespace detail

/// Demands rate = max(0, A z + noise) with a seeded nonnegative factor matrix A
/// (pairs x latent_dim), per-snapshot scores z in [0.1, 1] and noise at 1% of
/// the rate scale. Unreachable pairs get rate 0. Rates are scaled so that the
/// mean shortest-path link utilization is about 40% at full volume.
inline SyntheticTraffic synth_traffic(const Topology& t, std::size_t latent_dim, std::size_t count,
                                      std::uint64_t seed) {
    if (latent_dim == 0 || count == 0) throw ValidationError("latent_dim and count must be >= 1");
    const auto n = t.node_count();
    const auto pairs = feature_length(n);
    Rng rng(seed);

    std::vector<bool> reachable(pairs, false);
    double hop_sum = 0.0;
    std::size_t reachable_count = 0;
    for (NodeIndex s = 0; s < n; ++s) {
        const auto dist = detail::hop_distances(t, s);
        for (NodeIndex d = 0; d < n; ++d) {
            if (d == s || dist[d] == SIZE_MAX) continue;
            reachable[feature_index(s, d, n)] = true;
            hop_sum += static_cast<double>(dist[d]);
            ++reachable_count;
        }
    }
    double cap_sum = 0.0;
    for (const auto& e : t.links()) cap_sum += e.capacity;

    // E[u^2] = 1/3 and E[z] = 0.55 give the expected per-pair rate before scaling.
    const double mean_hops = reachable_count ? hop_sum / static_cast<double>(reachable_count) : 1.0;
    const double target_rate =
        reachable_count ? 0.4 * cap_sum / (static_cast<double>(reachable_count) * mean_hops) : 0.0;
    const double scale = target_rate / (static_cast<double>(latent_dim) * 0.55 / 3.0);

    Eigen::MatrixXd factors(static_cast<Eigen::Index>(pairs), static_cast<Eigen::Index>(latent_dim));
    for (Eigen::Index p = 0; p < factors.rows(); ++p)
        for (Eigen::Index j = 0; j < factors.cols(); ++j) {
            const double u = rng.uniform();
            factors(p, j) = scale * u * u;
        }

    SyntheticTraffic out;
    out.latent.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(latent_dim));
    const double noise_sd = 0.01 * scale;
    for (std::size_t s = 0; s < count; ++s) {
        Eigen::VectorXd z(static_cast<Eigen::Index>(latent_dim));
        for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.uniform(0.1, 1.0);
        out.latent.row(static_cast<Eigen::Index>(s)) = z.transpose();
        const Eigen::VectorXd mean_rates = factors * z;

        char label[32];
        std::snprintf(label, sizeof label, "synth-%04zu", s);
        TrafficSnapshot snap{label, {}};
        for (NodeIndex a = 0; a < n; ++a)
            for (NodeIndex b = 0; b < n; ++b) {
                if (a == b) continue;
                const auto p = feature_index(a, b, n);
                const double noise = noise_sd * rng.normal();
                if (!reachable[p]) continue;
                const double rate = std::max(0.0, mean_rates(static_cast<Eigen::Index>(p)) + noise);
                snap.flows.push_back(Flow{a, b, rate});
            }
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

inline std::vector<TrafficSnapshot> synth_snapshots(const Topology& t, std::size_t latent_dim, std::size_t count,
                                                    std::uint64_t seed) {
    return synth_traffic(t, latent_dim, count, seed).snapshots;
}

}  // namespace greenroute
