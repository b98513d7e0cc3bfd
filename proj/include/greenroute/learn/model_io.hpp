#pragma once

// Text model files. Numbers use the shortest round-trip representation, so
// save followed by load reproduces every double bit for bit.
//
//   greenroute-model 1
//   TARGET <umin|umax|umin_given_umax|umax_given_umin>
//   N <features>
//   K <components>
//   RIDGE <0|1>
//   MEAN
//   <n values>
//   EIGENVALUES
//   <n values>
//   COMPONENTS
//   <n rows of n values>
//   WEIGHTS
//   <bias and per-input weights>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "greenroute/error.hpp"
#include "greenroute/learn/predictor.hpp"
#include "greenroute/text.hpp"

namespace greenroute::learn {

namespace detail {

inline void append_row(std::string& out, const double* values, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
        if (i) out += ' ';
        out += text::exact(values[i]);
    }
    out += '\n';
}

class ModelReader {
public:
    ModelReader(std::string_view contents, std::string source)
        : lines_(text::split(contents, '\n')), source_(std::move(source)) {}

    std::vector<std::string_view> next(std::string_view what) {
        while (pos_ < lines_.size()) {
            const auto line = text::trim(lines_[pos_++]);
            if (!line.empty()) return text::split_ws(line);
        }
        throw ParseError(source_, pos_, "unexpected end of file, expected " + std::string(what));
    }

    void expect(std::string_view keyword) {
        const auto toks = next(keyword);
        if (toks.size() != 1 || toks[0] != keyword) fail("expected " + std::string(keyword));
    }

    std::string_view keyed(std::string_view keyword) {
        const auto toks = next(keyword);
        if (toks.size() != 2 || toks[0] != keyword) fail("expected '" + std::string(keyword) + " <value>'");
        return toks[1];
    }

    std::size_t keyed_size(std::string_view keyword) {
        std::size_t v = 0;
        if (!text::parse_size(keyed(keyword), v)) fail("invalid " + std::string(keyword));
        return v;
    }

    Eigen::VectorXd row(std::string_view what, std::size_t count) {
        const auto toks = next(what);
        if (toks.size() != count)
            fail(std::string(what) + ": expected " + std::to_string(count) + " values, got " + std::to_string(toks.size()));
        Eigen::VectorXd v(static_cast<Eigen::Index>(count));
        for (std::size_t i = 0; i < count; ++i)
            if (!text::parse_double(toks[i], v(static_cast<Eigen::Index>(i)))) fail("invalid number in " + std::string(what));
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, pos_, what); }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
    std::string source_;
};

}  // namespace detail

inline std::string format_model(const Predictor& p) {
    const auto n = p.pca.features();
    std::string out = "greenroute-model 1\n";
    out += std::string("TARGET ") + target_name(p.target()) + "\n";
    out += "N " + std::to_string(n) + "\n";
    out += "K " + std::to_string(p.pca.k) + "\n";
    out += std::string("RIDGE ") + (p.regression.ridge ? "1" : "0") + "\n";
    out += "MEAN\n";
    detail::append_row(out, p.pca.mean.data(), n);
    out += "EIGENVALUES\n";
    detail::append_row(out, p.pca.eigenvalues.data(), n);
    out += "COMPONENTS\n";
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = p.pca.components;
    for (Eigen::Index r = 0; r < n; ++r) detail::append_row(out, rows.row(r).data(), n);
    out += "WEIGHTS\n";
    detail::append_row(out, p.regression.weights.data(), p.regression.weights.size());
    return out;
}

inline Predictor parse_model(std::string_view contents, const std::string& source = "<model>") {
    detail::ModelReader in(contents, source);
    const auto magic = in.next("header");
    if (magic.size() != 2 || magic[0] != "greenroute-model" || magic[1] != "1") in.fail("not a greenroute model file");
    Predictor p;
    p.regression.target = parse_target(std::string(in.keyed("TARGET")));
    const auto n = in.keyed_size("N");
    const auto k = in.keyed_size("K");
    const auto ridge = in.keyed_size("RIDGE");
    if (n == 0 || k == 0 || k > n) in.fail("K must lie in [1, N]");
    p.regression.ridge = ridge != 0;
    in.expect("MEAN");
    p.pca.mean = in.row("MEAN", n);
    in.expect("EIGENVALUES");
    p.pca.eigenvalues = in.row("EIGENVALUES", n);
    in.expect("COMPONENTS");
    p.pca.components.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) p.pca.components.row(static_cast<Eigen::Index>(r)) = in.row("COMPONENTS", n).transpose();
    in.expect("WEIGHTS");
    p.regression.weights = in.row("WEIGHTS", k + 1 + (is_conditional(p.target()) ? 1 : 0));
    p.pca.k = k;
    p.pca.degenerate = p.pca.eigenvalues.cwiseAbs().maxCoeff() == 0.0;
    return p;
}

inline void save_model(const std::string& path, const Predictor& p) { text::write_file(path, format_model(p)); }

inline Predictor load_model(const std::string& path) { return parse_model(text::read_file(path), path); }

}  // namespace greenroute::learn
