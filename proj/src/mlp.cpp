#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "mgs/experiments.hpp"
#include "mgs/quant.hpp"
#include "mgs/rng.hpp"
#include "mgs/tensor_file.hpp"

namespace mgs::experiments {

namespace {

namespace tf = tensor_file;

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

Matrix load_matrix(const std::filesystem::path& path) {
    const auto t = tf::read_file(path);
    if (t.dims.size() != 2) {
        throw tf::FormatError(path.string() + ": expected a rank-2 tensor");
    }
    const auto f = t.to_f32();
    Matrix m{t.dims[0], t.dims[1], std::vector<double>(f.begin(), f.end())};
    for (const double v : m.data) {
        if (!std::isfinite(v)) throw tf::FormatError(path.string() + ": non-finite value");
    }
    return m;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "index,label") {
        throw std::runtime_error(path.string() + ": expected header 'index,label'");
    }
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed row");
        const long idx = std::stol(line.substr(0, comma));
        if (idx != static_cast<long>(labels.size())) {
            throw std::runtime_error(path.string() + ": rows must be in index order");
        }
        labels.push_back(std::stoi(line.substr(comma + 1)));
    }
    return labels;
}

// y = relu?(W v), float reference.
std::vector<double> dense(const Matrix& w, std::span<const double> v, bool relu) {
    std::vector<double> y(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) s += w.at(r, c) * v[c];
        y[r] = relu ? std::max(0.0, s) : s;
    }
    return y;
}

template <typename T>
std::size_t argmax(const std::vector<T>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct QuantLayer {
    quant::QuantTensor w;
    std::vector<std::int64_t> row_sums;  // sum_i w_q[r, i] for the zero-point correction
};

QuantLayer quantize_layer(const Matrix& m, int bits) {
    const auto params = quant::derive_params(m.data, bits, true);
    auto qt = quant::QuantTensor::quantize_values(m.data, params, {m.rows, m.cols});
    std::vector<std::int64_t> sums(m.rows, 0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (const auto q : qt.row(r)) sums[r] += q;
    }
    return {std::move(qt), std::move(sums)};
}

struct LayerOutput {
    std::vector<std::int64_t> acc;  // sum_i w_q * (x_q - o_x)
    dmac::EventLog events;
};

LayerOutput run_layer(const QuantLayer& layer, const std::vector<std::int32_t>& xq, std::int64_t x_offset,
                      const accum::IntStrategy& strategy) {
    LayerOutput out;
    out.acc.resize(layer.w.rows());
    for (std::size_t r = 0; r < layer.w.rows(); ++r) {
        const auto res = quant::quantized_dot(layer.w.row(r), xq, strategy);
        out.acc[r] = res.exact_fixed_point - x_offset * layer.row_sums[r];
        out.events += res.events;
    }
    return out;
}

}  // namespace

MlpFiles generate_mlp(const std::filesystem::path& dir, std::int64_t samples, std::uint64_t seed, MlpShape shape) {
    if (samples < 1) throw std::invalid_argument("gen-mlp: samples must be >= 1");
    std::filesystem::create_directories(dir);
    auto eng = rng::make_stream(seed, 0);
    const auto gaussian = [&eng](std::size_t n, double sigma) {
        std::normal_distribution<double> normal(0.0, sigma);
        std::vector<float> v(n);
        for (auto& f : v) f = static_cast<float>(normal(eng));
        return v;
    };
    const auto w1 = gaussian(std::size_t{shape.hidden} * shape.inputs, 1.0 / std::sqrt(double(shape.inputs)));
    const auto w2 = gaussian(std::size_t{shape.outputs} * shape.hidden, 1.0 / std::sqrt(double(shape.hidden)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<float> inputs(static_cast<std::size_t>(samples) * shape.inputs);
    for (auto& f : inputs) f = static_cast<float>(unit(eng));

    MlpFiles files{dir / "w1.mgt", dir / "w2.mgt", dir / "inputs.mgt", dir / "labels.csv"};
    tf::write_file(files.w1, tf::Tensor::from_f32(w1, {shape.hidden, shape.inputs}));
    tf::write_file(files.w2, tf::Tensor::from_f32(w2, {shape.outputs, shape.hidden}));
    tf::write_file(files.inputs, tf::Tensor::from_f32(inputs, {static_cast<std::uint32_t>(samples), shape.inputs}));

    const Matrix m1{shape.hidden, shape.inputs, std::vector<double>(w1.begin(), w1.end())};
    const Matrix m2{shape.outputs, shape.hidden, std::vector<double>(w2.begin(), w2.end())};
    std::ofstream labels(files.labels);
    labels << "index,label\n";
    for (std::int64_t s = 0; s < samples; ++s) {
        const std::vector<double> x(inputs.begin() + s * shape.inputs, inputs.begin() + (s + 1) * shape.inputs);
        labels << s << ',' << argmax(dense(m2, dense(m1, x, true), false)) << '\n';
    }
    if (!labels) throw std::runtime_error("write failed: " + files.labels.string());
    return files;
}

std::vector<MlpInferRow> run_mlp_infer(const MlpInferConfig& cfg, int threads) {
    if (cfg.strategies.empty() || cfg.narrow_bits.empty()) {
        throw std::invalid_argument("mlp-infer: strategies and narrow_bits must be nonempty");
    }
    std::vector<accum::IntStrategy> strategies;
    for (const auto& name : cfg.strategies) {
        for (const int nb : cfg.narrow_bits) {
            if (nb < 2 || nb > 64) throw std::invalid_argument("mlp-infer: narrow_bits must be in [2, 64]");
            strategies.push_back(accum::IntStrategy::parse(name, nb, cfg.wide_bits));
        }
    }

    const Matrix w1 = load_matrix(cfg.files.w1);
    const Matrix w2 = load_matrix(cfg.files.w2);
    const Matrix x = load_matrix(cfg.files.inputs);
    const auto labels = load_labels(cfg.files.labels);
    if (w1.cols != x.cols || w2.cols != w1.rows) {
        throw tf::FormatError("mlp-infer: layer shapes do not chain");
    }
    if (labels.size() != x.rows) {
        throw std::runtime_error("mlp-infer: label count does not match inputs");
    }

    // Static per-tensor calibration on the float pass over the provided inputs.
    const std::size_t n = x.rows;
    std::vector<double> hidden_float;
    hidden_float.reserve(n * w1.rows);
    for (std::size_t s = 0; s < n; ++s) {
        const auto h = dense(w1, std::span<const double>(x.data).subspan(s * x.cols, x.cols), true);
        hidden_float.insert(hidden_float.end(), h.begin(), h.end());
    }
    const auto l1 = quantize_layer(w1, cfg.w_bits);
    const auto l2 = quantize_layer(w2, cfg.w_bits);
    const auto xp = quant::derive_params(x.data, cfg.x_bits, false);
    const auto hp = quant::derive_params(hidden_float, cfg.x_bits, false);
    const double s1 = l1.w.params().scale * xp.scale;

    struct Sample {
        std::vector<std::int64_t> logits;
        dmac::EventLog events;
    };
    const auto infer = [&](std::size_t s, const accum::IntStrategy& strategy) {
        std::vector<std::int32_t> xq(x.cols);
        for (std::size_t i = 0; i < x.cols; ++i) xq[i] = static_cast<std::int32_t>(quant::quantize(x.at(s, i), xp));
        auto h = run_layer(l1, xq, xp.offset, strategy);
        std::vector<std::int32_t> hq(h.acc.size());
        for (std::size_t j = 0; j < hq.size(); ++j) {
            const double v = std::max(0.0, s1 * static_cast<double>(h.acc[j]));
            hq[j] = static_cast<std::int32_t>(quant::quantize(v, hp));
        }
        auto o = run_layer(l2, hq, hp.offset, strategy);
        o.events += h.events;
        return Sample{std::move(o.acc), o.events};
    };

    const auto run_all = [&](const accum::IntStrategy& strategy) {
        std::vector<Sample> out(n);
        rng::parallel_chunks(n, [&](std::size_t s) { out[s] = infer(s, strategy); }, threads);
        return out;
    };

    const auto reference = run_all(accum::IntStrategy::wide_baseline());
    const double dots_per_sample = static_cast<double>(w1.rows + w2.rows);

    std::vector<MlpInferRow> rows;
    for (const auto& strategy : strategies) {
        const auto results = run_all(strategy);
        MlpInferRow row;
        row.strategy = strategy.name();
        row.narrow_bits = strategy.kind == accum::IntStrategyKind::wide ? 0 : strategy.acc_bits;
        row.samples = static_cast<std::int64_t>(n);
        std::int64_t agree = 0;
        std::int64_t correct = 0;
        dmac::EventLog total;
        for (std::size_t s = 0; s < n; ++s) {
            const auto top = argmax(results[s].logits);
            agree += top == argmax(reference[s].logits) ? 1 : 0;
            correct += static_cast<int>(top) == labels[s] ? 1 : 0;
            row.logits_equal += results[s].logits == reference[s].logits ? 1 : 0;
            total += results[s].events;
        }
        const double dots = dots_per_sample * static_cast<double>(n);
        row.agreement_pct = 100.0 * static_cast<double>(agree) / static_cast<double>(n);
        row.label_accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
        row.terms = static_cast<double>(total.terms) / dots;
        row.narrow_adds = static_cast<double>(total.narrow_adds) / dots;
        row.wide_adds = static_cast<double>(total.wide_adds) / dots;
        row.flushes = static_cast<double>(total.flushes) / dots;
        row.clip_events = static_cast<double>(total.clip_events) / dots;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const MlpInferRow& a, const MlpInferRow& b) {
        return std::tie(a.strategy, a.narrow_bits) < std::tie(b.strategy, b.narrow_bits);
    });
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const MlpInferRow& a, const MlpInferRow& b) {
                               return a.strategy == b.strategy && a.narrow_bits == b.narrow_bits;
                           }),
               rows.end());
    return rows;
}

std::string mlp_infer_csv(const std::vector<MlpInferRow>& rows) {
    std::ostringstream out;
    out << "strategy,narrow_bits,samples,agreement_pct,logits_equal,label_accuracy_pct,terms,narrow_adds,wide_adds,"
           "flushes,clip_events\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << r.narrow_bits << ',' << r.samples << ',' << fmt(r.agreement_pct) << ','
            << r.logits_equal << ',' << fmt(r.label_accuracy_pct) << ',' << fmt(r.terms) << ','
            << fmt(r.narrow_adds) << ',' << fmt(r.wide_adds) << ',' << fmt(r.flushes) << ','
            << fmt(r.clip_events) << '\n';
    }
    return out.str();
}

}  // namespace mgs::experiments
