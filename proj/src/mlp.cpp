#include "epicast/mlp.hpp"

#include "epicast/error.hpp"
#include "epicast/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace epicast::mlp {

namespace {

constexpr std::string_view kFormatTag = "epicast-mlp";
constexpr int kFormatVersion = 1;

std::string sizes_to_string(std::span<const std::size_t> sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(sizes[i]);
    }
    return out;
}

// 53 random bits mapped onto [0,1); identical on every standard library.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_unit_interval(const data::SupervisedMatrix& set, std::string_view what) {
    const auto bad = [](double v) { return !(v >= 0.0 && v <= 1.0); };
    for (std::size_t r = 0; r < set.x.rows(); ++r)
        for (double v : set.x.row(r))
            if (bad(v))
                fail(ErrorCode::UnnormalizedInput, std::string(what) + " row " + std::to_string(r + 1) +
                                                       ": feature value " + text::format_double(v) +
                                                       " outside [0,1]");
    for (std::size_t r = 0; r < set.y.size(); ++r)
        if (bad(set.y[r]))
            fail(ErrorCode::UnnormalizedInput, std::string(what) + " row " + std::to_string(r + 1) +
                                                   ": target " + text::format_double(set.y[r]) +
                                                   " outside [0,1]");
}

void check_set_shape(const MLPModel& model, const data::SupervisedMatrix& set, std::string_view what) {
    if (set.x.cols() != model.input_size())
        fail(ErrorCode::ShapeMismatch, std::string(what) + " has " + std::to_string(set.x.cols()) +
                                           " features, network input layer has " +
                                           std::to_string(model.input_size()));
    if (set.y.size() != set.x.rows())
        fail(ErrorCode::ShapeMismatch, std::string(what) + ": row count of X and y differ");
    if (set.y.empty()) fail(ErrorCode::EmptyInput, std::string(what) + " is empty");
}

double loss(const MLPModel& model, std::span<const double> x, double desired) {
    const double e = desired - forward(model, x).output();
    return 0.5 * e * e;
}

} // namespace

void MLPConfig::validate() const {
    if (layer_sizes.size() < 2) fail(ErrorCode::InvalidConfig, "network needs at least 2 layers");
    for (auto n : layer_sizes)
        if (n == 0) fail(ErrorCode::InvalidConfig, "layer with zero nodes in " + sizes_to_string(layer_sizes));
    if (layer_sizes.back() != 1) fail(ErrorCode::InvalidConfig, "output layer must have exactly 1 node");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        fail(ErrorCode::InvalidConfig, "learning rate must be > 0");
    if (max_epochs < 1) fail(ErrorCode::InvalidConfig, "max_epochs must be >= 1");
    if (!(init_low < init_high) || !std::isfinite(init_low) || !std::isfinite(init_high))
        fail(ErrorCode::InvalidConfig, "init_low must be < init_high");
}

std::size_t weight_count(std::span<const std::size_t> layer_sizes) noexcept {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) n += layer_sizes[l] * (layer_sizes[l - 1] + 1);
    return n;
}

std::size_t MLPModel::weight_count() const noexcept { return mlp::weight_count(layer_sizes); }

MLPModel init_weights(const MLPConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const auto draw = [&] {
        const double v = cfg.init_low + (cfg.init_high - cfg.init_low) * unit_uniform(rng);
        return v < cfg.init_high ? v : std::nextafter(cfg.init_high, cfg.init_low);
    };
    MLPModel model;
    model.layer_sizes = cfg.layer_sizes;
    for (std::size_t l = 1; l < cfg.layer_sizes.size(); ++l) {
        Layer layer{Matrix(cfg.layer_sizes[l], cfg.layer_sizes[l - 1]), std::vector<double>(cfg.layer_sizes[l])};
        for (double& w : layer.weights.data()) w = draw();
        for (double& b : layer.biases) b = draw();
        model.layers.push_back(std::move(layer));
    }
    return model;
}

double sigmoid(double x) noexcept {
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    double s;
    if (x >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    return std::clamp(s, lo, hi);
}

ForwardPass forward(const MLPModel& model, std::span<const double> x) {
    if (x.size() != model.input_size())
        fail(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.size()) +
                                           " values, network expects " + std::to_string(model.input_size()));
    ForwardPass pass;
    pass.activations.reserve(model.layer_sizes.size());
    pass.activations.emplace_back(x.begin(), x.end());
    for (const auto& layer : model.layers) {
        const auto& in = pass.activations.back();
        std::vector<double> out(layer.biases.size());
        for (std::size_t q = 0; q < out.size(); ++q) {
            double net = layer.biases[q];
            const auto w = layer.weights.row(q);
            for (std::size_t p = 0; p < in.size(); ++p) net += w[p] * in[p];
            out[q] = sigmoid(net);
        }
        pass.activations.push_back(std::move(out));
    }
    return pass;
}

double predict(const MLPModel& model, std::span<const double> x) { return forward(model, x).output(); }

std::vector<double> predict(const MLPModel& model, const Matrix& x) {
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(model, x.row(r)));
    return out;
}

double output_delta(double desired, double actual) noexcept {
    return (desired - actual) * actual * (1.0 - actual);
}

double hidden_delta(double activation, std::span<const DownstreamLink> downstream) noexcept {
    double sum = 0.0;
    for (const auto& link : downstream) sum += link.weight * link.delta;
    return activation * (1.0 - activation) * sum;
}

PatternTrace backpropagate(const MLPModel& model, std::span<const double> x, double desired) {
    PatternTrace trace{forward(model, x), {}};
    const auto n_layers = model.layers.size();
    trace.deltas.resize(n_layers);
    trace.deltas[n_layers - 1] = {output_delta(desired, trace.pass.output())};

    std::vector<DownstreamLink> links;
    for (std::size_t l = n_layers - 1; l-- > 0;) {
        const auto& act = trace.pass.activations[l + 1];
        const auto& next = model.layers[l + 1];
        const auto& next_deltas = trace.deltas[l + 1];
        auto& deltas = trace.deltas[l];
        deltas.resize(act.size());
        for (std::size_t j = 0; j < act.size(); ++j) {
            links.clear();
            for (std::size_t i = 0; i < next_deltas.size(); ++i)
                links.push_back({next.weights(i, j), next_deltas[i]});
            deltas[j] = hidden_delta(act[j], links);
        }
    }
    return trace;
}

MLPModel update_weights(const MLPModel& model, std::span<const PatternTrace> batch, double eta) {
    MLPModel next = model;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        Matrix grad(layer.weights.rows(), layer.weights.cols());
        std::vector<double> bias_grad(layer.biases.size(), 0.0);
        for (const auto& trace : batch) {
            if (trace.deltas.size() != model.layers.size() ||
                trace.deltas[l].size() != layer.biases.size() ||
                trace.pass.activations.size() != model.layer_sizes.size() ||
                trace.pass.activations[l].size() != layer.weights.cols())
                fail(ErrorCode::ShapeMismatch, "pattern trace does not match network topology " +
                                                   sizes_to_string(model.layer_sizes));
            const auto& upstream = trace.pass.activations[l];
            const auto& deltas = trace.deltas[l];
            for (std::size_t q = 0; q < deltas.size(); ++q) {
                auto g = grad.row(q);
                for (std::size_t p = 0; p < upstream.size(); ++p) g[p] += deltas[q] * upstream[p];
                bias_grad[q] += deltas[q];
            }
        }
        auto& out = next.layers[l];
        auto w = out.weights.data();
        const auto g = grad.data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] += eta * g[k];
        for (std::size_t q = 0; q < out.biases.size(); ++q) out.biases[q] += eta * bias_grad[q];
    }
    return next;
}

double mse(const MLPModel& model, const data::SupervisedMatrix& set) {
    check_set_shape(model, set, "data set");
    double sum = 0.0;
    for (std::size_t r = 0; r < set.y.size(); ++r) {
        const double e = set.y[r] - predict(model, set.x.row(r));
        sum += e * e;
    }
    return sum / static_cast<double>(set.y.size());
}

TrainResult train(MLPModel model, const data::SupervisedMatrix& train_set, const MLPConfig& cfg,
                  const data::SupervisedMatrix* validation) {
    cfg.validate();
    if (model.layer_sizes != cfg.layer_sizes)
        fail(ErrorCode::ShapeMismatch, "model topology " + sizes_to_string(model.layer_sizes) +
                                           " differs from config " + sizes_to_string(cfg.layer_sizes));
    check_set_shape(model, train_set, "training set");
    check_unit_interval(train_set, "training set");
    if (validation) {
        check_set_shape(model, *validation, "validation set");
        check_unit_interval(*validation, "validation set");
    }

    TrainReport report;
    report.train_mse_per_epoch.reserve(cfg.max_epochs);
    std::vector<PatternTrace> batch(train_set.y.size());
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        double sse = 0.0;
        for (std::size_t r = 0; r < batch.size(); ++r) {
            batch[r] = backpropagate(model, train_set.x.row(r), train_set.y[r]);
            const double e = train_set.y[r] - batch[r].pass.output();
            sse += e * e;
        }
        report.train_mse_per_epoch.push_back(sse / static_cast<double>(batch.size()));
        model = update_weights(model, batch, cfg.learning_rate);
        ++report.epochs_run;
    }
    report.final_train_mse = mse(model, train_set);
    if (validation) report.final_validation_mse = mse(model, *validation);
    return {std::move(model), std::move(report)};
}

Selection select_architecture(const std::vector<std::vector<std::size_t>>& candidates,
                              const data::SupervisedMatrix& train_set,
                              const data::SupervisedMatrix& validation, const MLPConfig& cfg) {
    if (candidates.empty()) fail(ErrorCode::InvalidConfig, "no candidate architectures");
    if (validation.y.empty()) fail(ErrorCode::EmptyInput, "architecture selection needs validation data");

    std::vector<MLPConfig> configs;
    for (const auto& sizes : candidates) {
        MLPConfig c = cfg;
        c.layer_sizes = sizes;
        c.validate();
        configs.push_back(std::move(c));
    }

    std::vector<std::future<TrainResult>> jobs;
    jobs.reserve(configs.size());
    for (const auto& c : configs)
        jobs.push_back(std::async(std::launch::async, [&train_set, &validation, &c] {
            return train(init_weights(c), train_set, c, &validation);
        }));

    Selection sel;
    std::vector<MLPModel> models;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto result = jobs[i].get();
        CandidateReport rep{configs[i].layer_sizes, result.model.weight_count(), std::move(result.report), 0.0};
        rep.validation_mse = *rep.report.final_validation_mse;
        sel.candidates.push_back(std::move(rep));
        models.push_back(std::move(result.model));
    }
    for (std::size_t i = 1; i < sel.candidates.size(); ++i) {
        const auto& c = sel.candidates[i];
        const auto& b = sel.candidates[sel.best_index];
        if (c.validation_mse < b.validation_mse ||
            (c.validation_mse == b.validation_mse && c.weight_count < b.weight_count))
            sel.best_index = i;
    }
    sel.best = std::move(models[sel.best_index]);
    return sel;
}

double gradient_check(const MLPModel& model, std::span<const double> x, double desired, double epsilon) {
    if (!(epsilon > 0.0)) fail(ErrorCode::InvalidConfig, "epsilon must be > 0");
    const auto trace = backpropagate(model, x, desired);
    MLPModel probe = model;
    double worst = 0.0;

    const auto compare = [&](double& param, double bp_gradient) {
        const double saved = param;
        param = saved + epsilon;
        const double up = loss(probe, x, desired);
        param = saved - epsilon;
        const double down = loss(probe, x, desired);
        param = saved;
        const double fd = (up - down) / (2.0 * epsilon);
        const double scale = std::max({std::abs(bp_gradient), std::abs(fd), kGradientFloor});
        worst = std::max(worst, std::abs(bp_gradient - fd) / scale);
    };

    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        auto& layer = probe.layers[l];
        const auto& upstream = trace.pass.activations[l];
        const auto& deltas = trace.deltas[l];
        for (std::size_t q = 0; q < deltas.size(); ++q) {
            // dL/dW_pq = -delta_q * o_p
            for (std::size_t p = 0; p < upstream.size(); ++p)
                compare(layer.weights(q, p), -deltas[q] * upstream[p]);
            compare(layer.biases[q], -deltas[q]);
        }
    }
    return worst;
}

std::string serialize(const MLPModel& model) {
    std::ostringstream out;
    out << kFormatTag << ' ' << kFormatVersion << '\n';
    out << "layers";
    for (auto n : model.layer_sizes) out << ' ' << n;
    out << '\n';
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        out << "weights " << l + 1 << ' ' << layer.weights.rows() << ' ' << layer.weights.cols() << '\n';
        for (std::size_t q = 0; q < layer.weights.rows(); ++q)
            out << text::format_doubles(layer.weights.row(q), ' ') << '\n';
        out << "biases " << l + 1 << ' ' << layer.biases.size() << '\n';
        out << text::format_doubles(layer.biases, ' ') << '\n';
    }
    return out.str();
}

MLPModel deserialize_mlp(std::string_view body) {
    std::istringstream in{std::string(body)};
    std::string tok;
    const auto expect = [&](std::string_view word) {
        if (!(in >> tok) || tok != word)
            fail(ErrorCode::ParseError, "mlp model: expected '" + std::string(word) + "', got '" + tok + "'");
    };
    const auto next_uint = [&](std::string_view what) {
        if (!(in >> tok)) fail(ErrorCode::ParseError, "mlp model: truncated at " + std::string(what));
        return static_cast<std::size_t>(text::parse_uint(tok, what));
    };
    const auto next_double = [&] {
        if (!(in >> tok)) fail(ErrorCode::ParseError, "mlp model: truncated weight data");
        return text::parse_double(tok, "weight");
    };

    expect(kFormatTag);
    if (next_uint("version") != static_cast<std::size_t>(kFormatVersion))
        fail(ErrorCode::ParseError, "mlp model: unsupported version");

    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream layers_line(line);
    if (!(layers_line >> tok) || tok != "layers") fail(ErrorCode::ParseError, "mlp model: missing layers line");
    MLPModel model;
    while (layers_line >> tok) model.layer_sizes.push_back(text::parse_uint(tok, "layer size"));

    MLPConfig shape_check;
    shape_check.layer_sizes = model.layer_sizes;
    try {
        shape_check.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, std::string("mlp model: ") + e.what());
    }

    for (std::size_t l = 1; l < model.layer_sizes.size(); ++l) {
        expect("weights");
        const auto idx = next_uint("layer index");
        const auto rows = next_uint("rows");
        const auto cols = next_uint("cols");
        if (idx != l || rows != model.layer_sizes[l] || cols != model.layer_sizes[l - 1])
            fail(ErrorCode::ParseError, "mlp model: weight block " + std::to_string(l) + " has wrong shape");
        Layer layer{Matrix(rows, cols), std::vector<double>(rows)};
        for (double& w : layer.weights.data()) w = next_double();
        expect("biases");
        if (next_uint("layer index") != l || next_uint("bias count") != rows)
            fail(ErrorCode::ParseError, "mlp model: bias block " + std::to_string(l) + " has wrong shape");
        for (double& b : layer.biases) b = next_double();
        model.layers.push_back(std::move(layer));
    }
    if (in >> tok) fail(ErrorCode::ParseError, "mlp model: trailing data '" + tok + "'");
    return model;
}

} // namespace epicast::mlp
