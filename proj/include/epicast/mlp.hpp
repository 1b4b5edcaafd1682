#pragma once

#include "epicast/matrix.hpp"
#include "epicast/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::mlp {

/// Hyperparameters for a fully connected sigmoid network.
///
/// `layer_sizes` lists node counts from the input layer to the single output
/// node, e.g. {6, 8, 1}. Every weight and bias is drawn uniformly from
/// [init_low, init_high) using `seed`.
struct MLPConfig {
    std::vector<std::size_t> layer_sizes;
    double learning_rate = 0.3;
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 42;
    double init_low = 0.0;
    double init_high = 1.0;

    /// Throws InvalidConfig.
    void validate() const;
};

/// Connections into one non-input layer.
struct Layer {
    Matrix weights;              // weights(q, p): node p of the previous layer -> node q
    std::vector<double> biases;  // one per node q, fed by a constant 1

    bool operator==(const Layer&) const = default;
};

struct MLPModel {
    std::vector<std::size_t> layer_sizes;
    std::vector<Layer> layers; // layers.size() == layer_sizes.size() - 1

    [[nodiscard]] std::size_t input_size() const noexcept { return layer_sizes.front(); }
    [[nodiscard]] std::size_t weight_count() const noexcept;
    bool operator==(const MLPModel&) const = default;
};

std::size_t weight_count(std::span<const std::size_t> layer_sizes) noexcept;

MLPModel init_weights(const MLPConfig& cfg);

/// Logistic function, kept strictly inside (0,1) for every finite argument.
double sigmoid(double x) noexcept;

struct ForwardPass {
    /// activations[0] is the input; activations.back() holds the single output.
    std::vector<std::vector<double>> activations;

    [[nodiscard]] double output() const noexcept { return activations.back().front(); }
};

/// Throws ShapeMismatch.
ForwardPass forward(const MLPModel& model, std::span<const double> x);
double predict(const MLPModel& model, std::span<const double> x);
std::vector<double> predict(const MLPModel& model, const Matrix& x);

/// Error signal of an output node: (d - o) * o * (1 - o).
double output_delta(double desired, double actual) noexcept;

struct DownstreamLink {
    double weight; // w_ji from this node j to downstream node i
    double delta;  // delta_i
};

/// Error signal of a hidden node: o_j * (1 - o_j) * sum(w_ji * delta_i).
double hidden_delta(double activation, std::span<const DownstreamLink> downstream) noexcept;

/// Forward activations and per-node error signals for one pattern.
struct PatternTrace {
    ForwardPass pass;
    /// deltas[l] belongs to layers[l], i.e. to activation layer l + 1.
    std::vector<std::vector<double>> deltas;
};

PatternTrace backpropagate(const MLPModel& model, std::span<const double> x, double desired);

/// Batch update: W_pq += eta * sum over traces of delta_q * o_p, biases with o_p = 1.
/// Throws ShapeMismatch when a trace does not match the model topology.
MLPModel update_weights(const MLPModel& model, std::span<const PatternTrace> batch, double eta);

struct TrainReport {
    std::size_t epochs_run = 0;
    /// Entry e is the batch MSE (normalized units) seen during epoch e, before its update.
    std::vector<double> train_mse_per_epoch;
    /// MSE of the returned model on the training set.
    double final_train_mse = 0.0;
    std::optional<double> final_validation_mse;

    bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
    MLPModel model;
    TrainReport report;
};

/// Batch backpropagation for exactly cfg.max_epochs epochs: one weight update per epoch.
/// Inputs and targets must already lie in [0,1] (UnnormalizedInput otherwise).
TrainResult train(MLPModel model, const data::SupervisedMatrix& train_set, const MLPConfig& cfg,
                  const data::SupervisedMatrix* validation = nullptr);

double mse(const MLPModel& model, const data::SupervisedMatrix& set);

struct CandidateReport {
    std::vector<std::size_t> layer_sizes;
    std::size_t weight_count = 0;
    TrainReport report;
    double validation_mse = 0.0;
};

struct Selection {
    MLPModel best;
    std::size_t best_index = 0;
    std::vector<CandidateReport> candidates;
};

/// Trains every candidate topology from cfg.seed (in parallel) and keeps the one
/// with least validation MSE; ties go to fewer weights, then to candidate order.
Selection select_architecture(const std::vector<std::vector<std::size_t>>& candidates,
                              const data::SupervisedMatrix& train_set,
                              const data::SupervisedMatrix& validation, const MLPConfig& cfg);

/// Worst relative discrepancy between backpropagated gradients of
/// L = (d - o)^2 / 2 and central finite differences with step `epsilon`.
/// Discrepancies are relative to max(|bp|, |fd|, kGradientFloor).
double gradient_check(const MLPModel& model, std::span<const double> x, double desired,
                      double epsilon = 1e-5);

inline constexpr double kGradientFloor = 1e-7;

std::string serialize(const MLPModel& model);
MLPModel deserialize_mlp(std::string_view text);

} // namespace epicast::mlp
