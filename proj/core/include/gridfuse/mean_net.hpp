#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace gridfuse {

/// Fully connected network with ReLU hidden layers and a linear scalar output.
///
/// Parameters are laid out layer by layer, each layer as its weight matrix in
/// row-major order (out x in) followed by its bias vector. `flatten`,
/// `assign` and `backward` all use that order.
class MeanNet {
public:
    MeanNet() = default;

    /// `layer_dims` = {d_in, h1, ..., 1}; weights start at zero.
    explicit MeanNet(std::vector<int> layer_dims);

    /// Glorot-uniform weights and biases in +-sqrt(6 / (fan_in + fan_out)).
    static MeanNet glorot(std::vector<int> layer_dims, std::uint64_t seed);

    const std::vector<int>& layer_dims() const noexcept { return dims_; }
    int input_dim() const noexcept { return dims_.empty() ? 0 : dims_.front(); }
    std::size_t layer_count() const noexcept { return weights_.size(); }
    std::size_t parameter_count() const noexcept;

    Eigen::MatrixXd& weight(std::size_t layer) { return weights_.at(layer); }
    const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_.at(layer); }
    Eigen::VectorXd& bias(std::size_t layer) { return biases_.at(layer); }
    const Eigen::VectorXd& bias(std::size_t layer) const { return biases_.at(layer); }

    std::vector<double> flatten() const;
    void assign(std::span<const double> params);

    /// Rows of `inputs` are samples. Throws InvalidArgument on a width mismatch.
    Eigen::VectorXd forward(const Eigen::MatrixXd& inputs) const;
    std::vector<double> forward(std::span<const std::vector<double>> inputs) const;

    /// Accumulates d(sum_i upstream[i] * out_i)/d(params) into `grad`
    /// (length parameter_count()).
    void backward(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& upstream,
                  std::span<double> grad) const;

    bool all_finite() const;

private:
    void check_input(const Eigen::MatrixXd& inputs) const;

    std::vector<int> dims_;
    std::vector<Eigen::MatrixXd> weights_;  // out x in
    std::vector<Eigen::VectorXd> biases_;
};

}  // namespace gridfuse
