#include "gridfuse/mean_net.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gridfuse/error.hpp"

namespace gridfuse {

MeanNet::MeanNet(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
    if (dims_.size() < 2) throw InvalidArgument("MeanNet: need at least input and output dims");
    for (int d : dims_)
        if (d <= 0) throw InvalidArgument("MeanNet: layer dims must be positive");
    if (dims_.back() != 1) throw InvalidArgument("MeanNet: output dimension must be 1");
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        weights_.emplace_back(Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]));
        biases_.emplace_back(Eigen::VectorXd::Zero(dims_[l + 1]));
    }
}

MeanNet MeanNet::glorot(std::vector<int> layer_dims, std::uint64_t seed) {
    MeanNet net(std::move(layer_dims));
    std::mt19937_64 rng(seed);
    // Map raw engine output to [-1, 1) directly; keeps the draw sequence fixed
    // regardless of the standard library's distribution implementation.
    auto unit = [&rng] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        auto& W = net.weights_[l];
        const double bound = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = bound * unit();
        for (Eigen::Index i = 0; i < net.biases_[l].size(); ++i) net.biases_[l][i] = bound * unit();
    }
    return net;
}

std::size_t MeanNet::parameter_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
        n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
}

std::vector<double> MeanNet::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const auto& W = weights_[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) out.push_back(W(i, j));
        for (Eigen::Index i = 0; i < biases_[l].size(); ++i) out.push_back(biases_[l][i]);
    }
    return out;
}

void MeanNet::assign(std::span<const double> params) {
    if (params.size() != parameter_count())
        throw InvalidArgument("MeanNet::assign: expected " + std::to_string(parameter_count()) +
                              " parameters, got " + std::to_string(params.size()));
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto& W = weights_[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = params[k++];
        for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l][i] = params[k++];
    }
}

void MeanNet::check_input(const Eigen::MatrixXd& inputs) const {
    if (dims_.empty()) throw InvalidArgument("MeanNet: network has no layers");
    if (inputs.cols() != dims_.front())
        throw InvalidArgument("MeanNet: input dimension " + std::to_string(inputs.cols()) +
                              " does not match layer_dims[0] = " + std::to_string(dims_.front()));
}

Eigen::VectorXd MeanNet::forward(const Eigen::MatrixXd& inputs) const {
    check_input(inputs);
    // Activations are kept column-per-sample: (width x n).
    Eigen::MatrixXd a = inputs.transpose();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z = weights_[l] * a;
        z.colwise() += biases_[l];
        if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return a.row(0).transpose();
}

std::vector<double> MeanNet::forward(std::span<const std::vector<double>> inputs) const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(inputs.size()), input_dim());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (static_cast<int>(inputs[i].size()) != input_dim())
            throw InvalidArgument("MeanNet: input dimension " + std::to_string(inputs[i].size()) +
                                  " does not match layer_dims[0] = " + std::to_string(input_dim()));
        for (int j = 0; j < input_dim(); ++j) X(static_cast<Eigen::Index>(i), j) = inputs[i][j];
    }
    Eigen::VectorXd y = forward(X);
    return {y.data(), y.data() + y.size()};
}

void MeanNet::backward(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& upstream,
                       std::span<double> grad) const {
    check_input(inputs);
    if (grad.size() != parameter_count()) throw InvalidArgument("MeanNet::backward: gradient size mismatch");
    if (upstream.size() != inputs.rows()) throw InvalidArgument("MeanNet::backward: upstream size mismatch");

    const std::size_t L = weights_.size();
    std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input to layer l
    acts.reserve(L);
    acts.push_back(inputs.transpose());
    for (std::size_t l = 0; l + 1 < L; ++l) {
        Eigen::MatrixXd z = weights_[l] * acts[l];
        z.colwise() += biases_[l];
        acts.push_back(z.cwiseMax(0.0));
    }

    std::vector<std::size_t> offset(L);
    for (std::size_t l = 0, k = 0; l < L; ++l) {
        offset[l] = k;
        k += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    }

    Eigen::MatrixXd delta = upstream.transpose();  // 1 x n
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd gW = delta * acts[l].transpose();
        const Eigen::VectorXd gb = delta.rowwise().sum();
        std::size_t k = offset[l];
        for (Eigen::Index i = 0; i < gW.rows(); ++i)
            for (Eigen::Index j = 0; j < gW.cols(); ++j) grad[k++] += gW(i, j);
        for (Eigen::Index i = 0; i < gb.size(); ++i) grad[k++] += gb[i];
        if (l == 0) break;
        Eigen::MatrixXd prev = weights_[l].transpose() * delta;
        // ReLU derivative from the post-activation: zero where the unit is off.
        delta = prev.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
}

bool MeanNet::all_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
}

}  // namespace gridfuse
