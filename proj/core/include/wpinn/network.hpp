// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file network.hpp
/// @brief Dense feed-forward networks with tanh activations: forward
///        evaluation, input-derivative jets up to order 2, reverse-mode
///        parameter gradients of jet-weighted sums, and the zero-mean
///        projector used as gauge normalization.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace wpinn {

enum class Activation { Tanh, ReLU };

/// Layer widths (N_0, ..., N_L) plus the activation applied to hidden layers.
struct Architecture {
  std::vector<int> widths;
  Activation activation = Activation::Tanh;

  int layers() const { return static_cast<int>(widths.size()) - 1; }  ///< L
  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  void validate() const;
};

/// Per-layer weight matrices W^(l) (N_l x N_{l-1}) and bias vectors b^(l).
struct Params {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  Eigen::Index count() const;
  void set_zero();
  Eigen::VectorXd pack() const;
  static Params unpack(const Architecture& arch, const Eigen::VectorXd& flat);
  static Params zeros(const Architecture& arch);
  bool shapes_match(const Architecture& arch) const;
};

/// Glorot-uniform weights, zero biases; bit-reproducible for a given seed.
Params init_params(const Architecture& arch, std::uint64_t seed);

/// Value, first and second derivative with respect to the spatial input.
struct Jet2 {
  double u = 0;
  double ux = 0;
  double uxx = 0;
};

/// Scalar forward pass (layer recursion with componentwise activation on
/// hidden layers, affine output layer).
double forward(const Architecture& arch, const Params& theta, std::span<const double> z);

/// Second-order forward jet in the first input coordinate; remaining inputs
/// (the parameters mu) ride along as constants. order selects how many
/// derivative lanes to propagate. ReLU rejects order 2.
Jet2 forward_jet(const Architecture& arch, const Params& theta, double x,
                 std::span<const double> mu, int order);

/// Batched jets: Z holds one input per column; the i-th entries of u/ux/uxx
/// belong to column i. Lanes beyond `order` are left empty.
struct JetBatch {
  Eigen::VectorXd u;
  Eigen::VectorXd ux;
  Eigen::VectorXd uxx;
};

JetBatch forward_jet_batch(const Architecture& arch, const Params& theta, const Eigen::MatrixXd& Z,
                           int order);

/// Reverse sweep through the jet propagation: accumulates into `grad` the
/// derivative with respect to every parameter of
///   sum_i seed.u[i]*u_i + seed.ux[i]*ux_i + seed.uxx[i]*uxx_i,
/// including the mixed d^2/(dx dtheta) paths. Empty seed lanes are treated
/// as zero.
void accumulate_jet_gradient(const Architecture& arch, const Params& theta,
                             const Eigen::MatrixXd& Z, int order, const JetBatch& seed,
                             Params& grad);

/// x -> f(x) - mean(f), the mean taken with the given quadrature rule; the
/// result has quadrature mean zero and the map is idempotent.
std::function<double(double)> project_zero_mean(std::function<double(double)> f,
                                                std::span<const double> nodes,
                                                std::span<const double> weights);

// Binary parameter files: magic "WNET", u32 version, u32 layer count L+1,
// i32 widths, u8 activation, then per layer W row-major and b, all
// little-endian f64.
void write_params(const std::filesystem::path& path, const Architecture& arch, const Params& theta);

struct ParamsFile {
  Architecture arch;
  Params theta;
};

ParamsFile read_params(const std::filesystem::path& path);

}  // namespace wpinn
