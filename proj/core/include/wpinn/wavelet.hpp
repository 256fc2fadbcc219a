// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#pragma once

/// @file wavelet.hpp
/// @brief Biorthogonal periodic spline wavelets on (0,1): mask generation
///        for the CDF B-spline family, the fast wavelet transform and its
///        inverse, Sobolev-weighted coefficient norms, thresholding, and
///        norm-equivalence constant estimation.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wpinn {

/// Finite filter mask with explicit support offsets: w[i] is the
/// coefficient of shift lo+i.
struct Mask {
  int lo = 0;
  std::vector<double> w;

  int hi() const { return lo + static_cast<int>(w.size()) - 1; }
  int size() const { return static_cast<int>(w.size()); }

  /// Coefficient at shift k, zero outside the support.
  double at(int k) const {
    const int i = k - lo;
    return (i >= 0 && i < size()) ? w[static_cast<std::size_t>(i)] : 0.0;
  }

  double sum() const;
};

/// A biorthogonal CDF(d, dt) spline wavelet pair.
///
/// The primal scaling function is the cardinal B-spline of order d with
/// support [0, d]; the dual scaling function has dt vanishing-moment
/// order. Masks are aligned on a common integer grid so that
/// sum_k a[k] a_dual[k-2m] = 2 delta_{m,0}.
struct WaveletBasis {
  int d = 0;        ///< primal spline order (>= 2)
  int dt = 0;       ///< dual order = number of primal wavelet vanishing moments
  Mask a;           ///< primal scaling mask, support 0..d
  Mask a_dual;      ///< dual scaling mask
  Mask b;           ///< primal wavelet mask, b[k] = (-1)^k a_dual[1-k]
  Mask b_dual;      ///< dual wavelet mask, b_dual[k] = (-1)^k a[1-k]
  double gamma = 0;    ///< primal Sobolev regularity index (d - 1/2 for B-splines)
  double gamma_t = 0;  ///< dual regularity index (conservative lower bound)

  std::string name() const;  ///< e.g. "cdf(2,2)"
};

/// Builds the CDF(d, dt) pair. Supported: even d in {2,4,6,8}, even
/// dt >= 2 (d + dt even by construction). Anything else throws
/// std::invalid_argument("basis not tabulated ...").
WaveletBasis make_basis(int d, int dt);

/// Multilevel coefficients (c_coarsest, d_coarsest, ..., d_{J-1}) of a
/// periodized expansion. Level-j blocks have exactly 2^j entries; the
/// total entry count is 2^J.
struct CoefficientPyramid {
  int coarsest = 0;
  Eigen::VectorXd coarse;                   ///< 2^coarsest entries
  std::vector<Eigen::VectorXd> details;     ///< details[i] is level coarsest+i

  int finest() const { return coarsest + static_cast<int>(details.size()); }
  Eigen::Index size() const;
  bool well_formed() const;
};

/// Analysis transform T_J: single-scale coefficients of length 2^J down to
/// level `coarsest`, filtering with the primal masks and periodic index
/// wrap-around. O(2^J).
CoefficientPyramid fwt_decompose(const Eigen::VectorXd& c, const WaveletBasis& basis,
                                 int coarsest = 0);

/// Synthesis transform: exact inverse of fwt_decompose (dual masks). O(2^J).
Eigen::VectorXd fwt_reconstruct(const CoefficientPyramid& p, const WaveletBasis& basis);

/// Transpose of the analysis transform, mapping a pyramid-shaped adjoint
/// back to single-scale coefficients. Used when differentiating losses
/// through the FWT; distinct from fwt_reconstruct because T_J is not
/// orthogonal for biorthogonal masks.
Eigen::VectorXd fwt_decompose_transpose(const CoefficientPyramid& p, const WaveletBasis& basis);

/// ||c_coarse||^2 + sum_j 2^{-2 sigma j} ||d_j||^2 with j the true level
/// index of each detail block and weight 1 on the coarse block.
double weighted_sobolev_sum(const CoefficientPyramid& p, double sigma);

/// Zeroes every detail entry whose weighted magnitude 2^{-sigma j} |d_{j,k}|
/// falls below tol. The coarse block is never thresholded. The weighted sum
/// decreases by at most (#zeroed) * tol^2.
CoefficientPyramid adaptive_truncate(const CoefficientPyramid& p, double sigma, double tol);

/// Norm-equivalence constants for expansions in the periodized dual
/// wavelets: for every pyramid up to level `level`,
///   c_low * S <= || sum d_{j,k} psit_{j,k} ||^2_{H^sigma_per} <= C_up * S,
/// where S = weighted_sobolev_sum(p, -sigma).
struct NormEquivalence {
  double c_low = 0;
  double C_up = 0;
  double sigma = 0;
  int level = 0;
};

/// Estimates the constants as the extreme eigenvalues of the H^sigma Gram
/// matrix of the weight-normalized dual wavelets, with dual functions
/// evaluated by the cascade algorithm and inner products in Fourier space.
/// Requires sigma in (-gamma, gamma_t); otherwise throws
/// std::domain_error("norm equivalence not valid ...").
NormEquivalence estimate_norm_constants(const WaveletBasis& basis, double sigma, int level);

// --- Serialization -------------------------------------------------------
//
// Binary layout (all little-endian): magic "WPYR", u32 version, i32 d,
// i32 dt, i32 coarsest, i32 finest J, f64 sigma, then 2^J f64 coefficients
// coarse-to-fine.

void write_pyramid(const std::filesystem::path& path, const CoefficientPyramid& p,
                   const WaveletBasis& basis, double sigma);

struct PyramidFile {
  CoefficientPyramid pyramid;
  int d = 0;
  int dt = 0;
  double sigma = 0;
};

PyramidFile read_pyramid(const std::filesystem::path& path);

/// CSV flavor of the same layout: one "# header" line, then level,index,value rows.
void write_pyramid_csv(const std::filesystem::path& path, const CoefficientPyramid& p,
                       const WaveletBasis& basis, double sigma);

}  // namespace wpinn
