// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/wavelet.hpp"

#include "wpinn/spectral.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wpinn {

namespace {

// Laurent polynomial in z with real coefficients; c[i] belongs to z^(lo+i).
struct Laurent {
  int lo = 0;
  std::vector<double> c;
};

Laurent lmul(const Laurent& a, const Laurent& b) {
  Laurent r;
  r.lo = a.lo + b.lo;
  r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

Laurent laxpy(const Laurent& a, const Laurent& b, double s) {
  const int lo = std::min(a.lo, b.lo);
  const int hi = std::max(a.lo + static_cast<int>(a.c.size()), b.lo + static_cast<int>(b.c.size()));
  Laurent r;
  r.lo = lo;
  r.c.assign(static_cast<std::size_t>(hi - lo), 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[static_cast<std::size_t>(a.lo - lo) + i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r.c[static_cast<std::size_t>(b.lo - lo) + i] += s * b.c[i];
  return r;
}

Laurent lpow(const Laurent& a, int n) {
  Laurent r{0, {1.0}};
  for (int i = 0; i < n; ++i) r = lmul(r, a);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Dual scaling mask of the CDF(d, dt) pair, aligned against the primal
// B-spline mask on 0..d:
//   2 * z^{d/2} * ((2 + z + 1/z)/4)^{dt/2} * P_L((2 - z - 1/z)/4)
// with L = (d+dt)/2 and P_L(y) = sum_{n<L} binom(L-1+n, n) y^n. All
// coefficients are dyadic rationals, so the expansion is exact in doubles.
Mask cdf_dual_mask(int d, int dt) {
  const int L = (d + dt) / 2;
  const Laurent cos2{-1, {0.25, 0.5, 0.25}};
  const Laurent sin2{-1, {-0.25, 0.5, -0.25}};
  Laurent P{0, {0.0}};
  for (int n = 0; n < L; ++n) P = laxpy(P, lpow(sin2, n), binomial(L - 1 + n, n));
  Laurent m = lmul(lpow(cos2, dt / 2), P);
  Mask out;
  out.lo = m.lo + d / 2;
  out.w = std::move(m.c);
  for (double& x : out.w) x *= 2.0;
  return out;
}

int mod(int i, int m) { return ((i % m) + m) % m; }

bool is_power_of_two(Eigen::Index n) {
  return n > 0 && std::has_single_bit(static_cast<std::uint64_t>(n));
}

int log2_exact(Eigen::Index n) { return std::countr_zero(static_cast<std::uint64_t>(n)); }

// One analysis step: length-n vector -> (low, high) halves, primal masks.
void analysis_step(const Eigen::VectorXd& c, const WaveletBasis& basis, Eigen::VectorXd& low,
                   Eigen::VectorXd& high) {
  const int n = static_cast<int>(c.size());
  const int nh = n / 2;
  low.setZero(nh);
  high.setZero(nh);
  const Mask& a = basis.a;
  const Mask& b = basis.b;
  for (int k = 0; k < nh; ++k) {
    double lo = 0.0;
    for (int i = 0; i < a.size(); ++i) lo += a.w[static_cast<std::size_t>(i)] * c[mod(2 * k + a.lo + i, n)];
    double hi = 0.0;
    for (int i = 0; i < b.size(); ++i) hi += b.w[static_cast<std::size_t>(i)] * c[mod(2 * k + b.lo + i, n)];
    low[k] = lo * M_SQRT1_2;
    high[k] = hi * M_SQRT1_2;
  }
}

// One synthesis step with the dual masks (inverse of analysis_step).
Eigen::VectorXd synthesis_step(const Eigen::VectorXd& low, const Eigen::VectorXd& high,
                               const WaveletBasis& basis) {
  const int nh = static_cast<int>(low.size());
  const int n = 2 * nh;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const Mask& at = basis.a_dual;
  const Mask& bt = basis.b_dual;
  for (int k = 0; k < nh; ++k) {
    const double lk = M_SQRT1_2 * low[k];
    for (int i = 0; i < at.size(); ++i) c[mod(2 * k + at.lo + i, n)] += at.w[static_cast<std::size_t>(i)] * lk;
    const double hk = M_SQRT1_2 * high[k];
    for (int i = 0; i < bt.size(); ++i) c[mod(2 * k + bt.lo + i, n)] += bt.w[static_cast<std::size_t>(i)] * hk;
  }
  return c;
}

// Transpose of analysis_step: same index pattern as synthesis but with the
// primal masks.
Eigen::VectorXd analysis_step_transpose(const Eigen::VectorXd& low, const Eigen::VectorXd& high,
                                        const WaveletBasis& basis) {
  const int nh = static_cast<int>(low.size());
  const int n = 2 * nh;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const Mask& a = basis.a;
  const Mask& b = basis.b;
  for (int k = 0; k < nh; ++k) {
    const double lk = M_SQRT1_2 * low[k];
    for (int i = 0; i < a.size(); ++i) c[mod(2 * k + a.lo + i, n)] += a.w[static_cast<std::size_t>(i)] * lk;
    const double hk = M_SQRT1_2 * high[k];
    for (int i = 0; i < b.size(); ++i) c[mod(2 * k + b.lo + i, n)] += b.w[static_cast<std::size_t>(i)] * hk;
  }
  return c;
}

// Conservative lower bounds for the Sobolev regularity of the CDF dual
// scaling functions; only used to gate the admissible sigma range.
double dual_regularity(int d, int dt) {
  if (d == 2 && dt == 2) return 0.44;
  if (d == 2 && dt == 4) return 1.0;
  if (d == 4 && dt == 4) return 0.6;
  if (d == 4 && dt == 6) return 1.0;
  return 0.3 + 0.05 * dt;
}

void check_masks(const WaveletBasis& basis) {
  const Mask& a = basis.a;
  const Mask& at = basis.a_dual;
  if (std::abs(a.sum() - 2.0) > 1e-12 || std::abs(at.sum() - 2.0) > 1e-12)
    throw std::logic_error("wavelet mask construction: two-scale sums are off");
  for (int m = -at.size(); m <= at.size(); ++m) {
    double s = 0.0;
    for (int k = a.lo; k <= a.hi(); ++k) s += a.at(k) * at.at(k - 2 * m);
    if (std::abs(s - (m == 0 ? 2.0 : 0.0)) > 1e-12)
      throw std::logic_error("wavelet mask construction: biorthogonality violated");
  }
}

}  // namespace

double Mask::sum() const {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

std::string WaveletBasis::name() const {
  return "cdf(" + std::to_string(d) + "," + std::to_string(dt) + ")";
}

WaveletBasis make_basis(int d, int dt) {
  const bool supported = (d == 2 || d == 4 || d == 6 || d == 8) && dt >= 2 && dt % 2 == 0;
  if (!supported)
    throw std::invalid_argument("basis not tabulated: cdf(" + std::to_string(d) + "," +
                                std::to_string(dt) + "); supported are even d in {2,4,6,8} with even dt >= 2");

  WaveletBasis basis;
  basis.d = d;
  basis.dt = dt;

  basis.a.lo = 0;
  basis.a.w.resize(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) basis.a.w[static_cast<std::size_t>(k)] = std::ldexp(binomial(d, k), 1 - d);

  basis.a_dual = cdf_dual_mask(d, dt);

  // b[k] = (-1)^k a_dual[1-k], b_dual[k] = (-1)^k a[1-k].
  basis.b.lo = 1 - basis.a_dual.hi();
  basis.b.w.resize(basis.a_dual.w.size());
  for (int k = basis.b.lo; k <= 1 - basis.a_dual.lo; ++k)
    basis.b.w[static_cast<std::size_t>(k - basis.b.lo)] = (mod(k, 2) ? -1.0 : 1.0) * basis.a_dual.at(1 - k);

  basis.b_dual.lo = 1 - basis.a.hi();
  basis.b_dual.w.resize(basis.a.w.size());
  for (int k = basis.b_dual.lo; k <= 1 - basis.a.lo; ++k)
    basis.b_dual.w[static_cast<std::size_t>(k - basis.b_dual.lo)] = (mod(k, 2) ? -1.0 : 1.0) * basis.a.at(1 - k);

  basis.gamma = d - 0.5;
  basis.gamma_t = dual_regularity(d, dt);

  check_masks(basis);
  return basis;
}

Eigen::Index CoefficientPyramid::size() const {
  Eigen::Index n = coarse.size();
  for (const auto& dj : details) n += dj.size();
  return n;
}

bool CoefficientPyramid::well_formed() const {
  if (coarsest < 0) return false;
  if (coarse.size() != (Eigen::Index{1} << coarsest)) return false;
  for (std::size_t i = 0; i < details.size(); ++i)
    if (details[i].size() != (Eigen::Index{1} << (coarsest + static_cast<int>(i)))) return false;
  return true;
}

CoefficientPyramid fwt_decompose(const Eigen::VectorXd& c, const WaveletBasis& basis, int coarsest) {
  if (!is_power_of_two(c.size()))
    throw std::invalid_argument("fwt_decompose: input length must be a power of two");
  if (coarsest < 0) throw std::invalid_argument("fwt_decompose: coarsest must be >= 0");
  const int J = log2_exact(c.size());
  if (coarsest > J) throw std::invalid_argument("fwt_decompose: coarsest exceeds input level");

  CoefficientPyramid p;
  p.coarsest = coarsest;
  p.details.resize(static_cast<std::size_t>(J - coarsest));
  Eigen::VectorXd cur = c;
  for (int j = J; j > coarsest; --j) {
    Eigen::VectorXd low, high;
    analysis_step(cur, basis, low, high);
    p.details[static_cast<std::size_t>(j - 1 - coarsest)] = std::move(high);
    cur = std::move(low);
  }
  p.coarse = std::move(cur);
  return p;
}

Eigen::VectorXd fwt_reconstruct(const CoefficientPyramid& p, const WaveletBasis& basis) {
  if (!p.well_formed()) throw std::invalid_argument("fwt_reconstruct: malformed pyramid");
  Eigen::VectorXd cur = p.coarse;
  for (const auto& dj : p.details) cur = synthesis_step(cur, dj, basis);
  return cur;
}

Eigen::VectorXd fwt_decompose_transpose(const CoefficientPyramid& p, const WaveletBasis& basis) {
  if (!p.well_formed()) throw std::invalid_argument("fwt_decompose_transpose: malformed pyramid");
  Eigen::VectorXd cur = p.coarse;
  for (const auto& dj : p.details) cur = analysis_step_transpose(cur, dj, basis);
  return cur;
}

double weighted_sobolev_sum(const CoefficientPyramid& p, double sigma) {
  if (!p.well_formed()) throw std::invalid_argument("weighted_sobolev_sum: malformed pyramid");
  double s = p.coarse.squaredNorm();
  for (std::size_t i = 0; i < p.details.size(); ++i) {
    const int j = p.coarsest + static_cast<int>(i);
    s += std::exp2(-2.0 * sigma * j) * p.details[i].squaredNorm();
  }
  return s;
}

CoefficientPyramid adaptive_truncate(const CoefficientPyramid& p, double sigma, double tol) {
  if (tol < 0) throw std::invalid_argument("adaptive_truncate: tol must be >= 0");
  CoefficientPyramid out = p;
  for (std::size_t i = 0; i < out.details.size(); ++i) {
    const int j = out.coarsest + static_cast<int>(i);
    const double weight = std::exp2(-sigma * j);
    for (Eigen::Index k = 0; k < out.details[i].size(); ++k)
      if (weight * std::abs(out.details[i][k]) < tol) out.details[i][k] = 0.0;
  }
  return out;
}

NormEquivalence estimate_norm_constants(const WaveletBasis& basis, double sigma, int level) {
  if (!(sigma > -basis.gamma && sigma < basis.gamma_t))
    throw std::domain_error("norm equivalence not valid: sigma outside (-" +
                            std::to_string(basis.gamma) + ", " + std::to_string(basis.gamma_t) +
                            ") for " + basis.name());
  if (level < 3) throw std::invalid_argument("estimate_norm_constants: level must be >= 3");

  const int n_slots = 1 << level;
  const int oversample = 4;
  const int grid = 1 << (level + oversample);

  // Weighted Fourier columns of each dual wavelet, normalized by the
  // weighted-sum weights; the Gram matrix of these columns realizes the
  // quadratic form whose Rayleigh extremes are the constants.
  const int n_freq = grid / 2;  // modes |k| < grid/2
  Eigen::MatrixXcd F(n_freq, n_slots);

  Eigen::VectorXd fourier_weight(n_freq);
  for (int k = 0; k < n_freq; ++k) {
    const double w2 = std::pow(2.0 * M_PI * k, 2);
    // factor 2 accounts for the conjugate mode -k
    fourier_weight[k] = std::sqrt((k == 0 ? 1.0 : 2.0) * std::pow(1.0 + w2, sigma));
  }

  CoefficientPyramid unit;
  unit.coarsest = 0;
  unit.coarse = Eigen::VectorXd::Zero(1);
  unit.details.resize(static_cast<std::size_t>(level));
  for (int j = 0; j < level; ++j) unit.details[static_cast<std::size_t>(j)] = Eigen::VectorXd::Zero(1 << j);

  int col = 0;
  auto add_column = [&](double inv_weight) {
    const GridFunction gf = synthesize_dual_expansion(basis, unit, oversample);
    const Eigen::VectorXcd coeffs = fourier_coefficients(gf);
    for (int k = 0; k < n_freq; ++k) F(k, col) = fourier_weight[k] * inv_weight * coeffs[k];
    ++col;
  };

  unit.coarse[0] = 1.0;
  add_column(1.0);
  unit.coarse[0] = 0.0;
  for (int j = 0; j < level; ++j) {
    const double inv_weight = std::exp2(-sigma * j);  // 1 / 2^{sigma j}
    auto& dj = unit.details[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < dj.size(); ++k) {
      dj[k] = 1.0;
      add_column(inv_weight);
      dj[k] = 0.0;
    }
  }

  const Eigen::MatrixXd gram = (F.adjoint() * F).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  NormEquivalence out;
  out.c_low = eig.eigenvalues().minCoeff();
  out.C_up = eig.eigenvalues().maxCoeff();
  out.sigma = sigma;
  out.level = level;
  if (!(out.c_low > 0.0))
    throw std::runtime_error("estimate_norm_constants: Gram matrix not positive definite");
  return out;
}

// --- Serialization -------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'W', 'P', 'Y', 'R'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "serialization assumes little-endian");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_pyramid(const std::filesystem::path& path, const CoefficientPyramid& p,
                   const WaveletBasis& basis, double sigma) {
  if (!p.well_formed()) throw std::invalid_argument("write_pyramid: malformed pyramid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pyramid: cannot open " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, basis.d);
  put<std::int32_t>(os, basis.dt);
  put<std::int32_t>(os, p.coarsest);
  put<std::int32_t>(os, p.finest());
  put<double>(os, sigma);
  os.write(reinterpret_cast<const char*>(p.coarse.data()),
           static_cast<std::streamsize>(sizeof(double)) * p.coarse.size());
  for (const auto& dj : p.details)
    os.write(reinterpret_cast<const char*>(dj.data()),
             static_cast<std::streamsize>(sizeof(double)) * dj.size());
  if (!os) throw std::runtime_error("write_pyramid: write failed for " + path.string());
}

PyramidFile read_pyramid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_pyramid: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_pyramid: not a pyramid file: " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("read_pyramid: unsupported version");
  PyramidFile f;
  f.d = get<std::int32_t>(is);
  f.dt = get<std::int32_t>(is);
  f.pyramid.coarsest = get<std::int32_t>(is);
  const int finest = get<std::int32_t>(is);
  f.sigma = get<double>(is);
  if (f.pyramid.coarsest < 0 || finest < f.pyramid.coarsest || finest > 30)
    throw std::runtime_error("read_pyramid: corrupt header");
  f.pyramid.coarse.resize(Eigen::Index{1} << f.pyramid.coarsest);
  is.read(reinterpret_cast<char*>(f.pyramid.coarse.data()),
          static_cast<std::streamsize>(sizeof(double)) * f.pyramid.coarse.size());
  f.pyramid.details.resize(static_cast<std::size_t>(finest - f.pyramid.coarsest));
  for (int j = f.pyramid.coarsest; j < finest; ++j) {
    auto& dj = f.pyramid.details[static_cast<std::size_t>(j - f.pyramid.coarsest)];
    dj.resize(Eigen::Index{1} << j);
    is.read(reinterpret_cast<char*>(dj.data()), static_cast<std::streamsize>(sizeof(double)) * dj.size());
  }
  if (!is) throw std::runtime_error("read_pyramid: truncated file: " + path.string());
  return f;
}

void write_pyramid_csv(const std::filesystem::path& path, const CoefficientPyramid& p,
                       const WaveletBasis& basis, double sigma) {
  if (!p.well_formed()) throw std::invalid_argument("write_pyramid_csv: malformed pyramid");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_pyramid_csv: cannot open " + path.string());
  os << "# pyramid basis=" << basis.name() << " coarsest=" << p.coarsest << " finest=" << p.finest()
     << " sigma=" << sigma << "\n";
  os << "level,index,value\n";
  os.precision(17);
  for (Eigen::Index k = 0; k < p.coarse.size(); ++k)
    os << p.coarsest << "," << k << "," << p.coarse[k] << "\n";
  for (std::size_t i = 0; i < p.details.size(); ++i) {
    const int j = p.coarsest + static_cast<int>(i);
    for (Eigen::Index k = 0; k < p.details[i].size(); ++k)
      os << j << "," << k << "," << p.details[i][k] << "\n";
  }
}

}  // namespace wpinn
