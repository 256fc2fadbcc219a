// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The wpinn authors

#include "wpinn/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace wpinn {

void Architecture::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("Architecture: need at least one layer");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("Architecture: widths must be positive");
  if (widths.back() != 1) throw std::invalid_argument("Architecture: output dimension must be 1");
}

Eigen::Index Params::count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
  return n;
}

void Params::set_zero() {
  for (auto& w : W) w.setZero();
  for (auto& v : b) v.setZero();
}

Eigen::VectorXd Params::pack() const {
  Eigen::VectorXd flat(count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    flat.segment(at, W[l].size()) = Eigen::Map<const Eigen::VectorXd>(W[l].data(), W[l].size());
    at += W[l].size();
    flat.segment(at, b[l].size()) = b[l];
    at += b[l].size();
  }
  return flat;
}

Params Params::zeros(const Architecture& arch) {
  arch.validate();
  Params p;
  const int L = arch.layers();
  p.W.resize(static_cast<std::size_t>(L));
  p.b.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    p.W[static_cast<std::size_t>(l)] =
        Eigen::MatrixXd::Zero(arch.widths[static_cast<std::size_t>(l) + 1], arch.widths[static_cast<std::size_t>(l)]);
    p.b[static_cast<std::size_t>(l)] = Eigen::VectorXd::Zero(arch.widths[static_cast<std::size_t>(l) + 1]);
  }
  return p;
}

Params Params::unpack(const Architecture& arch, const Eigen::VectorXd& flat) {
  Params p = zeros(arch);
  if (flat.size() != p.count()) throw std::invalid_argument("Params::unpack: length mismatch");
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < p.W.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(p.W[l].data(), p.W[l].size()) = flat.segment(at, p.W[l].size());
    at += p.W[l].size();
    p.b[l] = flat.segment(at, p.b[l].size());
    at += p.b[l].size();
  }
  return p;
}

bool Params::shapes_match(const Architecture& arch) const {
  if (static_cast<int>(W.size()) != arch.layers()) return false;
  for (int l = 0; l < arch.layers(); ++l) {
    const auto lu = static_cast<std::size_t>(l);
    if (W[lu].rows() != arch.widths[lu + 1] || W[lu].cols() != arch.widths[lu]) return false;
    if (b[lu].size() != arch.widths[lu + 1]) return false;
  }
  return true;
}

Params init_params(const Architecture& arch, std::uint64_t seed) {
  Params p = Params::zeros(arch);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < p.W.size(); ++l) {
    const double limit = std::sqrt(6.0 / (p.W[l].rows() + p.W[l].cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < p.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < p.W[l].cols(); ++j) p.W[l](i, j) = dist(rng);
  }
  return p;
}

namespace {

struct ScalarJetState {
  Eigen::VectorXd v, x, xx;
};

// Shared scalar core; forward() is the order-0 specialization so the two
// agree bitwise.
ScalarJetState scalar_jet(const Architecture& arch, const Params& theta,
                          std::span<const double> z, int order) {
  if (static_cast<int>(z.size()) != arch.input_dim())
    throw std::invalid_argument("network: input length does not match architecture");
  if (!theta.shapes_match(arch)) throw std::invalid_argument("network: parameter shapes mismatch");
  if (order < 0 || order > 2) throw std::invalid_argument("network: jet order must be 0, 1 or 2");
  if (order == 2 && arch.activation == Activation::ReLU)
    throw std::invalid_argument("network: second derivatives are unavailable for relu");

  const int L = arch.layers();
  ScalarJetState h;
  h.v = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  if (order >= 1) {
    h.x = Eigen::VectorXd::Zero(h.v.size());
    h.x[0] = 1.0;
  }
  if (order >= 2) h.xx = Eigen::VectorXd::Zero(h.v.size());

  for (int l = 0; l < L; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    ScalarJetState s;
    s.v = theta.W[lu] * h.v + theta.b[lu];
    if (order >= 1) s.x = theta.W[lu] * h.x;
    if (order >= 2) s.xx = theta.W[lu] * h.xx;
    if (l + 1 == L) {
      h = std::move(s);
      break;
    }
    if (arch.activation == Activation::Tanh) {
      const Eigen::ArrayXd t = s.v.array().tanh();
      const Eigen::ArrayXd d1 = 1.0 - t.square();
      h.v = t.matrix();
      if (order >= 1) h.x = (d1 * s.x.array()).matrix();
      if (order >= 2) {
        const Eigen::ArrayXd d2 = -2.0 * t * d1;
        h.xx = (d2 * s.x.array().square() + d1 * s.xx.array()).matrix();
      }
    } else {
      const Eigen::ArrayXd d1 = (s.v.array() > 0.0).cast<double>();
      h.v = (s.v.array() * d1).matrix();
      if (order >= 1) h.x = (d1 * s.x.array()).matrix();
    }
  }
  return h;
}

}  // namespace

double forward(const Architecture& arch, const Params& theta, std::span<const double> z) {
  return scalar_jet(arch, theta, z, 0).v[0];
}

Jet2 forward_jet(const Architecture& arch, const Params& theta, double x,
                 std::span<const double> mu, int order) {
  std::vector<double> z(static_cast<std::size_t>(1 + mu.size()));
  z[0] = x;
  for (std::size_t i = 0; i < mu.size(); ++i) z[i + 1] = mu[i];
  const ScalarJetState out = scalar_jet(arch, theta, z, order);
  Jet2 jet;
  jet.u = out.v[0];
  if (order >= 1) jet.ux = out.x[0];
  if (order >= 2) jet.uxx = out.xx[0];
  return jet;
}

namespace {

constexpr Eigen::Index kChunk = 2048;

struct LayerTrace {
  Eigen::MatrixXd hv, hx, hxx;     // layer inputs
  Eigen::ArrayXXd t, d1, sx, sxx;  // hidden-layer activation data
};

// Forward jet over one chunk, optionally recording what the reverse sweep
// needs.
void chunk_forward(const Architecture& arch, const Params& theta,
                   const Eigen::Ref<const Eigen::MatrixXd>& Z, int order, bool record,
                   Eigen::MatrixXd& out_v, Eigen::MatrixXd& out_x, Eigen::MatrixXd& out_xx,
                   std::vector<LayerTrace>* trace) {
  const int L = arch.layers();
  const Eigen::Index B = Z.cols();
  Eigen::MatrixXd hv = Z, hx, hxx;
  if (order >= 1) {
    hx = Eigen::MatrixXd::Zero(Z.rows(), B);
    hx.row(0).setOnes();
  }
  if (order >= 2) hxx = Eigen::MatrixXd::Zero(Z.rows(), B);

  for (int l = 0; l < L; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    if (record) {
      (*trace)[lu].hv = hv;
      if (order >= 1) (*trace)[lu].hx = hx;
      if (order >= 2) (*trace)[lu].hxx = hxx;
    }
    Eigen::MatrixXd sv = (theta.W[lu] * hv).colwise() + theta.b[lu];
    Eigen::MatrixXd sx, sxx;
    if (order >= 1) sx = theta.W[lu] * hx;
    if (order >= 2) sxx = theta.W[lu] * hxx;
    if (l + 1 == L) {
      out_v = std::move(sv);
      if (order >= 1) out_x = std::move(sx);
      if (order >= 2) out_xx = std::move(sxx);
      return;
    }
    if (arch.activation == Activation::Tanh) {
      Eigen::ArrayXXd t = sv.array().tanh();
      Eigen::ArrayXXd d1 = 1.0 - t.square();
      hv = t.matrix();
      if (order >= 1) hx = (d1 * sx.array()).matrix();
      if (order >= 2) hxx = ((-2.0 * t * d1) * sx.array().square() + d1 * sxx.array()).matrix();
      if (record) {
        (*trace)[lu].t = std::move(t);
        (*trace)[lu].d1 = std::move(d1);
        if (order >= 1) (*trace)[lu].sx = sx.array();
        if (order >= 2) (*trace)[lu].sxx = sxx.array();
      }
    } else {
      Eigen::ArrayXXd d1 = (sv.array() > 0.0).cast<double>();
      hv = (sv.array() * d1).matrix();
      if (order >= 1) hx = (d1 * sx.array()).matrix();
      if (record) {
        (*trace)[lu].d1 = std::move(d1);
        if (order >= 1) (*trace)[lu].sx = sx.array();
      }
    }
  }
}

}  // namespace

JetBatch forward_jet_batch(const Architecture& arch, const Params& theta, const Eigen::MatrixXd& Z,
                           int order) {
  if (Z.rows() != arch.input_dim())
    throw std::invalid_argument("forward_jet_batch: input rows do not match architecture");
  if (!theta.shapes_match(arch)) throw std::invalid_argument("forward_jet_batch: shape mismatch");
  if (order == 2 && arch.activation == Activation::ReLU)
    throw std::invalid_argument("forward_jet_batch: second derivatives unavailable for relu");

  const Eigen::Index B = Z.cols();
  JetBatch out;
  out.u.resize(B);
  if (order >= 1) out.ux.resize(B);
  if (order >= 2) out.uxx.resize(B);

  for (Eigen::Index at = 0; at < B; at += kChunk) {
    const Eigen::Index n = std::min(kChunk, B - at);
    Eigen::MatrixXd v, x, xx;
    chunk_forward(arch, theta, Z.middleCols(at, n), order, false, v, x, xx, nullptr);
    out.u.segment(at, n) = v.row(0).transpose();
    if (order >= 1) out.ux.segment(at, n) = x.row(0).transpose();
    if (order >= 2) out.uxx.segment(at, n) = xx.row(0).transpose();
  }
  return out;
}

void accumulate_jet_gradient(const Architecture& arch, const Params& theta,
                             const Eigen::MatrixXd& Z, int order, const JetBatch& seed,
                             Params& grad) {
  if (!theta.shapes_match(arch) || !grad.shapes_match(arch))
    throw std::invalid_argument("accumulate_jet_gradient: shape mismatch");
  if (order == 2 && arch.activation == Activation::ReLU)
    throw std::invalid_argument("accumulate_jet_gradient: second derivatives unavailable for relu");
  const Eigen::Index B = Z.cols();
  const int L = arch.layers();

  const bool has_u = seed.u.size() > 0;
  const bool has_x = order >= 1 && seed.ux.size() > 0;
  const bool has_xx = order >= 2 && seed.uxx.size() > 0;

  std::vector<LayerTrace> trace(static_cast<std::size_t>(L));
  for (Eigen::Index at = 0; at < B; at += kChunk) {
    const Eigen::Index n = std::min(kChunk, B - at);
    Eigen::MatrixXd v, x, xx;
    chunk_forward(arch, theta, Z.middleCols(at, n), order, true, v, x, xx, &trace);

    // Output-layer adjoints (1 x n rows).
    Eigen::MatrixXd av = Eigen::MatrixXd::Zero(1, n);
    Eigen::MatrixXd ax, axx;
    if (has_u) av.row(0) = seed.u.segment(at, n).transpose();
    if (order >= 1) {
      ax = Eigen::MatrixXd::Zero(1, n);
      if (has_x) ax.row(0) = seed.ux.segment(at, n).transpose();
    }
    if (order >= 2) {
      axx = Eigen::MatrixXd::Zero(1, n);
      if (has_xx) axx.row(0) = seed.uxx.segment(at, n).transpose();
    }

    for (int l = L - 1; l >= 0; --l) {
      const auto lu = static_cast<std::size_t>(l);
      Eigen::MatrixXd s_v, s_x, s_xx;
      if (l == L - 1) {
        // affine output layer
        s_v = std::move(av);
        if (order >= 1) s_x = std::move(ax);
        if (order >= 2) s_xx = std::move(axx);
      } else {
        const LayerTrace& tr = trace[lu];
        if (arch.activation == Activation::Tanh) {
          const Eigen::ArrayXXd& t = tr.t;
          const Eigen::ArrayXXd& d1 = tr.d1;
          const Eigen::ArrayXXd d2 = -2.0 * t * d1;
          s_v = (av.array() * d1).matrix();
          if (order >= 1) {
            s_v.array() += ax.array() * d2 * tr.sx;
            s_x = (ax.array() * d1).matrix();
          }
          if (order >= 2) {
            const Eigen::ArrayXXd d3 = (6.0 * t.square() - 2.0) * d1;
            s_v.array() += axx.array() * (d3 * tr.sx.square() + d2 * tr.sxx);
            s_x.array() += axx.array() * (2.0 * d2 * tr.sx);
            s_xx = (axx.array() * d1).matrix();
          }
        } else {
          const Eigen::ArrayXXd& d1 = tr.d1;
          s_v = (av.array() * d1).matrix();
          if (order >= 1) s_x = (ax.array() * d1).matrix();
        }
      }

      const LayerTrace& tr = trace[lu];
      grad.W[lu].noalias() += s_v * tr.hv.transpose();
      grad.b[lu].noalias() += s_v.rowwise().sum();
      if (order >= 1) grad.W[lu].noalias() += s_x * tr.hx.transpose();
      if (order >= 2) grad.W[lu].noalias() += s_xx * tr.hxx.transpose();

      if (l > 0) {
        av.noalias() = theta.W[lu].transpose() * s_v;
        if (order >= 1) ax.noalias() = theta.W[lu].transpose() * s_x;
        if (order >= 2) axx.noalias() = theta.W[lu].transpose() * s_xx;
      }
    }
  }
}

std::function<double(double)> project_zero_mean(std::function<double(double)> f,
                                                std::span<const double> nodes,
                                                std::span<const double> weights) {
  if (nodes.size() != weights.size())
    throw std::invalid_argument("project_zero_mean: node/weight size mismatch");
  double mean = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    mean += weights[i] * f(nodes[i]);
    wsum += weights[i];
  }
  mean /= wsum;
  return [f = std::move(f), mean](double x) { return f(x) - mean; };
}

// --- Serialization -------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'W', 'N', 'E', 'T'};
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

void write_params(const std::filesystem::path& path, const Architecture& arch, const Params& theta) {
  if (!theta.shapes_match(arch)) throw std::invalid_argument("write_params: shape mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_params: cannot open " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(arch.widths.size()));
  for (int w : arch.widths) put<std::int32_t>(os, w);
  put<std::uint8_t>(os, arch.activation == Activation::Tanh ? 0 : 1);
  for (std::size_t l = 0; l < theta.W.size(); ++l) {
    // row-major blocks
    for (Eigen::Index i = 0; i < theta.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < theta.W[l].cols(); ++j) put<double>(os, theta.W[l](i, j));
    for (Eigen::Index i = 0; i < theta.b[l].size(); ++i) put<double>(os, theta.b[l][i]);
  }
  if (!os) throw std::runtime_error("write_params: write failed");
}

ParamsFile read_params(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_params: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_params: not a parameter file: " + path.string());
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("read_params: unsupported version");
  ParamsFile f;
  const auto n = get<std::uint32_t>(is);
  if (n < 2 || n > 64) throw std::runtime_error("read_params: corrupt header");
  f.arch.widths.resize(n);
  for (auto& w : f.arch.widths) w = get<std::int32_t>(is);
  f.arch.activation = get<std::uint8_t>(is) == 0 ? Activation::Tanh : Activation::ReLU;
  f.arch.validate();
  f.theta = Params::zeros(f.arch);
  for (std::size_t l = 0; l < f.theta.W.size(); ++l) {
    for (Eigen::Index i = 0; i < f.theta.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < f.theta.W[l].cols(); ++j) f.theta.W[l](i, j) = get<double>(is);
    for (Eigen::Index i = 0; i < f.theta.b[l].size(); ++i) f.theta.b[l][i] = get<double>(is);
  }
  if (!is) throw std::runtime_error("read_params: truncated file");
  return f;
}

}  // namespace wpinn
