#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "grammargen/error.hpp"
#include "grammargen/kernel.hpp"
#include "grammargen/rng.hpp"

namespace grammargen {

struct OneClassParams {
  double nu = 0.5;
  unsigned epochs = 20;
  double eta0 = 0.5;  // learning rate eta_t = eta0 / (1 + eta0 * t)
  std::uint64_t seed = 1;
  unsigned feature_bits = 16;

  void validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) throw Error(ErrorKind::invalid_argument, "nu must lie in (0, 1]");
    if (epochs == 0) throw Error(ErrorKind::invalid_argument, "epochs must be positive");
    if (!(eta0 > 0.0 && eta0 < 1.0)) throw Error(ErrorKind::invalid_argument, "eta0 must lie in (0, 1)");
    if (feature_bits < 8 || feature_bits > 30)
      throw Error(ErrorKind::invalid_argument, "feature_bits must lie in [8, 30]");
  }
};

/// Linear one-class model: decision(x) = w.x - rho.
struct OneClassModel {
  OneClassParams params;
  std::vector<double> weights;
  double rho = 0.0;
  std::vector<double> epoch_objective;  // primal objective after each epoch

  double decision(const SparseVector& x) const {
    double s = 0.0;
    for (const auto& [i, w] : x.entries)
      if (i < weights.size()) s += weights[i] * w;
    return s - rho;
  }

  /// Model with w = 0 and rho = 0 (every score is 0.5).
  static OneClassModel constant(unsigned feature_bits = 16) {
    OneClassModel m;
    m.params.feature_bits = feature_bits;
    m.weights.assign(std::size_t{1} << feature_bits, 0.0);
    return m;
  }
};

/// 1/2 |w|^2 + 1/(nu n) sum max(0, rho - w.x_i) - rho
inline double one_class_objective(const OneClassModel& m, std::span<const SparseVector> data) {
  double norm = 0.0;
  for (double w : m.weights) norm += w * w;
  double hinge = 0.0;
  for (const auto& x : data) hinge += std::max(0.0, -m.decision(x));
  return 0.5 * norm + hinge / (m.params.nu * static_cast<double>(data.size())) - m.rho;
}

/// Stochastic subgradient descent on the one-class objective. Each epoch
/// visits the data in a seeded random order; w is kept as scale * v so the
/// shrink step is O(1).
inline OneClassModel fit(std::span<const SparseVector> data, const OneClassParams& hp = {}) {
  hp.validate();
  if (data.size() < 2) throw Error(ErrorKind::invalid_argument, "one-class fit needs at least 2 points");
  const std::size_t dim = std::size_t{1} << hp.feature_bits;
  for (const auto& x : data)
    for (const auto& [i, w] : x.entries) {
      if (!std::isfinite(w)) throw Error(ErrorKind::invalid_argument, "non-finite feature value");
      if (i >= dim) throw Error(ErrorKind::invalid_argument, "feature index outside model dimension");
    }

  OneClassModel m;
  m.params = hp;
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double rho = 0.0;
  Rng rng(hp.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 0;

  auto materialize = [&] {
    m.weights.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) m.weights[i] = v[i] * scale;
    m.rho = rho;
  };

  for (unsigned epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t idx : order) {
      const SparseVector& x = data[idx];
      const double eta = hp.eta0 / (1.0 + hp.eta0 * static_cast<double>(t));
      double margin = 0.0;
      for (const auto& [i, w] : x.entries) margin += v[i] * w;
      margin *= scale;
      scale *= 1.0 - eta;
      if (margin < rho) {
        const double step = eta / hp.nu / scale;
        for (const auto& [i, w] : x.entries) v[i] += step * w;
        rho -= eta / hp.nu;
      }
      rho += eta;
      ++t;
      if (scale < 1e-9) {
        for (auto& e : v) e *= scale;
        scale = 1.0;
      }
    }
    materialize();
    m.epoch_objective.push_back(one_class_objective(m, data));
  }
  return m;
}

/// Clamped to the open interval so score ratios stay defined.
inline double logistic(double z) noexcept {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::clamp(s, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

/// sigma(w.x - rho): strictly inside (0, 1) for finite decisions.
inline double score(const OneClassModel& m, const SparseVector& x) { return logistic(m.decision(x)); }

/// Softmax of decision values over a test set (temperature 1).
inline std::vector<double> probabilities_over(const OneClassModel& m, std::span<const SparseVector> test) {
  if (test.empty()) throw Error(ErrorKind::invalid_argument, "probabilities over an empty test set");
  std::vector<double> z;
  z.reserve(test.size());
  for (const auto& x : test) z.push_back(m.decision(x));
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (auto& e : z) {
    e = std::exp(e - top);
    total += e;
  }
  for (auto& e : z) e /= total;
  return z;
}

// ---------------------------------------------------------------------------
// Binary model file, little-endian:
//   "GGOCM\0\0\0" u32 version, u32 feature_bits, f64 nu, u32 epochs,
//   f64 eta0, u64 seed, f64 rho, u64 nnz, nnz * (u32 index, f64 weight)

inline constexpr char kModelMagic[8] = {'G', 'G', 'O', 'C', 'M', 0, 0, 0};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size())
      throw Error(ErrorKind::validation, "model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  std::string_view take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error(ErrorKind::validation, "model file truncated");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_model(const OneClassModel& m) {
  std::string out(kModelMagic, sizeof kModelMagic);
  detail::put_u32(out, kModelVersion);
  detail::put_u32(out, m.params.feature_bits);
  detail::put_f64(out, m.params.nu);
  detail::put_u32(out, m.params.epochs);
  detail::put_f64(out, m.params.eta0);
  detail::put_u64(out, m.params.seed);
  detail::put_f64(out, m.rho);
  std::uint64_t nnz = 0;
  for (double w : m.weights) nnz += w != 0.0;
  detail::put_u64(out, nnz);
  for (std::uint32_t i = 0; i < m.weights.size(); ++i) {
    if (m.weights[i] == 0.0) continue;
    detail::put_u32(out, i);
    detail::put_f64(out, m.weights[i]);
  }
  return out;
}

inline OneClassModel deserialize_model(std::string_view bytes) {
  detail::ByteReader in(bytes);
  if (in.take(sizeof kModelMagic) != std::string_view(kModelMagic, sizeof kModelMagic))
    throw Error(ErrorKind::validation, "not a one-class model file");
  if (in.u(4) != kModelVersion) throw Error(ErrorKind::validation, "unsupported model version");
  OneClassModel m;
  m.params.feature_bits = static_cast<unsigned>(in.u(4));
  m.params.nu = in.f64();
  m.params.epochs = static_cast<unsigned>(in.u(4));
  m.params.eta0 = in.f64();
  m.params.seed = in.u(8);
  m.params.validate();
  m.rho = in.f64();
  m.weights.assign(std::size_t{1} << m.params.feature_bits, 0.0);
  const std::uint64_t nnz = in.u(8);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto i = static_cast<std::uint32_t>(in.u(4));
    if (i >= m.weights.size()) throw Error(ErrorKind::validation, "model weight index out of range");
    m.weights[i] = in.f64();
  }
  if (!in.done()) throw Error(ErrorKind::validation, "trailing bytes in model file");
  return m;
}

inline void write_model(const std::string& path, const OneClassModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  const auto bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline OneClassModel read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace grammargen
