#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "persym/core.hpp"

namespace persym {

/// A chain of cyclic groups Z/N_0 -> Z/N_1 -> ... whose step maps are the
/// multiplication homomorphisms x -> c_t * x mod N_{t+1}.
struct CyclicPersistenceGroup {
  std::vector<int> orders;
  std::vector<int> multipliers;

  int frame_count() const { return static_cast<int>(orders.size()); }
};

inline CyclicPersistenceGroup make_cyclic_persistence_group(std::vector<int> orders,
                                                            std::vector<int> multipliers) {
  if (orders.empty()) throw std::invalid_argument("cyclic chain: need at least one frame");
  for (int n : orders)
    if (n < 1) throw std::invalid_argument("cyclic chain: orders must be positive");
  if (multipliers.size() + 1 != orders.size())
    throw std::invalid_argument("cyclic chain: expected one multiplier per adjacent pair");
  for (std::size_t t = 0; t < multipliers.size(); ++t) {
    const int next = orders[t + 1];
    int c = multipliers[t] % next;
    if (c < 0) c += next;
    multipliers[t] = c;
    if (static_cast<long long>(c) * orders[t] % next != 0)
      throw std::invalid_argument("cyclic chain: step is not a well-defined homomorphism");
  }
  return CyclicPersistenceGroup{std::move(orders), std::move(multipliers)};
}

namespace detail {

inline void check_frame_pair(const CyclicPersistenceGroup& g, int s, int t, const char* who) {
  if (s < 0 || t >= g.frame_count() || s > t) throw std::out_of_range(who);
}

}  // namespace detail

/// Product of the step multipliers from frame s to frame t, reduced mod N_t.
inline int composite_multiplier(const CyclicPersistenceGroup& g, int s, int t) {
  detail::check_frame_pair(g, s, t, "composite_multiplier: invalid frame index pair");
  const long long n = g.orders[t];
  long long c = 1 % n;
  for (int i = s; i < t; ++i) c = c * g.multipliers[i] % n;
  return static_cast<int>(c);
}

/// phi_{s,t}(x), with x taken mod N_s first.
inline int apply_step(const CyclicPersistenceGroup& g, int s, int t, int x) {
  detail::check_frame_pair(g, s, t, "apply_step: invalid frame index pair");
  const int ns = g.orders[s];
  long long r = ((x % ns) + ns) % ns;
  return static_cast<int>(r * composite_multiplier(g, s, t) % g.orders[t]);
}

/// Elements of Z/N_s sent to zero by phi_{s,t}.
inline std::vector<int> step_kernel(const CyclicPersistenceGroup& g, int s, int t) {
  detail::check_frame_pair(g, s, t, "step_kernel: invalid frame index pair");
  const long long c = composite_multiplier(g, s, t);
  std::vector<int> kernel;
  for (int x = 0; x < g.orders[s]; ++x)
    if (c * x % g.orders[t] == 0) kernel.push_back(x);
  return kernel;
}

/// One complex vector per frame, compatible under the step maps:
/// values[s](x) = values[t](phi_{s,t}(x)).
struct PersistentFunction {
  std::vector<Eigen::VectorXcd> values;

  int frame_count() const { return static_cast<int>(values.size()); }
};

inline PersistentFunction make_persistent_function(const CyclicPersistenceGroup& g,
                                                   std::vector<Eigen::VectorXcd> values) {
  if (static_cast<int>(values.size()) != g.frame_count())
    throw std::invalid_argument("persistent function: one value vector per frame");
  for (int t = 0; t < g.frame_count(); ++t)
    if (values[t].size() != g.orders[t])
      throw std::invalid_argument("persistent function: value length must match the group order");
  for (int t = 0; t + 1 < g.frame_count(); ++t) {
    const long long c = g.multipliers[t];
    for (int x = 0; x < g.orders[t]; ++x)
      if (std::abs(values[t](x) - values[t + 1](c * x % g.orders[t + 1])) > 1e-9)
        throw std::invalid_argument("persistent function: values are not compatible");
  }
  return PersistentFunction{std::move(values)};
}

/// Builds the persistent function whose final frame is the given vector and
/// whose earlier frames are pulled back along the step maps.
inline PersistentFunction pull_back_function(const CyclicPersistenceGroup& g,
                                             const Eigen::VectorXcd& last) {
  const int m = g.frame_count() - 1;
  if (last.size() != g.orders[m])
    throw std::invalid_argument("pull_back_function: value length must match the final order");
  std::vector<Eigen::VectorXcd> values(g.frame_count());
  values[m] = last;
  for (int t = 0; t < m; ++t) {
    values[t].resize(g.orders[t]);
    for (int x = 0; x < g.orders[t]; ++x) values[t](x) = last(apply_step(g, t, m, x));
  }
  return PersistentFunction{std::move(values)};
}

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline Eigen::VectorXcd dft_radix2(Eigen::VectorXcd v) {
  const int n = static_cast<int>(v.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) std::swap(v(i), v(j));
  }
  for (int len = 2; len <= n; len <<= 1) {
    const std::complex<double> w_len = std::polar(1.0, -2.0 * pi / len);
    for (int i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (int j = 0; j < len / 2; ++j) {
        const std::complex<double> u = v(i + j);
        const std::complex<double> x = v(i + j + len / 2) * w;
        v(i + j) = u + x;
        v(i + j + len / 2) = u - x;
        w *= w_len;
      }
    }
  }
  return v;
}

/// Forward transform with the conjugated character kernel exp(-2 pi i kx/N).
inline Eigen::VectorXcd dft(const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  if (is_power_of_two(n)) return dft_radix2(v);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x) {
      const long long phase = static_cast<long long>(k) * x % n;
      out(k) += v(x) * std::polar(1.0, -2.0 * pi * static_cast<double>(phase) / n);
    }
  return out;
}

}  // namespace detail

/// Frequency content of theta_s propagated to frame t.  Index k plays the
/// role of the character exp(2 pi i kx/N_s); energies are squared moduli and
/// weights are energies normalized to total one.
struct Spectrum {
  int source = 0;
  int target = 0;
  std::vector<std::complex<double>> coefficients;
  std::vector<double> energies;
  std::vector<double> weights;
  double entropy = 0.0;
};

inline Spectrum persistent_ft(const CyclicPersistenceGroup& g, const PersistentFunction& theta,
                              int s, int t) {
  detail::check_frame_pair(g, s, t, "persistent_ft: invalid frame index pair");
  if (theta.frame_count() != g.frame_count())
    throw std::invalid_argument("persistent_ft: function does not match the chain");
  const Eigen::VectorXcd hat = detail::dft(theta.values[s]);

  Spectrum out;
  out.source = s;
  out.target = t;
  const int n = g.orders[s];
  out.coefficients.resize(n);
  out.energies.resize(n);
  out.weights.assign(n, 0.0);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    out.coefficients[k] = hat(k);
    out.energies[k] = std::norm(hat(k));
    total += out.energies[k];
  }
  if (total > 0.0) {
    for (int k = 0; k < n; ++k) {
      out.weights[k] = out.energies[k] / total;
      if (out.weights[k] > 0.0) out.entropy -= out.weights[k] * std::log(out.weights[k]);
    }
  }
  return out;
}

/// Reconstructs theta_s from the coefficients of the characters trivial on
/// the kernel of phi_{s,t}; for an injective step this is the classical
/// inverse transform.
inline Eigen::VectorXcd inversion(const CyclicPersistenceGroup& g, const Spectrum& spectrum,
                                  int s, int t) {
  detail::check_frame_pair(g, s, t, "inversion: invalid frame index pair");
  const int n = g.orders[s];
  if (static_cast<int>(spectrum.coefficients.size()) != n)
    throw std::invalid_argument("inversion: coefficient count must match the source order");
  int generator = n;
  for (int x = 1; x < n; ++x)
    if (apply_step(g, s, t, x) == 0) {
      generator = x;
      break;
    }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (static_cast<long long>(k) * generator % n != 0) continue;
    for (int x = 0; x < n; ++x) {
      const long long phase = static_cast<long long>(k) * x % n;
      out(x) += spectrum.coefficients[k] *
                std::polar(1.0, 2.0 * pi * static_cast<double>(phase) / n);
    }
  }
  return out / static_cast<double>(n);
}

/// (theta *_s eta)_t(y) = sum_h theta_s(h) eta_t(y - phi_{s,t}(h)).
inline Eigen::VectorXcd persistent_convolution(const CyclicPersistenceGroup& g,
                                               const PersistentFunction& theta,
                                               const PersistentFunction& eta, int s, int t) {
  detail::check_frame_pair(g, s, t, "persistent_convolution: invalid frame index pair");
  if (theta.frame_count() != g.frame_count() || eta.frame_count() != g.frame_count())
    throw std::invalid_argument("persistent_convolution: functions do not match the chain");
  const int ns = g.orders[s];
  const int nt = g.orders[t];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(nt);
  for (int h = 0; h < ns; ++h) {
    const int shift = apply_step(g, s, t, h);
    for (int y = 0; y < nt; ++y) out(y) += theta.values[s](h) * eta.values[t]((y - shift + nt) % nt);
  }
  return out;
}

struct SpectralFeatures {
  double entropy = 0.0;
  std::vector<int> dominant_frequencies;
  std::vector<std::vector<double>> trajectory;
};

/// Entropy and dominant frequencies at (s, t), together with the magnitude
/// trajectory of every source frequency over the frames from s onward.
inline SpectralFeatures spectral_features(const CyclicPersistenceGroup& g,
                                          const PersistentFunction& theta, int s, int t) {
  const Spectrum base = persistent_ft(g, theta, s, t);
  SpectralFeatures out;
  out.entropy = base.entropy;
  const double top = *std::max_element(base.energies.begin(), base.energies.end());
  if (top > 0.0)
    for (int k = 0; k < static_cast<int>(base.energies.size()); ++k)
      if (base.energies[k] >= top * (1.0 - 1e-9)) out.dominant_frequencies.push_back(k);
  for (int frame = s; frame < g.frame_count(); ++frame) {
    const Spectrum step = persistent_ft(g, theta, s, frame);
    std::vector<double> magnitudes(step.coefficients.size());
    for (std::size_t k = 0; k < step.coefficients.size(); ++k)
      magnitudes[k] = std::abs(step.coefficients[k]);
    out.trajectory.push_back(std::move(magnitudes));
  }
  return out;
}

/// sum_k conj(theta_hat(k)) * eta_hat(k) at the (s, t)-transform.
inline std::complex<double> correlation(const CyclicPersistenceGroup& g,
                                        const PersistentFunction& theta,
                                        const PersistentFunction& eta, int s, int t) {
  const Spectrum a = persistent_ft(g, theta, s, t);
  const Spectrum b = persistent_ft(g, eta, s, t);
  std::complex<double> out{0.0, 0.0};
  for (std::size_t k = 0; k < a.coefficients.size(); ++k)
    out += std::conj(a.coefficients[k]) * b.coefficients[k];
  return out;
}

/// Matrix of d_s * id - T_theta on functions over Z/N_t, with
/// d_s = sum theta_s and (T_theta eta)(y) = sum_h theta_s(h) eta(y - phi(h)).
inline Eigen::MatrixXcd persistent_laplacian(const CyclicPersistenceGroup& g,
                                             const PersistentFunction& theta, int s, int t) {
  detail::check_frame_pair(g, s, t, "persistent_laplacian: invalid frame index pair");
  if (theta.frame_count() != g.frame_count())
    throw std::invalid_argument("persistent_laplacian: function does not match the chain");
  const int ns = g.orders[s];
  const int nt = g.orders[t];
  const std::complex<double> degree = theta.values[s].sum();
  Eigen::MatrixXcd out = degree * Eigen::MatrixXcd::Identity(nt, nt);
  for (int h = 0; h < ns; ++h) {
    const int shift = apply_step(g, s, t, h);
    for (int y = 0; y < nt; ++y) out(y, (y - shift + nt) % nt) -= theta.values[s](h);
  }
  return out;
}

}  // namespace persym
