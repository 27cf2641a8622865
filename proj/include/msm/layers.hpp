#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace msm {

/// Fixed vertical partition of the flow: layer alpha carries h_alpha = l_alpha * h.
///
/// Layers are numbered 1..N from the bottom; interfaces 0..N, interface alpha
/// sitting on top of layer alpha (interface 0 is the bed, N the free surface).
class LayerPartition {
 public:
  /// N equal layers.
  static LayerPartition uniform(std::size_t layers);

  /// Throws std::invalid_argument unless all fractions are positive and sum to 1 (1e-12).
  explicit LayerPartition(std::vector<double> fractions);

  [[nodiscard]] std::size_t size() const noexcept { return fractions_.size(); }

  /// l_alpha, alpha in 1..N.
  [[nodiscard]] double fraction(std::size_t alpha) const { return fractions_.at(alpha - 1); }

  /// L_alpha = l_1 + ... + l_alpha, alpha in 0..N (L_0 = 0, L_N = 1).
  [[nodiscard]] double cumulative(std::size_t alpha) const { return cumulative_.at(alpha); }

  /// Normalized distance between the midpoints of layers alpha and alpha+1: (l_alpha + l_{alpha+1}) / 2.
  [[nodiscard]] double midpoint_gap(std::size_t alpha) const;

  [[nodiscard]] std::span<const double> fractions() const noexcept { return fractions_; }

  friend bool operator==(const LayerPartition&, const LayerPartition&) = default;

 private:
  std::vector<double> fractions_;
  std::vector<double> cumulative_;
};

/// xi_{alpha,gamma} = (1 - L_alpha) l_gamma if gamma <= alpha, else -L_alpha l_gamma.
/// Both indices are 1-based.
double xi_coefficient(const LayerPartition& partition, std::size_t alpha, std::size_t gamma);

}  // namespace msm
