#include "msm/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msm {

LayerPartition LayerPartition::uniform(std::size_t layers) {
  if (layers == 0) throw std::invalid_argument("layers: must be >= 1");
  return LayerPartition(std::vector<double>(layers, 1.0 / static_cast<double>(layers)));
}

LayerPartition::LayerPartition(std::vector<double> fractions) : fractions_(std::move(fractions)) {
  if (fractions_.empty()) throw std::invalid_argument("layers: partition is empty");
  cumulative_.assign(fractions_.size() + 1, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < fractions_.size(); ++i) {
    if (!(fractions_[i] > 0.0)) {
      throw std::invalid_argument("layers: fraction " + std::to_string(i + 1) + " must be positive");
    }
    sum += fractions_[i];
    cumulative_[i + 1] = sum;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("layers: fractions must sum to 1");
  }
  // Pin L_N so that 1 - L_N is exactly zero at the free surface.
  cumulative_.back() = 1.0;
}

double LayerPartition::midpoint_gap(std::size_t alpha) const {
  if (alpha == 0 || alpha >= size()) {
    throw std::out_of_range("midpoint_gap: interface must be interior");
  }
  return 0.5 * (fractions_[alpha - 1] + fractions_[alpha]);
}

double xi_coefficient(const LayerPartition& partition, std::size_t alpha, std::size_t gamma) {
  if (alpha < 1 || alpha > partition.size() || gamma < 1 || gamma > partition.size()) {
    throw std::out_of_range("xi_coefficient: indices must lie in 1..N");
  }
  const double L = partition.cumulative(alpha);
  const double l = partition.fraction(gamma);
  return gamma <= alpha ? (1.0 - L) * l : -L * l;
}

}  // namespace msm
