#include "msm/grid_state.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace msm {

void Environment::validate() const {
  if (!(g > 0.0)) throw std::invalid_argument("g: must be positive");
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2)) {
    throw std::invalid_argument("theta: must lie in [0, pi/2)");
  }
}

GridState::GridState(std::size_t cells, std::size_t layers, double x_min, double dx)
    : layers_(layers), dx_(dx), x_(cells), h_(cells, 0.0), z_b_(cells, 0.0), u_(cells * layers, 0.0) {
  if (cells == 0) throw std::invalid_argument("nx: must be >= 1");
  if (layers == 0) throw std::invalid_argument("layers: must be >= 1");
  if (!(dx > 0.0)) throw std::invalid_argument("dx: must be positive");
  for (std::size_t i = 0; i < cells; ++i) {
    x_[i] = x_min + (static_cast<double>(i) + 0.5) * dx;
  }
}

double GridState::mass() const {
  double total = 0.0;
  for (double v : h_) total += v;
  return total * dx_;
}

double GridState::max_speed() const {
  double m = 0.0;
  for (std::size_t i = 0; i < cells(); ++i) {
    if (!wet(i)) continue;
    for (double v : column(i)) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace msm
