#include "q3p/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "q3p/error.hpp"

namespace q3p {

namespace {

constexpr double kIndexSnap = 1e-9;

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  // Half-sample symmetric extension: ... c b a | a b c ... | c b a ...
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - 1 - i;
  return static_cast<std::size_t>(i);
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t a = shape.size(); a-- > 1;) strides[a - 1] = strides[a] * shape[a];
  return strides;
}

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(4.0 * sigma + 0.5);
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t x = -radius; x <= radius; ++x) {
    const double w = std::exp(-0.5 * static_cast<double>(x * x) / (sigma * sigma));
    kernel[static_cast<std::size_t>(x + radius)] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;
  return kernel;
}

// Convolves `values` along one axis with a symmetric odd-length kernel.
std::vector<double> convolve_axis(const std::vector<double>& values,
                                  const std::vector<std::size_t>& shape, std::size_t axis,
                                  const std::vector<double>& kernel) {
  const auto strides = strides_of(shape);
  const std::size_t n = shape[axis];
  const std::size_t stride = strides[axis];
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> out(values.size());
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const std::size_t i = (flat / stride) % n;
    const std::size_t base = flat - i * stride;
    double acc = 0.0;
    for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
      const std::size_t src = reflect_index(static_cast<std::ptrdiff_t>(i) + o, n);
      acc += kernel[static_cast<std::size_t>(o + radius)] * values[base + src * stride];
    }
    out[flat] = acc;
  }
  return out;
}

double norm3(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

Vec3 SliceFrame::normal() const noexcept {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

std::size_t GridGeometry::point_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

void GridGeometry::validate() const {
  if (dims() != 2 && dims() != 3) {
    throw InvalidArgument("grid must be 2D or 3D, got " + std::to_string(dims()) + " axes");
  }
  if (spacing.size() != dims() || origin.size() != dims()) {
    throw InvalidArgument("grid shape, spacing and origin must have the same length");
  }
  for (std::size_t a = 0; a < dims(); ++a) {
    if (shape[a] == 0) throw InvalidArgument("grid axis " + std::to_string(a) + " is empty");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw InvalidArgument("grid spacing on axis " + std::to_string(a) + " must be positive");
    }
  }
}

std::vector<double> GridGeometry::upper() const {
  std::vector<double> up(dims());
  for (std::size_t a = 0; a < dims(); ++a) {
    up[a] = origin[a] + spacing[a] * static_cast<double>(shape[a] - 1);
  }
  return up;
}

ScalarField::ScalarField(GridGeometry geometry, std::vector<double> values,
                         std::optional<SliceFrame> frame)
    : geometry_(std::move(geometry)), values_(std::move(values)), frame_(frame) {
  geometry_.validate();
  if (values_.size() != geometry_.point_count()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values but shape needs " +
                          std::to_string(geometry_.point_count()));
  }
}

double ScalarField::at(std::size_t i, std::size_t j) const {
  if (dims() != 2) throw InvalidArgument("2-index access on a non-2D field");
  return values_.at(i * shape()[1] + j);
}

double ScalarField::at(std::size_t i, std::size_t j, std::size_t k) const {
  if (dims() != 3) throw InvalidArgument("3-index access on a non-3D field");
  return values_.at((i * shape()[1] + j) * shape()[2] + k);
}

std::vector<double> ScalarField::position(std::size_t flat) const {
  std::vector<double> p(dims());
  for (std::size_t a = dims(); a-- > 0;) {
    const std::size_t idx = flat % shape()[a];
    flat /= shape()[a];
    p[a] = origin()[a] + spacing()[a] * static_cast<double>(idx);
  }
  return p;
}

double ScalarField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

std::vector<double> trapezoid_weights(const GridGeometry& geometry) {
  const auto strides = strides_of(geometry.shape);
  std::vector<double> weights(geometry.point_count());
  for (std::size_t flat = 0; flat < weights.size(); ++flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < geometry.dims(); ++a) {
      const std::size_t n = geometry.shape[a];
      const std::size_t i = (flat / strides[a]) % n;
      if (n == 1) continue;  // degenerate axis integrates as a point
      w *= geometry.spacing[a] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    }
    weights[flat] = w;
  }
  return weights;
}

double ScalarField::integral() const {
  const auto weights = trapezoid_weights(geometry_);
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) total += weights[i] * values_[i];
  return total;
}

bool ScalarField::contains(std::span<const double> point) const {
  if (point.size() != dims()) return false;
  for (std::size_t a = 0; a < dims(); ++a) {
    const double f = (point[a] - origin()[a]) / spacing()[a];
    if (f < -kIndexSnap || f > static_cast<double>(shape()[a] - 1) + kIndexSnap) return false;
  }
  return true;
}

double ScalarField::interpolate(std::span<const double> point) const {
  if (point.size() != dims()) throw InvalidArgument("interpolation point has wrong dimension");
  std::array<std::size_t, 3> lo{};
  std::array<double, 3> frac{};
  for (std::size_t a = 0; a < dims(); ++a) {
    double f = (point[a] - origin()[a]) / spacing()[a];
    const auto last = static_cast<double>(shape()[a] - 1);
    if (f < -kIndexSnap || f > last + kIndexSnap) return 0.0;
    const double nearest = std::round(f);
    if (std::abs(f - nearest) < kIndexSnap) f = nearest;
    f = std::clamp(f, 0.0, last);
    auto i0 = static_cast<std::size_t>(std::floor(f));
    if (shape()[a] > 1 && i0 == shape()[a] - 1) --i0;
    lo[a] = i0;
    frac[a] = f - static_cast<double>(i0);
  }
  const auto strides = strides_of(shape());
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << dims();
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    bool skip = false;
    for (std::size_t a = 0; a < dims(); ++a) {
      const bool upper = (c >> a) & 1U;
      const double wa = upper ? frac[a] : 1.0 - frac[a];
      if (wa == 0.0) {
        skip = true;
        break;
      }
      w *= wa;
      flat += (lo[a] + (upper ? 1 : 0)) * strides[a];
    }
    if (!skip) acc += w * values_[flat];
  }
  return acc;
}

ScalarField ScalarField::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return with_values(std::move(out));
}

ScalarField ScalarField::with_values(std::vector<double> values) const {
  return ScalarField(geometry_, std::move(values), frame_);
}

double gaussian_density(std::span<const double> center, double variance, double amplitude,
                        std::span<const double> point) {
  double r2 = 0.0;
  for (std::size_t a = 0; a < center.size(); ++a) {
    const double d = point[a] - center[a];
    r2 += d * d;
  }
  const double d = static_cast<double>(center.size());
  return amplitude * std::pow(2.0 * std::numbers::pi * variance, -0.5 * d) *
         std::exp(-r2 / (2.0 * variance));
}

ScalarField synthesize_mixture(std::span<const GaussianComponent> components,
                               const GridGeometry& grid) {
  if (components.empty()) throw InvalidArgument("mixture needs at least one component");
  grid.validate();
  const auto lower = grid.lower();
  const auto upper = grid.upper();
  for (const auto& c : components) {
    if (c.center.size() != grid.dims()) {
      throw InvalidArgument("component center dimension does not match the grid");
    }
    if (!(c.variance > 0.0)) throw InvalidArgument("component variance must be positive");
    if (!(c.amplitude > 0.0)) throw InvalidArgument("component amplitude must be positive");
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      if (c.center[a] < lower[a] || c.center[a] > upper[a]) {
        throw InvalidArgument("component center lies outside the grid bounding box");
      }
    }
  }
  ScalarField zero(grid, std::vector<double>(grid.point_count(), 0.0));
  std::vector<double> values(grid.point_count(), 0.0);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const auto p = zero.position(flat);
    double acc = 0.0;
    for (const auto& c : components) acc += gaussian_density(c.center, c.variance, c.amplitude, p);
    values[flat] = acc;
  }
  return zero.with_values(std::move(values));
}

std::vector<ScalarField> slice_volume(const ScalarField& volume, const SlicePlane& plane,
                                      std::size_t n_slices, double spacing) {
  if (volume.dims() != 3) throw InvalidArgument("slice_volume needs a 3D field");
  if (n_slices == 0) throw InvalidArgument("n_slices must be at least 1");
  if (plane.nu == 0 || plane.nv == 0) throw InvalidArgument("slice grid must be non-empty");
  if (!(plane.du > 0.0) || !(plane.dv > 0.0)) {
    throw InvalidArgument("slice grid spacing must be positive");
  }
  if (std::abs(norm3(plane.u) - 1.0) > 1e-9 || std::abs(norm3(plane.v) - 1.0) > 1e-9 ||
      std::abs(dot3(plane.u, plane.v)) > 1e-9) {
    throw InvalidArgument("slice plane axes must be orthonormal");
  }
  const SliceFrame base{plane.origin, plane.u, plane.v};
  const Vec3 n = base.normal();
  const GridGeometry geometry{{plane.nu, plane.nv}, {plane.du, plane.dv}, {0.0, 0.0}};

  std::vector<ScalarField> slices;
  slices.reserve(n_slices);
  for (std::size_t k = 0; k < n_slices; ++k) {
    const double offset = static_cast<double>(k) * spacing;
    SliceFrame frame = base;
    for (std::size_t a = 0; a < 3; ++a) frame.origin[a] += offset * n[a];
    std::vector<double> values(plane.nu * plane.nv);
    bool any_inside = false;
    for (std::size_t i = 0; i < plane.nu; ++i) {
      for (std::size_t j = 0; j < plane.nv; ++j) {
        const Vec3 p = frame.lift(static_cast<double>(i) * plane.du, static_cast<double>(j) * plane.dv);
        if (volume.contains(p)) {
          any_inside = true;
          values[i * plane.nv + j] = volume.interpolate(p);
        }
      }
    }
    if (!any_inside) {
      throw InvalidArgument("slice " + std::to_string(k) + " lies fully outside the grid bounds");
    }
    slices.emplace_back(geometry, std::move(values), frame);
  }
  return slices;
}

ScalarField gaussian_blur(const ScalarField& field, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("smoothing sigma must be positive");
  const auto kernel = gaussian_kernel(sigma);
  std::vector<double> values(field.values().begin(), field.values().end());
  for (std::size_t a = 0; a < field.dims(); ++a) {
    values = convolve_axis(values, field.shape(), a, kernel);
  }
  return field.with_values(std::move(values));
}

ScalarField log_smooth(const ScalarField& field, double sigma) {
  const ScalarField blurred = gaussian_blur(field, sigma);
  const auto& shape = field.shape();
  const auto strides = strides_of(shape);
  const auto in = blurred.values();
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t flat = 0; flat < in.size(); ++flat) {
    double lap = 0.0;
    for (std::size_t a = 0; a < field.dims(); ++a) {
      const std::size_t n = shape[a];
      const std::size_t i = (flat / strides[a]) % n;
      const std::size_t base = flat - i * strides[a];
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const double prev = in[base + reflect_index(ii - 1, n) * strides[a]];
      const double next = in[base + reflect_index(ii + 1, n) * strides[a]];
      const double h = field.spacing()[a];
      lap += (next - 2.0 * in[flat] + prev) / (h * h);
    }
    out[flat] = std::max(0.0, -lap);
  }
  return field.with_values(std::move(out));
}

ScalarField normalize(const ScalarField& field) {
  std::vector<double> values(field.values().begin(), field.values().end());
  for (double& v : values) v = std::max(0.0, v);
  const ScalarField clamped = field.with_values(std::move(values));
  const double total = clamped.integral();
  if (!(total > 0.0)) throw InvalidArgument("cannot normalize a field with zero integral");
  return clamped.scaled(1.0 / total);
}

}  // namespace q3p
