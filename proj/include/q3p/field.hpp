#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace q3p {

using Vec3 = std::array<double, 3>;

// Embedding of a 2D slice in the 3D volume it was cut from:
// p(x, y) = origin + x * u + y * v.
struct SliceFrame {
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 u{1.0, 0.0, 0.0};
  Vec3 v{0.0, 1.0, 0.0};

  [[nodiscard]] Vec3 lift(double x, double y) const noexcept {
    return {origin[0] + x * u[0] + y * v[0], origin[1] + x * u[1] + y * v[1],
            origin[2] + x * u[2] + y * v[2]};
  }
  [[nodiscard]] Vec3 normal() const noexcept;
};

// Regular axis-aligned grid: point (i0, i1, ...) sits at origin + i * spacing.
struct GridGeometry {
  std::vector<std::size_t> shape;
  std::vector<double> spacing;
  std::vector<double> origin;

  [[nodiscard]] std::size_t dims() const noexcept { return shape.size(); }
  [[nodiscard]] std::size_t point_count() const noexcept;
  // Throws InvalidArgument unless dims is 2 or 3, every axis has at least one
  // point, spacing is strictly positive and all vectors agree in length.
  void validate() const;
  [[nodiscard]] std::vector<double> lower() const { return origin; }
  [[nodiscard]] std::vector<double> upper() const;
};

// Scalar density sampled on a regular grid. Values are stored row-major with
// the last axis fastest, i.e. flat = (i * ny + j) * nz + k.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridGeometry geometry, std::vector<double> values,
              std::optional<SliceFrame> frame = std::nullopt);

  [[nodiscard]] const GridGeometry& geometry() const noexcept { return geometry_; }
  [[nodiscard]] std::size_t dims() const noexcept { return geometry_.dims(); }
  [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return geometry_.shape; }
  [[nodiscard]] const std::vector<double>& spacing() const noexcept { return geometry_.spacing; }
  [[nodiscard]] const std::vector<double>& origin() const noexcept { return geometry_.origin; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::optional<SliceFrame>& frame() const noexcept { return frame_; }

  [[nodiscard]] double at(std::size_t i, std::size_t j) const;
  [[nodiscard]] double at(std::size_t i, std::size_t j, std::size_t k) const;

  // Physical coordinate of a flat index.
  [[nodiscard]] std::vector<double> position(std::size_t flat) const;
  [[nodiscard]] double max_value() const;
  [[nodiscard]] double min_value() const;

  // Trapezoidal rule over the full grid box.
  [[nodiscard]] double integral() const;

  // Multilinear interpolation at a physical point; zero outside the grid.
  [[nodiscard]] double interpolate(std::span<const double> point) const;
  [[nodiscard]] bool contains(std::span<const double> point) const;

  [[nodiscard]] ScalarField scaled(double factor) const;
  [[nodiscard]] ScalarField with_values(std::vector<double> values) const;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
  std::optional<SliceFrame> frame_;
};

struct GaussianComponent {
  std::vector<double> center;
  double variance = 1.0;
  double amplitude = 1.0;
};

// Normalized isotropic Gaussian of the given dimension, times `amplitude`.
double gaussian_density(std::span<const double> center, double variance, double amplitude,
                        std::span<const double> point);

// Product-form trapezoid weights of a grid (per flat index).
std::vector<double> trapezoid_weights(const GridGeometry& geometry);

ScalarField synthesize_mixture(std::span<const GaussianComponent> components,
                               const GridGeometry& grid);

// Sampling plane for slice_volume: the 2D output grid has shape (nu, nv)
// and spacing (du, dv) along the orthonormal in-plane axes u and v.
struct SlicePlane {
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 u{1.0, 0.0, 0.0};
  Vec3 v{0.0, 1.0, 0.0};
  std::size_t nu = 0;
  std::size_t nv = 0;
  double du = 1.0;
  double dv = 1.0;
};

// Slice k samples the plane translated by k * spacing along u x v.
// Samples outside the volume read as zero.
std::vector<ScalarField> slice_volume(const ScalarField& volume, const SlicePlane& plane,
                                      std::size_t n_slices, double spacing);

// Negated Laplacian-of-Gaussian response clamped at zero. sigma is in grid
// cells; borders use half-sample reflection.
ScalarField log_smooth(const ScalarField& field, double sigma);

// Gaussian blur with the same kernel and border rule as log_smooth.
ScalarField gaussian_blur(const ScalarField& field, double sigma);

// Clamp negatives to zero and rescale to unit trapezoidal integral.
ScalarField normalize(const ScalarField& field);

}  // namespace q3p
