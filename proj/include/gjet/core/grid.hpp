#pragma once

#include "gjet/core/types.hpp"

#include <cstddef>
#include <vector>

namespace gjet {

/// Axis-aligned box [lo, hi].
struct Box
{
    Vec lo;
    Vec hi;

    int dim() const noexcept { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x) const;
    /// Distance from an interior point to the boundary of the box.
    double distance_to_boundary(const Vec& x) const;
    double diameter() const { return (hi - lo).norm(); }
};

/// Regular cell-centred grid over a box, carrying a per-cell density.
/// Cells are numbered with axis 0 varying fastest.
class SourceGrid
{
  public:
    SourceGrid() = default;
    /// Uniform unit density.
    SourceGrid(Box box, std::vector<int> resolution);
    SourceGrid(Box box, std::vector<int> resolution, std::vector<double> density);

    int dim() const noexcept { return box_.dim(); }
    const Box& box() const noexcept { return box_; }
    const std::vector<int>& resolution() const noexcept { return resolution_; }
    std::size_t cell_count() const noexcept { return density_.size(); }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double cell_volume() const noexcept { return cell_volume_; }

    const std::vector<double>& density() const noexcept { return density_; }
    double density(std::size_t cell) const { return density_[cell]; }
    double cell_mass(std::size_t cell) const { return density_[cell] * cell_volume_; }
    double total_mass() const;

    Vec center(std::size_t cell) const;
    void center(std::size_t cell, double* out) const;
    /// Cell-centre coordinates of every cell, packed dim-major per cell.
    std::vector<double> centers() const;

    std::vector<int> multi_index(std::size_t cell) const;
    std::size_t linear_index(const std::vector<int>& idx) const;
    /// Neighbour along axis at offset, or -1 when it falls outside the grid.
    long neighbor(std::size_t cell, int axis, int offset) const;
    /// True when the cell has `margin` cells on every side.
    bool is_interior(std::size_t cell, int margin) const;

  private:
    Box box_;
    std::vector<int> resolution_;
    std::vector<double> spacing_;
    std::vector<double> density_;
    double cell_volume_ = 0.0;
};

}  // namespace gjet
