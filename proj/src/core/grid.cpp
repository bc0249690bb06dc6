#include "gjet/core/grid.hpp"

#include "gjet/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gjet {

bool Box::contains(const Vec& x) const
{
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i])
            return false;
    return true;
}

double Box::distance_to_boundary(const Vec& x) const
{
    double d = kInf;
    for (int i = 0; i < dim(); ++i)
        d = std::min({d, x[i] - lo[i], hi[i] - x[i]});
    return d;
}

SourceGrid::SourceGrid(Box box, std::vector<int> resolution)
    : SourceGrid(box, resolution, {})
{
}

SourceGrid::SourceGrid(Box box, std::vector<int> resolution, std::vector<double> density)
    : box_(std::move(box)), resolution_(std::move(resolution))
{
    const int n = box_.dim();
    if (n < 1 || n > 3 || box_.hi.size() != n || static_cast<int>(resolution_.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3 and consistent");
    std::size_t cells = 1;
    cell_volume_ = 1.0;
    for (int i = 0; i < n; ++i) {
        if (resolution_[i] < 1 || !(box_.hi[i] > box_.lo[i]))
            throw Error(ErrorKind::InvalidArgument, "grid box and resolution must be nonempty");
        const double h = (box_.hi[i] - box_.lo[i]) / resolution_[i];
        spacing_.push_back(h);
        cell_volume_ *= h;
        cells *= static_cast<std::size_t>(resolution_[i]);
    }
    if (density.empty())
        density.assign(cells, 1.0);
    if (density.size() != cells)
        throw Error(ErrorKind::InvalidArgument, "density must have one value per cell");
    for (double f : density)
        if (!std::isfinite(f) || f < 0.0)
            throw Error(ErrorKind::InvalidArgument, "density must be finite and nonnegative");
    density_ = std::move(density);
    if (!(total_mass() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "total source mass must be positive");
}

double SourceGrid::total_mass() const
{
    double m = 0.0;
    for (double f : density_)
        m += f * cell_volume_;
    return m;
}

void SourceGrid::center(std::size_t cell, double* out) const
{
    for (int i = 0; i < dim(); ++i) {
        const auto r = static_cast<std::size_t>(resolution_[i]);
        const std::size_t k = cell % r;
        cell /= r;
        out[i] = box_.lo[i] + (static_cast<double>(k) + 0.5) * spacing_[i];
    }
}

Vec SourceGrid::center(std::size_t cell) const
{
    Vec x(dim());
    center(cell, x.data());
    return x;
}

std::vector<double> SourceGrid::centers() const
{
    const auto n = static_cast<std::size_t>(dim());
    std::vector<double> out(cell_count() * n);
    for (std::size_t c = 0; c < cell_count(); ++c)
        center(c, out.data() + c * n);
    return out;
}

std::vector<int> SourceGrid::multi_index(std::size_t cell) const
{
    std::vector<int> idx(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) {
        const auto r = static_cast<std::size_t>(resolution_[i]);
        idx[i] = static_cast<int>(cell % r);
        cell /= r;
    }
    return idx;
}

std::size_t SourceGrid::linear_index(const std::vector<int>& idx) const
{
    std::size_t cell = 0;
    for (int i = dim() - 1; i >= 0; --i)
        cell = cell * static_cast<std::size_t>(resolution_[i]) + static_cast<std::size_t>(idx[i]);
    return cell;
}

long SourceGrid::neighbor(std::size_t cell, int axis, int offset) const
{
    auto idx = multi_index(cell);
    const int k = idx[axis] + offset;
    if (k < 0 || k >= resolution_[axis])
        return -1;
    idx[axis] = k;
    return static_cast<long>(linear_index(idx));
}

bool SourceGrid::is_interior(std::size_t cell, int margin) const
{
    const auto idx = multi_index(cell);
    for (int i = 0; i < dim(); ++i)
        if (idx[i] < margin || idx[i] >= resolution_[i] - margin)
            return false;
    return true;
}

}  // namespace gjet
