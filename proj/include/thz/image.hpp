#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thz {

/// Dense row-major 2D array of doubles. Used for single bands and eigen-images.
struct Image {
    int ny = 0;
    int nx = 0;
    std::vector<double> px;

    Image() = default;
    Image(int rows, int cols, double fill = 0.0)
        : ny(rows), nx(cols), px(static_cast<std::size_t>(rows) * cols, fill) {}
    Image(int rows, int cols, std::vector<double> values);

    std::size_t size() const { return px.size(); }
    double& operator()(int y, int x) { return px[static_cast<std::size_t>(y) * nx + x]; }
    double operator()(int y, int x) const { return px[static_cast<std::size_t>(y) * nx + x]; }
    std::span<const double> view() const { return px; }

    bool same_shape(const Image& o) const { return ny == o.ny && nx == o.nx; }
};

double sum(const Image& img);
double mean(const Image& img);
/// Population variance.
double variance(const Image& img);
double min_value(const Image& img);
double max_value(const Image& img);

} // namespace thz
