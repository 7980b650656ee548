#include "thz/hypercube.hpp"

#include <array>
#include <cmath>
#include <string>

#include "thz/error.hpp"

namespace thz {

void validate_geometry(const CubeGeometry& g) {
    if (g.ny <= 0 || g.nx <= 0) fail(ErrorKind::Validation, "cube dimensions must be positive");
    if (g.frequencies.empty()) fail(ErrorKind::Validation, "cube needs at least one band");
    if (!(g.step_x > 0.0) || !(g.step_y > 0.0) || !std::isfinite(g.step_x) || !std::isfinite(g.step_y))
        fail(ErrorKind::Validation, "spatial steps must be positive and finite");
    for (std::size_t i = 0; i < g.frequencies.size(); ++i) {
        const double f = g.frequencies[i];
        if (!(f > 0.0 && f < 20.0)) fail(ErrorKind::Validation, "frequency outside (0, 20) THz: " + std::to_string(f));
        if (i > 0 && !(f > g.frequencies[i - 1])) fail(ErrorKind::Validation, "frequencies must be strictly increasing");
    }
}

bool is_instrument_step(double step_mm) {
    constexpr std::array<double, 5> allowed{0.1, 0.2, 0.5, 1.0, 2.0};
    for (double a : allowed)
        if (std::abs(step_mm - a) <= 1e-12) return true;
    return false;
}

HyperCube::HyperCube(CubeGeometry geometry, std::vector<double> data)
    : geom_(std::move(geometry)), data_(std::move(data)) {
    validate_geometry(geom_);
    if (data_.size() != static_cast<std::size_t>(geom_.bands()) * geom_.pixels())
        fail(ErrorKind::Validation, "cube payload size does not match b*ny*nx");
    for (double v : data_)
        if (!std::isfinite(v)) fail(ErrorKind::Validation, "cube contains non-finite values");
}

HyperCube HyperCube::from_bands(CubeGeometry geometry, std::span<const Image> bands) {
    std::vector<double> data;
    data.reserve(bands.size() * geometry.pixels());
    if (static_cast<int>(bands.size()) != geometry.bands())
        fail(ErrorKind::Validation, "band count does not match frequency axis");
    for (const Image& b : bands) {
        if (b.ny != geometry.ny || b.nx != geometry.nx) fail(ErrorKind::Validation, "band shape mismatch");
        data.insert(data.end(), b.px.begin(), b.px.end());
    }
    return HyperCube(std::move(geometry), std::move(data));
}

std::span<const double> HyperCube::band(int i) const {
    if (i < 0 || i >= bands()) fail(ErrorKind::Validation, "band index out of range");
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(i) * pixels(), pixels());
}

Image HyperCube::band_image(int i) const {
    auto b = band(i);
    return Image(geom_.ny, geom_.nx, std::vector<double>(b.begin(), b.end()));
}

} // namespace thz
