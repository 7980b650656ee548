#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thz/image.hpp"

namespace thz {

/// Spatial and spectral metadata shared by a cube and everything derived from it.
struct CubeGeometry {
    int ny = 0;
    int nx = 0;
    double step_x = 1.0; ///< mm
    double step_y = 1.0; ///< mm
    std::vector<double> frequencies; ///< THz, strictly increasing

    int bands() const { return static_cast<int>(frequencies.size()); }
    std::size_t pixels() const { return static_cast<std::size_t>(ny) * nx; }

    bool operator==(const CubeGeometry&) const = default;
};

/// b-band x ny x nx amplitude cube, band-major then row-major.
///
/// Construction validates the metadata and that every sample is finite; the
/// value is immutable afterwards.
class HyperCube {
public:
    HyperCube(CubeGeometry geometry, std::vector<double> data);

    /// Builds a cube from per-band images (all of shape ny x nx).
    static HyperCube from_bands(CubeGeometry geometry, std::span<const Image> bands);

    const CubeGeometry& geometry() const { return geom_; }
    int bands() const { return geom_.bands(); }
    int ny() const { return geom_.ny; }
    int nx() const { return geom_.nx; }
    double step_x() const { return geom_.step_x; }
    double step_y() const { return geom_.step_y; }
    std::size_t pixels() const { return geom_.pixels(); }
    const std::vector<double>& frequencies() const { return geom_.frequencies; }

    std::span<const double> data() const { return data_; }
    std::span<const double> band(int i) const;
    Image band_image(int i) const;
    double at(int band, int y, int x) const {
        return data_[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(y) * geom_.nx + x];
    }

    /// Same geometry, new samples.
    HyperCube with_data(std::vector<double> data) const { return HyperCube(geom_, std::move(data)); }

    bool operator==(const HyperCube&) const = default;

private:
    CubeGeometry geom_;
    std::vector<double> data_;
};

/// Throws ValidationError if the metadata is inconsistent.
void validate_geometry(const CubeGeometry& geometry);

/// Checks the instrument step-size set {0.1, 0.2, 0.5, 1.0, 2.0} mm.
bool is_instrument_step(double step_mm);

} // namespace thz
