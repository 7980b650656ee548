#include "thz/convolution.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "thz/error.hpp"

namespace thz {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
// Plans are created once per grid size with FFTW_ESTIMATE so they are identical
// across runs, and every buffer comes from fftw_malloc so alignment matches.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(int rows, int cols) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    auto it = cache.find({rows, cols});
    if (it != cache.end()) return it->second;
    const std::size_t real_n = static_cast<std::size_t>(rows) * cols;
    const std::size_t cplx_n = static_cast<std::size_t>(rows) * (cols / 2 + 1);
    double* r = fftw_alloc_real(real_n);
    fftw_complex* c = fftw_alloc_complex(cplx_n);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_2d(rows, cols, r, c, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_2d(rows, cols, c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
    return cache.emplace(std::pair{rows, cols}, p).first->second;
}

struct RealBuf {
    double* p;
    explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
    ~RealBuf() { fftw_free(p); }
    RealBuf(const RealBuf&) = delete;
    RealBuf& operator=(const RealBuf&) = delete;
};

struct ComplexBuf {
    fftw_complex* p;
    explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~ComplexBuf() { fftw_free(p); }
    ComplexBuf(const ComplexBuf&) = delete;
    ComplexBuf& operator=(const ComplexBuf&) = delete;
};

int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

} // namespace

int reflect_index(int i, int n) {
    const int period = 2 * n;
    int r = wrap(i, period);
    return r < n ? r : period - 1 - r;
}

ExtendedFft::ExtendedFft(int ny, int nx) : ny_(ny), nx_(nx) {
    if (ny <= 0 || nx <= 0) fail(ErrorKind::Validation, "image shape must be positive");
}

std::size_t ExtendedFft::spectrum_size() const { return static_cast<std::size_t>(ext_ny()) * (ext_nx() / 2 + 1); }

std::pair<int, int> ExtendedFft::frequency_of(std::size_t i) const {
    const int half = ext_nx() / 2 + 1;
    return {static_cast<int>(i / half), static_cast<int>(i % half)};
}

ExtendedFft::Spectrum ExtendedFft::forward_grid(const std::vector<double>& grid) const {
    if (grid.size() != static_cast<std::size_t>(ext_ny()) * ext_nx()) fail(ErrorKind::Validation, "grid size mismatch");
    const auto& plans = plans_for(ext_ny(), ext_nx());
    RealBuf in(grid.size());
    ComplexBuf out(spectrum_size());
    std::copy(grid.begin(), grid.end(), in.p);
    fftw_execute_dft_r2c(plans.forward, in.p, out.p);
    Spectrum s(spectrum_size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {out.p[i][0], out.p[i][1]};
    return s;
}

ExtendedFft::Spectrum ExtendedFft::forward_extended(const Image& img) const {
    if (img.ny != ny_ || img.nx != nx_) fail(ErrorKind::Validation, "image shape mismatch");
    const int ey = ext_ny(), ex = ext_nx();
    std::vector<double> grid(static_cast<std::size_t>(ey) * ex);
    for (int y = 0; y < ey; ++y) {
        const int sy = y < ny_ ? y : ey - 1 - y;
        for (int x = 0; x < ex; ++x) {
            const int sx = x < nx_ ? x : ex - 1 - x;
            grid[static_cast<std::size_t>(y) * ex + x] = img(sy, sx);
        }
    }
    return forward_grid(grid);
}

ExtendedFft::Spectrum ExtendedFft::forward_padded(const Image& img) const {
    if (img.ny != ny_ || img.nx != nx_) fail(ErrorKind::Validation, "image shape mismatch");
    const int ex = ext_nx();
    std::vector<double> grid(static_cast<std::size_t>(ext_ny()) * ex, 0.0);
    for (int y = 0; y < ny_; ++y)
        for (int x = 0; x < nx_; ++x) grid[static_cast<std::size_t>(y) * ex + x] = img(y, x);
    return forward_grid(grid);
}

ExtendedFft::Spectrum ExtendedFft::kernel_spectrum(const beam::Psf& psf, bool flipped) const {
    const int ey = ext_ny(), ex = ext_nx();
    std::vector<double> grid(static_cast<std::size_t>(ey) * ex, 0.0);
    const int k = psf.half_width;
    for (int dy = -k; dy <= k; ++dy)
        for (int dx = -k; dx <= k; ++dx) {
            const double w = flipped ? psf.at(-dy, -dx) : psf.at(dy, dx);
            grid[static_cast<std::size_t>(wrap(dy, ey)) * ex + wrap(dx, ex)] += w;
        }
    return forward_grid(grid);
}

ExtendedFft::Spectrum ExtendedFft::stencil_spectrum(const std::vector<std::tuple<int, int, double>>& taps) const {
    const int ey = ext_ny(), ex = ext_nx();
    std::vector<double> grid(static_cast<std::size_t>(ey) * ex, 0.0);
    for (const auto& [dy, dx, w] : taps) grid[static_cast<std::size_t>(wrap(dy, ey)) * ex + wrap(dx, ex)] += w;
    return forward_grid(grid);
}

std::vector<double> ExtendedFft::inverse(const Spectrum& spec) const {
    if (spec.size() != spectrum_size()) fail(ErrorKind::Validation, "spectrum size mismatch");
    const auto& plans = plans_for(ext_ny(), ext_nx());
    const std::size_t n = static_cast<std::size_t>(ext_ny()) * ext_nx();
    ComplexBuf in(spec.size());
    RealBuf out(n);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        in.p[i][0] = spec[i].real();
        in.p[i][1] = spec[i].imag();
    }
    fftw_execute_dft_c2r(plans.backward, in.p, out.p);
    const double scale = 1.0 / static_cast<double>(n);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = out.p[i] * scale;
    return grid;
}

Image ExtendedFft::inverse_restricted(const Spectrum& spec) const {
    const auto grid = inverse(spec);
    const int ex = ext_nx();
    Image out(ny_, nx_);
    for (int y = 0; y < ny_; ++y)
        for (int x = 0; x < nx_; ++x) out(y, x) = grid[static_cast<std::size_t>(y) * ex + x];
    return out;
}

Image ExtendedFft::inverse_folded(const Spectrum& spec) const {
    const auto grid = inverse(spec);
    const int ey = ext_ny(), ex = ext_nx();
    Image out(ny_, nx_);
    for (int y = 0; y < ey; ++y) {
        const int sy = y < ny_ ? y : ey - 1 - y;
        for (int x = 0; x < ex; ++x) {
            const int sx = x < nx_ ? x : ex - 1 - x;
            out(sy, sx) += grid[static_cast<std::size_t>(y) * ex + x];
        }
    }
    return out;
}

ReflectiveConvolver::ReflectiveConvolver(int ny, int nx, const beam::Psf& psf)
    : fft_(ny, nx), delta_(psf.is_delta()) {
    if (!delta_) {
        otf_ = fft_.kernel_spectrum(psf);
        otf_flipped_ = fft_.kernel_spectrum(psf, true);
    }
}

Image ReflectiveConvolver::apply(const Image& x) const {
    if (delta_) return x;
    auto s = fft_.forward_extended(x);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= otf_[i];
    return fft_.inverse_restricted(s);
}

Image ReflectiveConvolver::apply_adjoint(const Image& x) const {
    if (delta_) return x;
    // H = R C S  =>  H^T = S^T C_flip R^T : zero-pad, convolve with flipped kernel, fold.
    auto s = fft_.forward_padded(x);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= otf_flipped_[i];
    return fft_.inverse_folded(s);
}

Image convolve_reflective(const Image& x, const beam::Psf& psf) { return ReflectiveConvolver(x.ny, x.nx, psf).apply(x); }

} // namespace thz
