#include "thz/image.hpp"

#include <algorithm>

#include "thz/error.hpp"

namespace thz {

Image::Image(int rows, int cols, std::vector<double> values) : ny(rows), nx(cols), px(std::move(values)) {
    if (rows < 0 || cols < 0 || px.size() != static_cast<std::size_t>(rows) * cols)
        fail(ErrorKind::Validation, "image buffer does not match its shape");
}

double sum(const Image& img) {
    double s = 0.0;
    for (double v : img.px) s += v;
    return s;
}

double mean(const Image& img) { return img.px.empty() ? 0.0 : sum(img) / static_cast<double>(img.size()); }

double variance(const Image& img) {
    if (img.px.empty()) return 0.0;
    const double m = mean(img);
    double s = 0.0;
    for (double v : img.px) s += (v - m) * (v - m);
    return s / static_cast<double>(img.size());
}

double min_value(const Image& img) { return *std::min_element(img.px.begin(), img.px.end()); }
double max_value(const Image& img) { return *std::max_element(img.px.begin(), img.px.end()); }

} // namespace thz
