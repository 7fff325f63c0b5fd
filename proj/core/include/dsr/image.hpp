#ifndef DSR_IMAGE_HPP
#define DSR_IMAGE_HPP

#include <cstddef>
#include <vector>

#include "dsr/errors.hpp"

namespace dsr {

/// H x W x C array of intensities in [0, 1], row-major, channel-minor.
/// The domain of clean inputs, perturbations and compressed reconstructions.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> values;

    Image() = default;

    Image(int h, int w, int c = 1, double fill = 0.0)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                     static_cast<std::size_t>(c),
                 fill) {
        if (h < 1 || w < 1 || c < 1) {
            throw DimensionError("Image: dimensions must be >= 1");
        }
    }

    std::size_t dim() const { return values.size(); }

    double& at(int r, int c, int ch = 0) {
        return values[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch = 0) const {
        return values[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    bool same_shape(const Image& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }

    /// Clamp every value into [0, 1] in place.
    void clip01() {
        for (double& v : values) {
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
        }
    }
};

} // namespace dsr

#endif // DSR_IMAGE_HPP
