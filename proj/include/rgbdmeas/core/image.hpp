#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rgbdmeas/core/error.hpp"

namespace rgbdmeas {

// Dense row-major 2D grid. The pixel at column x, row y is data()[y*width+x].
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw InputError("Image dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    bool contains(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using Rgb8 = std::array<std::uint8_t, 3>;

// Depth in integer millimetres; 0 encodes "no measurement".
using DepthImage = Image<std::uint16_t>;
using ColorImage = Image<Rgb8>;
// 0 = background, 1 = region of interest.
using LabelMask = Image<std::uint8_t>;
using GrayImage = Image<double>;

// Rec.601 luma weights; output in [0,1].
inline GrayImage to_grayscale(const ColorImage& color) {
    GrayImage gray(color.width(), color.height());
    for (int y = 0; y < color.height(); ++y)
        for (int x = 0; x < color.width(); ++x) {
            const Rgb8& c = color.at(x, y);
            gray.at(x, y) = (0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]) / 255.0;
        }
    return gray;
}

}  // namespace rgbdmeas
