#pragma once

#include <string>
#include <vector>

namespace pdenet {

/// 2D grayscale image with grid spacing h. Row-major storage.
class Image2D {
public:
    Image2D() = default;
    Image2D(int height, int width, double h = 1.0);

    static Image2D zeros(int height, int width, double h = 1.0);
    static Image2D constant(int height, int width, double value, double h = 1.0);

    int height() const { return height_; }
    int width() const { return width_; }
    double spacing() const { return h_; }

    double& at(int y, int x) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double at(int y, int x) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Image2D& o) const { return height_ == o.height_ && width_ == o.width_; }

    double mean_abs() const;
    double max_abs() const;
    bool all_finite() const;

private:
    std::vector<double> data_;
    int height_ = 0;
    int width_ = 0;
    double h_ = 1.0;
};

/// Binary PGM (P5, maxval 255) input. Values land in [0, 255].
Image2D read_pgm(const std::string& path);

/// P5 output; values are clamped to [0, 255] and rounded half to even.
void write_pgm(const std::string& path, const Image2D& image);

} // namespace pdenet
