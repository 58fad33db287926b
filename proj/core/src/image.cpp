#include "pdenet/image.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace pdenet {

Image2D::Image2D(int height, int width, double h)
    : data_(static_cast<size_t>(height) * width, 0.0), height_(height), width_(width), h_(h) {
    if (height < 1 || width < 1)
        throw DimensionError("Image2D: height and width must be >= 1");
    if (!(h > 0.0)) throw DimensionError("Image2D: grid spacing must be positive");
}

Image2D Image2D::zeros(int height, int width, double h) { return Image2D(height, width, h); }

Image2D Image2D::constant(int height, int width, double value, double h) {
    Image2D im(height, width, h);
    std::fill(im.data_.begin(), im.data_.end(), value);
    return im;
}

double Image2D::mean_abs() const {
    double s = 0.0;
    for (double v : data_) s += std::abs(v);
    return s / static_cast<double>(data_.size());
}

double Image2D::max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
}

bool Image2D::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Skips whitespace and '#' comments in a PGM header.
int next_header_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw IoError("truncated PGM header: " + path);
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw IoError("malformed PGM header: " + path);
    in.unget();
    return value;
}

} // namespace

Image2D read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PGM: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw IoError("not a binary (P5) PGM: " + path);
    const int width = next_header_int(in, path);
    const int height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (maxval != 255) throw IoError("unsupported PGM maxval (expected 255): " + path);
    in.get(); // single whitespace after maxval
    std::vector<unsigned char> raw(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw IoError("truncated PGM pixel data: " + path);
    Image2D im(height, width);
    for (size_t i = 0; i < raw.size(); ++i) im.data()[i] = static_cast<double>(raw[i]);
    return im;
}

namespace {

unsigned char quantize(double v) {
    v = std::clamp(v, 0.0, 255.0);
    // round half to even
    const double r = std::nearbyint(v);
    return static_cast<unsigned char>(r);
}

} // namespace

void write_pgm(const std::string& path, const Image2D& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open PGM for writing: " + path);
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> raw(image.data().size());
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize(image.data()[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("PGM write failed: " + path);
}

} // namespace pdenet
