#include "markerforge/image.hpp"

#include <cctype>
#include <cmath>

namespace markerforge {

namespace {

// Reads the next ASCII integer token, skipping whitespace and '#' comments.
bool next_header_int(const std::vector<std::uint8_t>& bytes, std::size_t& pos, long& out) {
    while (pos < bytes.size()) {
        std::uint8_t c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(c)) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) return false;
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000'000L) return false;
        ++pos;
    }
    out = value;
    return true;
}

} // namespace

RasterImage read_pnm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw PnmError(PnmErrorCode::MalformedHeader, "not a PNM stream");
    char magic = static_cast<char>(bytes[1]);
    if (!std::isdigit(static_cast<unsigned char>(magic)))
        throw PnmError(PnmErrorCode::MalformedHeader, "missing PNM magic digit");
    if (magic != '5' && magic != '6')
        throw PnmError(PnmErrorCode::UnsupportedMagic,
                       std::string("unsupported PNM magic P") + magic);
    int channels = magic == '5' ? 1 : 3;

    std::size_t pos = 2;
    long w = 0, h = 0, maxval = 0;
    if (!next_header_int(bytes, pos, w) || !next_header_int(bytes, pos, h))
        throw PnmError(PnmErrorCode::MalformedHeader, "missing image dimensions");
    if (!next_header_int(bytes, pos, maxval))
        throw PnmError(PnmErrorCode::MalformedHeader, "missing maxval");
    if (w < 1 || h < 1)
        throw PnmError(PnmErrorCode::MalformedHeader, "non-positive dimensions");
    if (maxval != 255)
        throw PnmError(PnmErrorCode::UnsupportedMaxval, "maxval must be 255");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw PnmError(PnmErrorCode::MalformedHeader, "missing separator before body");
    ++pos; // exactly one whitespace byte separates header from body

    std::size_t need = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() - pos < need)
        throw PnmError(PnmErrorCode::TruncatedBody, "pixel data shorter than header promises");

    RasterImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    img.samples.assign(bytes.begin() + pos, bytes.begin() + pos + need);
    return img;
}

std::vector<std::uint8_t> write_pnm(const RasterImage& image) {
    std::string header = image.channels == 1 ? "P5\n" : "P6\n";
    header += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.samples.begin(), image.samples.end());
    return out;
}

PixelGrid to_luminance(const RasterImage& image) {
    PixelGrid grid;
    grid.width = image.width;
    grid.height = image.height;
    if (image.channels == 1) {
        grid.luma = image.samples;
        return grid;
    }
    grid.luma.resize(static_cast<std::size_t>(image.width) * image.height);
    const std::uint8_t* src = image.samples.data();
    for (std::size_t i = 0; i < grid.luma.size(); ++i, src += 3) {
        // round(0.299R + 0.587G + 0.114B) in exact integer arithmetic
        unsigned v = (299u * src[0] + 587u * src[1] + 114u * src[2] + 500u) / 1000u;
        grid.luma[i] = static_cast<std::uint8_t>(v > 255u ? 255u : v);
    }
    return grid;
}

RasterImage to_rgb(const PixelGrid& grid) {
    RasterImage img;
    img.width = grid.width;
    img.height = grid.height;
    img.channels = 3;
    img.samples.resize(grid.luma.size() * 3);
    for (std::size_t i = 0; i < grid.luma.size(); ++i) {
        img.samples[3 * i] = img.samples[3 * i + 1] = img.samples[3 * i + 2] = grid.luma[i];
    }
    return img;
}

PixelGrid crop(const PixelGrid& grid, const Box& box) {
    PixelGrid out(box.w, box.h);
    for (int y = 0; y < box.h; ++y) {
        const std::uint8_t* src = grid.luma.data() + static_cast<std::size_t>(box.y + y) * grid.width + box.x;
        std::uint8_t* dst = out.luma.data() + static_cast<std::size_t>(y) * box.w;
        std::copy(src, src + box.w, dst);
    }
    return out;
}

PixelGrid resize_area(const PixelGrid& grid, int newWidth, int newHeight) {
    if (newWidth == grid.width && newHeight == grid.height) return grid;
    PixelGrid out(newWidth, newHeight);
    const double sx = static_cast<double>(grid.width) / newWidth;
    const double sy = static_cast<double>(grid.height) / newHeight;
    for (int y = 0; y < newHeight; ++y) {
        const double y0 = y * sy, y1 = (y + 1) * sy;
        const int iy0 = static_cast<int>(y0);
        const int iy1 = std::min(grid.height - 1, static_cast<int>(std::ceil(y1)) - 1);
        for (int x = 0; x < newWidth; ++x) {
            const double x0 = x * sx, x1 = (x + 1) * sx;
            const int ix0 = static_cast<int>(x0);
            const int ix1 = std::min(grid.width - 1, static_cast<int>(std::ceil(x1)) - 1);
            double acc = 0.0, wsum = 0.0;
            for (int yy = iy0; yy <= iy1; ++yy) {
                const double wy = std::min<double>(yy + 1, y1) - std::max<double>(yy, y0);
                for (int xx = ix0; xx <= ix1; ++xx) {
                    const double wx = std::min<double>(xx + 1, x1) - std::max<double>(xx, x0);
                    acc += wx * wy * grid.at(xx, yy);
                    wsum += wx * wy;
                }
            }
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(acc / wsum));
        }
    }
    return out;
}

} // namespace markerforge
