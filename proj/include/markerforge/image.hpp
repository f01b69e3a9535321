#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/geometry.hpp"

namespace markerforge {

// 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels, row-major.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> samples;

    std::uint8_t& at(int x, int y, int c) {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// Grayscale working copy; the currency of every pipeline stage.
struct PixelGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> luma;

    PixelGrid() = default;
    PixelGrid(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), luma(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return luma[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return luma[static_cast<std::size_t>(y) * width + x]; }
};

// Result of binarization; true = dark/ink foreground.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ink; // 0/1 per pixel

    bool is_ink(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x] != 0; }
};

enum class PnmErrorCode { MalformedHeader, TruncatedBody, UnsupportedMaxval, UnsupportedMagic };

class PnmError : public std::runtime_error {
public:
    PnmError(PnmErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    PnmErrorCode code() const { return code_; }

private:
    PnmErrorCode code_;
};

// Binary PNM (P5 gray / P6 RGB), maxval 255 only. Header comments are skipped.
RasterImage read_pnm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pnm(const RasterImage& image);

// BT.601 weights, round-to-nearest; 1-channel input is copied through.
PixelGrid to_luminance(const RasterImage& image);

RasterImage to_rgb(const PixelGrid& grid);

// Copies the boxed sub-image; box must lie within the grid.
PixelGrid crop(const PixelGrid& grid, const Box& box);

// Area-average resampling. Exact fractional pixel coverage, so downscaling a
// rendered marker loses detail the way a distant camera would.
PixelGrid resize_area(const PixelGrid& grid, int newWidth, int newHeight);

} // namespace markerforge
