#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "markerforge/image.hpp"

namespace markerforge {

struct GridTagPayload {
    std::uint16_t data = 0;

    friend bool operator==(const GridTagPayload&, const GridTagPayload&) = default;
};

// 8x8 cells, true = ink. Outer ring is the border; the inner 6x6 carries
// three ink orientation corners (paper at inner (5,5)), then 16 data bits,
// 8 checksum bits (high byte XOR low byte) and the fixed structure byte 0xAA,
// MSB first, row-major skipping the corner cells.
struct ModuleMatrix {
    std::array<std::array<bool, 8>, 8> cell{};

    friend bool operator==(const ModuleMatrix&, const ModuleMatrix&) = default;
};

enum class GridTagErrorCode { BorderNotFound, OrientationInvalid, ChecksumMismatch, StructureMismatch };

class GridTagError : public std::runtime_error {
public:
    GridTagError(GridTagErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    GridTagErrorCode code() const { return code_; }

private:
    GridTagErrorCode code_;
};

ModuleMatrix encode_gridtag(GridTagPayload p);

// (8*modulePx)^2 of modules plus a one-module paper quiet zone on all sides;
// ink 20, paper 235.
PixelGrid render_gridtag(const ModuleMatrix& m, int modulePx);

// Divides the box into 8x8 cells, samples each cell center (3x3 mean clipped
// to the cell, ink iff mean < 128), verifies the border ring, then tries the
// four axis rotations. A rotation is accepted only with matching orientation
// corners, checksum, and structure byte; ties resolve to the smallest data.
GridTagPayload decode_gridtag(const PixelGrid& grid, const Box& box);

// 4-digit uppercase hex, the report form of a payload.
std::string format_payload(GridTagPayload p);

} // namespace markerforge
