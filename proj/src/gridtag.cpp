#include "markerforge/gridtag.hpp"

#include <algorithm>
#include <vector>

namespace markerforge {

namespace {

constexpr std::uint8_t kInk = 20;
constexpr std::uint8_t kPaper = 235;
constexpr std::uint8_t kStructureByte = 0xAA;

bool is_inner_corner(int r, int c) {
    return (r == 0 || r == 5) && (c == 0 || c == 5);
}

// Inner payload cells in row-major order, corner cells skipped: 32 in total.
std::vector<std::pair<int, int>> payload_cells() {
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if (!is_inner_corner(r, c)) cells.push_back({r, c});
    return cells;
}

std::uint32_t payload_bitstream(GridTagPayload p) {
    const std::uint8_t checksum = static_cast<std::uint8_t>((p.data >> 8) ^ (p.data & 0xFF));
    return (static_cast<std::uint32_t>(p.data) << 16) |
           (static_cast<std::uint32_t>(checksum) << 8) | kStructureByte;
}

ModuleMatrix rotate_quarter(const ModuleMatrix& m) {
    ModuleMatrix out;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            out.cell[r][c] = m.cell[7 - c][r];
    return out;
}

enum class Stage { Corners, Checksum, Structure, Valid };

Stage try_orientation(const ModuleMatrix& m, std::uint16_t& dataOut) {
    if (!m.cell[1][1] || !m.cell[1][6] || !m.cell[6][1] || m.cell[6][6])
        return Stage::Corners;
    std::uint32_t bits = 0;
    for (const auto& [r, c] : payload_cells())
        bits = (bits << 1) | (m.cell[r + 1][c + 1] ? 1u : 0u);
    const std::uint16_t data = static_cast<std::uint16_t>(bits >> 16);
    const std::uint8_t checksum = static_cast<std::uint8_t>((bits >> 8) & 0xFF);
    const std::uint8_t structure = static_cast<std::uint8_t>(bits & 0xFF);
    if (checksum != static_cast<std::uint8_t>((data >> 8) ^ (data & 0xFF)))
        return Stage::Checksum;
    if (structure != kStructureByte) return Stage::Structure;
    dataOut = data;
    return Stage::Valid;
}

} // namespace

ModuleMatrix encode_gridtag(GridTagPayload p) {
    ModuleMatrix m;
    for (int i = 0; i < 8; ++i) {
        m.cell[0][i] = m.cell[7][i] = m.cell[i][0] = m.cell[i][7] = true;
    }
    m.cell[1][1] = m.cell[1][6] = m.cell[6][1] = true; // orientation corners
    m.cell[6][6] = false;

    const std::uint32_t bits = payload_bitstream(p);
    int bit = 31;
    for (const auto& [r, c] : payload_cells())
        m.cell[r + 1][c + 1] = ((bits >> bit--) & 1u) != 0;
    return m;
}

PixelGrid render_gridtag(const ModuleMatrix& m, int modulePx) {
    if (modulePx < 2) throw std::invalid_argument("modulePx must be >= 2");
    const int side = 10 * modulePx; // 8 modules + quiet zone on each side
    PixelGrid grid(side, side, kPaper);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            if (!m.cell[r][c]) continue;
            for (int y = (r + 1) * modulePx; y < (r + 2) * modulePx; ++y)
                for (int x = (c + 1) * modulePx; x < (c + 2) * modulePx; ++x)
                    grid.at(x, y) = kInk;
        }
    }
    return grid;
}

GridTagPayload decode_gridtag(const PixelGrid& grid, const Box& box) {
    if (box.w < 8 || box.h < 8 || clip(box, grid.width, grid.height) != box)
        throw std::invalid_argument("box must lie within the image and span 8x8 cells");

    ModuleMatrix sampled;
    for (int r = 0; r < 8; ++r) {
        const int y0 = box.y + (r * box.h) / 8;
        const int y1 = box.y + ((r + 1) * box.h) / 8;
        for (int c = 0; c < 8; ++c) {
            const int x0 = box.x + (c * box.w) / 8;
            const int x1 = box.x + ((c + 1) * box.w) / 8;
            const int cxm = (x0 + x1 - 1) / 2;
            const int cym = (y0 + y1 - 1) / 2;
            int sum = 0, n = 0;
            for (int y = std::max(y0, cym - 1); y <= std::min(y1 - 1, cym + 1); ++y) {
                for (int x = std::max(x0, cxm - 1); x <= std::min(x1 - 1, cxm + 1); ++x) {
                    sum += grid.at(x, y);
                    ++n;
                }
            }
            sampled.cell[r][c] = sum < 128 * n;
        }
    }

    for (int i = 0; i < 8; ++i) {
        if (!sampled.cell[0][i] || !sampled.cell[7][i] || !sampled.cell[i][0] ||
            !sampled.cell[i][7])
            throw GridTagError(GridTagErrorCode::BorderNotFound, "border ring incomplete");
    }

    Stage best = Stage::Corners;
    bool anyValid = false;
    std::uint16_t bestData = 0;
    ModuleMatrix rotated = sampled;
    for (int rot = 0; rot < 4; ++rot) {
        std::uint16_t data = 0;
        const Stage stage = try_orientation(rotated, data);
        if (stage == Stage::Valid) {
            if (!anyValid || data < bestData) bestData = data;
            anyValid = true;
        } else if (stage > best) {
            best = stage;
        }
        rotated = rotate_quarter(rotated);
    }
    if (anyValid) return {bestData};
    switch (best) {
        case Stage::Checksum:
            throw GridTagError(GridTagErrorCode::ChecksumMismatch, "checksum byte does not match");
        case Stage::Structure:
            throw GridTagError(GridTagErrorCode::StructureMismatch, "structure byte is not 0xAA");
        default:
            throw GridTagError(GridTagErrorCode::OrientationInvalid,
                               "orientation corners not found in any rotation");
    }
}

std::string format_payload(GridTagPayload p) {
    static const char* hex = "0123456789ABCDEF";
    std::string s(4, '0');
    for (int i = 0; i < 4; ++i) s[3 - i] = hex[(p.data >> (4 * i)) & 0xF];
    return s;
}

} // namespace markerforge
