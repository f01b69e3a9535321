#include <algorithm>
#include <cmath>
#include <numbers>

#include "markerforge/artcode.hpp"
#include "markerforge/rng.hpp"

namespace markerforge {

namespace {

constexpr std::uint8_t kInk = 20;
constexpr std::uint8_t kPaper = 235;

struct Disk {
    double x, y, r;
};

struct WheelGeometry {
    double cx, cy;
    double outerR;   // outer edge of the ring
    double stroke;   // ring/spoke thickness
    double hubR;     // solid disk where the spokes meet
    std::vector<double> spokeAngles;
    std::vector<Disk> dots;
};

// Places n dots inside the chamber between two spokes. Dots sit on radial
// levels; a level's angular capacity shrinks near the hub where the spokes
// converge. Returns false when the chamber cannot hold n dots at radius rd
// with clearance g everywhere.
bool layout_chamber_dots(double thetaLeft, double span, double rLo, double rHi,
                         double halfStroke, double g, double rd, int n,
                         double phaseJitter, std::vector<Disk>& out,
                         double cx, double cy) {
    const double radialStep = 2 * rd + g;
    const int maxLevels = static_cast<int>((rHi - rLo) / radialStep) + 1;
    if (rHi < rLo || maxLevels < 1) return false;

    // Outer levels first: more angular room.
    std::vector<double> radii;
    for (int i = 0; i < maxLevels; ++i) radii.push_back(rHi - i * radialStep);

    std::vector<std::pair<double, int>> levels; // radius, dot count
    int remaining = n;
    for (double r : radii) {
        if (remaining == 0) break;
        const double clear = halfStroke + g + rd;
        if (clear >= r) continue; // too close to the hub to clear the spokes
        const double margin = std::asin(clear / r);
        const double usable = span - 2 * margin;
        if (usable <= 0) continue;
        const double minAngle = 2 * std::asin(std::min(1.0, (2 * rd + g) / (2 * r)));
        const int capacity = minAngle > 0 ? static_cast<int>(usable / minAngle) : remaining;
        if (capacity <= 0) continue;
        const int take = std::min(remaining, capacity);
        levels.push_back({r, take});
        remaining -= take;
    }
    if (remaining > 0) return false;

    for (const auto& [r, k] : levels) {
        const double clear = halfStroke + g + rd;
        const double margin = std::asin(clear / r);
        const double usable = span - 2 * margin;
        const double step = usable / k;
        for (int j = 0; j < k; ++j) {
            const double theta = thetaLeft + margin + (j + 0.5) * step + phaseJitter * step * 0.2;
            out.push_back({cx + r * std::cos(theta), cy + r * std::sin(theta), rd});
        }
    }
    return true;
}

WheelGeometry plan_wheel(const ArtcodeDescriptor& d, int canvasPx, std::uint64_t seed) {
    const double c = canvasPx;
    WheelGeometry geo;
    geo.cx = geo.cy = c / 2.0;
    geo.stroke = std::max(3.0, c / 44.0);
    geo.outerR = 0.46 * c;
    geo.hubR = std::max(1.6 * geo.stroke, 0.05 * c);

    const int branches = static_cast<int>(d.leafCounts.size());
    Rng rng(seed ^ 0xA57C0DEull);
    const double phi0 = rng.uniform(0, 2 * std::numbers::pi);

    // Seed shuffles which chamber holds which leaf count; extraction sorts,
    // so the code is unchanged.
    std::vector<int> counts = d.leafCounts;
    for (int i = branches - 1; i > 0; --i)
        std::swap(counts[i], counts[rng.uniform_int(0, i)]);

    for (int k = 0; k < branches; ++k)
        geo.spokeAngles.push_back(phi0 + 2 * std::numbers::pi * k / branches);

    // Clearance between distinct regions. Generous relative to the stroke so
    // the topology survives aggressive downscaling in composed scenes.
    const double g = std::max(3.0, 0.85 * geo.stroke);
    const double ringInner = geo.outerR - geo.stroke;
    const double span = 2 * std::numbers::pi / branches;

    for (int k = 0; k < branches; ++k) {
        const double phase = rng.uniform(-1.0, 1.0);
        bool placed = false;
        // Largest dot radius that fits wins; shrink until feasible.
        for (double rd = std::min(0.05 * c, (ringInner - geo.hubR) / 4.0); rd >= 1.6; rd *= 0.85) {
            std::vector<Disk> dots;
            if (layout_chamber_dots(geo.spokeAngles[k], span, geo.hubR + g + rd,
                                    ringInner - g - rd, geo.stroke / 2.0, g, rd,
                                    counts[k], phase, dots, geo.cx, geo.cy)) {
                geo.dots.insert(geo.dots.end(), dots.begin(), dots.end());
                placed = true;
                break;
            }
        }
        if (!placed)
            throw UnrenderableError("descriptor " + format_code(d) + " does not fit at " +
                                    std::to_string(canvasPx) + " px");
    }
    return geo;
}

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * dx, qy = ay + t * dy;
    return std::hypot(px - qx, py - qy);
}

void paint_disk(PixelGrid& grid, const Disk& disk, std::uint8_t value) {
    const int y0 = std::max(0, static_cast<int>(disk.y - disk.r) - 1);
    const int y1 = std::min(grid.height - 1, static_cast<int>(disk.y + disk.r) + 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = std::max(0, static_cast<int>(disk.x - disk.r) - 1);
             x <= std::min(grid.width - 1, static_cast<int>(disk.x + disk.r) + 1); ++x) {
            const double dx = x + 0.5 - disk.x, dy = y + 0.5 - disk.y;
            if (dx * dx + dy * dy <= disk.r * disk.r) grid.at(x, y) = value;
        }
    }
}

} // namespace

PixelGrid render_artcode(const ArtcodeDescriptor& d, int canvasPx, std::uint64_t seed) {
    if (d.leafCounts.empty())
        throw std::invalid_argument("descriptor must have at least one branch");
    for (int n : d.leafCounts)
        if (n < 1) throw std::invalid_argument("leaf counts must be positive");
    if (canvasPx < 64) throw std::invalid_argument("canvas must be at least 64 px");

    const WheelGeometry geo = plan_wheel(d, canvasPx, seed);
    PixelGrid grid(canvasPx, canvasPx, kPaper);

    const double ringInner = geo.outerR - geo.stroke;
    for (int y = 0; y < canvasPx; ++y) {
        for (int x = 0; x < canvasPx; ++x) {
            const double dx = x + 0.5 - geo.cx, dy = y + 0.5 - geo.cy;
            const double rho = std::hypot(dx, dy);
            if (rho > geo.outerR) continue;
            if (rho >= ringInner || rho <= geo.hubR) {
                grid.at(x, y) = kInk;
                continue;
            }
            for (double theta : geo.spokeAngles) {
                const double ex = geo.cx + std::cos(theta) * (geo.outerR - geo.stroke / 2.0);
                const double ey = geo.cy + std::sin(theta) * (geo.outerR - geo.stroke / 2.0);
                if (point_segment_distance(x + 0.5, y + 0.5, geo.cx, geo.cy, ex, ey) <=
                    geo.stroke / 2.0) {
                    grid.at(x, y) = kInk;
                    break;
                }
            }
        }
    }
    for (const Disk& dot : geo.dots) paint_disk(grid, dot, kInk);
    return grid;
}

} // namespace markerforge
