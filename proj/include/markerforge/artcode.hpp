#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/regions.hpp"

namespace markerforge {

// Sorted list of leaf counts per branch region, e.g. {1,1,2,4,4} <-> "1:1:2:4:4".
struct ArtcodeDescriptor {
    std::vector<int> leafCounts; // ascending, each >= 1

    friend bool operator==(const ArtcodeDescriptor&, const ArtcodeDescriptor&) = default;
};

struct ValidationPolicy {
    int minBranches = 3;
    int maxBranches = 12;
    int minLeavesPerBranch = 1;
    int maxLeavesPerBranch = 9;
    std::optional<int> checksumModulus; // sum of leaves must divide when set
};

enum class ValidationOutcome {
    Valid,
    TooFewBranches,
    TooManyBranches,
    LeafCountOutOfRange,
    ChecksumMismatch,
};

struct ArtcodeCandidate {
    ArtcodeDescriptor descriptor;
    std::int32_t rootRegionId = -1;
    Box bbox; // the root region's bbox, image pixels
};

enum class CodeParseErrorCode { EmptyCode, NonNumericSegment, ZeroOrNegativeCount };

class CodeParseError : public std::runtime_error {
public:
    CodeParseError(CodeParseErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    CodeParseErrorCode code() const { return code_; }

private:
    CodeParseErrorCode code_;
};

class UnrenderableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A node qualifies when it is ink, every child (branch) holds at least one
// grandchild, every grandchild (leaf) is childless, and the sorted leaf
// counts satisfy the policy. Nested qualifying roots are all reported, in
// raster order of the root bbox.
std::vector<ArtcodeCandidate> extract_artcodes(const RegionAdjacencyTree& tree,
                                               const ValidationPolicy& policy);

// First failing reason in order: TooFewBranches, TooManyBranches,
// LeafCountOutOfRange, ChecksumMismatch.
ValidationOutcome validate_descriptor(const ArtcodeDescriptor& d, const ValidationPolicy& policy);

// Counts joined by ":" ascending. Grammar: code := count (":" count)*.
std::string format_code(const ArtcodeDescriptor& d);

// Accepts unsorted input; the result is sorted ascending.
ArtcodeDescriptor parse_code(const std::string& s);

// Deterministic synthetic marker: a closed ink wheel whose spokes divide the
// interior into one paper chamber per branch, with the required ink dots in
// each chamber. All distinct regions keep >= 2 px of clearance so that
// binarize -> label -> RAT recovers exactly the intended topology.
// Ink level 20, paper level 235. Throws UnrenderableError when the dots
// cannot fit at canvasPx.
PixelGrid render_artcode(const ArtcodeDescriptor& d, int canvasPx, std::uint64_t seed);

} // namespace markerforge
