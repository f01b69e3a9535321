#include "markerforge/artcode.hpp"

#include <algorithm>
#include <charconv>

namespace markerforge {

ValidationOutcome validate_descriptor(const ArtcodeDescriptor& d, const ValidationPolicy& policy) {
    const int branches = static_cast<int>(d.leafCounts.size());
    if (branches < policy.minBranches) return ValidationOutcome::TooFewBranches;
    if (branches > policy.maxBranches) return ValidationOutcome::TooManyBranches;
    long sum = 0;
    for (int leaves : d.leafCounts) {
        if (leaves < policy.minLeavesPerBranch || leaves > policy.maxLeavesPerBranch)
            return ValidationOutcome::LeafCountOutOfRange;
        sum += leaves;
    }
    if (policy.checksumModulus && sum % *policy.checksumModulus != 0)
        return ValidationOutcome::ChecksumMismatch;
    return ValidationOutcome::Valid;
}

std::vector<ArtcodeCandidate> extract_artcodes(const RegionAdjacencyTree& tree,
                                               const ValidationPolicy& policy) {
    std::vector<ArtcodeCandidate> found;
    for (const RegionNode& root : tree.nodes) {
        if (root.polarity != Polarity::Ink) continue;
        if (tree.virtualRoot && root.id == tree.rootId) continue;
        if (root.childIds.empty()) continue;

        bool structureOk = true;
        ArtcodeDescriptor descriptor;
        descriptor.leafCounts.reserve(root.childIds.size());
        for (std::int32_t branchId : root.childIds) {
            const RegionNode& branch = tree.node(branchId);
            if (branch.childIds.empty()) { structureOk = false; break; } // branch must hold leaves
            for (std::int32_t leafId : branch.childIds) {
                if (!tree.node(leafId).childIds.empty()) { structureOk = false; break; }
            }
            if (!structureOk) break;
            descriptor.leafCounts.push_back(static_cast<int>(branch.childIds.size()));
        }
        if (!structureOk) continue;

        std::sort(descriptor.leafCounts.begin(), descriptor.leafCounts.end());
        if (validate_descriptor(descriptor, policy) != ValidationOutcome::Valid) continue;
        found.push_back({std::move(descriptor), root.id, root.bbox});
    }
    std::sort(found.begin(), found.end(), [](const ArtcodeCandidate& a, const ArtcodeCandidate& b) {
        if (a.bbox.y != b.bbox.y) return a.bbox.y < b.bbox.y;
        if (a.bbox.x != b.bbox.x) return a.bbox.x < b.bbox.x;
        return a.rootRegionId < b.rootRegionId;
    });
    return found;
}

std::string format_code(const ArtcodeDescriptor& d) {
    std::string out;
    for (std::size_t i = 0; i < d.leafCounts.size(); ++i) {
        if (i) out += ':';
        out += std::to_string(d.leafCounts[i]);
    }
    return out;
}

ArtcodeDescriptor parse_code(const std::string& s) {
    if (s.empty()) throw CodeParseError(CodeParseErrorCode::EmptyCode, "empty code string");
    ArtcodeDescriptor d;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = std::min(s.find(':', start), s.size());
        int value = 0;
        const auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + end, value);
        if (ec != std::errc{} || ptr != s.data() + end || end == start)
            throw CodeParseError(CodeParseErrorCode::NonNumericSegment,
                                 "segment '" + s.substr(start, end - start) + "' is not a count");
        if (value <= 0)
            throw CodeParseError(CodeParseErrorCode::ZeroOrNegativeCount,
                                 "counts must be positive");
        d.leafCounts.push_back(value);
        if (end == s.size()) break;
        start = end + 1;
    }
    std::sort(d.leafCounts.begin(), d.leafCounts.end());
    return d;
}

} // namespace markerforge
