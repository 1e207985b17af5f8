#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sfem {

struct BufferEntry {
    std::size_t event = 0;
    double time = 0.0; // seconds
};

/// Ordered event-node indices; may contain the reserved time-gap event.
struct Episode {
    std::vector<std::size_t> events;

    bool operator==(const Episode&) const = default;
};

struct RecognitionParams {
    /// A pair's gaps are regular when (max - min) <= tolerance * mean.
    double regular_gap_tolerance = 0.2;
    /// Regular gaps shorter than this are ordinary succession, not a pause.
    double min_gap_seconds = 60.0;
    std::size_t min_occurrences = 2;
};

/// True when the sequence repeats an event back to back, or contains the same
/// contiguous subsequence of length >= 2 at two different positions.
bool has_repeated_subsequence(std::span<const std::size_t> events);

/// Episode recognition over the working buffer.
///
/// Starts from one chunk per buffered event. Each round counts adjacent chunk
/// pairs, picks the most frequent pair seen at least `min_occurrences` times
/// (ties: earliest first occurrence) whose merge would not repeat a
/// subsequence, and merges every occurrence left to right. When the pair's
/// gaps are regular and long enough a `gap_event` token is placed between the
/// halves. Stops at the first round with no merge. Distinct chunks of length
/// >= 2 are returned in order of first appearance.
std::vector<Episode> recognize_episodes(std::span<const BufferEntry> buffer,
                                        const RecognitionParams& params,
                                        std::optional<std::size_t> gap_event = std::nullopt);

} // namespace sfem
