#include "sfem/episode_recognition.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace sfem {

namespace {

struct Chunk {
    std::vector<std::size_t> events;
    double start = 0.0;
    double end = 0.0;
};

using PairKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

struct PairStats {
    std::size_t first = 0;
    std::vector<double> gaps;
};

bool regular(const std::vector<double>& gaps, const RecognitionParams& params) {
    const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    return mean >= params.min_gap_seconds && (*hi - *lo) <= params.regular_gap_tolerance * mean;
}

} // namespace

bool has_repeated_subsequence(std::span<const std::size_t> events) {
    const std::size_t n = events.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (events[i] == events[i - 1]) return true;
    }
    for (std::size_t len = 2; len < n; ++len) {
        for (std::size_t a = 0; a + len <= n; ++a) {
            for (std::size_t b = a + 1; b + len <= n; ++b) {
                if (std::equal(events.begin() + a, events.begin() + a + len, events.begin() + b)) {
                    return true;
                }
            }
        }
    }
    return false;
}

std::vector<Episode> recognize_episodes(std::span<const BufferEntry> buffer,
                                        const RecognitionParams& params,
                                        std::optional<std::size_t> gap_event) {
    std::vector<Chunk> chunks;
    chunks.reserve(buffer.size());
    for (const auto& entry : buffer) chunks.push_back({{entry.event}, entry.time, entry.time});

    while (chunks.size() >= 2) {
        std::map<PairKey, PairStats> pairs;
        for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
            PairKey key{chunks[i].events, chunks[i + 1].events};
            auto [it, inserted] = pairs.try_emplace(std::move(key));
            if (inserted) it->second.first = i;
            it->second.gaps.push_back(chunks[i + 1].start - chunks[i].end);
        }

        const PairKey* best = nullptr;
        const PairStats* best_stats = nullptr;
        for (const auto& [key, stats] : pairs) {
            if (stats.gaps.size() < params.min_occurrences) continue;
            std::vector<std::size_t> merged = key.first;
            merged.insert(merged.end(), key.second.begin(), key.second.end());
            if (has_repeated_subsequence(merged)) continue;
            if (!best || stats.gaps.size() > best_stats->gaps.size() ||
                (stats.gaps.size() == best_stats->gaps.size() && stats.first < best_stats->first)) {
                best = &key;
                best_stats = &stats;
            }
        }
        if (!best) break;

        const bool insert_gap = gap_event && regular(best_stats->gaps, params);
        std::vector<Chunk> next;
        next.reserve(chunks.size());
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            if (i + 1 < chunks.size() && chunks[i].events == best->first &&
                chunks[i + 1].events == best->second) {
                Chunk merged = chunks[i];
                if (insert_gap) merged.events.push_back(*gap_event);
                merged.events.insert(merged.events.end(), chunks[i + 1].events.begin(),
                                     chunks[i + 1].events.end());
                merged.end = chunks[i + 1].end;
                next.push_back(std::move(merged));
                ++i;
            } else {
                next.push_back(chunks[i]);
            }
        }
        chunks = std::move(next);
    }

    std::vector<Episode> episodes;
    for (const auto& chunk : chunks) {
        if (chunk.events.size() < 2) continue;
        Episode ep{chunk.events};
        if (std::find(episodes.begin(), episodes.end(), ep) == episodes.end()) {
            episodes.push_back(std::move(ep));
        }
    }
    return episodes;
}

} // namespace sfem
