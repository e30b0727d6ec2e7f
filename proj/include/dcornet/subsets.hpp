#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace dcornet {

// Streams subsets of `candidate_count` items as bitmasks in binary-reflected
// Gray-code order, starting with the empty set. With a size cap, subsets larger
// than the cap are skipped without reordering the rest, so consecutive yielded
// subsets may differ in more than one element; `changed()` gives the symmetric
// difference with the previously yielded subset.
class SubsetEnumerator {
public:
    static constexpr std::size_t kMaxCandidates = 40;

    SubsetEnumerator(std::size_t candidate_count, std::optional<std::size_t> max_size);

    // Advances to the next subset; the first call yields the empty set.
    bool next();

    std::uint64_t mask() const { return mask_; }
    std::uint64_t changed() const { return mask_ ^ previous_; }
    std::size_t subset_size() const;
    std::uint64_t yielded() const { return yielded_; }

    // Number of subsets the enumerator will yield.
    static std::uint64_t count(std::size_t candidate_count, std::optional<std::size_t> max_size);

private:
    std::size_t candidates_;
    std::size_t cap_;
    std::uint64_t end_;
    std::uint64_t index_ = 0;
    std::uint64_t mask_ = 0;
    std::uint64_t previous_ = 0;
    std::uint64_t yielded_ = 0;
    bool started_ = false;
};

template <typename T>
std::vector<std::vector<T>> enumerate_subsets(const std::vector<T>& candidates, std::optional<std::size_t> max_size) {
    std::vector<std::vector<T>> out;
    SubsetEnumerator it(candidates.size(), max_size);
    while (it.next()) {
        std::vector<T> subset;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (it.mask() >> i & 1U) subset.push_back(candidates[i]);
        }
        out.push_back(std::move(subset));
    }
    return out;
}

}  // namespace dcornet
