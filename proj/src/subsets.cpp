#include "dcornet/subsets.hpp"

#include <algorithm>
#include <bit>

#include "dcornet/error.hpp"

namespace dcornet {

SubsetEnumerator::SubsetEnumerator(std::size_t candidate_count, std::optional<std::size_t> max_size)
    : candidates_(candidate_count), cap_(std::min(max_size.value_or(candidate_count), candidate_count)) {
    if (candidate_count > kMaxCandidates) {
        throw InputError("subset enumeration supports at most " + std::to_string(kMaxCandidates) + " candidates");
    }
    end_ = std::uint64_t{1} << candidates_;
}

bool SubsetEnumerator::next() {
    if (!started_) {
        started_ = true;
        index_ = 0;
        previous_ = 0;
        mask_ = 0;
        yielded_ = 1;
        return true;
    }
    previous_ = mask_;
    while (++index_ < end_) {
        const std::uint64_t gray = index_ ^ (index_ >> 1);
        if (static_cast<std::size_t>(std::popcount(gray)) <= cap_) {
            mask_ = gray;
            ++yielded_;
            return true;
        }
    }
    index_ = end_;
    return false;
}

std::size_t SubsetEnumerator::subset_size() const {
    return static_cast<std::size_t>(std::popcount(mask_));
}

std::uint64_t SubsetEnumerator::count(std::size_t candidate_count, std::optional<std::size_t> max_size) {
    const std::size_t cap = std::min(max_size.value_or(candidate_count), candidate_count);
    std::uint64_t total = 0;
    std::uint64_t binom = 1;  // C(m, k)
    for (std::size_t k = 0; k <= cap; ++k) {
        total += binom;
        binom = binom * (candidate_count - k) / (k + 1);
    }
    return total;
}

}  // namespace dcornet
