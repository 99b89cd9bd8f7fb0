#pragma once

#include <cstdint>
#include <vector>

#include "branchmin/lts.hpp"

namespace branchmin {

// Result of splitting block B under a block-bunch-slice T. On return the
// state array slice of B is laid out as
//   [begin, u_bottom_end)        bottom states of U
//   [u_bottom_end, u_end)        non-bottom states of U
//   [u_end, r_bottom_end)        bottom states of R
//   [r_bottom_end, end)          non-bottom states of R
// where R can silently reach T inside B and U cannot.
struct SplitOutcome {
    enum class Side { R, U };

    Side finished = Side::U;  // coroutine that completed first
    bool u_empty = false;
    index_t begin = 0, u_bottom_end = 0, u_end = 0, r_bottom_end = 0, end = 0;
    std::uint64_t u_steps = 0, r_steps = 0;
    bool u_aborted = false, r_aborted = false;
    // States found by the slow test to own a splitter transition.
    std::vector<index_t> new_bottom_candidates;

    index_t u_size() const { return u_end - begin; }
    index_t r_size() const { return end - u_end; }
    Side smaller_side() const { return u_size() <= r_size() ? Side::U : Side::R; }
};

}  // namespace branchmin
