#pragma once

#include <string>
#include <vector>

#include "itpnet/gradcheck.hpp"

namespace itpnet {

struct GradCheckRow {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    double tol = 1e-5;

    bool ok() const { return max_rel_err < tol; }
};

/// Central-difference checks for every differentiable primitive, the
/// recurrent/attention composites, each loss, and (optionally) the full
/// scene loss end to end (tol 1e-4, >= 200 sampled parameters there;
/// 1e-5 everywhere else). Inputs are drawn from streams derived per row,
/// so rows never influence each other.
std::vector<GradCheckRow> gradcheck_suite(std::uint64_t seed, bool end_to_end = true);

} // namespace itpnet
