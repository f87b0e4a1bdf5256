// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wordcraft/model/denoiser.hpp"

namespace wordcraft::oracles {

struct GroupError {
    std::string name;
    double relative = 0;  // |numeric - analytic| / max(|numeric|, |analytic|) over the group
};

/// Central differences (eps = 1e-4) for every parameter, compared per tensor.
template <class Fn>
std::vector<GroupError> gradient_errors(model::Denoiser<double>& m, Fn objective, const std::vector<double>& analytic) {
    const double eps = 1e-4;
    std::vector<double>& p = m.parameters();
    std::vector<GroupError> out;
    for (const model::TensorInfo& t : m.tensors()) {
        double diff2 = 0, num2 = 0, an2 = 0;
        for (std::size_t i = t.offset; i < t.offset + t.size(); ++i) {
            const double keep = p[i];
            p[i] = keep + eps;
            const double up = objective();
            p[i] = keep - eps;
            const double down = objective();
            p[i] = keep;
            const double numeric = (up - down) / (2 * eps);
            diff2 += (numeric - analytic[i]) * (numeric - analytic[i]);
            num2 += numeric * numeric;
            an2 += analytic[i] * analytic[i];
        }
        out.push_back({t.name, std::sqrt(diff2) / std::max({std::sqrt(num2), std::sqrt(an2), 1e-300})});
    }
    return out;
}

}  // namespace wordcraft::oracles
