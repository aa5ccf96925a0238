#pragma once

#include <vector>

namespace dprime {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with n points, built once per n and cached.
const GaussRule& gauss_legendre(int n);

}  // namespace dprime
