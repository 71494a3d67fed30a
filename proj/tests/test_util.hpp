#pragma once

#include <random>
#include <string>
#include <vector>

#include "hitkernel/monomials.hpp"

namespace hktest {

inline std::string data_file(const std::string& name) { return std::string(HITKERNEL_DATA_DIR) + "/" + name; }

/// Uniform random exponent tuple of degree n in q variables.
inline hitkernel::ExponentTuple random_tuple(std::mt19937& rng, int q, unsigned n)
{
    std::vector<unsigned> cuts{0, n};
    std::uniform_int_distribution<unsigned> pick(0, n);
    for (int i = 0; i < q - 1; ++i)
        cuts.push_back(pick(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<unsigned> exps;
    for (int i = 0; i < q; ++i)
        exps.push_back(cuts[i + 1] - cuts[i]);
    return hitkernel::ExponentTuple::from_span(exps);
}

}  // namespace hktest
