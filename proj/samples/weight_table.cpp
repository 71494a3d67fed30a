// Builds (QP_q)_n and prints its weight table and a few admissible monomials.
//   sample_weight_table [q n]

#include <cstdio>
#include <cstdlib>

#include "hitkernel/qpspace.hpp"

int main(int argc, char** argv)
{
    const int q = argc > 2 ? std::atoi(argv[1]) : 5;
    const unsigned n = argc > 2 ? static_cast<unsigned>(std::atoi(argv[2])) : 15;

    const auto ds = hitkernel::build_degree_space(q, n);
    std::printf("dim (QP_%d)_%u = %zu of %zu monomials\n", q, n, ds.dim(), ds.total());
    for (const auto& block : hitkernel::weight_decomposition(ds)) {
        std::printf("  %-16s %6zu   e.g. %s\n", hitkernel::to_string(block.omega).c_str(), block.admissible.size(),
                    hitkernel::to_string(ds.admissible_monomial(block.admissible.front()), "x").c_str());
    }
}
