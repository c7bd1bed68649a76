#pragma once

#include <cstddef>
#include <vector>

namespace roam::kernels {

/// Cost tables of a cyclic chain of N nodes with D labels each.
/// unary(n, i); pairwise(n, i, j) couples node n at label i with node n+1 (mod N) at label j.
struct ChainTables {
    int nodes = 0;
    int labels = 0;
    std::vector<double> unary_;
    std::vector<double> pairwise_;

    ChainTables() = default;
    ChainTables(int N, int D)
        : nodes(N), labels(D), unary_(static_cast<std::size_t>(N) * D, 0.0),
          pairwise_(static_cast<std::size_t>(N) * D * D, 0.0)
    {
    }
    double& unary(int n, int i) { return unary_[static_cast<std::size_t>(n) * labels + i]; }
    double unary(int n, int i) const { return unary_[static_cast<std::size_t>(n) * labels + i]; }
    double& pairwise(int n, int i, int j)
    {
        return pairwise_[(static_cast<std::size_t>(n) * labels + i) * labels + j];
    }
    double pairwise(int n, int i, int j) const
    {
        return pairwise_[(static_cast<std::size_t>(n) * labels + i) * labels + j];
    }
};

/// Cost of one labeling, folded left in chain order:
/// ((U0 + P0) + U1) + P1 + ... + U_{N-1} + P_{N-1}. The DP below uses the same order.
double chain_cost(const ChainTables& t, const std::vector<int>& labels);

struct Branch {
    double cost;              // +inf when every completion is infeasible
    std::vector<int> labels;  // labels[0] is the branch label of node 0
};

/// Exact minimizer for each fixed label of node 0 (one Viterbi pass per branch).
/// Ties go to the smallest label index.
std::vector<Branch> chain_dp_serial(const ChainTables& t);
std::vector<Branch> chain_dp_omp(const ChainTables& t);

}  // namespace roam::kernels
