#include "roam/kernels/chain_dp.hpp"

#include <limits>
#include <stdexcept>

namespace roam::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Branch solve_branch(const ChainTables& t, int first)
{
    const int N = t.nodes, D = t.labels;
    std::vector<double> acc(static_cast<std::size_t>(D)), next(static_cast<std::size_t>(D));
    std::vector<int> back(static_cast<std::size_t>(N) * D, -1);

    // Node 1 from the fixed node 0.
    const double u0 = t.unary(0, first);
    for (int j = 0; j < D; ++j)
        acc[static_cast<std::size_t>(j)] = (u0 + t.pairwise(0, first, j)) + t.unary(1, j);

    for (int n = 1; n + 1 < N; ++n) {
        for (int j = 0; j < D; ++j) {
            double best = kInf;
            int arg = -1;
            for (int i = 0; i < D; ++i) {
                const double v = acc[static_cast<std::size_t>(i)] + t.pairwise(n, i, j);
                if (v < best) {
                    best = v;
                    arg = i;
                }
            }
            next[static_cast<std::size_t>(j)] = arg < 0 ? kInf : best + t.unary(n + 1, j);
            back[static_cast<std::size_t>(n + 1) * D + j] = arg;
        }
        acc.swap(next);
    }

    double best = kInf;
    int arg = -1;
    for (int j = 0; j < D; ++j) {
        const double v = acc[static_cast<std::size_t>(j)] + t.pairwise(N - 1, j, first);
        if (v < best) {
            best = v;
            arg = j;
        }
    }
    Branch b{best, std::vector<int>(static_cast<std::size_t>(N), first)};
    if (arg < 0) {
        b.cost = kInf;
        return b;
    }
    b.labels[static_cast<std::size_t>(N - 1)] = arg;
    for (int n = N - 1; n >= 2; --n) {
        arg = back[static_cast<std::size_t>(n) * D + arg];
        b.labels[static_cast<std::size_t>(n - 1)] = arg;
    }
    return b;
}

void check(const ChainTables& t)
{
    if (t.nodes < 2 || t.labels < 1)
        throw std::invalid_argument("chain_dp: need at least 2 nodes and 1 label");
}

}  // namespace

double chain_cost(const ChainTables& t, const std::vector<int>& labels)
{
    const int N = t.nodes;
    double acc = t.unary(0, labels[0]);
    for (int n = 0; n < N; ++n) {
        const int i = labels[static_cast<std::size_t>(n)];
        const int j = labels[static_cast<std::size_t>((n + 1) % N)];
        acc += t.pairwise(n, i, j);
        if (n + 1 < N)
            acc += t.unary(n + 1, j);
    }
    return acc;
}

std::vector<Branch> chain_dp_serial(const ChainTables& t)
{
    check(t);
    std::vector<Branch> out;
    out.reserve(static_cast<std::size_t>(t.labels));
    for (int d = 0; d < t.labels; ++d)
        out.push_back(solve_branch(t, d));
    return out;
}

std::vector<Branch> chain_dp_omp(const ChainTables& t)
{
    check(t);
    std::vector<Branch> out(static_cast<std::size_t>(t.labels));
#pragma omp parallel for schedule(dynamic)
    for (int d = 0; d < t.labels; ++d)
        out[static_cast<std::size_t>(d)] = solve_branch(t, d);
    return out;
}

}  // namespace roam::kernels
