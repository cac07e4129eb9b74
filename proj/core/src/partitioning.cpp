#include "mom/partitioning.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mom/rng.hpp"

namespace mom {

namespace {

void check_block_count(long n, long k) {
    if (k < 1 || k > n) {
        throw InvalidBlockCount("block count " + std::to_string(k) +
                                " not in [1, " + std::to_string(n) + "]");
    }
}

BlockPartition cut(std::vector<long> order, long n, long k) {
    BlockPartition part;
    part.n = n;
    part.k = k;
    part.block_size = n / k;
    part.blocks.resize(static_cast<std::size_t>(k));
    const long b = part.block_size;
    for (long j = 0; j < k; ++j) {
        auto& block = part.blocks[static_cast<std::size_t>(j)];
        block.assign(order.begin() + j * b, order.begin() + (j + 1) * b);
        // Blocks are index sets; keeping them sorted makes every block
        // statistic independent of the enumeration order.
        std::sort(block.begin(), block.end());
    }
    part.dropped.assign(order.begin() + k * b, order.end());
    std::sort(part.dropped.begin(), part.dropped.end());
    return part;
}

}  // namespace

BlockPartition partition_contiguous(long n, long k) {
    check_block_count(n, k);
    std::vector<long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    return cut(std::move(order), n, k);
}

BlockPartition partition_random(long n, long k, std::uint64_t seed) {
    check_block_count(n, k);
    std::vector<long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    Rng rng(seed);
    shuffle_values(order, rng);
    BlockPartition part = cut(std::move(order), n, k);
    part.seed = seed;
    return part;
}

DiagonalPairing diagonal_pairing(long n, long m, long k) {
    if (k < 1 || k > n || k > m) {
        throw InvalidBlockCount("block count " + std::to_string(k) + " not in [1, min(" +
                                std::to_string(n) + ", " + std::to_string(m) + ")]");
    }
    DiagonalPairing pairing;
    pairing.k = k;
    pairing.x = partition_contiguous(n, k);
    pairing.y = partition_contiguous(m, k);
    return pairing;
}

DiagonalPairing diagonal_pairing(long n, long m, long k, std::uint64_t seed) {
    if (k < 1 || k > n || k > m) {
        throw InvalidBlockCount("block count " + std::to_string(k) + " not in [1, min(" +
                                std::to_string(n) + ", " + std::to_string(m) + ")]");
    }
    DiagonalPairing pairing;
    pairing.k = k;
    pairing.x = partition_random(n, k, derive_seed(seed, 0x78));
    pairing.y = partition_random(m, k, derive_seed(seed, 0x79));
    return pairing;
}

}  // namespace mom
