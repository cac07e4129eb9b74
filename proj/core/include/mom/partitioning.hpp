#ifndef MOM_PARTITIONING_HPP
#define MOM_PARTITIONING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mom/errors.hpp"

namespace mom {

/// K disjoint blocks of exactly B = floor(n/K) indices each; the n mod K
/// trailing indices are dropped so that every block has equal size, which is
/// what the deviation analysis assumes.
struct BlockPartition {
    long n = 0;
    long k = 0;
    long block_size = 0;
    std::vector<std::vector<long>> blocks;
    std::vector<long> dropped;
    std::optional<std::uint64_t> seed;
};

/// Block j holds indices [j*B, (j+1)*B).
BlockPartition partition_contiguous(long n, long k);

/// Contiguous cut of a uniformly random permutation of {0, ..., n-1},
/// fully determined by the seed.
BlockPartition partition_random(long n, long k, std::uint64_t seed);

/// K same-ranked pairs of blocks from independent partitions of two samples;
/// pair j uses X-block j with Y-block j only.
struct DiagonalPairing {
    long k = 0;
    BlockPartition x;
    BlockPartition y;
};

DiagonalPairing diagonal_pairing(long n, long m, long k);
DiagonalPairing diagonal_pairing(long n, long m, long k, std::uint64_t seed);

}  // namespace mom

#endif
