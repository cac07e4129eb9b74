#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "mom/partitioning.hpp"
#include "mom/rng.hpp"

using namespace mom;

namespace {

void check_disjoint_union(const BlockPartition& part) {
    std::set<long> seen;
    for (const auto& block : part.blocks) {
        CHECK(static_cast<long>(block.size()) == part.block_size);
        for (long i : block) {
            CHECK(i >= 0);
            CHECK(i < part.n);
            CHECK(seen.insert(i).second);  // disjointness
        }
    }
    for (long i : part.dropped) CHECK(seen.insert(i).second);
    CHECK(static_cast<long>(seen.size()) == part.n);
    CHECK(static_cast<long>(part.dropped.size()) == part.n % part.k);
}

}  // namespace

TEST_CASE("contiguous partition layout") {
    const BlockPartition p = partition_contiguous(6, 3);
    REQUIRE(p.blocks.size() == 3);
    CHECK(p.blocks[0] == std::vector<long>{0, 1});
    CHECK(p.blocks[1] == std::vector<long>{2, 3});
    CHECK(p.blocks[2] == std::vector<long>{4, 5});
    CHECK(p.dropped.empty());

    const BlockPartition q = partition_contiguous(7, 3);
    CHECK(q.block_size == 2);
    CHECK(q.dropped == std::vector<long>{6});

    CHECK_THROWS_AS(partition_contiguous(5, 6), InvalidBlockCount);
    CHECK_THROWS_AS(partition_contiguous(5, 0), InvalidBlockCount);
}

TEST_CASE("random partition determinism and shape") {
    const BlockPartition a = partition_random(6, 3, 12345);
    const BlockPartition b = partition_random(6, 3, 12345);
    CHECK(a.blocks == b.blocks);
    CHECK(a.dropped == b.dropped);
    CHECK(a.seed == b.seed);

    const BlockPartition single = partition_random(9, 1, 7);
    REQUIRE(single.blocks.size() == 1);
    check_disjoint_union(single);

    const BlockPartition big = partition_random(10000, 100, 99);
    CHECK(big.block_size == 100);
    CHECK(big.dropped.empty());
    check_disjoint_union(big);

    CHECK_THROWS_AS(partition_random(5, 6, 1), InvalidBlockCount);
}

TEST_CASE("random partitions over random shapes keep the disjoint-union property") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const long n = 1 + static_cast<long>(rng.uniform_int(60));
        const long k = 1 + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        const BlockPartition p = partition_random(n, k, rng.next_u64());
        check_disjoint_union(p);
    }
}

TEST_CASE("K = n gives singleton blocks with no drops") {
    const BlockPartition p = partition_random(37, 37, 5);
    CHECK(p.block_size == 1);
    CHECK(p.dropped.empty());
    check_disjoint_union(p);
}

TEST_CASE("diagonal pairing") {
    const DiagonalPairing d = diagonal_pairing(4, 4, 2);
    CHECK(d.x.blocks[0] == std::vector<long>{0, 1});
    CHECK(d.y.blocks[0] == std::vector<long>{0, 1});
    CHECK(d.x.blocks[1] == std::vector<long>{2, 3});

    const DiagonalPairing uneven = diagonal_pairing(4, 6, 2);
    CHECK(uneven.x.block_size == 2);
    CHECK(uneven.y.block_size == 3);

    CHECK_THROWS_AS(diagonal_pairing(4, 2, 3), InvalidBlockCount);

    const DiagonalPairing r1 = diagonal_pairing(20, 30, 5, 42);
    const DiagonalPairing r2 = diagonal_pairing(20, 30, 5, 42);
    CHECK(r1.x.blocks == r2.x.blocks);
    CHECK(r1.y.blocks == r2.y.blocks);
    check_disjoint_union(r1.x);
    check_disjoint_union(r1.y);
}
