#pragma once

// Per-epoch Merkle trees over record identifiers.
//
// Leaves are the raw 32-byte identifiers, interior nodes are
// SHA-256(left || right), and an odd node at any level is paired with a copy
// of itself. A single-leaf tree has the leaf as its root.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ccchain/hash.hpp"

namespace ccchain {

enum class Side : std::uint8_t { Left, Right };

struct ProofStep {
  Hash32 sibling;
  Side side;  // where the sibling sits relative to the running hash

  bool operator==(const ProofStep&) const = default;
};

struct MerkleProof {
  Hash32 leaf;
  std::vector<ProofStep> path;
  Hash32 root;

  bool operator==(const MerkleProof&) const = default;
};

class MerkleTree {
 public:
  // Throws Error(EmptyEpoch) on an empty leaf list.
  static MerkleTree build(std::span<const Hash32> leaves);

  const Hash32& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return levels_.front().size(); }
  std::span<const Hash32> leaves() const { return levels_.front(); }
  // levels()[0] are the leaves, levels().back() holds the root alone.
  const std::vector<std::vector<Hash32>>& levels() const { return levels_; }

  // Throws Error(IndexOutOfRange).
  MerkleProof prove(std::size_t index) const;

 private:
  std::vector<std::vector<Hash32>> levels_;
};

// Folds leaf through the path and compares against proof.root.
bool verify(const MerkleProof& proof);

// Full check against a published commitment: the proof must target this root,
// carry exactly ceil(log2(leaf_count)) steps, and fold correctly.
bool verify_against(const MerkleProof& proof, const Hash32& root, std::uint64_t leaf_count);

std::size_t proof_length(std::uint64_t leaf_count);

}  // namespace ccchain
