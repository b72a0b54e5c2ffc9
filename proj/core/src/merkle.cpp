#include "ccchain/merkle.hpp"

#include <string>

#include "ccchain/error.hpp"

namespace ccchain {

MerkleTree MerkleTree::build(std::span<const Hash32> leaves) {
  if (leaves.empty()) throw Error(ErrorCode::EmptyEpoch, "empty epoch");
  MerkleTree tree;
  tree.levels_.emplace_back(leaves.begin(), leaves.end());
  while (tree.levels_.back().size() > 1) {
    const auto& below = tree.levels_.back();
    std::vector<Hash32> above;
    above.reserve((below.size() + 1) / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) {
      const Hash32& right = i + 1 < below.size() ? below[i + 1] : below[i];
      above.push_back(hash_pair(below[i], right));
    }
    tree.levels_.push_back(std::move(above));
  }
  return tree;
}

MerkleProof MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "leaf index " + std::to_string(index) +
                                                " out of range for " +
                                                std::to_string(leaf_count()) + " leaves");
  }
  MerkleProof proof{levels_.front()[index], {}, root()};
  proof.path.reserve(levels_.size() - 1);
  std::size_t pos = index;
  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    const auto& nodes = levels_[level];
    if (pos % 2 == 0) {
      const Hash32& sibling = pos + 1 < nodes.size() ? nodes[pos + 1] : nodes[pos];
      proof.path.push_back({sibling, Side::Right});
    } else {
      proof.path.push_back({nodes[pos - 1], Side::Left});
    }
    pos /= 2;
  }
  return proof;
}

bool verify(const MerkleProof& proof) {
  Hash32 acc = proof.leaf;
  for (const auto& step : proof.path) {
    acc = step.side == Side::Right ? hash_pair(acc, step.sibling) : hash_pair(step.sibling, acc);
  }
  return acc == proof.root;
}

std::size_t proof_length(std::uint64_t leaf_count) {
  std::size_t depth = 0;
  std::uint64_t width = 1;
  while (width < leaf_count) {
    width <<= 1;
    ++depth;
  }
  return depth;
}

bool verify_against(const MerkleProof& proof, const Hash32& root, std::uint64_t leaf_count) {
  if (leaf_count == 0 || proof.root != root) return false;
  if (proof.path.size() != proof_length(leaf_count)) return false;
  return verify(proof);
}

}  // namespace ccchain
