#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "ccchain/error.hpp"
#include "ccchain/hash.hpp"

#define EXPECT_CODE(stmt, expected)                                                  \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "no error, expected " << ccchain::error_code_name(expected);  \
    } catch (const ccchain::Error& e_) {                                             \
      EXPECT_EQ(ccchain::error_code_name(e_.code()), ccchain::error_code_name(expected)) \
          << e_.what();                                                              \
    }                                                                                \
  } while (0)

namespace ccchain::testing {

inline Hash32 random_hash(std::mt19937_64& rng) {
  Hash32 h;
  for (auto& b : h.bytes) b = static_cast<Byte>(rng());
  return h;
}

inline std::vector<Hash32> random_leaves(std::mt19937_64& rng, std::size_t n) {
  std::vector<Hash32> out(n);
  for (auto& h : out) h = random_hash(rng);
  return out;
}

}  // namespace ccchain::testing
