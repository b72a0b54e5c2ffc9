#pragma once

// Canonical byte encoding. This is a cross-implementation contract:
//
//   record   := tag(1 byte) field*
//   bytes    := u32be(length) raw
//   list     := u32be(count) element*
//   integer  := u64be
//
// Tags: 0x01 product record, 0x02 action, 0x03 retract-export record.
// Product:  name(bytes) details(list of key(bytes) value(bytes)) nonce(bytes)
// Action:   type(bytes, one byte 1..6) timestamp(integer) inputs(list of bytes)
//           outputs(list of bytes) author(bytes) transferMeta(list of 0 or 1
//           x blindedCounterparty(bytes) sessionNonce(bytes))
// Retract:  timestamp(integer) products(list of bytes) author(bytes)
//           exportActionId(bytes) complaintSeq(integer)

#include <cstdint>
#include <vector>

#include "ccchain/model.hpp"

namespace ccchain {

using Bytes = std::vector<Byte>;

inline constexpr Byte kProductTag = 0x01;
inline constexpr Byte kActionTag = 0x02;
inline constexpr Byte kRetractTag = 0x03;

// Throws Error(Encoding) on unsorted or duplicate detail keys.
Bytes canonical_encode(const ProductRecord& record);
Bytes canonical_encode(const Action& action);
Bytes canonical_encode(const RetractExport& retract);
Bytes canonical_encode(const Record& record);

// SHA-256 of the canonical encoding. Ignores whatever id the record holds.
Hash32 compute_id(const ProductRecord& record);
Hash32 compute_id(const Action& action);
Hash32 compute_id(const RetractExport& retract);
Hash32 compute_id(const Record& record);

}  // namespace ccchain
