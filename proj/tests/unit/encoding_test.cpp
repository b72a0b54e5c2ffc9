#include <gtest/gtest.h>

#include "ccchain/codec.hpp"
#include "ccchain/encoding.hpp"
#include "ccchain/model.hpp"
#include "support.hpp"

using namespace ccchain;

namespace {

// Reference values come from tests/oracles/gen_vectors.py (hashlib only).
constexpr const char* kEmptyProductBytes =
    "0100000000000000000000001000000000000000000000000000000000";
constexpr const char* kEmptyProductId =
    "818006dac30488445d2191f1a8759daf0cee421b1a40b32959fb651b6838a8ae";
constexpr const char* kTimberBytes =
    "010000000674696d6265720000000100000003717479000000033130300000001000000000000000000000000000"
    "000000";
constexpr const char* kTimberId =
    "23e0b15962e4b3714358d6997589447622cc845a32746b76fd871bd6af2d25a0";
constexpr const char* kSeedA = "e00961cc04e55c4533144d93fda113d960b6ad37e54a86a41bbba4f031e29d92";
constexpr const char* kCreateId =
    "5defefe9a1d095225246efa4208d1b80e2544fd06a4a30a0e7ee6546b93fc047";
constexpr const char* kExportId =
    "5dbbcd1bcd7bcc7a75b647819a0353015344039c1bbe4a7d3f116179a261f34f";

ProductRecord timber() { return ProductRecord::make("timber", {{"qty", "100"}}, Nonce16{}); }

template <std::size_t N>
FixedBytes<N> counting() {
  FixedBytes<N> out;
  for (std::size_t i = 0; i < N; ++i) out.bytes[i] = static_cast<Byte>(i);
  return out;
}

}  // namespace

TEST(Encoding, EmptyProductMatchesReference) {
  auto p = ProductRecord::make("", {}, Nonce16{});
  EXPECT_EQ(to_hex(canonical_encode(p)), kEmptyProductBytes);
  EXPECT_EQ(to_hex(p.id), kEmptyProductId);
}

TEST(Encoding, TimberMatchesReference) {
  auto p = timber();
  const auto bytes = canonical_encode(p);
  EXPECT_EQ(bytes.size(), 49u);
  EXPECT_EQ(to_hex(bytes), kTimberBytes);
  EXPECT_EQ(to_hex(p.id), kTimberId);
}

TEST(Encoding, CompanyIdFromSeed) {
  EXPECT_EQ(CompanyId::from_seed("seed-a").hex(), kSeedA);
}

TEST(Encoding, CreateAndExportActionIds) {
  const auto author = CompanyId::from_seed("seed-a");
  auto create = Action::make(ActionType::Create, 7, {}, {timber().id}, author);
  EXPECT_EQ(to_hex(create.id), kCreateId);

  TransferMeta meta{counting<32>(), counting<16>()};
  auto exp = Action::make(ActionType::Export, 9, {timber().id}, {}, author, meta);
  EXPECT_EQ(to_hex(exp.id), kExportId);
}

TEST(Encoding, DetailsAreSortedBeforeHashing) {
  auto a = ProductRecord::make("x", {{"b", "2"}, {"a", "1"}}, Nonce16{});
  auto b = ProductRecord::make("x", {{"a", "1"}, {"b", "2"}}, Nonce16{});
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.details.front().key, "a");
}

TEST(Encoding, DuplicateDetailKeyRejected) {
  EXPECT_CODE(ProductRecord::make("x", {{"k", "1"}, {"k", "2"}}, Nonce16{}), ErrorCode::Encoding);
}

TEST(Encoding, UnsortedDetailsRejectedAtEncode) {
  auto p = ProductRecord::make("x", {{"a", "1"}, {"b", "2"}}, Nonce16{});
  std::swap(p.details[0], p.details[1]);
  EXPECT_CODE(canonical_encode(p), ErrorCode::Encoding);
}

TEST(Encoding, NonceChangesId) {
  Nonce16 n;
  n.bytes[15] = 1;
  EXPECT_NE(ProductRecord::make("timber", {{"qty", "100"}}, n).id, timber().id);
}

TEST(Encoding, RetractHasItsOwnTag) {
  const auto author = CompanyId::from_seed("seed-a");
  auto r = RetractExport::make(3, {timber().id}, author, hash_from_hex(kExportId), 4);
  const auto bytes = canonical_encode(r);
  ASSERT_FALSE(bytes.empty());
  EXPECT_EQ(bytes.front(), kRetractTag);
  EXPECT_EQ(compute_id(Record{r}), r.id);
}

TEST(Hex, RoundTripAndErrors) {
  const auto h = hash_from_hex(kTimberId);
  EXPECT_EQ(to_hex(h), kTimberId);
  EXPECT_EQ(hash_from_hex("23E0B15962E4B3714358D6997589447622CC845A32746B76FD871BD6AF2D25A0"), h);
  EXPECT_CODE(hash_from_hex("abc"), ErrorCode::Parse);
  EXPECT_CODE(hash_from_hex(std::string(64, 'g')), ErrorCode::Parse);
}

TEST(ActionShape, ArityRules) {
  EXPECT_TRUE(arity_allowed(ActionType::Create, 0, 1));
  EXPECT_FALSE(arity_allowed(ActionType::Create, 1, 1));
  EXPECT_FALSE(arity_allowed(ActionType::Produce, 0, 1));
  EXPECT_FALSE(arity_allowed(ActionType::Produce, 1, 0));
  EXPECT_TRUE(arity_allowed(ActionType::Sell, 2, 0));
  EXPECT_FALSE(arity_allowed(ActionType::Sell, 1, 1));
  EXPECT_FALSE(arity_allowed(ActionType::Export, 1, 1));
  EXPECT_TRUE(arity_allowed(ActionType::Import, 0, 3));
  EXPECT_FALSE(arity_allowed(ActionType::Buy, 0, 0));
}

TEST(ActionShape, ReportsEachViolation) {
  const auto author = CompanyId::from_seed("seed-a");
  auto bad = Action::make(ActionType::Create, 1, {timber().id}, {timber().id}, author,
                          TransferMeta{});
  auto v = validate_action_shape(bad);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].message, "Create must have empty inputs");
  EXPECT_EQ(v[1].kind, ViolationKind::TransferMeta);

  auto exp = Action::make(ActionType::Export, 1, {timber().id}, {}, author);
  v = validate_action_shape(exp);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "Export requires transferMeta");

  auto ok = Action::make(ActionType::Sell, 1, {timber().id}, {}, author);
  EXPECT_TRUE(validate_action_shape(ok).empty());
  ok.timestamp = 2;
  v = validate_action_shape(ok);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::IdMismatch);
}

TEST(Codec, ActionRoundTripKeepsWireNames) {
  const auto author = CompanyId::from_seed("seed-a");
  TransferMeta meta{counting<32>(), counting<16>()};
  auto exp = Action::make(ActionType::Export, 9, {timber().id}, {}, author, meta);
  json j = exp;
  for (const char* key : {"id", "type", "timestamp", "inputs", "outputs", "author", "transferMeta"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("type"), "export");
  EXPECT_EQ(j.at("id"), kExportId);
  EXPECT_EQ(j.get<Action>(), exp);

  auto create = Action::make(ActionType::Create, 7, {}, {timber().id}, author);
  json c = create;
  EXPECT_TRUE(c.at("transferMeta").is_null());
  EXPECT_EQ(record_from_json(record_to_json(create)), Record{create});
}

TEST(Codec, DecodedRecordKeepsClaimedId) {
  const auto author = CompanyId::from_seed("seed-a");
  auto create = Action::make(ActionType::Create, 7, {}, {timber().id}, author);
  json j = create;
  j["timestamp"] = 8;
  auto decoded = j.get<Action>();
  EXPECT_EQ(decoded.id, create.id);
  EXPECT_NE(compute_id(decoded), decoded.id);
}

TEST(Codec, ProductAndRetractRoundTrip) {
  auto p = timber();
  EXPECT_EQ(json(p).get<ProductRecord>(), p);
  const auto author = CompanyId::from_seed("seed-a");
  auto r = RetractExport::make(3, {p.id}, author, hash_from_hex(kExportId), 4);
  auto j = record_to_json(r);
  EXPECT_EQ(j.at("type"), "retractExport");
  EXPECT_EQ(record_from_json(j), Record{r});
}

TEST(Codec, MalformedInputIsParseError) {
  EXPECT_CODE(parse_json("{not json"), ErrorCode::Parse);
  EXPECT_CODE(record_from_json(json{{"type", "teleport"}}), ErrorCode::Parse);
}
