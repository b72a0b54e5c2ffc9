#include "ccchain/encoding.hpp"

#include <limits>
#include <string>

#include "ccchain/error.hpp"

namespace ccchain {

namespace {

class Writer {
 public:
  explicit Writer(Byte tag, std::size_t reserve = 128) {
    out_.reserve(reserve);
    out_.push_back(tag);
  }

  void u32(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::Encoding, "field too long for canonical encoding");
    }
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<Byte>(n >> shift));
  }

  void u64(std::uint64_t n) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<Byte>(n >> shift));
  }

  void bytes(const Byte* data, std::size_t n) {
    u32(n);
    out_.insert(out_.end(), data, data + n);
  }
  void bytes(std::string_view s) { bytes(reinterpret_cast<const Byte*>(s.data()), s.size()); }
  template <std::size_t N>
  void bytes(const FixedBytes<N>& v) {
    bytes(v.data(), N);
  }

  void hash_list(const std::vector<Hash32>& list) {
    u32(list.size());
    for (const auto& h : list) bytes(h);
  }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

}  // namespace

Bytes canonical_encode(const ProductRecord& record) {
  std::size_t estimate = 32 + record.name.size();
  for (const auto& d : record.details) estimate += 8 + d.key.size() + d.value.size();
  Writer w(kProductTag, estimate);
  w.bytes(record.name);
  w.u32(record.details.size());
  for (std::size_t i = 0; i < record.details.size(); ++i) {
    if (i > 0 && !(record.details[i - 1].key < record.details[i].key)) {
      throw Error(ErrorCode::Encoding,
                  record.details[i - 1].key == record.details[i].key
                      ? "duplicate detail key '" + record.details[i].key + "'"
                      : "detail keys not sorted at '" + record.details[i].key + "'");
    }
    w.bytes(record.details[i].key);
    w.bytes(record.details[i].value);
  }
  w.bytes(record.nonce);
  return w.take();
}

Bytes canonical_encode(const Action& action) {
  Writer w(kActionTag, 64 + 36 * (action.inputs.size() + action.outputs.size() + 2));
  const Byte type_code = static_cast<Byte>(action.type);
  w.bytes(&type_code, 1);
  w.u64(action.timestamp);
  w.hash_list(action.inputs);
  w.hash_list(action.outputs);
  w.bytes(action.author.value);
  if (action.transfer_meta) {
    w.u32(1);
    w.bytes(action.transfer_meta->blinded_counterparty);
    w.bytes(action.transfer_meta->session_nonce);
  } else {
    w.u32(0);
  }
  return w.take();
}

Bytes canonical_encode(const RetractExport& retract) {
  Writer w(kRetractTag, 96 + 36 * retract.products.size());
  w.u64(retract.timestamp);
  w.hash_list(retract.products);
  w.bytes(retract.author.value);
  w.bytes(retract.export_action_id);
  w.u64(retract.complaint_seq);
  return w.take();
}

Bytes canonical_encode(const Record& record) {
  return std::visit([](const auto& r) { return canonical_encode(r); }, record);
}

Hash32 compute_id(const ProductRecord& record) { return sha256(canonical_encode(record)); }
Hash32 compute_id(const Action& action) { return sha256(canonical_encode(action)); }
Hash32 compute_id(const RetractExport& retract) { return sha256(canonical_encode(retract)); }
Hash32 compute_id(const Record& record) {
  return std::visit([](const auto& r) { return compute_id(r); }, record);
}

}  // namespace ccchain
