#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>

#include "tfhe_proc/bootstrap.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/isa.hpp"
#include "tfhe_proc/keyswitch.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/params.hpp"

namespace tfhe_proc {

using BootstrapKeyHandle = std::shared_ptr<const BootstrapKey>;
using KeySwitchKeyHandle = std::shared_ptr<const KeySwitchKey>;

using StoredObject = std::variant<LweCiphertext, GlweCiphertext, BootstrapKeyHandle, KeySwitchKeyHandle, FieldElement>;

inline const char* object_kind(const StoredObject& obj) {
  switch (obj.index()) {
    case 0: return "lwe";
    case 1: return "lut";
    case 2: return "bsk";
    case 3: return "ksk";
    default: return "scalar";
  }
}

/// Addressable memory of the processor. The bootstrapping key is resident and
/// used implicitly by PBS; key-switching keys are addressed through KS's aux field.
class ObjectStore {
 public:
  ObjectStore() = default;
  ObjectStore(TfheParams params, BootstrapKeyHandle bsk) : params_(params), bsk_(std::move(bsk)) {}

  const TfheParams& params() const { return params_; }
  const BootstrapKeyHandle& resident_bsk() const { return bsk_; }
  void set_resident_bsk(BootstrapKeyHandle bsk) { bsk_ = std::move(bsk); }

  void put(std::uint64_t addr, StoredObject obj) { objects_.insert_or_assign(addr, std::move(obj)); }
  bool contains(std::uint64_t addr) const { return objects_.contains(addr); }
  std::size_t size() const { return objects_.size(); }
  const std::map<std::uint64_t, StoredObject>& objects() const { return objects_; }

  const StoredObject& at(std::uint64_t addr) const {
    const auto it = objects_.find(addr);
    if (it == objects_.end()) throw UnmappedAddress(hex(addr));
    return it->second;
  }

  template <class T>
  const T& get(std::uint64_t addr, const char* expected) const {
    const StoredObject& obj = at(addr);
    const T* v = std::get_if<T>(&obj);
    if (!v) {
      throw ObjectTypeMismatch(hex(addr) + " holds " + object_kind(obj) + ", expected " + expected);
    }
    return *v;
  }

  const LweCiphertext& lwe(std::uint64_t addr) const { return get<LweCiphertext>(addr, "lwe"); }
  const GlweCiphertext& lut(std::uint64_t addr) const { return get<GlweCiphertext>(addr, "lut"); }
  const KeySwitchKey& ksk(std::uint64_t addr) const { return *get<KeySwitchKeyHandle>(addr, "ksk"); }

  static std::string hex(std::uint64_t addr) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (int i = 60; i >= 0; i -= 4) s += digits[(addr >> i) & 0xF];
    return s;
  }

 private:
  TfheParams params_;
  BootstrapKeyHandle bsk_;
  std::map<std::uint64_t, StoredObject> objects_;
};

inline void execute_one(const Instruction& ins, ObjectStore& store) {
  switch (ins.opcode) {
    case Opcode::Pbs: {
      const LweCiphertext& ct = store.lwe(ins.src);
      const GlweCiphertext& lut = store.lut(ins.aux);
      if (!store.resident_bsk()) throw UnmappedAddress("no resident bootstrapping key");
      if (ins.extract_idx >= lut.polynomial_size()) throw InvalidArgument("extract index must be below N");
      store.put(ins.dst, pbs(ct, lut, *store.resident_bsk(), store.params(), ins.extract_idx));
      break;
    }
    case Opcode::Ks:
      store.put(ins.dst, key_switch(store.lwe(ins.src), store.ksk(ins.aux)));
      break;
    case Opcode::MulAdd:
      // Accumulation bypassed: dst = imm * src + aux.
      store.put(ins.dst, lwe_muladd(store.lwe(ins.src), FieldElement::from_u64(ins.imm), store.lwe(ins.aux)));
      break;
    default:
      throw InvalidArgument("reserved opcode");
  }
}

/// Sequential, deterministic execution; results never depend on cost-model settings.
inline void execute(std::span<const Instruction> program, ObjectStore& store) {
  for (const auto& ins : program) execute_one(ins, store);
}

/// Runs on a copy and returns the resulting store.
inline ObjectStore execute(std::span<const Instruction> program, const ObjectStore& store) {
  ObjectStore out = store;
  execute(program, out);
  return out;
}

}  // namespace tfhe_proc
