#pragma once

// Instruction word: fields packed LSB-first into little-endian bytes,
//
//   opcode (2) | src (64) | aux (64) | dst (64) | extract_idx (ceil(log2 N))
//
// zero-padded to a whole byte. MULADD is followed by one 64-bit little-endian
// immediate word.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfhe_proc/error.hpp"

namespace tfhe_proc {

enum class Opcode : std::uint8_t { Pbs = 0b00, Ks = 0b01, MulAdd = 0b10 };

inline const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Pbs: return "PBS";
    case Opcode::Ks: return "KS";
    case Opcode::MulAdd: return "MULADD";
  }
  return "?";
}

struct Instruction {
  Opcode opcode = Opcode::Pbs;
  std::uint64_t src = 0;
  std::uint64_t aux = 0;  ///< LUT address (PBS), KSK id (KS), second operand (MULADD)
  std::uint64_t dst = 0;
  std::uint64_t extract_idx = 0;  ///< PBS only
  std::uint64_t imm = 0;          ///< MULADD only

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

inline unsigned extract_idx_bits(std::size_t n) {
  return n <= 1 ? 0 : static_cast<unsigned>(std::bit_width(n - 1));
}

inline std::size_t instruction_base_bits(std::size_t n) { return 2 + 3 * 64 + extract_idx_bits(n); }
inline std::size_t instruction_base_bytes(std::size_t n) { return (instruction_base_bits(n) + 7) / 8; }
inline std::size_t instruction_bytes(const Instruction& ins, std::size_t n) {
  return instruction_base_bytes(n) + (ins.opcode == Opcode::MulAdd ? 8 : 0);
}

namespace detail {

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out), base_(out.size()) {}

  void put(std::uint64_t v, unsigned bits) {
    for (unsigned i = 0; i < bits; ++i, ++pos_) {
      if (pos_ % 8 == 0) out_.push_back(0);
      if ((v >> i) & 1) out_[base_ + pos_ / 8] |= static_cast<std::uint8_t>(1u << (pos_ % 8));
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t get(unsigned bits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i, ++pos_) {
      if ((in_[pos_ / 8] >> (pos_ % 8)) & 1) v |= std::uint64_t{1} << i;
    }
    return v;
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline void check_fields(const Instruction& ins, std::size_t n) {
  if (ins.opcode != Opcode::Pbs && ins.opcode != Opcode::Ks && ins.opcode != Opcode::MulAdd) {
    throw InvalidArgument("reserved opcode");
  }
  if (ins.extract_idx >= n) throw InvalidArgument("extract index must be below N");
  if (ins.opcode != Opcode::Pbs && ins.extract_idx != 0) {
    throw InvalidArgument("extract index is only valid for PBS");
  }
  if (ins.opcode != Opcode::MulAdd && ins.imm != 0) {
    throw InvalidArgument("immediate is only valid for MULADD");
  }
}

}  // namespace detail

inline void encode_instruction_into(const Instruction& ins, std::size_t n, std::vector<std::uint8_t>& out) {
  detail::check_fields(ins, n);
  const std::size_t start = out.size();
  detail::BitWriter w(out);
  w.put(static_cast<std::uint64_t>(ins.opcode), 2);
  w.put(ins.src, 64);
  w.put(ins.aux, 64);
  w.put(ins.dst, 64);
  w.put(ins.extract_idx, extract_idx_bits(n));
  out.resize(start + instruction_base_bytes(n), 0);
  if (ins.opcode == Opcode::MulAdd) {
    for (unsigned i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(ins.imm >> (8 * i)));
  }
}

inline std::vector<std::uint8_t> encode_instruction(const Instruction& ins, std::size_t n) {
  std::vector<std::uint8_t> out;
  encode_instruction_into(ins, n, out);
  return out;
}

/// Decodes one instruction from the front of `bytes`; returns the bytes consumed.
inline std::size_t decode_instruction_prefix(std::span<const std::uint8_t> bytes, std::size_t n, Instruction& ins) {
  const std::size_t base = instruction_base_bytes(n);
  if (bytes.size() < base) throw InvalidArgument("truncated instruction");
  detail::BitReader r(bytes.first(base));
  const auto op = static_cast<std::uint8_t>(r.get(2));
  if (op == 0b11) throw InvalidArgument("reserved opcode");
  ins = Instruction{};
  ins.opcode = static_cast<Opcode>(op);
  ins.src = r.get(64);
  ins.aux = r.get(64);
  ins.dst = r.get(64);
  ins.extract_idx = r.get(extract_idx_bits(n));
  if (r.get(static_cast<unsigned>(base * 8 - r.position())) != 0) {
    throw InvalidArgument("nonzero padding bits");
  }
  std::size_t used = base;
  if (ins.opcode == Opcode::MulAdd) {
    if (bytes.size() < base + 8) throw InvalidArgument("truncated MULADD immediate");
    for (unsigned i = 0; i < 8; ++i) ins.imm |= std::uint64_t{bytes[base + i]} << (8 * i);
    used += 8;
  }
  detail::check_fields(ins, n);
  return used;
}

/// Exact inverse of encode_instruction; the length must match the layout.
inline Instruction decode_instruction(std::span<const std::uint8_t> bytes, std::size_t n) {
  Instruction ins;
  const std::size_t used = decode_instruction_prefix(bytes, n, ins);
  if (used != bytes.size()) {
    throw InvalidArgument("instruction length " + std::to_string(bytes.size()) + " does not match layout (" +
                          std::to_string(used) + " bytes)");
  }
  return ins;
}

inline std::vector<std::uint8_t> encode_program(std::span<const Instruction> program, std::size_t n) {
  std::vector<std::uint8_t> out;
  for (const auto& ins : program) encode_instruction_into(ins, n, out);
  return out;
}

inline std::vector<Instruction> decode_program(std::span<const std::uint8_t> bytes, std::size_t n) {
  std::vector<Instruction> program;
  while (!bytes.empty()) {
    Instruction ins;
    bytes = bytes.subspan(decode_instruction_prefix(bytes, n, ins));
    program.push_back(ins);
  }
  return program;
}

}  // namespace tfhe_proc
