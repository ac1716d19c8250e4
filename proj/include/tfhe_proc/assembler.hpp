#pragma once

// Text programs, one instruction per line:
//
//   PBS    dst, src, lut[, h]
//   KS     dst, src, kskid
//   MULADD dst, src, aux, imm
//
// Operands are decimal or 0x-prefixed hex; imm may be negative and is stored
// as its residue mod q. '#' starts a comment.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/isa.hpp"

namespace tfhe_proc {

/// Assembly error with the offending line number.
class AsmError : public InvalidArgument {
 public:
  AsmError(std::size_t line, const std::string& msg)
      : InvalidArgument("line " + std::to_string(line) + ": " + msg) {}
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

inline Instruction parse_instruction_line(std::string_view text, std::size_t line_no, std::size_t n) {
  text = detail::trim(text);
  const std::size_t sp = text.find_first_of(" \t");
  std::string mnemonic(text.substr(0, sp));
  std::transform(mnemonic.begin(), mnemonic.end(), mnemonic.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::vector<std::string_view> ops;
  if (sp != std::string_view::npos) {
    std::string_view rest = text.substr(sp);
    for (;;) {
      const std::size_t comma = rest.find(',');
      ops.push_back(detail::trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  auto operand = [&](std::size_t i) {
    std::uint64_t v = 0;
    if (ops[i].empty() || !detail::parse_u64(ops[i], v)) {
      throw AsmError(line_no, "bad operand '" + std::string(ops[i]) + "'");
    }
    return v;
  };
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (ops.size() < lo || ops.size() > hi) {
      throw AsmError(line_no, mnemonic + " takes " + std::to_string(lo) +
                                  (lo == hi ? "" : "-" + std::to_string(hi)) + " operands");
    }
  };

  Instruction ins;
  if (mnemonic == "PBS") {
    arity(3, 4);
    ins.opcode = Opcode::Pbs;
    ins.dst = operand(0);
    ins.src = operand(1);
    ins.aux = operand(2);
    if (ops.size() == 4) ins.extract_idx = operand(3);
    if (ins.extract_idx >= n) throw AsmError(line_no, "extract index must be below N");
  } else if (mnemonic == "KS") {
    arity(3, 3);
    ins.opcode = Opcode::Ks;
    ins.dst = operand(0);
    ins.src = operand(1);
    ins.aux = operand(2);
  } else if (mnemonic == "MULADD") {
    arity(4, 4);
    ins.opcode = Opcode::MulAdd;
    ins.dst = operand(0);
    ins.src = operand(1);
    ins.aux = operand(2);
    std::string_view imm = ops[3];
    const bool negative = !imm.empty() && imm.front() == '-';
    if (negative) imm.remove_prefix(1);
    std::uint64_t mag = 0;
    if (!detail::parse_u64(imm, mag)) throw AsmError(line_no, "bad immediate '" + std::string(ops[3]) + "'");
    if (negative && mag >= kModulus) throw AsmError(line_no, "negative immediate must have magnitude below q");
    ins.imm = negative ? fe_neg(FieldElement(mag)).value() : mag;
  } else {
    throw AsmError(line_no, "unknown mnemonic '" + mnemonic + "'");
  }
  return ins;
}

inline std::vector<Instruction> parse_program(const std::string& source, std::size_t n) {
  std::vector<Instruction> program;
  std::istringstream in(source);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text(line);
    if (const std::size_t hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    if (detail::trim(text).empty()) continue;
    program.push_back(parse_instruction_line(text, line_no, n));
  }
  return program;
}

/// Inverse of parse_program, one canonical line per instruction.
inline std::string format_program(const std::vector<Instruction>& program) {
  std::ostringstream os;
  for (const auto& ins : program) {
    os << opcode_name(ins.opcode) << ' ' << ins.dst << ", " << ins.src << ", " << ins.aux;
    if (ins.opcode == Opcode::Pbs && ins.extract_idx != 0) os << ", " << ins.extract_idx;
    if (ins.opcode == Opcode::MulAdd) {
      if (ins.imm < kModulus) os << ", " << FieldElement(ins.imm).centered();
      else os << ", " << ins.imm;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tfhe_proc
