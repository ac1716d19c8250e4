#pragma once

// JSON artifacts. Every 64-bit word is written as 16 lowercase hex digits;
// vectors of words are packed into one string, word after word. Binary keys
// are strings of '0'/'1'. Each document carries `format_version`, a `type`
// tag, and the parameter block it was produced under.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tfhe_proc/bootstrap.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/glwe.hpp"
#include "tfhe_proc/keyswitch.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/tfhe.hpp"

namespace tfhe_proc::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Malformed or unreadable artifact.
class ParseError : public Error {
 public:
  using Error::Error;
};

inline std::string word_hex(std::uint64_t w) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, w >>= 4) s[static_cast<std::size_t>(i)] = digits[w & 0xF];
  return s;
}

inline std::uint64_t parse_word(std::string_view s) {
  if (s.size() != 16) throw ParseError("expected 16 hex digits, got '" + std::string(s) + "'");
  std::uint64_t w = 0;
  for (char c : s) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw ParseError("invalid hex digit in '" + std::string(s) + "'");
    w = (w << 4) | static_cast<std::uint64_t>(v);
  }
  return w;
}

inline FieldElement parse_field(std::string_view s) {
  const std::uint64_t w = parse_word(s);
  if (w >= kModulus) throw ParseError("word is not a canonical residue");
  return FieldElement(w);
}

inline std::string pack(const std::vector<FieldElement>& v) {
  std::string s;
  s.reserve(v.size() * 16);
  for (FieldElement x : v) s += word_hex(x.value());
  return s;
}

inline std::vector<FieldElement> unpack(const std::string& s, std::size_t expected) {
  if (s.size() != expected * 16) {
    throw ParseError("packed vector holds " + std::to_string(s.size() / 16) + " words, expected " +
                     std::to_string(expected));
  }
  std::vector<FieldElement> v(expected);
  for (std::size_t i = 0; i < expected; ++i) v[i] = parse_field(std::string_view(s).substr(16 * i, 16));
  return v;
}

inline std::string pack_bits(const std::vector<std::uint8_t>& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
  return s;
}

inline std::vector<std::uint8_t> unpack_bits(const std::string& s, std::size_t expected) {
  if (s.size() != expected) throw ParseError("key has " + std::to_string(s.size()) + " bits, expected " + std::to_string(expected));
  std::vector<std::uint8_t> bits(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw ParseError("key bits must be '0' or '1'");
    bits[i] = s[i] == '1';
  }
  return bits;
}

inline json params_to_json(const TfheParams& p) {
  return json{{"lwe_dimension", p.lwe_dimension},       {"polynomial_size", p.polynomial_size},
              {"glwe_dimension", p.glwe_dimension},     {"levels", p.levels},
              {"log_base", p.log_base},                 {"plaintext_modulus", p.plaintext_modulus},
              {"sigma", p.sigma},                       {"key_sigma", p.key_sigma},
              {"ks_levels", p.ks_levels},               {"ks_log_base", p.ks_log_base}};
}

/// Missing fields keep the values of `base`.
inline TfheParams params_from_json(const json& j, TfheParams base = standard_params()) {
  if (!j.is_object()) throw ParseError("params must be an object");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("lwe_dimension", base.lwe_dimension);
    get("polynomial_size", base.polynomial_size);
    get("glwe_dimension", base.glwe_dimension);
    get("levels", base.levels);
    get("log_base", base.log_base);
    get("plaintext_modulus", base.plaintext_modulus);
    get("sigma", base.sigma);
    get("key_sigma", base.key_sigma);
    get("ks_levels", base.ks_levels);
    get("ks_log_base", base.ks_log_base);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad params block: ") + e.what());
  }
  base.validate();
  return base;
}

inline json header(const char* type, const TfheParams& p) {
  return json{{"format_version", kFormatVersion}, {"type", type}, {"params", params_to_json(p)}};
}

/// Checks version and type; returns the embedded params.
inline TfheParams check_header(const json& j, const char* type) {
  if (!j.is_object() || !j.contains("format_version") || !j.contains("type")) {
    throw ParseError("missing format_version/type");
  }
  if (j.at("format_version") != kFormatVersion) throw ParseError("unsupported format_version");
  if (j.at("type") != type) {
    throw ParseError("expected a " + std::string(type) + ", found " + j.at("type").dump());
  }
  return params_from_json(j.at("params"));
}

template <class T>
T field_of(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline json to_json(const LweCiphertext& ct, const TfheParams& p) {
  json j = header("lwe_ciphertext", p);
  j["dimension"] = ct.dimension();
  j["mask"] = pack(ct.mask);
  j["body"] = word_hex(ct.body.value());
  return j;
}

inline LweCiphertext lwe_from_json(const json& j, TfheParams* params = nullptr) {
  const TfheParams p = check_header(j, "lwe_ciphertext");
  const auto dim = field_of<std::size_t>(j, "dimension");
  if (dim != p.lwe_dimension && dim != p.extracted_dimension()) throw ParseError("ciphertext dimension does not fit params");
  LweCiphertext ct;
  ct.mask = unpack(field_of<std::string>(j, "mask"), dim);
  ct.body = parse_field(field_of<std::string>(j, "body"));
  if (params) *params = p;
  return ct;
}

inline json glwe_components(const GlweCiphertext& c) {
  json comps = json::array();
  for (std::size_t i = 0; i <= c.glwe_dimension(); ++i) comps.push_back(pack(c.component(i).coeffs));
  return comps;
}

inline GlweCiphertext glwe_from_components(const json& comps, std::size_t k, std::size_t n) {
  if (!comps.is_array() || comps.size() != k + 1) throw ParseError("GLWE must have k+1 components");
  GlweCiphertext c(k, n);
  for (std::size_t i = 0; i <= k; ++i) c.component(i).coeffs = unpack(comps[i].get<std::string>(), n);
  return c;
}

inline json to_json(const GlweCiphertext& c, const TfheParams& p) {
  json j = header("glwe_ciphertext", p);
  j["components"] = glwe_components(c);
  return j;
}

inline GlweCiphertext glwe_from_json(const json& j) {
  const TfheParams p = check_header(j, "glwe_ciphertext");
  return glwe_from_components(j.at("components"), p.glwe_dimension, p.polynomial_size);
}

inline json secret_keys_to_json(const LweSecretKey& lwe, const GlweSecretKey& glwe, const TfheParams& p) {
  json j = header("secret_keys", p);
  j["lwe"] = pack_bits(lwe.bits);
  json polys = json::array();
  for (const auto& poly : glwe.polys) polys.push_back(pack_bits(poly));
  j["glwe"] = polys;
  return j;
}

inline void secret_keys_from_json(const json& j, LweSecretKey& lwe, GlweSecretKey& glwe, TfheParams& p) {
  p = check_header(j, "secret_keys");
  lwe.bits = unpack_bits(field_of<std::string>(j, "lwe"), p.lwe_dimension);
  const json& polys = j.at("glwe");
  if (!polys.is_array() || polys.size() != p.glwe_dimension) throw ParseError("GLWE key must have k polynomials");
  glwe.polynomial_size = p.polynomial_size;
  glwe.polys.clear();
  for (const auto& s : polys) glwe.polys.push_back(unpack_bits(s.get<std::string>(), p.polynomial_size));
}

/// Element i: (k+1)*l*(k+1) packed polynomials ordered row, level, component.
inline json to_json(const BootstrapKey& bsk, const TfheParams& p) {
  json j = header("bootstrap_key", p);
  j["domain"] = "ntt_scaled";
  json elems = json::array();
  for (const auto& g : bsk.elements) {
    json e = json::array();
    for (const auto& row : g.rows) {
      for (const auto& level : row) {
        for (const auto& comp : level.components) e.push_back(pack(comp.values));
      }
    }
    elems.push_back(std::move(e));
  }
  j["elements"] = std::move(elems);
  return j;
}

inline BootstrapKey bsk_from_json(const json& j) {
  const TfheParams p = check_header(j, "bootstrap_key");
  const std::size_t k1 = p.glwe_dimension + 1;
  const json& elems = j.at("elements");
  if (!elems.is_array() || elems.size() != p.lwe_dimension) throw ParseError("bootstrapping key must have n elements");
  BootstrapKey bsk;
  bsk.elements.reserve(elems.size());
  for (const auto& e : elems) {
    if (!e.is_array() || e.size() != k1 * p.levels * k1) throw ParseError("malformed GGSW element");
    GgswNtt g;
    g.rows.assign(k1, std::vector<GlweNtt>(p.levels));
    std::size_t idx = 0;
    for (auto& row : g.rows) {
      for (auto& level : row) {
        for (std::size_t c = 0; c < k1; ++c) {
          level.components.emplace_back(unpack(e[idx++].get<std::string>(), p.polynomial_size));
        }
      }
    }
    bsk.elements.push_back(std::move(g));
  }
  return bsk;
}

inline json to_json(const KeySwitchKey& ksk, const TfheParams& p) {
  json j = header("key_switch_key", p);
  j["input_dimension"] = ksk.input_dimension;
  j["output_dimension"] = ksk.output_dimension;
  j["log_base"] = ksk.log_base;
  j["levels"] = ksk.levels;
  j["negated"] = ksk.negated;
  json rows = json::array();
  for (const auto& r : ksk.rows) rows.push_back(pack(r.mask) + word_hex(r.body.value()));
  j["rows"] = std::move(rows);
  return j;
}

inline KeySwitchKey ksk_from_json(const json& j) {
  check_header(j, "key_switch_key");
  KeySwitchKey ksk;
  ksk.input_dimension = field_of<std::size_t>(j, "input_dimension");
  ksk.output_dimension = field_of<std::size_t>(j, "output_dimension");
  ksk.log_base = field_of<unsigned>(j, "log_base");
  ksk.levels = field_of<std::size_t>(j, "levels");
  ksk.negated = field_of<bool>(j, "negated");
  const json& rows = j.at("rows");
  if (!rows.is_array() || rows.size() != ksk.input_dimension * ksk.levels) throw ParseError("key-switching key row count");
  for (const auto& r : rows) {
    std::vector<FieldElement> words = unpack(r.get<std::string>(), ksk.output_dimension + 1);
    LweCiphertext ct;
    ct.body = words.back();
    words.pop_back();
    ct.mask = std::move(words);
    ksk.rows.push_back(std::move(ct));
  }
  return ksk;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw ParseError("write failed: " + path);
}

}  // namespace tfhe_proc::io
