// tfhe-proc: key lifecycle, assembly, execution, benchmarking, and cost estimates.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 verification failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tfhe_proc/assembler.hpp"
#include "tfhe_proc/cost_model.hpp"
#include "tfhe_proc/executor.hpp"
#include "tfhe_proc/io.hpp"
#include "tfhe_proc/registry.hpp"
#include "tfhe_proc/selftest.hpp"
#include "tfhe_proc/tfhe.hpp"

namespace fs = std::filesystem;
using namespace tfhe_proc;
using io::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

class UsageError : public Error {
 public:
  using Error::Error;
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string params_name = "standard";
  std::string params_file;
  std::uint64_t seed = 1;
  std::string out;
  bool json_out = false;
};

ParamSetRegistry load_registry(const Globals& g) {
  ParamSetRegistry reg;
  if (!g.params_file.empty()) reg.load_file(g.params_file);
  return reg;
}

TfheParams lookup_params(const Globals& g) {
  const ParamSetRegistry reg = load_registry(g);
  if (!reg.contains(g.params_name)) throw UsageError("unknown parameter set '" + g.params_name + "'");
  return reg.get(g.params_name);
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---- keys on disk -----------------------------------------------------------

struct KeyFiles {
  TfheParams params;
  LweSecretKey lwe;
  GlweSecretKey glwe;
};

fs::path secret_path(const fs::path& dir) { return dir / "secret.json"; }
fs::path bsk_path(const fs::path& dir) { return dir / "bsk.json"; }
fs::path ksk_path(const fs::path& dir) { return dir / "ksk.json"; }

KeyFiles load_secret(const fs::path& dir) {
  KeyFiles k;
  io::secret_keys_from_json(io::read_json_file(secret_path(dir).string()), k.lwe, k.glwe, k.params);
  return k;
}

BootstrapKey load_bsk(const fs::path& dir, const TfheParams& params) {
  const json j = io::read_json_file(bsk_path(dir).string());
  if (io::check_header(j, "bootstrap_key") != params) throw io::ParseError("bootstrapping key params differ from secret key");
  return io::bsk_from_json(j);
}

KeySwitchKey load_ksk(const fs::path& dir, const TfheParams& params) {
  const json j = io::read_json_file(ksk_path(dir).string());
  if (io::check_header(j, "key_switch_key") != params) throw io::ParseError("key-switching key params differ from secret key");
  return io::ksk_from_json(j);
}

// ---- params -----------------------------------------------------------------

json params_summary(const std::string& name, const TfheParams& p) {
  json j = io::params_to_json(p);
  j["name"] = name;
  j["modulus"] = std::to_string(kModulus);
  j["delta"] = std::to_string(p.delta());
  j["e_max"] = std::to_string(p.e_max());
  return j;
}

int cmd_params(const Globals& g, const std::string& action, const std::string& name) {
  const ParamSetRegistry reg = load_registry(g);
  if (action == "list") {
    if (g.json_out) {
      json arr = json::array();
      for (const auto& n : reg.names()) arr.push_back(params_summary(n, reg.get(n)));
      print_json(arr);
    } else {
      for (const auto& n : reg.names()) {
        const TfheParams& p = reg.get(n);
        std::cout << n << ": n=" << p.lwe_dimension << " N=" << p.polynomial_size << " k=" << p.glwe_dimension
                  << " l=" << p.levels << " log_beta=" << p.log_base << " p=" << p.plaintext_modulus << '\n';
      }
    }
    return 0;
  }
  if (action != "show") throw UsageError("params expects 'list' or 'show <name>'");
  if (name.empty()) throw UsageError("params show needs a name");
  if (!reg.contains(name)) throw UsageError("unknown parameter set '" + name + "'");
  const TfheParams& p = reg.get(name);
  if (g.json_out) {
    print_json(params_summary(name, p));
    return 0;
  }
  std::cout << "name              " << name << '\n'
            << "q                 " << kModulus << '\n'
            << "n                 " << p.lwe_dimension << '\n'
            << "N                 " << p.polynomial_size << '\n'
            << "k                 " << p.glwe_dimension << '\n'
            << "l                 " << p.levels << '\n'
            << "log_beta          " << p.log_base << '\n'
            << "p                 " << p.plaintext_modulus << '\n'
            << "sigma             " << p.sigma << '\n'
            << "key_sigma         " << p.key_sigma << '\n'
            << "ks_levels         " << p.ks_levels << '\n'
            << "ks_log_base       " << p.ks_log_base << '\n'
            << "delta             " << p.delta() << '\n'
            << "e_max             " << p.e_max() << '\n';
  return 0;
}

// ---- keygen / encrypt / decrypt ---------------------------------------------

int cmd_keygen(const Globals& g, std::uint64_t plaintext_modulus) {
  TfheParams p = lookup_params(g);
  if (plaintext_modulus != 0) {
    p.plaintext_modulus = plaintext_modulus;
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (g.out.empty()) throw UsageError("keygen needs --out <dir>");
  const fs::path dir(g.out);
  fs::create_directories(dir);
  const KeySet keys = generate_keys(p, g.seed);
  io::write_json_file(secret_path(dir).string(), io::secret_keys_to_json(keys.lwe, keys.glwe, p));
  io::write_json_file(bsk_path(dir).string(), io::to_json(keys.bsk, p));
  io::write_json_file(ksk_path(dir).string(), io::to_json(keys.ksk, p));
  if (g.json_out) {
    print_json({{"dir", dir.string()}, {"bsk_elements", keys.bsk.size()}, {"ksk_rows", keys.ksk.rows.size()}});
  } else {
    std::cout << "wrote " << dir.string() << " (bsk elements: " << keys.bsk.size()
              << ", ksk rows: " << keys.ksk.rows.size() << ")\n";
  }
  return 0;
}

int cmd_encrypt(const Globals& g, const std::string& keys_dir, std::int64_t message) {
  const KeyFiles k = load_secret(keys_dir);
  if (message < 0 || static_cast<std::uint64_t>(message) >= k.params.plaintext_modulus) {
    throw UsageError("message must be in [0, " + std::to_string(k.params.plaintext_modulus) + ")");
  }
  if (g.out.empty()) throw UsageError("encrypt needs --out <file>");
  CounterRng rng(g.seed, 0xE7C);
  const LweCiphertext ct =
      lwe_encrypt_with(encode(static_cast<std::uint64_t>(message), k.params), k.lwe, k.params.noise_stddev(), rng);
  io::write_json_file(g.out, io::to_json(ct, k.params));
  return 0;
}

int cmd_decrypt(const Globals& g, const std::string& keys_dir, const std::string& in) {
  const KeyFiles k = load_secret(keys_dir);
  TfheParams ct_params;
  const LweCiphertext ct = io::lwe_from_json(io::read_json_file(in), &ct_params);
  if (ct_params != k.params) throw io::ParseError("ciphertext params differ from key params");
  const LweSecretKey key = ct.dimension() == k.lwe.size() ? k.lwe : flatten_key(k.glwe);
  const FieldElement phase = lwe_decrypt(ct, key);
  const std::uint64_t m = decode(phase, k.params);
  if (g.json_out) {
    print_json({{"message", m}, {"phase", std::to_string(phase.value())}});
  } else {
    std::cout << m << '\n';
  }
  return 0;
}

// ---- asm / run --------------------------------------------------------------

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_binary_program(const std::string& path, const std::string& format) {
  if (format == "bin") return true;
  if (format == "text") return false;
  if (!format.empty()) throw UsageError("--format must be 'text' or 'bin'");
  return fs::path(path).extension() == ".bin";
}

std::vector<Instruction> load_program(const std::string& path, const std::string& format, std::size_t n) {
  const std::string data = read_text(path);
  if (is_binary_program(path, format)) {
    const std::vector<std::uint8_t> bytes(data.begin(), data.end());
    return decode_program(bytes, n);
  }
  return parse_program(data, n);
}

TfheParams params_for_program(const Globals& g, const std::string& keys_dir) {
  return keys_dir.empty() ? lookup_params(g) : load_secret(keys_dir).params;
}

int cmd_asm(const Globals& g, const std::string& program_path, const std::string& keys_dir) {
  const TfheParams p = params_for_program(g, keys_dir);
  const std::vector<Instruction> program = parse_program(read_text(program_path), p.polynomial_size);
  const std::vector<std::uint8_t> bytes = encode_program(program, p.polynomial_size);
  if (g.out.empty()) throw UsageError("asm needs --out <file>");
  std::ofstream out(g.out, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io::ParseError("write failed: " + g.out);
  if (g.json_out) {
    print_json({{"instructions", program.size()}, {"bytes", bytes.size()},
                {"base_word_bits", instruction_base_bits(p.polynomial_size)}});
  } else {
    std::cout << program.size() << " instructions, " << bytes.size() << " bytes\n";
  }
  return 0;
}

std::uint64_t parse_addr(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    std::uint64_t out = 0;
    if (detail::parse_u64(v.get<std::string>(), out)) return out;
  }
  throw io::ParseError("bad address " + v.dump());
}

/// Manifest: {"objects": [{"addr", "kind": lwe|lut|ksk|scalar, "file" | "table" | "value"}],
///            "outputs": [{"addr", "file"}]}. Relative paths resolve against the manifest.
struct Manifest {
  ObjectStore store;
  std::vector<std::pair<std::uint64_t, fs::path>> outputs;
};

Manifest load_manifest(const std::string& path, const std::string& keys_dir, const fs::path& out_dir) {
  const json m = io::read_json_file(path);
  const fs::path base = fs::path(path).parent_path();
  const KeyFiles k = load_secret(keys_dir);
  Manifest man{ObjectStore(k.params, std::make_shared<const BootstrapKey>(load_bsk(keys_dir, k.params))), {}};
  KeySwitchKeyHandle ksk;
  if (!m.is_object() || !m.contains("objects") || !m.at("objects").is_array()) {
    throw io::ParseError("manifest needs an 'objects' array");
  }
  for (const auto& obj : m.at("objects")) {
    const std::uint64_t addr = parse_addr(obj.at("addr"));
    const std::string kind = io::field_of<std::string>(obj, "kind");
    if (kind == "lwe") {
      TfheParams cp;
      LweCiphertext ct = io::lwe_from_json(io::read_json_file((base / io::field_of<std::string>(obj, "file")).string()), &cp);
      if (cp != k.params) throw io::ParseError("ciphertext at " + ObjectStore::hex(addr) + " has different params");
      man.store.put(addr, std::move(ct));
    } else if (kind == "lut") {
      if (obj.contains("table")) {
        const auto table = io::field_of<std::vector<std::uint64_t>>(obj, "table");
        if (table.size() != k.params.plaintext_modulus) throw io::ParseError("LUT table must have p entries");
        man.store.put(addr, build_lut(table, k.params));
      } else {
        man.store.put(addr, io::glwe_from_json(io::read_json_file((base / io::field_of<std::string>(obj, "file")).string())));
      }
    } else if (kind == "ksk") {
      if (!ksk) ksk = std::make_shared<const KeySwitchKey>(load_ksk(keys_dir, k.params));
      man.store.put(addr, ksk);
    } else if (kind == "scalar") {
      man.store.put(addr, FieldElement::from_u64(parse_addr(obj.at("value"))));
    } else {
      throw io::ParseError("unknown object kind '" + kind + "'");
    }
  }
  if (m.contains("outputs")) {
    for (const auto& o : m.at("outputs")) {
      man.outputs.emplace_back(parse_addr(o.at("addr")), out_dir / io::field_of<std::string>(o, "file"));
    }
  }
  return man;
}

int cmd_run(const Globals& g, const std::string& program_path, const std::string& keys_dir,
            const std::string& manifest_path, const std::string& format) {
  if (keys_dir.empty()) throw UsageError("run needs --keys <dir>");
  if (manifest_path.empty()) throw UsageError("run needs --manifest <file>");
  const fs::path out_dir = g.out.empty() ? fs::path(manifest_path).parent_path() : fs::path(g.out);
  Manifest man = load_manifest(manifest_path, keys_dir, out_dir);
  const TfheParams params = man.store.params();
  const std::vector<Instruction> program = load_program(program_path, format, params.polynomial_size);
  execute(program, man.store);
  if (!man.outputs.empty()) fs::create_directories(out_dir);
  json written = json::array();
  for (const auto& [addr, file] : man.outputs) {
    io::write_json_file(file.string(), io::to_json(man.store.lwe(addr), params));
    written.push_back(file.string());
  }
  if (g.json_out) {
    print_json({{"executed", program.size()}, {"outputs", written}});
  } else {
    std::cout << "executed " << program.size() << " instructions\n";
    for (const auto& f : written) std::cout << "wrote " << f.get<std::string>() << '\n';
  }
  return 0;
}

// ---- bench ------------------------------------------------------------------

int cmd_bench(const Globals& g, const std::string& keys_dir, long trials) {
  if (trials <= 0) throw UsageError("trials must be positive");
  KeySet keys;
  if (keys_dir.empty()) {
    keys = generate_keys(lookup_params(g), g.seed);
  } else {
    const KeyFiles k = load_secret(keys_dir);
    keys.params = k.params;
    keys.lwe = k.lwe;
    keys.glwe = k.glwe;
    keys.bsk = load_bsk(keys_dir, k.params);
    keys.ksk = load_ksk(keys_dir, k.params);
  }
  const TfheParams& p = keys.params;
  std::vector<std::uint64_t> identity(p.plaintext_modulus);
  for (std::uint64_t m = 0; m < p.plaintext_modulus; ++m) identity[m] = m;
  const GlweCiphertext lut = build_lut(identity, p);
  const Decomposer dec = bootstrap_decomposer(p);
  CounterRng rng(g.seed, 0xBE0C);
  std::vector<double> pbs_ms, ks_ms;
  std::size_t correct = 0;
  for (long t = 0; t < trials; ++t) {
    const std::uint64_t m = static_cast<std::uint64_t>(t) % p.plaintext_modulus;
    const LweCiphertext ct = encrypt_message(m, keys, rng);
    const auto t0 = std::chrono::steady_clock::now();
    const LweCiphertext out = pbs(ct, lut, keys.bsk, dec);
    const auto t1 = std::chrono::steady_clock::now();
    const LweCiphertext ks = key_switch(out, keys.ksk);
    const auto t2 = std::chrono::steady_clock::now();
    pbs_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    ks_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
    if (decode_slot(lwe_decrypt(ks, keys.lwe), p) == m) ++correct;
  }
  auto stats = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair{mean, sd};
  };
  const auto [pm, ps] = stats(pbs_ms);
  const auto [km, kstd] = stats(ks_ms);
  if (g.json_out) {
    print_json({{"informational", true},
                {"trials", trials},
                {"pbs_ms_mean", pm},
                {"pbs_ms_std", ps},
                {"ks_ms_mean", km},
                {"ks_ms_std", kstd},
                {"pbs_per_s", 1000.0 / pm},
                {"decoded_correctly", correct}});
  } else {
    std::cout << "software PBS (informational, single thread)\n"
              << "  trials      " << trials << '\n'
              << "  PBS         " << fixed(pm, 2) << " +/- " << fixed(ps, 2) << " ms  (" << fixed(1000.0 / pm, 1)
              << " PBS/s)\n"
              << "  key switch  " << fixed(km, 2) << " +/- " << fixed(kstd, 2) << " ms\n"
              << "  decoded     " << correct << "/" << trials << '\n';
  }
  return 0;
}

// ---- estimate ---------------------------------------------------------------

json report_json(const CostReport& r) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return json{{"param_set", r.param_set},
              {"throughput", r.throughput},
              {"frequency_hz", r.frequency_hz},
              {"batch", r.batch},
              {"ntt_interval_cycles", r.ntt_interval_cycles},
              {"ntt_latency_cycles", r.ntt_latency_cycles},
              {"ntts_per_ms", r.ntts_per_ms},
              {"pbs_interval_cycles", r.pbs_interval_cycles},
              {"pbs_per_s", r.pbs_per_s},
              {"latency_ms", r.latency_ms},
              {"fill_us", r.fill_us},
              {"ks_throughput", r.ks_throughput},
              {"ext_bw_bits_per_s", r.ext_bw_bits_per_s},
              {"int_bw_pbs_bytes_per_s", r.int_bw_pbs_bytes_per_s},
              {"int_bw_ks_bytes_per_s", r.int_bw_ks_bytes_per_s},
              {"int_bw_total_bytes_per_s", r.int_bw_total_bytes_per_s},
              {"ref_pbs_per_s", num(r.ref_pbs_per_s)},
              {"ref_delay_ms", num(r.ref_delay_ms)},
              {"assumptions", r.assumptions}};
}

void print_report_text(const CostReport& r) {
  auto ref = [](double model, double published, int digits) {
    if (std::isnan(published)) return std::string();
    return "   (published " + fixed(published, digits) + ", delta " + fixed((model - published) / published * 100.0, 2) + "%)";
  };
  std::cout << "configuration     " << (r.param_set.empty() ? "custom" : r.param_set) << ", T=" << r.throughput
            << ", f=" << fixed(r.frequency_hz / 1e6, 1) << " MHz, batch " << r.batch << '\n'
            << "NTT interval      " << r.ntt_interval_cycles << " cycles, " << fixed(r.ntts_per_ms, 1)
            << " NTTs/ms, latency " << r.ntt_latency_cycles << " cycles\n"
            << "PBS interval      " << r.pbs_interval_cycles << " cycles\n"
            << "PBS/s             " << fixed(r.pbs_per_s, 2) << ref(r.pbs_per_s, r.ref_pbs_per_s, 0) << '\n'
            << "latency           " << fixed(r.latency_ms, 3) << " ms" << ref(r.latency_ms, r.ref_delay_ms, 2)
            << "  (+" << fixed(r.fill_us, 2) << " us pipeline fill)\n"
            << "KS throughput     " << r.ks_throughput << " coefficients/cycle\n"
            << "external bw       " << fixed(r.ext_bw_bits_per_s / 1e6, 3) << " Mbit/s\n"
            << "internal bw       PBS " << fixed(r.int_bw_pbs_bytes_per_s / 1e9, 2) << " GB/s, KS "
            << fixed(r.int_bw_ks_bytes_per_s / 1e9, 2) << " GB/s, total "
            << fixed(r.int_bw_total_bytes_per_s / 1e9, 2) << " GB/s\n"
            << "assumptions\n";
  for (const auto& a : r.assumptions) std::cout << "  - " << a << '\n';
}

int cmd_estimate(const Globals& g, std::size_t throughput, double freq, std::size_t batch, double mem_bw, bool all,
                 bool csv) {
  std::vector<CostReport> reports;
  if (all) {
    for (const auto& row : reference_rows()) {
      const TfheParams p = std::string(row.param_set) == "large" ? large_params() : standard_params();
      ExecConfig cfg{row.throughput, row.frequency_mhz * 1e6, 0, 0};
      reports.push_back(report(p, cfg, row.param_set));
    }
  } else {
    const TfheParams p = lookup_params(g);
    ExecConfig cfg{throughput, freq, batch, mem_bw};
    try {
      cfg.validate(p);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    reports.push_back(report(p, cfg, g.params_name));
  }
  if (csv) {
    std::cout << to_csv(reports);
  } else if (g.json_out) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    print_json(all ? arr : arr[0]);
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) std::cout << '\n';
      print_report_text(reports[i]);
    }
  }
  return 0;
}

// ---- selftest ---------------------------------------------------------------

int cmd_selftest(const Globals& g, bool corrupt) {
  selftest::Options opt;
  opt.seed = g.seed;
  opt.corrupt_twiddle = corrupt;
  const auto results = selftest::run_all(opt);
  bool ok = true;
  if (g.json_out) {
    json arr = json::array();
    for (const auto& s : results) {
      arr.push_back({{"suite", s.name}, {"ok", s.result.ok}, {"cases", s.result.cases},
                     {"failures", s.result.failures}, {"seconds", s.seconds}, {"detail", s.result.detail}});
      ok = ok && s.result.ok;
    }
    print_json(arr);
  } else {
    std::cout << std::left << std::setw(26) << "suite" << std::setw(10) << "cases" << std::setw(10) << "failures"
              << std::setw(10) << "seconds" << "result\n";
    for (const auto& s : results) {
      std::cout << std::left << std::setw(26) << s.name << std::setw(10) << s.result.cases << std::setw(10)
                << s.result.failures << std::setw(10) << fixed(s.seconds, 2) << (s.result.ok ? "PASS" : "FAIL");
      if (!s.result.ok) std::cout << "  " << s.result.detail;
      std::cout << '\n';
      ok = ok && s.result.ok;
    }
  }
  if (!ok) throw VerificationFailure("selftest failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Software model of a TFHE bootstrapping processor"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--params", g.params_name, "Parameter set name")->capture_default_str();
  app.add_option("--params-file", g.params_file, "JSON file with extra parameter sets");
  app.add_option("--seed", g.seed, "Deterministic seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory");
  app.add_flag("--json", g.json_out, "Machine-readable output");

  std::string action, name;
  auto* params = app.add_subcommand("params", "List or show parameter sets");
  params->add_option("action", action, "list | show")->required();
  params->add_option("name", name, "Parameter set to show");

  std::uint64_t pmod = 0;
  auto* keygen = app.add_subcommand("keygen", "Generate secret, bootstrapping, and key-switching keys");
  keygen->add_option("-p,--plaintext-modulus", pmod, "Override p");

  std::string keys_dir;
  std::int64_t message = 0;
  auto* encrypt = app.add_subcommand("encrypt", "Encrypt a message");
  encrypt->add_option("--keys", keys_dir, "Key directory")->required();
  encrypt->add_option("-m,--message", message, "Message in [0, p)")->required();

  std::string in_file;
  auto* decrypt = app.add_subcommand("decrypt", "Decrypt and decode a ciphertext");
  decrypt->add_option("--keys", keys_dir, "Key directory")->required();
  decrypt->add_option("input", in_file, "Ciphertext file")->required();

  std::string program_path, manifest, format;
  auto* asmc = app.add_subcommand("asm", "Assemble a text program into the binary instruction stream");
  asmc->add_option("program", program_path, "Program file")->required();
  asmc->add_option("--keys", keys_dir, "Take params from a key directory");

  auto* run = app.add_subcommand("run", "Execute a program against a manifest of stored objects");
  run->add_option("program", program_path, "Program file (.bin = binary)")->required();
  run->add_option("--keys", keys_dir, "Key directory")->required();
  run->add_option("--manifest", manifest, "Object manifest")->required();
  run->add_option("--format", format, "text | bin (default: by extension)");

  long trials = 10;
  auto* bench = app.add_subcommand("bench", "Measure software PBS throughput (informational)");
  bench->add_option("--keys", keys_dir, "Key directory (default: generate from --params/--seed)");
  bench->add_option("--trials", trials, "Number of bootstraps")->capture_default_str();

  std::size_t throughput = 2, batch = 0;
  double freq = 575e6, mem_bw = 0;
  bool all = false, csv = false;
  auto* estimate = app.add_subcommand("estimate", "Hardware cost model report");
  estimate->add_option("-T,--throughput", throughput, "Coefficients per cycle")->capture_default_str();
  estimate->add_option("-f,--frequency", freq, "Clock frequency in Hz")->capture_default_str();
  estimate->add_option("--batch", batch, "PBS batch size (default: stored table)");
  estimate->add_option("--mem-bw", mem_bw, "Internal bandwidth in bytes/s (derives the batch)");
  estimate->add_flag("--all", all, "Every published configuration");
  estimate->add_flag("--csv", csv, "CSV output");

  bool corrupt = false;
  auto* self = app.add_subcommand("selftest", "Run the oracle suites");
  self->add_flag("--corrupt-twiddle", corrupt, "Damage one twiddle factor (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*params) return cmd_params(g, action, name);
    if (*keygen) return cmd_keygen(g, pmod);
    if (*encrypt) return cmd_encrypt(g, keys_dir, message);
    if (*decrypt) return cmd_decrypt(g, keys_dir, in_file);
    if (*asmc) return cmd_asm(g, program_path, keys_dir);
    if (*run) return cmd_run(g, program_path, keys_dir, manifest, format);
    if (*bench) return cmd_bench(g, keys_dir, trials);
    if (*estimate) return cmd_estimate(g, throughput, freq, batch, mem_bw, all, csv);
    if (*self) return cmd_selftest(g, corrupt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PaddingOverflow& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
