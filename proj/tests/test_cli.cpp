// Drives the tfhe-proc binary end to end on a small parameter set.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tfhe_proc/cost_model.hpp"
#include "tfhe_proc/io.hpp"
#include "tfhe_proc/registry.hpp"
#include "tfhe_proc/tfhe.hpp"

namespace fs = std::filesystem;
using namespace tfhe_proc;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(TFHE_PROC_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Shared fixture: one small parameter set and one key directory for the suite.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("tfhe_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    spit(dir_ / "sets.json",
         R"({"param_sets": {"tiny": {"lwe_dimension": 16, "polynomial_size": 256, "plaintext_modulus": 8}}})");
    keys_ = dir_ / "keys";
    const Result r = run(common() + " keygen --seed 3 --out " + keys_.string());
    ASSERT_EQ(r.code, 0) << r.out;
  }

  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string common() { return "--params-file " + (dir_ / "sets.json").string() + " --params tiny"; }

  static inline fs::path dir_;
  static inline fs::path keys_;
};

}  // namespace

TEST_F(Cli, ParamsListAndShow) {
  const Result list = run("params list");
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("standard"), std::string::npos);
  EXPECT_NE(list.out.find("large"), std::string::npos);

  const Result show = run("params show standard --json");
  ASSERT_EQ(show.code, 0) << show.out;
  const auto j = io::json::parse(show.out);
  EXPECT_EQ(j.at("delta").get<std::string>(), std::to_string((kModulus + 16) / 32));
  EXPECT_EQ(j.at("e_max").get<std::string>(), std::to_string((kModulus + 16) / 32 / 2));
  EXPECT_EQ(j.at("lwe_dimension"), 500);

  EXPECT_EQ(run(common() + " params show tiny").code, 0);
  EXPECT_EQ(run("params show nosuch").code, 1);
  EXPECT_EQ(run("params frobnicate").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST_F(Cli, KeygenIsDeterministic) {
  const fs::path again = dir_ / "keys_again";
  ASSERT_EQ(run(common() + " keygen --seed 3 --out " + again.string()).code, 0);
  for (const char* f : {"secret.json", "bsk.json", "ksk.json"}) {
    EXPECT_EQ(slurp(keys_ / f), slurp(again / f)) << f;
  }
  ASSERT_EQ(run(common() + " keygen --seed 4 --out " + (dir_ / "keys_other").string()).code, 0);
  EXPECT_NE(slurp(keys_ / "secret.json"), slurp(dir_ / "keys_other" / "secret.json"));
  const auto bsk = io::read_json_file((keys_ / "bsk.json").string());
  EXPECT_EQ(bsk.at("elements").size(), 16u);
  EXPECT_EQ(bsk.at("params").at("polynomial_size"), 256);
}

TEST_F(Cli, EncryptDecrypt) {
  const fs::path ct = dir_ / "ct7.json";
  ASSERT_EQ(run("encrypt --keys " + keys_.string() + " -m 7 --seed 9 --out " + ct.string()).code, 0);
  const Result dec = run("decrypt --keys " + keys_.string() + " " + ct.string());
  EXPECT_EQ(dec.code, 0);
  EXPECT_EQ(dec.out, "7\n");

  const fs::path ct2 = dir_ / "ct7b.json";
  ASSERT_EQ(run("encrypt --keys " + keys_.string() + " -m 7 --seed 9 --out " + ct2.string()).code, 0);
  EXPECT_EQ(slurp(ct), slurp(ct2));

  EXPECT_EQ(run("encrypt --keys " + keys_.string() + " -m 8 --out " + (dir_ / "x.json").string()).code, 1);

  spit(dir_ / "corrupt.json", "{\"format_version\": 1, \"type\": \"lwe_ciphertext\", \"mask\": 12");
  EXPECT_EQ(run("decrypt --keys " + keys_.string() + " " + (dir_ / "corrupt.json").string()).code, 2);
  EXPECT_EQ(run("decrypt --keys " + keys_.string() + " " + (dir_ / "missing.json").string()).code, 2);
}

TEST_F(Cli, PaddingOverflowIsDistinct) {
  LweSecretKey lwe;
  GlweSecretKey glwe;
  TfheParams p;
  io::secret_keys_from_json(io::read_json_file((keys_ / "secret.json").string()), lwe, glwe, p);
  // Noiseless trivial ciphertext in slot p + 1, the upper (padding) half.
  const LweCiphertext ct = lwe_trivial(FieldElement(p.delta()) * FieldElement(p.plaintext_modulus + 1), p.lwe_dimension);
  io::write_json_file((dir_ / "overflow.json").string(), io::to_json(ct, p));
  const Result r = run("decrypt --keys " + keys_.string() + " " + (dir_ / "overflow.json").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("padding overflow"), std::string::npos);
}

TEST_F(Cli, AssembleAndRun) {
  const fs::path ct = dir_ / "ct5.json";
  ASSERT_EQ(run("encrypt --keys " + keys_.string() + " -m 5 --seed 2 --out " + ct.string()).code, 0);
  spit(dir_ / "prog.s",
       "# identity bootstrap then key switch\n"
       "PBS 0x10, 0x1, 0x100\n"
       "KS  0x20, 0x10, 0x300\n");
  spit(dir_ / "manifest.json", R"({
    "objects": [
      {"addr": "0x1", "kind": "lwe", "file": "ct5.json"},
      {"addr": "0x100", "kind": "lut", "table": [0, 1, 2, 3, 4, 5, 6, 7]},
      {"addr": "0x300", "kind": "ksk"}
    ],
    "outputs": [{"addr": "0x20", "file": "out.json"}]
  })");

  const Result as = run("asm " + (dir_ / "prog.s").string() + " --keys " + keys_.string() + " --out " +
                        (dir_ / "prog.bin").string());
  ASSERT_EQ(as.code, 0) << as.out;
  // N = 256: 2 + 192 + 8 bits -> 26 bytes per instruction.
  EXPECT_EQ(fs::file_size(dir_ / "prog.bin"), 52u);

  const fs::path text_out = dir_ / "text_out", bin_out = dir_ / "bin_out";
  const std::string base = " --keys " + keys_.string() + " --manifest " + (dir_ / "manifest.json").string();
  const Result rt = run("run " + (dir_ / "prog.s").string() + base + " --out " + text_out.string());
  ASSERT_EQ(rt.code, 0) << rt.out;
  const Result rb = run("run " + (dir_ / "prog.bin").string() + base + " --out " + bin_out.string());
  ASSERT_EQ(rb.code, 0) << rb.out;
  EXPECT_EQ(slurp(text_out / "out.json"), slurp(bin_out / "out.json"));

  const Result dec = run("decrypt --keys " + keys_.string() + " " + (text_out / "out.json").string());
  EXPECT_EQ(dec.code, 0);
  EXPECT_EQ(dec.out, "5\n");
}

TEST_F(Cli, RunErrors) {
  ASSERT_EQ(run("encrypt --keys " + keys_.string() + " -m 1 --out " + (dir_ / "ct1.json").string()).code, 0);
  spit(dir_ / "m1.json", R"({"objects": [{"addr": 1, "kind": "lwe", "file": "ct1.json"}]})");
  const std::string base = " --keys " + keys_.string() + " --manifest " + (dir_ / "m1.json").string();

  spit(dir_ / "empty.s", "# nothing\n");
  EXPECT_EQ(run("run " + (dir_ / "empty.s").string() + base).code, 0);

  spit(dir_ / "unmapped.s", "PBS 2, 1, 0x999\n");
  const Result u = run("run " + (dir_ / "unmapped.s").string() + base);
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.out.find("unmapped address"), std::string::npos);

  spit(dir_ / "mismatch.s", "KS 2, 1, 1\n");
  EXPECT_EQ(run("run " + (dir_ / "mismatch.s").string() + base).code, 2);

  spit(dir_ / "bad.s", "JUMP 1, 2, 3\n");
  EXPECT_EQ(run("run " + (dir_ / "bad.s").string() + base).code, 2);
}

TEST_F(Cli, Bench) {
  EXPECT_EQ(run("bench --keys " + keys_.string() + " --trials 0").code, 1);
  const Result r = run("bench --keys " + keys_.string() + " --trials 3 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = io::json::parse(r.out);
  EXPECT_EQ(j.at("trials"), 3);
  EXPECT_TRUE(j.at("informational").get<bool>());
  EXPECT_GT(j.at("pbs_ms_mean").get<double>(), 0);
  EXPECT_GE(j.at("pbs_ms_std").get<double>(), 0);
}

TEST_F(Cli, Estimate) {
  const Result s = run("estimate --params standard -T 2 -f 575e6 --json");
  ASSERT_EQ(s.code, 0) << s.out;
  const auto js = io::json::parse(s.out);
  EXPECT_NEAR(js.at("pbs_per_s").get<double>(), 1123, 1123 * 0.005);
  EXPECT_EQ(js.at("batch"), 3);
  EXPECT_FALSE(js.at("assumptions").empty());

  const Result l = run("estimate --params large -T 8 -f 400e6 --json");
  ASSERT_EQ(l.code, 0) << l.out;
  EXPECT_NEAR(io::json::parse(l.out).at("pbs_per_s").get<double>(), 122, 122 * 0.005);

  const Result bad = run("estimate --params standard -T 3 -f 575e6");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("throughput must be a power of two"), std::string::npos);

  const Result text = run("estimate --params standard -T 32 -f 325e6");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("10156.25"), std::string::npos);

  const Result all = run("estimate --all --csv");
  ASSERT_EQ(all.code, 0);
  const auto rows = parse_csv(all.out);
  ASSERT_EQ(rows.size(), reference_rows().size());
  EXPECT_EQ(rows.back().param_set, "large");

  const Result batch = run("estimate --params standard -T 32 -f 325e6 --batch 1 --json");
  EXPECT_NEAR(io::json::parse(batch.out).at("latency_ms").get<double>(), 32000 / 325e6 * 1e3, 1e-12);
}

TEST_F(Cli, Selftest) {
  const Result ok = run("selftest");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
  const Result bad = run("selftest --corrupt-twiddle --json");
  EXPECT_EQ(bad.code, 3);
  const auto j = io::json::parse(bad.out.substr(0, bad.out.rfind(']') + 1));
  for (const auto& s : j) {
    EXPECT_EQ(s.at("ok").get<bool>(), s.at("suite") != "ntt_vs_schoolbook") << s.at("suite");
  }
}

TEST(Registry, ConfigFile) {
  ParamSetRegistry reg;
  EXPECT_GE(reg.names().size(), 2u);
  EXPECT_EQ(reg.get("large").polynomial_size, 16384u);
  EXPECT_THROW(reg.get("nosuch"), InvalidArgument);
  const fs::path f = fs::temp_directory_path() / ("tfhe_reg_" + std::to_string(::getpid()) + ".json");
  spit(f, R"({"param_sets": {"bad": {"polynomial_size": 1000}}})");
  EXPECT_THROW(reg.load_file(f.string()), io::ParseError);
  spit(f, R"({"param_sets": {"mine": {"lwe_dimension": 630}}})");
  reg.load_file(f.string());
  EXPECT_EQ(reg.get("mine").lwe_dimension, 630u);
  EXPECT_EQ(reg.get("mine").polynomial_size, 1024u);
  fs::remove(f);
}

TEST(Io, JsonRoundTrips) {
  TfheParams p = standard_params();
  p.lwe_dimension = 8;
  p.polynomial_size = 64;
  const KeySet keys = generate_keys(p, 5);
  CounterRng rng(5, 5);
  const LweCiphertext ct = encrypt_message(3, keys, rng);
  TfheParams back;
  EXPECT_EQ(io::lwe_from_json(io::json::parse(io::to_json(ct, p).dump()), &back), ct);
  EXPECT_EQ(back, p);

  const GlweCiphertext lut = build_lut(std::vector<std::uint64_t>(16, 2), p);
  EXPECT_EQ(io::glwe_from_json(io::to_json(lut, p)), lut);

  const BootstrapKey bsk = io::bsk_from_json(io::json::parse(io::to_json(keys.bsk, p).dump()));
  ASSERT_EQ(bsk.size(), keys.bsk.size());
  for (std::size_t i = 0; i < bsk.size(); ++i) {
    for (std::size_t r = 0; r < bsk.elements[i].rows.size(); ++r) {
      for (std::size_t l = 0; l < bsk.elements[i].rows[r].size(); ++l) {
        const auto& a = bsk.elements[i].rows[r][l].components;
        const auto& b = keys.bsk.elements[i].rows[r][l].components;
        ASSERT_EQ(a, b);
      }
    }
  }

  const KeySwitchKey ksk = io::ksk_from_json(io::to_json(keys.ksk, p));
  EXPECT_EQ(ksk.rows, keys.ksk.rows);
  EXPECT_EQ(ksk.levels, keys.ksk.levels);
  EXPECT_EQ(ksk.log_base, keys.ksk.log_base);

  LweSecretKey lwe;
  GlweSecretKey glwe;
  TfheParams sp;
  io::secret_keys_from_json(io::secret_keys_to_json(keys.lwe, keys.glwe, p), lwe, glwe, sp);
  EXPECT_EQ(lwe, keys.lwe);
  EXPECT_EQ(glwe, keys.glwe);

  io::json bad = io::to_json(ct, p);
  bad["body"] = "zz";
  EXPECT_THROW(io::lwe_from_json(bad), io::ParseError);
  bad = io::to_json(ct, p);
  bad["type"] = "glwe_ciphertext";
  EXPECT_THROW(io::lwe_from_json(bad), io::ParseError);
  bad = io::to_json(ct, p);
  bad["format_version"] = 2;
  EXPECT_THROW(io::lwe_from_json(bad), io::ParseError);
  // Word values at or above q are not field elements.
  EXPECT_THROW(io::parse_field("ffffffffffffffff"), io::ParseError);
}
