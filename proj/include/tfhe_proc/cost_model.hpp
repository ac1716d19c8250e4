#pragma once

// Cycle, latency, and bandwidth model of the processor. Nothing here touches
// ciphertext values; the functional executor is independent of every setting.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/isa.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/params.hpp"

namespace tfhe_proc {

struct ExecConfig {
  std::size_t throughput = 2;    ///< T, coefficients per cycle
  double frequency_hz = 575e6;   ///< f
  std::size_t batch_size = 0;    ///< 0 selects the stored default
  double mem_bw = 0;             ///< bytes/s; 0 = not given

  void validate(const TfheParams& params) const {
    if (throughput == 0 || !std::has_single_bit(throughput)) {
      throw InvalidArgument("throughput must be a power of two");
    }
    if (throughput > params.polynomial_size) {
      throw InvalidArgument("throughput must not exceed the polynomial size");
    }
    if (!(frequency_hz > 0)) throw InvalidArgument("frequency must be positive");
    if (mem_bw < 0) throw InvalidArgument("memory bandwidth must be non-negative");
  }
};

/// A published configuration with its reference figures.
struct ReferenceRow {
  const char* param_set;
  std::size_t throughput;
  double frequency_mhz;
  double pbs_per_s;      ///< published PBS/s (64-bit)
  double delay_ms;       ///< published delay
  std::size_t batch;     ///< batch size back-solved from the delay column
};

/// Standard set at T = 2..32 and the large set at T = 8.
inline const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {"standard", 2, 575, 1123, 2.67, 3},  {"standard", 4, 525, 2050, 1.95, 4},
      {"standard", 8, 450, 3516, 1.42, 5},  {"standard", 16, 400, 6250, 0.96, 6},
      {"standard", 32, 325, 10156, 0.88, 9}, {"large", 8, 400, 122, 25, 3},
  };
  return rows;
}

/// Published 1024-point NTT figures at T = 2.
struct NttReference {
  double frequency_mhz = 600;
  double ntts_per_ms = 1172;
  double latency_cycles = 700;
};

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

/// Cycles per blind-rotation iteration: k+1 polynomials streamed at N/T each.
inline std::uint64_t iteration_cycles(const TfheParams& params, const ExecConfig& cfg) {
  return (params.glwe_dimension + 1) * ceil_div(params.polynomial_size, cfg.throughput);
}

/// Steady-state cycles between PBS completions, n (k+1) ceil(N/T).
inline std::uint64_t pbs_cycle_model(const TfheParams& params, const ExecConfig& cfg) {
  cfg.validate(params);
  return params.lwe_dimension * iteration_cycles(params, cfg);
}

inline double pbs_per_second(const TfheParams& params, const ExecConfig& cfg) {
  return cfg.frequency_hz / static_cast<double>(pbs_cycle_model(params, cfg));
}

/// Bytes of one transform-domain GGSW element, (k+1)^2 l N 64-bit words.
inline std::uint64_t ggsw_element_bytes(const TfheParams& params) {
  const std::uint64_t k1 = params.glwe_dimension + 1;
  return k1 * k1 * params.levels * params.polynomial_size * 8;
}

/// Bytes of the key-switching key, kN l_ks LWE rows of n+1 words.
inline std::uint64_t ksk_bytes(const TfheParams& params) {
  return params.extracted_dimension() * params.ks_levels * (params.lwe_dimension + 1) * 8;
}

/// Smallest batch b for which one GGSW element loads within b iterations.
inline std::size_t batch_schedule(const TfheParams& params, const ExecConfig& cfg, double bsk_element_bytes,
                                  double mem_bw) {
  if (!(mem_bw > 0)) throw InvalidArgument("memory bandwidth must be positive");
  if (std::isinf(mem_bw)) return 1;
  const double window_s = static_cast<double>(iteration_cycles(params, cfg)) / cfg.frequency_hz;
  const double b = std::ceil(bsk_element_bytes / mem_bw / window_s);
  return b < 1 ? 1 : static_cast<std::size_t>(b);
}

/// Bandwidth that reproduces batch b: midway (in batch units) between the
/// thresholds for b - 1 and b, so recomputation is robust to rounding.
inline double implied_bandwidth(const TfheParams& params, const ExecConfig& cfg, std::size_t batch) {
  const double window_s = static_cast<double>(iteration_cycles(params, cfg)) / cfg.frequency_hz;
  const double denom = batch > 1 ? static_cast<double>(batch) - 0.5 : 1.0;
  return static_cast<double>(ggsw_element_bytes(params)) / (denom * window_s);
}

inline std::optional<ReferenceRow> find_reference(const TfheParams& params, const ExecConfig& cfg) {
  for (const auto& row : reference_rows()) {
    const TfheParams ref = std::string(row.param_set) == "large" ? large_params() : standard_params();
    if (ref.lwe_dimension == params.lwe_dimension && ref.polynomial_size == params.polynomial_size &&
        ref.glwe_dimension == params.glwe_dimension && ref.levels == params.levels &&
        ref.log_base == params.log_base && row.throughput == cfg.throughput &&
        std::abs(row.frequency_mhz * 1e6 - cfg.frequency_hz) < 0.5) {
      return row;
    }
  }
  return std::nullopt;
}

/// Internal bandwidth used when neither a batch nor a table row is available.
inline constexpr double kDefaultMemBw = 39.0e9;

/// Batch resolution order: explicit batch, explicit bandwidth, stored table, default bandwidth.
inline std::size_t resolve_batch(const TfheParams& params, const ExecConfig& cfg) {
  if (cfg.batch_size > 0) return cfg.batch_size;
  const double bytes = static_cast<double>(ggsw_element_bytes(params));
  if (cfg.mem_bw > 0) return batch_schedule(params, cfg, bytes, cfg.mem_bw);
  if (auto row = find_reference(params, cfg)) return row->batch;
  return batch_schedule(params, cfg, bytes, kDefaultMemBw);
}

/// Pipeline fill of one forward and one inverse transform.
inline std::uint64_t pbs_fill_cycles(const TfheParams& params, const ExecConfig& cfg) {
  const StageModel m = stage_schedule(NttConfig{params.polynomial_size, cfg.throughput});
  return 2 * m.fill_cycles;
}

struct LatencyReport {
  std::size_t batch = 1;
  double latency_ms = 0;            ///< batch * interval / f
  double fill_us = 0;               ///< transform pipeline fill, reported separately
  double latency_with_fill_ms = 0;
};

inline LatencyReport pbs_latency_model(const TfheParams& params, const ExecConfig& cfg) {
  LatencyReport r;
  r.batch = resolve_batch(params, cfg);
  const double interval = static_cast<double>(pbs_cycle_model(params, cfg));
  r.latency_ms = static_cast<double>(r.batch) * interval / cfg.frequency_hz * 1e3;
  r.fill_us = static_cast<double>(pbs_fill_cycles(params, cfg)) / cfg.frequency_hz * 1e6;
  r.latency_with_fill_ms = r.latency_ms + r.fill_us * 1e-3;
  return r;
}

/// Key-switch throughput matched to the PBS rate: ceil(T / n), padded up to a power of two.
inline std::size_t ks_throughput(const ExecConfig& cfg, const TfheParams& params) {
  const std::uint64_t raw = ceil_div(cfg.throughput, params.lwe_dimension);
  return std::bit_ceil(raw < 1 ? std::uint64_t{1} : raw);
}

struct InternalBandwidth {
  double pbs_bytes_per_s = 0;
  double ks_bytes_per_s = 0;
  double total_bytes_per_s = 0;
  std::vector<std::string> assumptions;
};

inline InternalBandwidth internal_bandwidth(const TfheParams& params, const ExecConfig& cfg, double batch) {
  if (!(batch >= 1)) throw InvalidArgument("batch must be at least 1");
  InternalBandwidth bw;
  const double window_s = static_cast<double>(iteration_cycles(params, cfg)) / cfg.frequency_hz;
  bw.pbs_bytes_per_s =
      std::isinf(batch) ? 0.0 : static_cast<double>(ggsw_element_bytes(params)) / (batch * window_s);
  bw.ks_bytes_per_s = static_cast<double>(ksk_bytes(params)) * pbs_per_second(params, cfg);
  bw.total_bytes_per_s = bw.pbs_bytes_per_s + bw.ks_bytes_per_s;
  bw.assumptions = {
      "64-bit words for every key coefficient",
      "BSK streamed in the transform domain, (k+1)^2*l*N words per GGSW element",
      "one GGSW element per blind-rotation iteration, shared by a batch of ciphertexts",
      "KSK of kN*l_ks LWE rows with n+1 words each, read once per key switch",
      "key switches matched one-to-one with bootstraps, no KSK caching",
  };
  return bw;
}

/// Instruction-stream bits/s; keys are resident, so only instructions cross the host link.
inline double external_bandwidth(const TfheParams& params, double pbs_rate, double ks_per_pbs = 1.0,
                                 double muladd_per_pbs = 0.0) {
  if (pbs_rate < 0) throw InvalidArgument("PBS rate must be non-negative");
  const double base = static_cast<double>(instruction_base_bits(params.polynomial_size));
  const double bits_per_pbs = base + ks_per_pbs * base + muladd_per_pbs * (base + 64);
  return pbs_rate * bits_per_pbs;
}

/// Rate scaled by z = log2(DFR) / -64.
inline double dfr_normalize(double rate, double dfr_exponent) {
  if (!(dfr_exponent < 0)) throw InvalidArgument("DFR exponent must be negative");
  return rate * (dfr_exponent / -64.0);
}

/// Rounds `value` to the precision a printed integer carries: trailing zeros
/// of the printed figure are treated as not significant (5860 -> tens).
inline bool matches_printed(double value, long printed) {
  long unit = 1;
  for (long p = printed; p != 0 && p % 10 == 0; p /= 10) unit *= 10;
  return std::lround(value / static_cast<double>(unit)) * unit == printed;
}

struct CostReport {
  std::string param_set;
  std::size_t throughput = 0;
  double frequency_hz = 0;
  std::size_t batch = 0;
  std::uint64_t ntt_interval_cycles = 0;
  std::uint64_t ntt_latency_cycles = 0;
  double ntts_per_ms = 0;
  std::uint64_t pbs_interval_cycles = 0;
  double pbs_per_s = 0;
  double latency_ms = 0;
  double fill_us = 0;
  std::size_t ks_throughput = 0;
  double ext_bw_bits_per_s = 0;
  double int_bw_pbs_bytes_per_s = 0;
  double int_bw_ks_bytes_per_s = 0;
  double int_bw_total_bytes_per_s = 0;
  double ref_pbs_per_s = std::numeric_limits<double>::quiet_NaN();
  double ref_delay_ms = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> assumptions;
};

inline CostReport report(const TfheParams& params, const ExecConfig& cfg, std::string param_set = "") {
  cfg.validate(params);
  CostReport r;
  r.param_set = std::move(param_set);
  r.throughput = cfg.throughput;
  r.frequency_hz = cfg.frequency_hz;
  const NttCycleReport ntt = ntt_cycle_model(NttConfig{params.polynomial_size, cfg.throughput}, cfg.frequency_hz);
  r.ntt_interval_cycles = ntt.interval_cycles;
  r.ntt_latency_cycles = ntt.latency_cycles;
  r.ntts_per_ms = ntt.ntts_per_ms;
  r.pbs_interval_cycles = pbs_cycle_model(params, cfg);
  r.pbs_per_s = cfg.frequency_hz / static_cast<double>(r.pbs_interval_cycles);
  const LatencyReport lat = pbs_latency_model(params, cfg);
  r.batch = lat.batch;
  r.latency_ms = lat.latency_ms;
  r.fill_us = lat.fill_us;
  r.ks_throughput = ks_throughput(cfg, params);
  r.ext_bw_bits_per_s = external_bandwidth(params, r.pbs_per_s);
  const InternalBandwidth bw = internal_bandwidth(params, cfg, static_cast<double>(r.batch));
  r.int_bw_pbs_bytes_per_s = bw.pbs_bytes_per_s;
  r.int_bw_ks_bytes_per_s = bw.ks_bytes_per_s;
  r.int_bw_total_bytes_per_s = bw.total_bytes_per_s;
  r.assumptions = bw.assumptions;
  if (auto row = find_reference(params, cfg)) {
    r.ref_pbs_per_s = row->pbs_per_s;
    r.ref_delay_ms = row->delay_ms;
  }
  return r;
}

inline const std::vector<std::string>& cost_report_columns() {
  static const std::vector<std::string> cols = {
      "param_set",       "throughput",        "frequency_hz",      "batch",
      "ntt_interval_cycles", "ntt_latency_cycles", "ntts_per_ms",   "pbs_interval_cycles",
      "pbs_per_s",       "latency_ms",        "fill_us",           "ks_throughput",
      "ext_bw_bits_per_s", "int_bw_pbs_bytes_per_s", "int_bw_ks_bytes_per_s", "int_bw_total_bytes_per_s",
      "ref_pbs_per_s",   "ref_delay_ms",      "pbs_per_s_delta_pct", "delay_delta_pct",
  };
  return cols;
}

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double delta_pct(double model, double ref) {
  return std::isnan(ref) ? std::numeric_limits<double>::quiet_NaN() : (model - ref) / ref * 100.0;
}

}  // namespace detail

inline std::string to_csv_row(const CostReport& r) {
  using detail::fmt_double;
  std::ostringstream os;
  os << r.param_set << ',' << r.throughput << ',' << fmt_double(r.frequency_hz) << ',' << r.batch << ','
     << r.ntt_interval_cycles << ',' << r.ntt_latency_cycles << ',' << fmt_double(r.ntts_per_ms) << ','
     << r.pbs_interval_cycles << ',' << fmt_double(r.pbs_per_s) << ',' << fmt_double(r.latency_ms) << ','
     << fmt_double(r.fill_us) << ',' << r.ks_throughput << ',' << fmt_double(r.ext_bw_bits_per_s) << ','
     << fmt_double(r.int_bw_pbs_bytes_per_s) << ',' << fmt_double(r.int_bw_ks_bytes_per_s) << ','
     << fmt_double(r.int_bw_total_bytes_per_s) << ',' << fmt_double(r.ref_pbs_per_s) << ','
     << fmt_double(r.ref_delay_ms) << ',' << fmt_double(detail::delta_pct(r.pbs_per_s, r.ref_pbs_per_s)) << ','
     << fmt_double(detail::delta_pct(r.latency_ms, r.ref_delay_ms));
  return os.str();
}

inline std::string to_csv(const std::vector<CostReport>& reports) {
  std::string out;
  const auto& cols = cost_report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& r : reports) out += to_csv_row(r) + '\n';
  return out;
}

/// Parses the output of to_csv; assumptions are not part of the CSV.
inline std::vector<CostReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
  std::vector<CostReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != cost_report_columns().size()) throw InvalidArgument("CSV row has wrong field count");
    auto num = [](const std::string& s) {
      return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    CostReport r;
    r.param_set = f[0];
    r.throughput = std::stoull(f[1]);
    r.frequency_hz = num(f[2]);
    r.batch = std::stoull(f[3]);
    r.ntt_interval_cycles = std::stoull(f[4]);
    r.ntt_latency_cycles = std::stoull(f[5]);
    r.ntts_per_ms = num(f[6]);
    r.pbs_interval_cycles = std::stoull(f[7]);
    r.pbs_per_s = num(f[8]);
    r.latency_ms = num(f[9]);
    r.fill_us = num(f[10]);
    r.ks_throughput = std::stoull(f[11]);
    r.ext_bw_bits_per_s = num(f[12]);
    r.int_bw_pbs_bytes_per_s = num(f[13]);
    r.int_bw_ks_bytes_per_s = num(f[14]);
    r.int_bw_total_bytes_per_s = num(f[15]);
    r.ref_pbs_per_s = num(f[16]);
    r.ref_delay_ms = num(f[17]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tfhe_proc
