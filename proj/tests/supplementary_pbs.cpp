// Supplementary, not an acceptance criterion: the end-to-end bootstrapping
// suite on the standard ring with key material sampled at 2^-30 instead of
// 2^-25. Fresh ciphertexts keep 2^-25.

#include <cmath>
#include <cstdio>

#include "pbs_suite.hpp"

int main() {
  tfhe_proc::TfheParams p = tfhe_proc::standard_params();
  p.key_sigma = 0x1.0p-30;
  std::printf("supplementary: key noise 2^%.0f, fresh noise 2^%.0f\n", std::log2(p.key_sigma), std::log2(p.sigma));
  const pbs_suite::Result r = pbs_suite::run(p, 100, 4004, true);
  std::printf("supplementary %s: %llu/%llu decode failures in %.0f s\n", r.failures() == 0 ? "PASS" : "FAIL",
              static_cast<unsigned long long>(r.failures()), static_cast<unsigned long long>(r.trials()), r.seconds);
  return r.failures() == 0 ? 0 : 1;
}
